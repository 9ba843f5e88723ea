#pragma once

// Bounded exhaustive search over (x, y, z, m, n) boxes with optional
// lemma-driven pruning, shard parallelism and resumable checkpoints.
// Enumeration order is lexicographic; shard merges are deterministic, so the
// final outcome is independent of the shard count and of kill-and-resume.

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "lucasphi/equation.hpp"
#include "lucasphi/report.hpp"

namespace lucasphi {

enum class ZMode { Window, Unbounded };
enum class SearchMode { Brute, Pruned };

inline const char* to_string(ZMode z) { return z == ZMode::Window ? "window" : "unbounded"; }
inline const char* to_string(SearchMode m) { return m == SearchMode::Brute ? "brute" : "pruned"; }

struct SearchBox {
    unsigned long x_max = 30;
    unsigned long m_max = 13;
    ZMode z_mode = ZMode::Window;
    unsigned long z_max = 0; // only for Unbounded
    bool coprime_mn_only = false;

    void validate() const {
        if (x_max < 2 || m_max < 1) throw DomainError("SearchBox requires x_max >= 2, m_max >= 1");
        if (z_mode == ZMode::Unbounded && z_max < 1)
            throw DomainError("SearchBox with unbounded z needs z_max >= 1");
    }

    json to_json() const {
        return {{"x_max", x_max},
                {"m_max", m_max},
                {"z_mode", to_string(z_mode)},
                {"z_max", z_max},
                {"coprime_mn_only", coprime_mn_only}};
    }

    static SearchBox from_json(const json& j) {
        SearchBox b;
        b.x_max = j.at("x_max").get<unsigned long>();
        b.m_max = j.at("m_max").get<unsigned long>();
        b.z_mode = j.at("z_mode").get<std::string>() == "window" ? ZMode::Window : ZMode::Unbounded;
        b.z_max = j.at("z_max").get<unsigned long>();
        b.coprime_mn_only = j.at("coprime_mn_only").get<bool>();
        return b;
    }

    bool operator==(const SearchBox& o) const {
        return x_max == o.x_max && m_max == o.m_max && z_mode == o.z_mode && z_max == o.z_max &&
               coprime_mn_only == o.coprime_mn_only;
    }
};

namespace detail {

inline json instance_to_json(const EquationInstance& inst) {
    return {{"x", inst.x.get_str()},
            {"y", inst.y.get_str()},
            {"z", inst.z.get_str()},
            {"m", inst.m},
            {"n", inst.n}};
}

inline EquationInstance instance_from_json(const json& j) {
    return EquationInstance(Natural(j.at("x").get<std::string>()),
                            Natural(j.at("y").get<std::string>()),
                            Natural(j.at("z").get<std::string>()), j.at("m").get<unsigned long>(),
                            j.at("n").get<unsigned long>());
}

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

} // namespace detail

struct SearchOutcome {
    std::vector<std::pair<EquationInstance, SolutionClass>> solutions;
    std::vector<EquationInstance> undecided;
    std::map<std::string, uint64_t> pruned_counts;
    uint64_t instances_scanned = 0;
    uint64_t rejected = 0;       // evaluated, not a solution
    uint64_t replay_checked = 0; // pruned instances re-evaluated as a spot check

    uint64_t pruned_total() const {
        uint64_t t = 0;
        for (const auto& [_, c] : pruned_counts) t += c;
        return t;
    }

    json to_json() const {
        json sols = json::array();
        for (const auto& [inst, cls] : solutions)
            sols.push_back({{"instance", detail::instance_to_json(inst)},
                            {"class", to_string(cls.kind)}});
        json und = json::array();
        for (const auto& inst : undecided) und.push_back(detail::instance_to_json(inst));
        return {{"solutions", sols},
                {"undecided", und},
                {"pruned_counts", pruned_counts},
                {"instances_scanned", instances_scanned},
                {"rejected", rejected},
                {"replay_checked", replay_checked}};
    }

    std::string digest() const { return detail::hex64(detail::fnv1a64(to_json().dump())); }
};

namespace detail {

/// Upper bounds for prod over the first k primes of (1 + 1/(p-1)), rounded up.
/// A value N with omega(N) distinct prime factors satisfies
/// prod_{p|N} (1 + 1/(p-1)) <= table[omega(N)], and omega(N) <= log2(N).
inline const std::vector<double>& phi_product_prefix() {
    static const std::vector<double> table = [] {
        std::vector<uint64_t> primes = sieve_primes(uint64_t{60000});
        std::vector<double> t;
        t.reserve(4097);
        t.push_back(1.0);
        double prod = 1.0;
        for (size_t i = 0; i < 4096 && i < primes.size(); ++i) {
            prod *= 1.0 + 1.0 / (static_cast<double>(primes[i]) - 1.0);
            t.push_back(prod * 1.0000000001);
        }
        return t;
    }();
    return table;
}

/// Name of the first pruning predicate that proves the candidate cannot be a
/// nontrivial solution, or nullptr if none applies. Only called for window
/// instances with m > n; every predicate is restricted to its regime
/// (reduced coprime exponents, both-odd core; the least-prime floor also
/// needs reduced x <= 80).
inline const char* try_prune(const EquationInstance& inst) {
    ReducedInstance red = reduce_to_coprime(inst);
    const EquationInstance& r = red.reduced;
    SplitPair split = split_gcd(r.x, r.y);
    if (!split.pair.both_odd()) return nullptr;
    const Natural& x1 = split.pair.x1;
    const Natural& y1 = split.pair.y1;

    if (r.m % 2 == 0) return "even_m";

    DivisorProfile prof = divisor_profile(Natural(r.m));
    unsigned long dm = to_ulong_checked(prof.divisor_count, "d(m)");

    for (const Natural& q : prof.prime_divisors)
        if (mpz_divisible_p(Natural(x1 - y1).get_mpz_t(), q.get_mpz_t()))
            return "q_divides_core_difference";

    if (prof.least_prime) {
        Natural cap = 2 * std::max(*prof.least_prime, r.x);
        if (prof.divisor_count >= cap) return "divisor_count_bound";
    }

    for (const auto& [q, alpha] : prof.valuations) {
        unsigned long required = alpha * dm / 2;
        if (mpz_divisible_p(r.z.get_mpz_t(), q.get_mpz_t())) {
            if (required == 0) continue;
            required -= 1;
        }
        if (required == 0) continue;
        Natural mod = pow_natural(q, required);
        Natural e = q - 1;
        if (powmod(x1, e, mod) != powmod(y1, e, mod)) return "prime_power_divisibility";
    }

    Natural value = r.z * lucas_quotient(r.x, r.y, r.m);
    size_t omega_cap = mpz_sizeinbase(value.get_mpz_t(), 2);
    const std::vector<double>& table = phi_product_prefix();
    if (omega_cap < table.size()) {
        if (mpz_cmp_d(r.x.get_mpz_t(), table[omega_cap]) >= 0) return "phi_product_bound";
    }

    if (r.x <= 80 && prof.least_prime && *prof.least_prime < 173)
        return "least_prime_factor_floor";

    return nullptr;
}

struct StratumResult {
    unsigned long x = 0, y = 0;
    SearchOutcome delta;
    EquationInstance cursor{2, 1, 1, 1, 1};

    json to_json(unsigned shard_id) const {
        json counts = {{"instances_scanned", delta.instances_scanned},
                       {"rejected", delta.rejected},
                       {"replay_checked", delta.replay_checked},
                       {"pruned", delta.pruned_counts}};
        json sols = json::array();
        for (const auto& [inst, cls] : delta.solutions)
            sols.push_back({{"instance", instance_to_json(inst)}, {"class", to_string(cls.kind)}});
        json und = json::array();
        for (const auto& inst : delta.undecided) und.push_back(instance_to_json(inst));
        return {{"shard_id", shard_id},
                {"cursor", instance_to_json(cursor)},
                {"partial_counts", counts},
                {"solutions", sols},
                {"undecided", und}};
    }

    static StratumResult from_json(const json& j) {
        StratumResult r;
        r.cursor = instance_from_json(j.at("cursor"));
        r.x = to_ulong_checked(r.cursor.x, "cursor.x");
        r.y = to_ulong_checked(r.cursor.y, "cursor.y");
        const json& counts = j.at("partial_counts");
        r.delta.instances_scanned = counts.at("instances_scanned").get<uint64_t>();
        r.delta.rejected = counts.at("rejected").get<uint64_t>();
        r.delta.replay_checked = counts.at("replay_checked").get<uint64_t>();
        for (auto it = counts.at("pruned").begin(); it != counts.at("pruned").end(); ++it)
            r.delta.pruned_counts[it.key()] = it.value().get<uint64_t>();
        for (const auto& s : j.at("solutions")) {
            SolutionKind kind = s.at("class").get<std::string>() == "trivial"
                                    ? SolutionKind::Trivial
                                    : SolutionKind::NontrivialSolution;
            r.delta.solutions.emplace_back(instance_from_json(s.at("instance")),
                                           SolutionClass{kind, {}});
        }
        for (const auto& u : j.at("undecided")) r.delta.undecided.push_back(instance_from_json(u));
        return r;
    }
};

/// Exhaustively classify one (x, y) stratum in lexicographic (z, m, n) order.
inline StratumResult scan_stratum(unsigned long x, unsigned long y, const SearchBox& box,
                                  SearchMode mode, const Budget& budget, FactorCache& cache) {
    StratumResult res;
    res.x = x;
    res.y = y;
    SearchOutcome& out = res.delta;
    Natural z_hi = box.z_mode == ZMode::Window ? Natural(x) - y : Natural(box.z_max);
    for (Natural z = 1; z <= z_hi; ++z) {
        for (unsigned long m = 1; m <= box.m_max; ++m) {
            unsigned long n_hi = (m == 1) ? 1 : m - 1;
            for (unsigned long n = 1; n <= n_hi; ++n) {
                if (box.coprime_mn_only && std::gcd(m, n) != 1) continue;
                EquationInstance inst(x, y, z, m, n);
                res.cursor = inst;
                ++out.instances_scanned;
                if (mode == SearchMode::Pruned && box.z_mode == ZMode::Window && m > n) {
                    if (const char* predicate = try_prune(inst)) {
                        ++out.pruned_counts[predicate];
                        // deterministic ~1% replay: a pruned instance must
                        // never evaluate to a nontrivial solution
                        if (fnv1a64(inst.to_string()) % 100 == 0) {
                            ++out.replay_checked;
                            SolutionClass cls = classify(inst, budget, &cache);
                            if (cls.kind == SolutionKind::NontrivialSolution)
                                throw IntegrityError("pruning predicate '" +
                                                     std::string(predicate) +
                                                     "' discarded a solution " + inst.to_string());
                        }
                        continue;
                    }
                }
                SolutionClass cls = classify(inst, budget, &cache);
                switch (cls.kind) {
                case SolutionKind::Trivial:
                case SolutionKind::NontrivialSolution:
                    out.solutions.emplace_back(std::move(inst), cls);
                    break;
                case SolutionKind::Undecided: out.undecided.push_back(std::move(inst)); break;
                case SolutionKind::NotSolution: ++out.rejected; break;
                }
            }
        }
    }
    return res;
}

inline void merge_outcome(SearchOutcome& total, const SearchOutcome& delta) {
    total.solutions.insert(total.solutions.end(), delta.solutions.begin(), delta.solutions.end());
    total.undecided.insert(total.undecided.end(), delta.undecided.begin(), delta.undecided.end());
    for (const auto& [k, v] : delta.pruned_counts) total.pruned_counts[k] += v;
    total.instances_scanned += delta.instances_scanned;
    total.rejected += delta.rejected;
    total.replay_checked += delta.replay_checked;
}

} // namespace detail

/// Single-threaded exhaustive scan of the whole box.
inline SearchOutcome brute_force_search(const SearchBox& box, const Budget& budget = {}) {
    box.validate();
    SearchOutcome out;
    FactorCache cache;
    for (unsigned long x = 2; x <= box.x_max; ++x)
        for (unsigned long y = 1; y < x; ++y)
            detail::merge_outcome(out, detail::scan_stratum(x, y, box, SearchMode::Brute, budget,
                                                            cache).delta);
    return out;
}

/// Same box, same outcome, with lemma predicates eliminating candidates
/// before evaluation (window mode only; predicates are conditional on the
/// window hypothesis).
inline SearchOutcome pruned_search(const SearchBox& box, const Budget& budget = {}) {
    box.validate();
    SearchOutcome out;
    FactorCache cache;
    for (unsigned long x = 2; x <= box.x_max; ++x)
        for (unsigned long y = 1; y < x; ++y)
            detail::merge_outcome(out, detail::scan_stratum(x, y, box, SearchMode::Pruned, budget,
                                                            cache).delta);
    return out;
}

/// Sharded, checkpointable search. Strata are (x, y) pairs assigned
/// round-robin to shards; each stratum's delta is appended to the checkpoint
/// stream when it completes, and completed strata are skipped on resume.
/// The merged outcome is byte-identical regardless of shard count or resume.
inline SearchOutcome run_search(const SearchBox& box, SearchMode mode, unsigned shards = 1,
                                const std::optional<std::string>& checkpoint_path = std::nullopt,
                                const Budget& budget = {}) {
    box.validate();
    if (shards < 1) throw DomainError("run_search requires shards >= 1");
    shards = std::min(shards, 64u);

    std::vector<std::pair<unsigned long, unsigned long>> strata;
    for (unsigned long x = 2; x <= box.x_max; ++x)
        for (unsigned long y = 1; y < x; ++y) strata.emplace_back(x, y);

    // resume support
    std::map<std::pair<unsigned long, unsigned long>, detail::StratumResult> done;
    std::optional<std::string> recorded_digest;
    bool stream_loaded = false;
    if (checkpoint_path && std::filesystem::exists(*checkpoint_path) &&
        std::filesystem::file_size(*checkpoint_path) > 0) {
        stream_loaded = true;
        std::ifstream in(*checkpoint_path);
        std::string line;
        bool have_header = false;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw IntegrityError("corrupt checkpoint line " + std::to_string(line_no) + ": " +
                                     e.what());
            }
            if (j.contains("header")) {
                SearchBox recorded = SearchBox::from_json(j.at("box"));
                if (!(recorded == box) || j.at("mode").get<std::string>() != to_string(mode))
                    throw IntegrityError("checkpoint was written for a different search");
                have_header = true;
                continue;
            }
            if (j.contains("complete")) {
                recorded_digest = j.at("digest").get<std::string>();
                continue;
            }
            if (!have_header) throw IntegrityError("checkpoint stream is missing its header line");
            detail::StratumResult r = detail::StratumResult::from_json(j);
            done[{r.x, r.y}] = std::move(r);
        }
        if (!have_header) throw IntegrityError("checkpoint stream is missing its header line");
    }

    std::mutex writer_mutex; // single designated writer
    std::ofstream writer;
    if (checkpoint_path && !recorded_digest) {
        writer.open(*checkpoint_path, std::ios::app);
        if (!writer) throw IntegrityError("cannot open checkpoint file " + *checkpoint_path);
        if (!stream_loaded) { // a loaded stream already starts with its header
            json header = {{"header", true}, {"box", box.to_json()}, {"mode", to_string(mode)}};
            writer << header.dump() << "\n" << std::flush;
        }
    }

    std::map<std::pair<unsigned long, unsigned long>, detail::StratumResult> fresh_results;
    std::mutex results_mutex;
    std::exception_ptr worker_error;

    auto run_shard = [&](unsigned shard_id) {
        try {
            FactorCache cache;
            for (size_t i = shard_id; i < strata.size(); i += shards) {
                auto key = strata[i];
                if (done.count(key)) continue;
                detail::StratumResult r =
                    detail::scan_stratum(key.first, key.second, box, mode, budget, cache);
                {
                    std::lock_guard<std::mutex> lock(writer_mutex);
                    if (writer.is_open()) writer << r.to_json(shard_id).dump() << "\n" << std::flush;
                }
                std::lock_guard<std::mutex> lock(results_mutex);
                fresh_results[key] = std::move(r);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(results_mutex);
            if (!worker_error) worker_error = std::current_exception();
        }
    };

    if (shards == 1) {
        run_shard(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned s = 0; s < shards; ++s) pool.emplace_back(run_shard, s);
        for (auto& t : pool) t.join();
    }
    if (worker_error) std::rethrow_exception(worker_error);

    SearchOutcome out;
    for (const auto& key : strata) {
        auto it = done.find(key);
        if (it != done.end()) {
            detail::merge_outcome(out, it->second.delta);
            continue;
        }
        auto jt = fresh_results.find(key);
        if (jt == fresh_results.end())
            throw InternalError("run_search: stratum missing after scan");
        detail::merge_outcome(out, jt->second.delta);
    }

    std::string digest = out.digest();
    if (recorded_digest) {
        if (*recorded_digest != digest)
            throw IntegrityError("checkpoint digest mismatch: recorded " + *recorded_digest +
                                 ", recomputed " + digest);
    } else if (writer.is_open()) {
        json fin = {{"complete", true}, {"digest", digest}};
        writer << fin.dump() << "\n" << std::flush;
    }
    return out;
}

} // namespace lucasphi
