// Acceptance suite: runs every headline criterion end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "lucasphi/lucasphi.hpp"

using namespace lucasphi;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail, int64_t ms) {
    std::printf("[%s] criterion %2d: %s  (%s; %lld ms)\n", pass ? "PASS" : "FAIL", id,
                label.c_str(), detail.c_str(), static_cast<long long>(ms));
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename Fn> void criterion(int id, const std::string& label, Fn&& fn) {
    Stopwatch clock;
    bool pass = false;
    std::string detail;
    try {
        detail = fn(pass);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    report(id, label, pass, detail, clock.elapsed_ms());
}

std::vector<uint32_t> smallest_prime_factors(uint32_t n) {
    std::vector<uint32_t> spf(n + 1, 0);
    for (uint32_t i = 2; i <= n; ++i) {
        if (spf[i] != 0) continue;
        for (uint64_t j = i; j <= n; j += i)
            if (spf[j] == 0) spf[j] = i;
    }
    return spf;
}

uint64_t coprime_count_ie(uint64_t n, const std::vector<uint32_t>& spf) {
    std::vector<uint64_t> ps;
    uint64_t t = n;
    while (t > 1) {
        uint64_t p = spf[t];
        ps.push_back(p);
        while (t % p == 0) t /= p;
    }
    uint64_t count = 0;
    for (uint64_t mask = 0; mask < (uint64_t{1} << ps.size()); ++mask) {
        uint64_t d = 1;
        int bits = 0;
        for (size_t i = 0; i < ps.size(); ++i)
            if (mask & (uint64_t{1} << i)) {
                d *= ps[i];
                ++bits;
            }
        count += (bits % 2 == 0 ? 1 : -1) * static_cast<int64_t>(n / d);
    }
    return count;
}

std::set<std::string> solution_keys(const SearchOutcome& out) {
    std::set<std::string> keys;
    for (const auto& [inst, cls] : out.solutions) keys.insert(inst.to_string());
    return keys;
}

std::string fmt_margin(double m) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "min slack %.3g", m);
    return buf;
}

} // namespace

int main() {
    criterion(1, "no sixth-power hits: pairs <= 80, odd p < 173", [](bool& pass) {
        LemmaReport rep = verify_power_divisibility(80, 173, 6);
        uint64_t total = 0;
        for (const auto& w : rep.witnesses)
            if (w.contains("witness_total")) total = w["witness_total"].get<uint64_t>();
        pass = rep.status == Status::Pass && total == 0;
        return "witnesses=" + std::to_string(total);
    });

    criterion(2, "cube hits: none for x1 <= 9, at most two per pair to 80", [](bool& pass) {
        LemmaReport small = verify_power_divisibility(9, 173, 3);
        LemmaReport counts = verify_cube_count_bound(80, 173);
        uint64_t observed = 0;
        for (const auto& w : counts.witnesses)
            if (w.contains("observed_max")) observed = w["observed_max"].get<uint64_t>();
        pass = small.status == Status::Pass && counts.status == Status::Pass && observed <= 2;
        return "x1<=9 witnesses=0: " + std::string(small.passed() ? "yes" : "no") +
               ", per-pair max=" + std::to_string(observed);
    });

    criterion(3, "base-3 Wieferich: no cubes below 173, square set {11}", [](bool& pass) {
        LemmaReport rep = verify_base3_wieferich(173);
        json set;
        for (const auto& w : rep.witnesses)
            if (w.contains("square_level_set")) set = w["square_level_set"];
        pass = rep.status == Status::Pass && set == json::array({11});
        return "square set " + set.dump();
    });

    criterion(4, "prime reciprocal sums in both windows", [](bool& pass) {
        LemmaReport high = verify_prime_sum_window(286, 1000000, 0.2772);
        LemmaReport low = verify_prime_sum_window(80, 286, 0.2965);
        double m = std::min(*high.margin, *low.margin);
        pass = high.status == Status::Pass && low.status == Status::Pass && m > 1e-6 * 3.0;
        return fmt_margin(m);
    });

    criterion(5, "prime index products below 2, 1.56, 1.4 (exact)", [](bool& pass) {
        LemmaReport rep = verify_prime_products();
        pass = rep.status == Status::Pass;
        double v0 = rep.witnesses[0]["value_decimal"].get<double>();
        double v1 = rep.witnesses[1]["value_decimal"].get<double>();
        double v2 = rep.witnesses[2]["value_decimal"].get<double>();
        pass = pass && std::fabs(v0 - 1.88165) < 1e-4 && std::fabs(v1 - 1.55924) < 1e-4 &&
               std::fabs(v2 - 1.39028) < 1e-4;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "values %.4f, %.4f, %.4f", v0, v1, v2);
        return std::string(buf);
    });

    criterion(6, "phi-ratio minima (exact), incl. min 3phi(2z)/z = 8/5", [](bool& pass) {
        LemmaReport rep = verify_phi_ratio_bounds(80);
        bool min_ok = false;
        for (const auto& w : rep.witnesses)
            if (w.contains("expr") && w["expr"] == "3*phi(2z)/z" && w["bound"] == "1.59")
                min_ok = w["min"] == "8/5" && w["attained_at_z"] == 15;
        pass = rep.status == Status::Pass && min_ok;
        return std::string("all minima above bounds") + (min_ok ? ", 8/5 at z=15" : "");
    });

    criterion(7, "standalone constants, incl. 2/log78 < 0.4591", [](bool& pass) {
        LemmaReport consts = verify_standalone_constants();
        LemmaReport loglog = verify_loglog_submultiplicative(1000, 1.0);
        double corner = 0;
        for (const auto& w : loglog.witnesses)
            if (w.contains("corner")) corner = w["margin"].get<double>();
        pass = consts.status == Status::Pass && loglog.status == Status::Pass &&
               corner > 3e-5 && corner < 6e-5;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "constants min slack %.3g, corner margin %.3g",
                      *consts.margin, corner);
        return std::string(buf);
    });

    criterion(8, "Mersenne family positive control, 30 instances", [](bool& pass) {
        int held = 0, total = 0;
        for (unsigned long q : {2ul, 3ul, 5ul, 7ul, 13ul})
            for (unsigned long beta : {1ul, 2ul, 3ul})
                for (unsigned long u : {0ul, 1ul}) {
                    ++total;
                    EvalResult r = evaluate(mersenne_family(q, beta, u));
                    if (r.decided && r.holds) ++held;
                }
        pass = held == 30 && total == 30;
        return std::to_string(held) + "/" + std::to_string(total) + " hold";
    });

    // criteria 9 and 10 share the desk-box runs
    SearchBox desk;
    desk.x_max = 30;
    desk.m_max = 13;
    std::vector<SearchOutcome> brute_runs, pruned_runs;
    criterion(9, "desk-scale nonexistence: x<=30, m<=13, z window", [&](bool& pass) {
        pass = true;
        std::string detail;
        for (bool coprime : {false, true}) {
            SearchBox box = desk;
            box.coprime_mn_only = coprime;
            SearchOutcome out = run_search(box, SearchMode::Brute, 8);
            brute_runs.push_back(out);
            bool all_trivial = true;
            for (const auto& [inst, cls] : out.solutions)
                all_trivial &= (cls.kind == SolutionKind::Trivial);
            pass = pass && all_trivial && out.undecided.empty();
            detail += (coprime ? "gcd=1: " : "all (m,n): ") +
                      std::to_string(out.solutions.size()) + " trivial, " +
                      std::to_string(out.undecided.size()) + " undecided; ";
        }
        return detail + std::to_string(brute_runs[0].instances_scanned) + " scanned";
    });

    criterion(10, "oracle equivalence of pruned and brute search", [&](bool& pass) {
        pass = !brute_runs.empty();
        uint64_t replays = 0, pruned_total = 0;
        for (size_t i = 0; i < brute_runs.size(); ++i) {
            SearchBox box = desk;
            box.coprime_mn_only = (i == 1);
            SearchOutcome pruned = run_search(box, SearchMode::Pruned, 8);
            pruned_runs.push_back(pruned);
            pass = pass && solution_keys(pruned) == solution_keys(brute_runs[i]);
            pass = pass && pruned.undecided.size() == brute_runs[i].undecided.size();
            pass = pass && pruned.instances_scanned == brute_runs[i].instances_scanned;
            replays += pruned.replay_checked;
            pruned_total += pruned.pruned_total();
        }
        return "identical solution/undecided sets; pruned=" + std::to_string(pruned_total) +
               ", replayed=" + std::to_string(replays);
    });

    criterion(11, "property suites (totient, cyclotomic, ranks, laws)", [](bool& pass) {
        pass = true;
        std::string detail;

        // totient vs unit-count oracle to 1e5
        {
            const uint32_t N = 100000;
            std::vector<uint32_t> spf = smallest_prime_factors(N);
            bool ok = true;
            for (uint64_t n = 1; n <= N && ok; ++n)
                ok = euler_phi(factorize(Natural(static_cast<unsigned long>(n)))) ==
                     coprime_count_ie(n, spf);
            pass &= ok;
            detail += std::string("totient ") + (ok ? "ok" : "FAIL") + "; ";
        }
        // cyclotomic product identity
        {
            bool ok = true;
            for (unsigned long x1 = 2; x1 <= 20 && ok; ++x1)
                for (unsigned long y1 = 1; y1 < x1 && ok; ++y1) {
                    if (std::gcd(x1, y1) != 1) continue;
                    for (unsigned long m = 1; m <= 30 && ok; ++m) {
                        Natural prod = 1;
                        for (unsigned long d : detail::divisors_of(m))
                            prod *= cyclotomic_value(d, x1, y1);
                        ok = prod == pow_natural(Natural(x1), m) - pow_natural(Natural(y1), m);
                    }
                }
            pass &= ok;
            detail += std::string("cyclotomic ") + (ok ? "ok" : "FAIL") + "; ";
        }
        // rank properties
        {
            bool ok = true;
            for (unsigned long x1 = 2; x1 <= 20 && ok; ++x1)
                for (unsigned long y1 = 1; y1 < x1 && ok; ++y1) {
                    if (std::gcd(x1, y1) != 1) continue;
                    LucasPair pair(x1, y1);
                    for (uint64_t p : sieve_primes(uint64_t{200})) {
                        if (p == 2 || x1 % p == 0 || y1 % p == 0) continue;
                        Natural ell = rank_of_apparition(pair, p).ell;
                        ok = ok && mpz_divisible_p(Natural(p - 1).get_mpz_t(), ell.get_mpz_t());
                        for (unsigned long m = 1; m <= 50 && ok; ++m) {
                            bool div = powmod(Natural(x1), m, p) == powmod(Natural(y1), m, p);
                            ok = div == bool(mpz_divisible_p(Natural(m).get_mpz_t(),
                                                             ell.get_mpz_t()));
                        }
                    }
                }
            pass &= ok;
            detail += std::string("ranks ") + (ok ? "ok" : "FAIL") + "; ";
        }
        // Carmichael instances
        {
            LemmaReport rep = verify_carmichael(30, 25);
            bool ok = rep.status == Status::Pass && rep.skipped_entries() == 0;
            pass &= ok;
            detail += std::string("carmichael ") + (ok ? "ok" : "FAIL") + "; ";
        }
        // phi monotonicity
        {
            LemmaReport rep = verify_phi_product_monotone(300, 300);
            pass &= rep.status == Status::Pass;
            detail += std::string("phi-mono ") + (rep.passed() ? "ok" : "FAIL") + "; ";
        }
        // divisibility laws
        {
            LemmaReport rep = verify_divisibility_of_phi(10, 12);
            bool ok = rep.status == Status::Pass && rep.skipped_entries() == 0;
            pass &= ok;
            detail += std::string("divisibility ") + (ok ? "ok" : "FAIL");
        }
        return detail;
    });

    criterion(12, "determinism: shard count and kill-resume", [](bool& pass) {
        SearchBox box;
        box.x_max = 12;
        box.m_max = 7;
        SearchOutcome one = run_search(box, SearchMode::Pruned, 1);
        SearchOutcome eight = run_search(box, SearchMode::Pruned, 8);
        bool shard_ok = one.to_json().dump() == eight.to_json().dump();

        namespace fs = std::filesystem;
        std::string full = (fs::temp_directory_path() / "lucasphi_acc_full.jsonl").string();
        std::string part = (fs::temp_directory_path() / "lucasphi_acc_part.jsonl").string();
        std::remove(full.c_str());
        std::remove(part.c_str());
        SearchOutcome checkpointed = run_search(box, SearchMode::Pruned, 4, full);
        std::vector<std::string> lines;
        {
            std::ifstream in(full);
            std::string line;
            while (std::getline(in, line))
                if (!line.empty()) lines.push_back(line);
        }
        {
            std::ofstream out(part);
            for (size_t i = 0; i < lines.size() / 2; ++i) out << lines[i] << "\n";
        }
        SearchOutcome resumed = run_search(box, SearchMode::Pruned, 4, part);
        bool resume_ok = resumed.to_json().dump() == checkpointed.to_json().dump() &&
                         checkpointed.to_json().dump() == one.to_json().dump();
        std::remove(full.c_str());
        std::remove(part.c_str());
        pass = shard_ok && resume_ok;
        return std::string("shards 1==8: ") + (shard_ok ? "yes" : "no") +
               ", resume identical: " + (resume_ok ? "yes" : "no");
    });

    if (failures == 0)
        std::printf("acceptance: all 12 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
