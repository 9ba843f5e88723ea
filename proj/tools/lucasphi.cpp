// lucasphi: verification CLI. Exposes every lemma verifier, the bounded
// searches and ad-hoc evaluation with machine-readable reports.
// Exit status: 0 all requested checks pass (skips pass unless --strict),
// 1 any check fails, 2 usage/capacity/integrity errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lucasphi/lucasphi.hpp"

namespace lp = lucasphi;
using lp::json;

namespace {

struct Options {
    std::string format = "human";
    std::string output_path;
    unsigned threads = 0;
    bool strict = false;
    lp::Budget budget;
    bool budget_overridden = false;
};

unsigned resolve_threads(unsigned flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("LUCASPHI_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void emit(const Options& opt, const std::string& text) {
    if (!opt.output_path.empty()) {
        std::ofstream out(opt.output_path);
        if (!out) throw lp::CapacityError("cannot open output path " + opt.output_path);
        out << text << "\n";
        std::cerr << "report written to " << opt.output_path << "\n";
    } else {
        std::cout << text << "\n";
    }
}

std::string render_human(const lp::LemmaReport& rep) {
    std::string line = "[" + std::string(rep.status == lp::Status::Pass   ? "PASS"
                                         : rep.status == lp::Status::Fail ? "FAIL"
                                                                          : "SKIP") +
                       "] " + rep.lemma_id;
    if (rep.margin) line += "  margin=" + std::to_string(*rep.margin);
    line += "  elapsed=" + std::to_string(rep.elapsed_ms) + "ms";
    if (rep.status == lp::Status::Skipped) line += "  (" + rep.skip_reason + ")";
    if (rep.status == lp::Status::Fail) {
        for (const auto& w : rep.witnesses)
            if (w.at("kind") == "counterexample") {
                line += "\n  counterexample: " + w.dump();
                break;
            }
    }
    return line;
}

int exit_code_for(const std::vector<lp::LemmaReport>& reports, bool strict) {
    for (const auto& r : reports)
        if (r.status == lp::Status::Fail) return 1;
    if (strict)
        for (const auto& r : reports)
            if (r.status == lp::Status::Skipped) return 1;
    return 0;
}

void emit_reports(const Options& opt, const std::vector<lp::LemmaReport>& reports) {
    if (opt.format == "json") {
        if (reports.size() == 1) {
            emit(opt, reports.front().to_json().dump());
        } else {
            json arr = json::array();
            for (const auto& r : reports) arr.push_back(r.to_json());
            emit(opt, arr.dump());
        }
    } else {
        std::string text;
        for (const auto& r : reports) {
            if (!text.empty()) text += "\n";
            text += render_human(r);
        }
        emit(opt, text);
    }
}

/// Present default values for every verifier; individual flags override.
struct LemmaFlags {
    unsigned long x_max = 0, p_limit = 0, k = 0, n_max = 0, a_max = 0, b_max = 0;
    unsigned long t_min = 0, t_max = 0, big_x_max = 0, z_max = 0, x1 = 0, y1 = 0;
    unsigned long max_witnesses = 16;
    double constant = -1, grid_max = 0, grid_step = 0;
    std::vector<unsigned long> d_values;
    bool any_window_flag = false;
};

std::vector<lp::LemmaReport> run_lemma(const std::string& id, const LemmaFlags& f,
                                       const Options& opt) {
    auto or_default = [](unsigned long v, unsigned long dflt) { return v ? v : dflt; };
    if (id == "L4b")
        return {lp::verify_power_divisibility(or_default(f.x_max, 80), or_default(f.p_limit, 173),
                                              or_default(f.k, 6), f.max_witnesses)};
    if (id == "L4bcd")
        return {lp::verify_power_divisibility(or_default(f.x_max, 9), or_default(f.p_limit, 173),
                                              or_default(f.k, 3), f.max_witnesses)};
    if (id == "L4bcd-count")
        return {lp::verify_cube_count_bound(or_default(f.x_max, 80), or_default(f.p_limit, 173))};
    if (id == "W3") return {lp::verify_base3_wieferich(or_default(f.p_limit, 173))};
    if (id == "MERTENS") {
        if (f.any_window_flag)
            return {lp::verify_prime_sum_window(or_default(f.t_min, 286),
                                                or_default(f.t_max, 1000000),
                                                f.constant >= 0 ? f.constant : 0.2772)};
        return {lp::verify_prime_sum_window(286, 1000000, 0.2772),
                lp::verify_prime_sum_window(80, 286, 0.2965)};
    }
    if (id == "BT") {
        std::vector<uint64_t> ds(f.d_values.begin(), f.d_values.end());
        if (ds.empty()) ds = {2, 3, 5, 41};
        return {lp::verify_brun_titchmarsh(ds, or_default(f.big_x_max, 100000))};
    }
    if (id == "PHIQ")
        return {lp::verify_phi_quotient_bound(
            static_cast<uint32_t>(or_default(f.n_max, 1000000)))};
    if (id == "PRODUCTS") return {lp::verify_prime_products()};
    if (id == "PHIRATIO")
        return {lp::verify_phi_ratio_bounds(static_cast<uint32_t>(or_default(f.z_max, 80)))};
    if (id == "LOGLOG")
        return {lp::verify_loglog_submultiplicative(f.grid_max > 0 ? f.grid_max : 1000.0,
                                                    f.grid_step > 0 ? f.grid_step : 1.0)};
    if (id == "PHIMONO")
        return {lp::verify_phi_product_monotone(static_cast<uint32_t>(or_default(f.a_max, 300)),
                                                static_cast<uint32_t>(or_default(f.b_max, 300)))};
    if (id == "CARMICHAEL") {
        lp::Budget b = opt.budget_overridden ? opt.budget : lp::carmichael_default_budget();
        return {lp::verify_carmichael(or_default(f.x_max, 30), or_default(f.n_max, 25), b,
                                      resolve_threads(opt.threads))};
    }
    if (id == "GR")
        return {lp::verify_divisibility_of_phi(or_default(f.a_max, 10), or_default(f.n_max, 12),
                                               opt.budget)};
    if (id == "SD") {
        std::vector<unsigned long> ds = f.d_values;
        if (ds.empty()) ds = {41, 43, 45, 47, 49};
        lp::LucasPair pair{lp::Natural(or_default(f.x1, 3)), lp::Natural(or_default(f.y1, 1))};
        return {lp::lemma_report_sd(pair, ds, opt.budget)};
    }
    if (id == "CONSTANTS") return {lp::verify_standalone_constants()};
    throw lp::DomainError("unknown lemma id: " + id);
}

/// Reports carry the CLI-facing id; the verifier's own name stays in
/// parameters for context.
std::vector<lp::LemmaReport> run_lemma_as(const std::string& id, const LemmaFlags& f,
                                          const Options& opt) {
    std::vector<lp::LemmaReport> reports = run_lemma(id, f, opt);
    for (lp::LemmaReport& r : reports) {
        r.parameters["verifier"] = r.lemma_id;
        r.lemma_id = id;
    }
    return reports;
}

const std::vector<std::string> kAllLemmaIds = {
    "L4b",    "L4bcd",    "L4bcd-count", "W3",         "MERTENS", "BT", "PHIQ", "PRODUCTS",
    "PHIRATIO", "LOGLOG", "PHIMONO",     "CARMICHAEL", "GR",      "SD", "CONSTANTS"};

/// Wrap a search outcome as a report so `all` has one uniform verdict: in
/// window mode any nontrivial solution is a failure (the desk-scale
/// nonexistence claim), undecided instances downgrade to skipped.
lp::LemmaReport search_report(const lp::SearchBox& box, lp::SearchMode mode,
                              const lp::SearchOutcome& outcome, int64_t elapsed_ms) {
    lp::LemmaReport rep;
    rep.lemma_id = "desk_search";
    rep.parameters = box.to_json();
    rep.parameters["mode"] = to_string(mode);
    uint64_t trivial = 0, nontrivial = 0;
    for (const auto& [inst, cls] : outcome.solutions) {
        if (cls.kind == lp::SolutionKind::Trivial) {
            ++trivial;
            continue;
        }
        ++nontrivial;
        if (box.z_mode == lp::ZMode::Window)
            rep.add_counterexample({{"instance", lp::detail::instance_to_json(inst)}});
    }
    for (const auto& inst : outcome.undecided)
        rep.add_skipped_entry({{"instance", lp::detail::instance_to_json(inst)}},
                              "undecided under factorization budget");
    rep.add_info({{"instances_scanned", outcome.instances_scanned},
                  {"trivial_solutions", trivial},
                  {"nontrivial_solutions", nontrivial},
                  {"pruned_counts", outcome.pruned_counts},
                  {"replay_checked", outcome.replay_checked},
                  {"digest", outcome.digest()}});
    rep.elapsed_ms = elapsed_ms;
    return rep;
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"computational verification of the totient-Lucas equation "
                 "phi(z(x^m-y^m)/(x-y)) = z(x^n-y^n)/(x-y)"};
    app.require_subcommand(1);
    app.add_option("--format", opt.format, "output format: human|json")
        ->check(CLI::IsMember({"human", "json"}));
    app.add_option("--output", opt.output_path, "write the report to this path");
    app.add_option("--threads", opt.threads,
                   "worker threads (default: LUCASPHI_THREADS or hardware)");
    app.add_flag("--strict", opt.strict, "treat skipped/undecided results as failures");
    auto* trial_opt =
        app.add_option("--trial-limit", opt.budget.trial_limit, "trial-division prime limit");
    auto* rho_opt = app.add_option("--rho-iters", opt.budget.rho_iterations,
                                   "Pollard rho iteration budget per composite");

    // lemma
    auto* lemma_cmd = app.add_subcommand("lemma", "run one lemma verifier");
    lemma_cmd->fallthrough();
    std::string lemma_id;
    LemmaFlags lf;
    lemma_cmd->add_option("id", lemma_id, "lemma id")->required()->check(CLI::IsMember(kAllLemmaIds));
    lemma_cmd->add_option("--x-max", lf.x_max, "pair scan limit");
    lemma_cmd->add_option("--p-limit", lf.p_limit, "prime scan limit");
    lemma_cmd->add_option("--k", lf.k, "prime power exponent");
    lemma_cmd->add_option("--n-max", lf.n_max, "exponent/argument limit");
    lemma_cmd->add_option("--a-max", lf.a_max, "base limit");
    lemma_cmd->add_option("--b-max", lf.b_max, "second base limit");
    auto* tmin_opt = lemma_cmd->add_option("--t-min", lf.t_min, "window start");
    auto* tmax_opt = lemma_cmd->add_option("--t-max", lf.t_max, "window end");
    auto* const_opt = lemma_cmd->add_option("--constant", lf.constant, "window constant");
    lemma_cmd->add_option("--X-max", lf.big_x_max, "prime-count limit");
    lemma_cmd->add_option("--z-max", lf.z_max, "ratio scan limit");
    lemma_cmd->add_option("--grid-max", lf.grid_max, "grid upper end");
    lemma_cmd->add_option("--grid-step", lf.grid_step, "grid step");
    lemma_cmd->add_option("--d", lf.d_values, "divisor/modulus values");
    lemma_cmd->add_option("--x1", lf.x1, "coprime core x1");
    lemma_cmd->add_option("--y1", lf.y1, "coprime core y1");
    lemma_cmd->add_option("--max-witnesses", lf.max_witnesses, "witness cap per pair");

    // search
    auto* search_cmd = app.add_subcommand("search", "bounded exhaustive search");
    search_cmd->fallthrough();
    std::string mode_str = "pruned", z_str = "window", checkpoint;
    unsigned long sx_max = 30, sm_max = 13;
    unsigned shards = 1;
    bool coprime_only = false;
    search_cmd->add_option("--mode", mode_str, "brute|pruned")
        ->check(CLI::IsMember({"brute", "pruned"}));
    search_cmd->add_option("--x-max", sx_max, "x upper bound");
    search_cmd->add_option("--m-max", sm_max, "m upper bound");
    search_cmd->add_option("--z", z_str, "z range: window | max:N");
    search_cmd->add_option("--shards", shards, "parallel shards");
    search_cmd->add_option("--checkpoint", checkpoint, "checkpoint stream path");
    search_cmd->add_flag("--coprime-mn-only", coprime_only, "restrict to gcd(m,n)=1");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate one instance");
    eval_cmd->fallthrough();
    std::string ex, ey, ez;
    unsigned long em = 1, en = 1;
    eval_cmd->add_option("--x", ex)->required();
    eval_cmd->add_option("--y", ey)->required();
    eval_cmd->add_option("--z", ez)->required();
    eval_cmd->add_option("--m", em)->required();
    eval_cmd->add_option("--n", en)->required();

    // order
    auto* order_cmd = app.add_subcommand("order", "rank of apparition ell_p");
    order_cmd->fallthrough();
    std::string ox1, oy1, op;
    order_cmd->add_option("--x1", ox1)->required();
    order_cmd->add_option("--y1", oy1)->required();
    order_cmd->add_option("--p", op)->required();

    // factor-lucas
    auto* fl_cmd = app.add_subcommand("factor-lucas", "factor x1^m - y1^m cyclotomically");
    fl_cmd->fallthrough();
    std::string fx1, fy1;
    unsigned long fm = 1;
    fl_cmd->add_option("--x1", fx1)->required();
    fl_cmd->add_option("--y1", fy1)->required();
    fl_cmd->add_option("--m", fm)->required();

    // all
    auto* all_cmd = app.add_subcommand("all", "full verification suite with defaults");
    all_cmd->fallthrough();

    try {
        app.parse(argc, argv);
        opt.budget_overridden = trial_opt->count() > 0 || rho_opt->count() > 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*lemma_cmd) {
            lf.any_window_flag = tmin_opt->count() || tmax_opt->count() || const_opt->count();
            std::vector<lp::LemmaReport> reports = run_lemma_as(lemma_id, lf, opt);
            emit_reports(opt, reports);
            return exit_code_for(reports, opt.strict);
        }
        if (*search_cmd) {
            lp::SearchBox box;
            box.x_max = sx_max;
            box.m_max = sm_max;
            box.coprime_mn_only = coprime_only;
            if (z_str == "window") {
                box.z_mode = lp::ZMode::Window;
            } else if (z_str.rfind("max:", 0) == 0) {
                box.z_mode = lp::ZMode::Unbounded;
                box.z_max = std::stoul(z_str.substr(4));
            } else {
                throw lp::DomainError("--z must be 'window' or 'max:N'");
            }
            lp::SearchMode mode =
                mode_str == "brute" ? lp::SearchMode::Brute : lp::SearchMode::Pruned;
            lp::Stopwatch clock;
            lp::SearchOutcome outcome = lp::run_search(
                box, mode, shards,
                checkpoint.empty() ? std::nullopt : std::optional<std::string>(checkpoint),
                opt.budget);
            if (opt.format == "json") {
                json doc = {{"box", box.to_json()},
                            {"mode", to_string(mode)},
                            {"outcome", outcome.to_json()},
                            {"digest", outcome.digest()}};
                emit(opt, doc.dump());
            } else {
                lp::LemmaReport rep = search_report(box, mode, outcome, clock.elapsed_ms());
                emit(opt, render_human(rep));
            }
            bool nontrivial = false;
            for (const auto& [inst, cls] : outcome.solutions)
                nontrivial |= (cls.kind == lp::SolutionKind::NontrivialSolution);
            if (box.z_mode == lp::ZMode::Window && nontrivial) return 1;
            if (opt.strict && !outcome.undecided.empty()) return 1;
            return 0;
        }
        if (*eval_cmd) {
            lp::EquationInstance inst(lp::Natural(ex), lp::Natural(ey), lp::Natural(ez), em, en);
            lp::EvalResult r = lp::evaluate(inst, opt.budget);
            json doc = {{"instance", lp::detail::instance_to_json(inst)},
                        {"decided", r.decided},
                        {"lhs", r.lhs.get_str()},
                        {"rhs", r.rhs.get_str()},
                        {"holds", r.holds}};
            if (!r.decided) doc["reason"] = r.reason;
            if (opt.format == "json")
                emit(opt, doc.dump());
            else
                emit(opt, std::string(r.decided ? (r.holds ? "holds" : "does not hold")
                                                : "undecided") +
                              "  lhs=" + r.lhs.get_str() + " rhs=" + r.rhs.get_str());
            return r.decided ? 0 : (opt.strict ? 1 : 0);
        }
        if (*order_cmd) {
            lp::LucasPair pair{lp::Natural(ox1), lp::Natural(oy1)};
            lp::RankOfApparition rank = lp::rank_of_apparition(pair, lp::Natural(op), opt.budget);
            if (opt.format == "json")
                emit(opt, json{{"x1", ox1}, {"y1", oy1}, {"p", op}, {"ell", rank.ell.get_str()}}
                              .dump());
            else
                emit(opt, "ell_" + op + "(" + ox1 + "," + oy1 + ") = " + rank.ell.get_str());
            return 0;
        }
        if (*fl_cmd) {
            lp::LucasPair pair{lp::Natural(fx1), lp::Natural(fy1)};
            lp::PrimeFactorization f = lp::factor_power_difference(pair, fm, opt.budget);
            json factors = json::array();
            for (const auto& [p, e] : f.factors)
                factors.push_back({{"prime", p.get_str()}, {"exponent", e}});
            json doc = {{"value", f.value().get_str()},
                        {"factors", factors},
                        {"complete", f.complete()},
                        {"cofactor", f.cofactor.get_str()},
                        {"probabilistic_primality", f.has_probable_prime()}};
            if (opt.format == "json")
                emit(opt, doc.dump());
            else
                emit(opt, fx1 + "^" + std::to_string(fm) + " - " + fy1 + "^" + std::to_string(fm) +
                              " = " + f.to_string() + (f.complete() ? "" : "  [incomplete]"));
            return 0;
        }
        if (*all_cmd) {
            std::vector<lp::LemmaReport> reports;
            for (const std::string& id : kAllLemmaIds) {
                LemmaFlags defaults;
                for (lp::LemmaReport& r : run_lemma_as(id, defaults, opt))
                    reports.push_back(std::move(r));
            }
            lp::SearchBox box; // desk defaults
            lp::Stopwatch clock;
            lp::SearchOutcome outcome = lp::run_search(box, lp::SearchMode::Pruned,
                                                       resolve_threads(opt.threads), std::nullopt,
                                                       opt.budget);
            reports.push_back(search_report(box, lp::SearchMode::Pruned, outcome,
                                            clock.elapsed_ms()));
            emit_reports(opt, reports);
            return exit_code_for(reports, opt.strict);
        }
    } catch (const lp::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
