#pragma once

// One verifier per finite computation or checkable numeric claim. Each
// produces a LemmaReport with witnesses and, for inequality claims, the
// smallest observed slack. Rational claims are compared exactly; claims
// involving logs use double precision with compensated summation and the
// escalation rule from report.hpp.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "lucasphi/equation.hpp"
#include "lucasphi/report.hpp"

namespace lucasphi {

namespace detail {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

/// p^k if it fits in 63 bits, else 0.
inline uint64_t checked_pow_u64(uint64_t p, unsigned long k) {
    uint64_t r = 1;
    for (unsigned long i = 0; i < k; ++i) {
        if (r > (uint64_t{1} << 62) / p) return 0;
        r *= p;
    }
    return r;
}

/// Totients of 0..n by linear sieve.
inline std::vector<uint32_t> totient_table(uint32_t n) {
    std::vector<uint32_t> phi(static_cast<size_t>(n) + 1, 0);
    std::vector<uint32_t> primes;
    std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
    if (n >= 1) phi[1] = 1;
    for (uint32_t i = 2; i <= n; ++i) {
        if (!composite[i]) {
            primes.push_back(i);
            phi[i] = i - 1;
        }
        for (uint32_t p : primes) {
            uint64_t ip = static_cast<uint64_t>(i) * p;
            if (ip > n) break;
            composite[ip] = true;
            if (i % p == 0) {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    return phi;
}

template <typename T> struct Kahan {
    T sum = 0, carry = 0;
    void add(T x) {
        T y = x - carry;
        T t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

/// x1^{p-1} = y1^{p-1} (mod p^k)? The x_max/p_limit ranges keep p^k in 63 bits
/// for the defaults; larger moduli fall back to mpz.
inline bool power_diff_divisible(uint64_t x1, uint64_t y1, uint64_t p, unsigned long k) {
    if (uint64_t mod = checked_pow_u64(p, k); mod != 0)
        return powmod_u64(x1, p - 1, mod) == powmod_u64(y1, p - 1, mod);
    Natural mod = pow_natural(Natural(p), k);
    return powmod(Natural(x1), Natural(p - 1), mod) == powmod(Natural(y1), Natural(p - 1), mod);
}

inline std::vector<uint64_t> odd_primes_below(uint64_t limit) {
    std::vector<uint64_t> ps = sieve_primes(limit > 0 ? limit - 1 : 0);
    if (!ps.empty() && ps.front() == 2) ps.erase(ps.begin());
    return ps;
}

inline double rational_to_double(const Rational& q) { return mpq_get_d(q.get_mpq_t()); }

} // namespace detail

// ---------------------------------------------------------------------------
// Power-divisibility scans
// ---------------------------------------------------------------------------

/// Scan all pairs 1 <= y1 < x1 <= x_max and odd primes p < p_limit with
/// p not dividing x1 - y1 for p^k | x1^{p-1} - y1^{p-1}. The claim verified is
/// that no such triple exists; every hit is a counterexample.
inline LemmaReport verify_power_divisibility(unsigned long x_max, unsigned long p_limit,
                                             unsigned long k,
                                             unsigned long max_witnesses_per_pair = 16) {
    if (x_max < 2 || p_limit < 3 || k < 1)
        throw DomainError("verify_power_divisibility: need x_max >= 2, p_limit >= 3, k >= 1");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "power_divisibility";
    rep.parameters = {{"x_max", x_max}, {"p_limit", p_limit}, {"k", k},
                      {"max_witnesses_per_pair", max_witnesses_per_pair}};
    std::vector<uint64_t> primes = detail::odd_primes_below(p_limit);
    uint64_t total = 0, per_pair_max = 0;
    json attaining = json::array();
    for (uint64_t x1 = 2; x1 <= x_max; ++x1) {
        for (uint64_t y1 = 1; y1 < x1; ++y1) {
            uint64_t here = 0;
            for (uint64_t p : primes) {
                if ((x1 - y1) % p == 0) continue;
                if (!detail::power_diff_divisible(x1, y1, p, k)) continue;
                ++here;
                ++total;
                if (here <= max_witnesses_per_pair)
                    rep.add_counterexample({{"x1", x1}, {"y1", y1}, {"p", p}});
            }
            if (here > per_pair_max) {
                per_pair_max = here;
                attaining = json::array({{{"x1", x1}, {"y1", y1}}});
            } else if (here == per_pair_max && here > 0 && attaining.size() < 8) {
                attaining.push_back({{"x1", x1}, {"y1", y1}});
            }
        }
    }
    rep.add_info({{"witness_total", total},
                  {"per_pair_max", per_pair_max},
                  {"per_pair_max_attained_at", attaining}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

/// For pairs with 10 <= x1 <= x_max: the number of odd primes p < p_limit
/// with p not dividing x1 - y1 and p^3 | x1^{p-1} - y1^{p-1} is at most two.
inline LemmaReport verify_cube_count_bound(unsigned long x_max, unsigned long p_limit) {
    if (x_max < 2 || p_limit < 3)
        throw DomainError("verify_cube_count_bound: need x_max >= 2, p_limit >= 3");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "cube_count_bound";
    rep.parameters = {{"x_max", x_max}, {"p_limit", p_limit}};
    std::vector<uint64_t> primes = detail::odd_primes_below(p_limit);
    uint64_t observed_max = 0;
    json attaining = json::array();
    for (uint64_t x1 = 10; x1 <= x_max; ++x1) {
        for (uint64_t y1 = 1; y1 < x1; ++y1) {
            uint64_t count = 0;
            json hits = json::array();
            for (uint64_t p : primes) {
                if ((x1 - y1) % p == 0) continue;
                if (detail::power_diff_divisible(x1, y1, p, 3)) {
                    ++count;
                    hits.push_back(p);
                }
            }
            if (count > observed_max) {
                observed_max = count;
                attaining = json::array({{{"x1", x1}, {"y1", y1}, {"primes", hits}}});
            } else if (count == observed_max && count > 0 && attaining.size() < 8) {
                attaining.push_back({{"x1", x1}, {"y1", y1}, {"primes", hits}});
            }
            if (count > 2)
                rep.add_counterexample({{"x1", x1}, {"y1", y1}, {"count", count}, {"primes", hits}});
        }
    }
    rep.add_info({{"observed_max", observed_max}, {"attained_at", attaining}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

/// No odd prime p < p_limit has p^3 | 3^{p-1} - 1; at p_limit = 173 the set of
/// p with p^2 | 3^{p-1} - 1 must be exactly {11}.
inline LemmaReport verify_base3_wieferich(unsigned long p_limit) {
    if (p_limit < 3) throw DomainError("verify_base3_wieferich: need p_limit >= 3");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "base3_wieferich";
    rep.parameters = {{"p_limit", p_limit}};
    std::vector<uint64_t> square_level;
    for (uint64_t p : detail::odd_primes_below(p_limit)) {
        if (p == 3) continue; // base divides; p^2 cannot divide 3^{p-1} - 1
        if (detail::power_diff_divisible(3, 1, p, 3))
            rep.add_counterexample({{"p", p}, {"level", 3}});
        if (detail::power_diff_divisible(3, 1, p, 2)) square_level.push_back(p);
    }
    rep.add_info({{"square_level_set", square_level}});
    if (p_limit == 173 && square_level != std::vector<uint64_t>{11})
        rep.add_counterexample(
            {{"square_level_set", square_level}, {"expected", json::array({11})}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Prime-sum and counting bounds
// ---------------------------------------------------------------------------

/// sum_{p <= t} 1/p < log log t + constant for every integer t in
/// [t_min, t_max]; compensated summation, minimum slack recorded.
inline LemmaReport verify_prime_sum_window(uint64_t t_min, uint64_t t_max, double constant) {
    if (t_min < 3 || t_min > t_max)
        throw DomainError("verify_prime_sum_window: need 3 <= t_min <= t_max");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "prime_sum_window";
    rep.parameters = {{"t_min", t_min}, {"t_max", t_max}, {"constant", constant}};
    std::vector<uint64_t> primes = sieve_primes(t_max);
    detail::Kahan<double> sum;
    detail::Kahan<long double> lsum;
    size_t idx = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    uint64_t min_at = 0;
    bool any_escalated = false;
    uint64_t violations = 0;
    for (uint64_t t = 2; t <= t_max; ++t) {
        while (idx < primes.size() && primes[idx] == t) {
            sum.add(1.0 / static_cast<double>(t));
            lsum.add(1.0L / static_cast<long double>(t));
            ++idx;
        }
        if (t < t_min) continue;
        double bound = std::log(std::log(static_cast<double>(t))) + constant;
        double slack = bound - sum.sum;
        if (std::fabs(slack) < kRelativeSlackFloor * std::max(1.0, std::fabs(bound))) {
            any_escalated = true;
            long double lbound =
                std::log(std::log(static_cast<long double>(t))) + static_cast<long double>(constant);
            slack = static_cast<double>(lbound - lsum.sum);
        }
        if (slack < min_slack) {
            min_slack = slack;
            min_at = t;
        }
        if (slack <= 0) {
            ++violations;
            if (violations <= 16)
                rep.add_counterexample({{"t", t}, {"sum", sum.sum}, {"bound", bound}});
        }
    }
    rep.margin = min_slack;
    rep.add_info({{"min_slack", min_slack}, {"min_slack_at", min_at},
                  {"escalated", any_escalated}, {"violations", violations}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

/// pi(X; d, 1) < 2X / (phi(d) log(X/d)) at checkpoints X = 2^j * d and X_max.
inline LemmaReport verify_brun_titchmarsh(const std::vector<uint64_t>& d_values, uint64_t x_max) {
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "brun_titchmarsh";
    rep.parameters = {{"d_values", d_values}, {"X_max", x_max}};
    std::vector<uint64_t> primes = sieve_primes(x_max);
    double min_slack = std::numeric_limits<double>::infinity();
    json min_ctx;
    for (uint64_t d : d_values) {
        if (d < 2) throw DomainError("verify_brun_titchmarsh: each d must be >= 2");
        if (d >= x_max) {
            rep.add_info({{"d", d}, {"note", "no checkpoints below X_max"}});
            continue;
        }
        std::vector<uint64_t> checkpoints;
        for (uint64_t x = 2 * d; x <= x_max && x > d; x *= 2) checkpoints.push_back(x);
        if (checkpoints.empty() || checkpoints.back() != x_max) checkpoints.push_back(x_max);
        Natural phi_d = euler_phi(Natural(d));
        double phid = phi_d.get_d();
        uint64_t count = 0;
        size_t idx = 0;
        json rows = json::array();
        for (uint64_t X : checkpoints) {
            while (idx < primes.size() && primes[idx] <= X) {
                if ((primes[idx] - 1) % d == 0) ++count;
                ++idx;
            }
            double bound = 2.0 * static_cast<double>(X) /
                           (phid * std::log(static_cast<double>(X) / static_cast<double>(d)));
            double slack = bound - static_cast<double>(count);
            rows.push_back({{"X", X}, {"count", count}, {"bound", bound}});
            if (slack < min_slack) {
                min_slack = slack;
                min_ctx = {{"d", d}, {"X", X}};
            }
            if (static_cast<double>(count) >= bound)
                rep.add_counterexample({{"d", d}, {"X", X}, {"count", count}, {"bound", bound}});
        }
        rep.add_info({{"d", d}, {"checkpoints", rows}});
    }
    rep.margin = min_slack;
    rep.add_info({{"min_slack", min_slack}, {"min_slack_at", min_ctx}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

/// N/phi(N) <= 1.79 log log N + 2.5 / log log N for 3 <= N <= N_max.
inline LemmaReport verify_phi_quotient_bound(uint32_t n_max) {
    if (n_max < 3) throw DomainError("verify_phi_quotient_bound: need N_max >= 3");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "phi_quotient_bound";
    rep.parameters = {{"N_max", n_max}};
    std::vector<uint32_t> phi = detail::totient_table(n_max);
    double min_slack = std::numeric_limits<double>::infinity();
    uint32_t min_at = 0;
    bool any_escalated = false;
    for (uint32_t n = 3; n <= n_max; ++n) {
        double ll = std::log(std::log(static_cast<double>(n)));
        double lhs = static_cast<double>(n) / static_cast<double>(phi[n]);
        double slack = 1.79 * ll + 2.5 / ll - lhs;
        if (std::fabs(slack) < kRelativeSlackFloor * std::max(1.0, std::fabs(lhs))) {
            any_escalated = true;
            long double lll = std::log(std::log(static_cast<long double>(n)));
            slack = static_cast<double>(1.79L * lll + 2.5L / lll -
                                        static_cast<long double>(n) / phi[n]);
        }
        if (slack < min_slack) {
            min_slack = slack;
            min_at = n;
        }
        if (slack < 0)
            rep.add_counterexample({{"N", n}, {"ratio", lhs}});
    }
    rep.margin = min_slack;
    rep.add_info({{"min_slack", min_slack}, {"min_slack_at", min_at}, {"escalated", any_escalated}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Exact rational product and ratio claims
// ---------------------------------------------------------------------------

namespace detail {

/// prod of (1 + 1/(p-1)) = p/(p-1) over the i-th primes, i in [lo, hi] 1-based.
inline Rational prime_index_product(unsigned lo, unsigned hi) {
    std::vector<uint64_t> primes = sieve_primes(uint64_t{200});
    Rational prod = 1;
    for (unsigned i = lo; i <= hi; ++i) {
        uint64_t p = primes.at(i - 1);
        prod *= Rational(p, p - 1);
    }
    prod.canonicalize();
    return prod;
}

} // namespace detail

/// The three products of (1 + 1/(p_i - 1)) over i = 4..14, 4..8, 4..6 are
/// below 2, 1.56 and 1.4 respectively; exact rational comparison.
inline LemmaReport verify_prime_products() {
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "prime_products";
    struct Claim {
        unsigned lo, hi;
        Rational bound;
        const char* bound_text;
    };
    const Claim claims[] = {
        {4, 14, Rational(2), "2"},
        {4, 8, Rational(39, 25), "1.56"},
        {4, 6, Rational(7, 5), "1.4"},
    };
    double min_margin = std::numeric_limits<double>::infinity();
    for (const Claim& c : claims) {
        Rational value = detail::prime_index_product(c.lo, c.hi);
        double margin = detail::rational_to_double(Rational(c.bound - value));
        min_margin = std::min(min_margin, margin);
        json row = {{"index_range", {c.lo, c.hi}},
                    {"value", value.get_str()},
                    {"value_decimal", detail::rational_to_double(value)},
                    {"bound", c.bound_text},
                    {"margin", margin}};
        if (value < c.bound)
            rep.add_info(row);
        else
            rep.add_counterexample(row);
    }
    rep.margin = min_margin;
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

/// Exact verification of the coefficient * phi(z or 2z) / z lower bounds used
/// in the x <= 80 case analysis, each over its stated z-range.
inline LemmaReport verify_phi_ratio_bounds(uint32_t z_max = 80) {
    if (z_max < 80) throw DomainError("verify_phi_ratio_bounds: need z_max >= 80");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "phi_ratio_bounds";
    rep.parameters = {{"z_max", z_max}};
    std::vector<uint32_t> phi = detail::totient_table(2 * z_max);
    struct Claim {
        unsigned coef;
        bool doubled; // phi(2z) instead of phi(z)
        uint32_t z_lo, z_hi;
        Rational bound;
        const char* bound_text;
        bool strict;
    };
    const std::vector<Claim> claims = {
        {11, true, 1, z_max, Rational(3), "3", true},
        {13, false, 1, z_max, Rational(3), "3", true},
        {11, false, 1, 10, Rational(3), "3", true},
        {3, true, 1, z_max, Rational(159, 100), "1.59", true},
        {5, false, 1, 4, Rational(159, 100), "1.59", true},
        {7, false, 1, z_max, Rational(159, 100), "1.59", true},
        {3, true, 1, z_max, Rational(7, 5), "1.4", true},
        {7, false, 1, z_max, Rational(7, 5), "1.4", true},
        {3, false, 1, 4, Rational(7, 5), "1.4", true},
        {3, false, 1, 2, Rational(3, 2), "1.5", false},
    };
    double min_strict_margin = std::numeric_limits<double>::infinity();
    for (const Claim& c : claims) {
        Rational best;
        uint32_t best_z = 0;
        for (uint32_t z = c.z_lo; z <= c.z_hi; ++z) {
            Rational v(static_cast<unsigned long>(c.coef) * phi[c.doubled ? 2 * z : z], z);
            v.canonicalize();
            if (best_z == 0 || v < best) {
                best = v;
                best_z = z;
            }
        }
        std::string expr = std::to_string(c.coef) + "*phi(" + (c.doubled ? "2z" : "z") + ")/z";
        bool ok = c.strict ? (best > c.bound) : (best >= c.bound);
        double margin = detail::rational_to_double(Rational(best - c.bound));
        json row = {{"expr", expr},
                    {"z_range", {c.z_lo, c.z_hi}},
                    {"bound", c.bound_text},
                    {"strict", c.strict},
                    {"min", best.get_str()},
                    {"min_decimal", detail::rational_to_double(best)},
                    {"attained_at_z", best_z},
                    {"margin", margin}};
        if (ok)
            rep.add_info(row);
        else
            rep.add_counterexample(row);
        if (c.strict) min_strict_margin = std::min(min_strict_margin, margin);
    }
    // equality can be attained for the non-strict claim; report the minimum
    // positive distance-to-violation over the strict claims as the margin
    rep.margin = min_strict_margin;
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

// ---------------------------------------------------------------------------
// log log submultiplicativity and phi monotonicity
// ---------------------------------------------------------------------------

/// (a) 2/log 78 < 0.4591; (b) loglog(u*v) <= loglog(u) * loglog(v) on a grid
/// of [78, grid_max]^2.
inline LemmaReport verify_loglog_submultiplicative(double grid_max = 1000.0,
                                                   double grid_step = 1.0) {
    if (grid_max < 78.0 || grid_step <= 0.0)
        throw DomainError("verify_loglog_submultiplicative: need grid_max >= 78, grid_step > 0");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "loglog_submultiplicative";
    rep.parameters = {{"grid_max", grid_max}, {"grid_step", grid_step}};

    IneqVerdict corner = check_strictly_below([]<typename T>() {
        return std::pair<T, T>{T(2) / std::log(T(78)), T(0.4591L)};
    });
    rep.add_info({{"corner", "2/log(78) < 0.4591"},
                  {"value", 2.0 / std::log(78.0)},
                  {"margin", corner.margin},
                  {"escalated", corner.escalated},
                  {"note", "tightest constant in the verified set"}});
    if (!corner.holds)
        rep.add_counterexample({{"corner", "2/log(78)"}, {"margin", corner.margin}});

    std::vector<double> points, logs, loglogs;
    for (double x = 78.0; x <= grid_max + 1e-9; x += grid_step) {
        points.push_back(x);
        logs.push_back(std::log(x));
        loglogs.push_back(std::log(std::log(x)));
    }
    double min_slack = std::numeric_limits<double>::infinity();
    json min_at;
    bool any_escalated = false;
    uint64_t violations = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        for (size_t j = i; j < points.size(); ++j) {
            double lhs = std::log(logs[i] + logs[j]);
            double rhs = loglogs[i] * loglogs[j];
            double slack = rhs - lhs;
            if (std::fabs(slack) < kRelativeSlackFloor * std::max(1.0, std::fabs(rhs))) {
                any_escalated = true;
                long double li = std::log(static_cast<long double>(points[i]));
                long double lj = std::log(static_cast<long double>(points[j]));
                slack = static_cast<double>(std::log(li) * std::log(lj) - std::log(li + lj));
            }
            if (slack < min_slack) {
                min_slack = slack;
                min_at = {{"u", points[i]}, {"v", points[j]}};
            }
            if (slack < 0) {
                ++violations;
                if (violations <= 16)
                    rep.add_counterexample({{"u", points[i]}, {"v", points[j]}, {"slack", slack}});
            }
        }
    }
    rep.add_info({{"grid_min_slack", min_slack}, {"attained_at", min_at},
                  {"escalated", any_escalated}});
    rep.margin = std::min(corner.margin, min_slack);
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

/// phi(a*b) >= phi(2a) for 1 <= a <= a_max, 2 <= b <= b_max.
inline LemmaReport verify_phi_product_monotone(uint32_t a_max, uint32_t b_max) {
    if (a_max < 2 || b_max < 2)
        throw DomainError("verify_phi_product_monotone: need a_max, b_max >= 2");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "phi_product_monotone";
    rep.parameters = {{"a_max", a_max}, {"b_max", b_max}};
    uint64_t table_max = std::max<uint64_t>(static_cast<uint64_t>(a_max) * b_max, 2 * a_max);
    std::vector<uint32_t> phi = detail::totient_table(static_cast<uint32_t>(table_max));
    int64_t min_diff = std::numeric_limits<int64_t>::max();
    json min_at;
    for (uint32_t a = 1; a <= a_max; ++a) {
        uint32_t rhs = phi[2 * a];
        for (uint32_t b = 2; b <= b_max; ++b) {
            int64_t diff = static_cast<int64_t>(phi[static_cast<uint64_t>(a) * b]) - rhs;
            if (diff < min_diff) {
                min_diff = diff;
                min_at = {{"a", a}, {"b", b}};
            }
            if (diff < 0)
                rep.add_counterexample({{"a", a}, {"b", b},
                                        {"phi_ab", phi[static_cast<uint64_t>(a) * b]},
                                        {"phi_2a", rhs}});
        }
    }
    // integer claim: the nearest violating value is min_diff = -1, so the
    // distance to violation is min_diff + 1 (equality at (1,2) still passes)
    rep.margin = static_cast<double>(min_diff + 1);
    rep.add_info({{"min_difference", min_diff}, {"attained_at", min_at}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Primitive-divisor and totient-divisibility laws
// ---------------------------------------------------------------------------

/// The values Phi_n(x1, y1) in the default Carmichael window contain balanced
/// semiprimes with ~7e6-step rho factors; the scan gets a larger per-composite
/// budget than the global default so it completes without skips.
inline Budget carmichael_default_budget() {
    Budget b;
    b.rho_iterations = uint64_t{1} << 26;
    return b;
}

/// For all coprime odd pairs x1 <= x_max and odd 3 <= n <= n_max:
/// primitive_prime_divisors is nonempty and every member is 1 mod n.
inline LemmaReport verify_carmichael(unsigned long x_max, unsigned long n_max,
                                     const Budget& budget = carmichael_default_budget(),
                                     unsigned threads = 0) {
    if (x_max < 3 || n_max < 3) throw DomainError("verify_carmichael: need x_max, n_max >= 3");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "carmichael_primitive_divisors";
    rep.parameters = {{"x_max", x_max}, {"n_max", n_max}};

    struct Entry {
        unsigned long x1, y1, n;
    };
    std::vector<Entry> entries;
    for (unsigned long x1 = 3; x1 <= x_max; x1 += 2)
        for (unsigned long y1 = 1; y1 < x1; y1 += 2) {
            if (std::gcd(x1, y1) != 1) continue;
            for (unsigned long n = 3; n <= n_max; n += 2) entries.push_back({x1, y1, n});
        }

    struct Result {
        json counterexample; // null if none
        bool skipped = false;
        size_t primes_found = 0;
    };
    std::vector<Result> results(entries.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, 64);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        FactorCache cache;
        for (size_t i = next.fetch_add(1); i < entries.size(); i = next.fetch_add(1)) {
            const Entry& e = entries[i];
            LucasPair pair{Natural(e.x1), Natural(e.y1)};
            PrimitiveDivisors pd = primitive_prime_divisors(pair, e.n, budget, &cache);
            Result& r = results[i];
            r.primes_found = pd.primes.size();
            if (pd.primes.empty()) {
                if (!pd.complete())
                    r.skipped = true;
                else
                    r.counterexample = {{"x1", e.x1}, {"y1", e.y1}, {"n", e.n},
                                        {"reason", "no primitive prime divisor"}};
                continue;
            }
            for (const Natural& p : pd.primes) {
                if ((p - 1) % e.n != 0) {
                    r.counterexample = {{"x1", e.x1}, {"y1", e.y1}, {"n", e.n},
                                        {"p", p.get_str()}, {"reason", "not 1 mod n"}};
                    break;
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    size_t total_primes = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        total_primes += results[i].primes_found;
        if (!results[i].counterexample.is_null()) rep.add_counterexample(results[i].counterexample);
        if (results[i].skipped)
            rep.add_skipped_entry({{"x1", entries[i].x1}, {"y1", entries[i].y1},
                                   {"n", entries[i].n}},
                                  "factorization incomplete under budget");
    }
    if (rep.has_counterexample()) rep.status = Status::Fail;
    rep.add_info({{"entries", entries.size()}, {"primitive_primes_found", total_primes}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

/// n^2/rad(n) | phi(a^n - b^n) and, in integral form, n^{d(n)} | phi(a^n - b^n)^2
/// for all 1 <= b < a <= a_max, 1 <= n <= n_max.
inline LemmaReport verify_divisibility_of_phi(unsigned long a_max, unsigned long n_max,
                                              const Budget& budget = {}) {
    if (a_max < 2 || n_max < 1)
        throw DomainError("verify_divisibility_of_phi: need a_max >= 2, n_max >= 1");
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "totient_divisibility";
    rep.parameters = {{"a_max", a_max}, {"n_max", n_max}};
    std::map<unsigned long, DivisorProfile> profiles;
    for (unsigned long n = 1; n <= n_max; ++n) profiles.emplace(n, divisor_profile(Natural(n)));
    uint64_t checked = 0;
    for (unsigned long a = 2; a <= a_max; ++a) {
        for (unsigned long b = 1; b < a; ++b) {
            for (unsigned long n = 1; n <= n_max; ++n) {
                Natural v = pow_natural(Natural(a), n) - pow_natural(Natural(b), n);
                if (v == 0) continue; // unreachable with b < a
                PrimeFactorization f = factorize(v, budget);
                if (!f.complete()) {
                    rep.add_skipped_entry({{"a", a}, {"b", b}, {"n", n}},
                                          "factorization incomplete under budget");
                    continue;
                }
                Natural phi = euler_phi(f);
                const DivisorProfile& prof = profiles.at(n);
                Natural guderson = Natural(n) * Natural(n) / prof.radical;
                if (!mpz_divisible_p(phi.get_mpz_t(), guderson.get_mpz_t()))
                    rep.add_counterexample({{"a", a}, {"b", b}, {"n", n},
                                            {"claim", "n^2/rad(n) | phi(a^n-b^n)"},
                                            {"phi", phi.get_str()}});
                Natural rot = pow_natural(Natural(n), to_ulong_checked(prof.divisor_count, "d(n)"));
                Natural phi_sq = phi * phi;
                if (!mpz_divisible_p(phi_sq.get_mpz_t(), rot.get_mpz_t()))
                    rep.add_counterexample({{"a", a}, {"b", b}, {"n", n},
                                            {"claim", "n^d(n) | phi(a^n-b^n)^2"},
                                            {"phi", phi.get_str()}});
                ++checked;
            }
        }
    }
    rep.add_info({{"entries_checked", checked}});
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

// ---------------------------------------------------------------------------
// S_d bound
// ---------------------------------------------------------------------------

/// Exact S_d = sum of 1/p over primes with rank of apparition exactly d,
/// checked against 1/(4d) + 1/(d log(d+1)) + 2 loglog d / phi(d)
/// + 2 loglog x1 / (phi(d) log d).
struct SdReport {
    LucasPair pair;
    unsigned long d;
    Rational s_d{0};
    double bound = 0.0;
    bool complete = false;
    Status status = Status::Skipped;
    double margin = 0.0;
    std::vector<Natural> primes;

    SdReport(LucasPair p, unsigned long d_) : pair(std::move(p)), d(d_) {}
};

inline std::vector<SdReport> verify_Sd_bound(const LucasPair& pair,
                                             const std::vector<unsigned long>& d_values,
                                             const Budget& budget = {}) {
    std::vector<SdReport> out;
    FactorCache cache;
    for (unsigned long d : d_values) {
        if (d < 41 || d % 2 == 0)
            throw DomainError("verify_Sd_bound: each d must be odd and >= 41, got " +
                              std::to_string(d));
        SdReport r{pair, d};
        PrimitiveDivisors pd = primitive_prime_divisors(pair, d, budget, &cache);
        r.complete = pd.complete();
        r.primes = pd.primes;
        for (const Natural& p : pd.primes) {
            // dual route: the order computation must agree with the direct
            // rank check used inside primitive_prime_divisors
            if (rank_of_apparition(pair, p, budget).ell != d)
                throw InternalError("verify_Sd_bound: rank disagreement at p=" + p.get_str());
            r.s_d += Rational(1) / Rational(p);
        }
        r.s_d.canonicalize();
        double phid = euler_phi(Natural(d)).get_d();
        double dd = static_cast<double>(d);
        double llx = std::log(std::log(pair.x1.get_d()));
        r.bound = 1.0 / (4.0 * dd) + 1.0 / (dd * std::log(dd + 1.0)) +
                  2.0 * std::log(std::log(dd)) / phid + 2.0 * llx / (phid * std::log(dd));
        r.margin = r.bound - detail::rational_to_double(r.s_d);
        if (!r.complete)
            r.status = Status::Skipped;
        else
            r.status = r.margin > 0 ? Status::Pass : Status::Fail;
        out.push_back(std::move(r));
    }
    return out;
}

/// LemmaReport wrapper over verify_Sd_bound for the CLI and the suite runner.
inline LemmaReport lemma_report_sd(const LucasPair& pair,
                                   const std::vector<unsigned long>& d_values,
                                   const Budget& budget = {}) {
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "sd_bound";
    rep.parameters = {{"x1", pair.x1.get_str()}, {"y1", pair.y1.get_str()},
                      {"d_values", d_values}};
    double min_margin = std::numeric_limits<double>::infinity();
    for (const SdReport& r : verify_Sd_bound(pair, d_values, budget)) {
        json primes = json::array();
        for (const Natural& p : r.primes) primes.push_back(p.get_str());
        bool probabilistic = false;
        for (const Natural& p : r.primes) probabilistic |= !fits_u64(p);
        json row = {{"d", r.d},
                    {"S_d", r.s_d.get_str()},
                    {"S_d_decimal", detail::rational_to_double(r.s_d)},
                    {"bound", r.bound},
                    {"margin", r.margin},
                    {"complete", r.complete},
                    {"primes", primes},
                    {"probabilistic_primality", probabilistic}};
        if (r.status == Status::Fail)
            rep.add_counterexample(row);
        else if (r.status == Status::Skipped)
            rep.add_skipped_entry(row, "factorization incomplete under budget");
        else {
            rep.add_info(row);
            min_margin = std::min(min_margin, r.margin);
        }
    }
    if (min_margin < std::numeric_limits<double>::infinity()) rep.margin = min_margin;
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Standalone numeric constants
// ---------------------------------------------------------------------------

/// Every standalone numeric inequality used by the case analysis, evaluated
/// with the double-precision + escalation policy (exact rationals where both
/// sides are rational).
inline LemmaReport verify_standalone_constants() {
    Stopwatch clock;
    LemmaReport rep;
    rep.lemma_id = "standalone_constants";
    double min_margin = std::numeric_limits<double>::infinity();

    auto record = [&](const char* id, const char* text, const IneqVerdict& v) {
        json row = {{"id", id}, {"inequality", text}, {"margin", v.margin},
                    {"escalated", v.escalated}};
        if (v.holds)
            rep.add_info(row);
        else
            rep.add_counterexample(row);
        min_margin = std::min(min_margin, v.margin);
    };
    auto record_exact = [&](const char* id, const char* text, const Rational& lhs,
                            const Rational& rhs) {
        double margin = detail::rational_to_double(Rational(rhs - lhs));
        json row = {{"id", id}, {"inequality", text}, {"margin", margin}, {"exact", true}};
        if (lhs < rhs)
            rep.add_info(row);
        else
            rep.add_counterexample(row);
        min_margin = std::min(min_margin, margin);
    };

    record("log80", "log(80) - loglog(80) > 2.9", check_strictly_above([]<typename T>() {
               return std::pair<T, T>{std::log(T(80)) - std::log(std::log(T(80))), T(2.9L)};
           }));

    record("prime_tail_sum", "log(15/4) + sum_{7<=p<547} 1/(p(p-1)) + 1/546 < 1.38",
           check_strictly_below([]<typename T>() {
               detail::Kahan<T> s;
               for (uint64_t p : sieve_primes(uint64_t{546}))
                   if (p >= 7) s.add(T(1) / (T(p) * T(p - 1)));
               T lhs = std::log(T(15) / T(4)) + s.sum + T(1) / T(546);
               return std::pair<T, T>{lhs, T(1.38L)};
           }));

    auto corner = []<typename T>(T p, T two_p) {
        T sq = std::sqrt(p);
        T ll = std::log(std::log(p));
        return (T(1) / std::log(T(2))) * (std::log(two_p) / sq) * (ll / sq) * (p / (p - 1)) *
               (p / (p - ll));
    };
    record("corner_83",
           "(1/log2)(log166/sqrt83)(loglog83/sqrt83)(83/82)(83/(83-loglog83)) < 0.137",
           check_strictly_below([&]<typename T>() {
               return std::pair<T, T>{corner.template operator()<T>(T(83), T(166)), T(0.137L)};
           }));
    record("exp_137", "exp(0.137) - 1 < 0.147", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{std::exp(T(0.137L)) - T(1), T(0.147L)};
           }));
    record("corner_173",
           "(1/log2)(log346/sqrt173)(loglog173/sqrt173)(173/172)(173/(173-loglog173)) < 0.082",
           check_strictly_below([&]<typename T>() {
               return std::pair<T, T>{corner.template operator()<T>(T(173), T(346)), T(0.082L)};
           }));
    record("exp_082", "exp(0.082) - 1 < 0.086", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{std::exp(T(0.082L)) - T(1), T(0.086L)};
           }));

    record("mertens_shift_high", "log(4) + 0.2772 - 1/2 - 1/3 - 1/5 < 0.6302",
           check_strictly_below([]<typename T>() {
               T lhs = std::log(T(4)) + T(0.2772L) - T(1) / T(2) - T(1) / T(3) - T(1) / T(5);
               return std::pair<T, T>{lhs, T(0.6302L)};
           }));
    record_exact("chain_high_a", "1.38 + 0.6302 < 2.011",
                 Rational(138, 100) + Rational(6302, 10000), Rational(2011, 1000));
    record_exact("chain_high_b", "2.011 + 0.25 + 0.6 < 2.9",
                 Rational(2011, 1000) + Rational(1, 4) + Rational(3, 5), Rational(29, 10));
    record("mertens_shift_low", "0.2965 - 1/2 - 1/3 - 1/5 < -0.7368",
           check_strictly_below([]<typename T>() {
               T lhs = T(0.2965L) - T(1) / T(2) - T(1) / T(3) - T(1) / T(5);
               return std::pair<T, T>{lhs, T(-0.7368L)};
           }));

    record("log40", "1/log(40) - loglog(4) < 0", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{T(1) / std::log(T(40)) - std::log(std::log(T(4))), T(0)};
           }));
    record("submult_closure", "-(loglog78 - 1)^2 + 1 + log(0.4591) < 0",
           check_strictly_below([]<typename T>() {
               T ll = std::log(std::log(T(78)));
               return std::pair<T, T>{-(ll - 1) * (ll - 1) + T(1) + std::log(T(0.4591L)), T(0)};
           }));

    record("tail_const_173", "5/4 + 1/log(174) + 2*loglog(80)/log(173) < 2.1",
           check_strictly_below([]<typename T>() {
               T lhs = T(5) / T(4) + T(1) / std::log(T(174)) +
                       T(2) * std::log(std::log(T(80))) / std::log(T(173));
               return std::pair<T, T>{lhs, T(2.1L)};
           }));
    record("tail_abs_173", "2.1 + 2*loglog(173) < 3.3*loglog(173)",
           check_strictly_below([]<typename T>() {
               T ll = std::log(std::log(T(173)));
               return std::pair<T, T>{T(2.1L) + 2 * ll, T(3.3L) * ll};
           }));
    record("single_d_tail", "3.3*loglog(173)/172 < 0.032", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{T(3.3L) * std::log(std::log(T(173))) / T(172), T(0.032L)};
           }));
    record("exp_032_ten", "exp(10*0.032) < 1.4", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{std::exp(T(0.32L)), T(1.4L)};
           }));
    record("exp_032_two", "exp(2*0.032) < 1.1", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{std::exp(T(0.064L)), T(1.1L)};
           }));
    record_exact("ratio_product_prime_m", "(1+1/6)(1+1/12)(1+1/18) < 1.4",
                 Rational(7, 6) * Rational(13, 12) * Rational(19, 18), Rational(7, 5));

    record_exact("chain_low_a", "3.3 * 0.086 < 0.3", Rational(33, 10) * Rational(86, 1000),
                 Rational(3, 10));
    record("chain_low_b", "exp(0.3) < 1.35", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{std::exp(T(0.3L)), T(1.35L)};
           }));
    record("sd_tail_const_80", "1/4 + 1/log(80) + 2*loglog(80)/log(80) < 1.2",
           check_strictly_below([]<typename T>() {
               T l = std::log(T(80));
               T lhs = T(1) / T(4) + T(1) / l + T(2) * std::log(l) / l;
               return std::pair<T, T>{lhs, T(1.2L)};
           }));
    record("sd_tail_abs_83", "1.2 < loglog(83)", check_strictly_below([]<typename T>() {
               return std::pair<T, T>{T(1.2L), std::log(std::log(T(83)))};
           }));
    record_exact("chain_mid_a", "3 * 0.147 < 0.45", Rational(3) * Rational(147, 1000),
                 Rational(45, 100));
    record_exact("chain_mid_b", "0.6432 + 0.45 < 1.1",
                 Rational(6432, 10000) + Rational(45, 100), Rational(11, 10));
    record_exact("product_closure_one", "2 * 1.4 < 3", Rational(2) * Rational(7, 5), Rational(3));
    record_exact("product_closure_two", "1.4 * 1.1 < 1.59", Rational(7, 5) * Rational(11, 10),
                 Rational(159, 100));

    rep.margin = min_margin;
    rep.elapsed_ms = clock.elapsed_ms();
    return rep;
}

} // namespace lucasphi
