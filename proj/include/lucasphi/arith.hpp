#pragma once

// Integer substrate: primes, factorization, totient, valuations, divisor
// profiles and multiplicative orders over arbitrary-precision integers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "lucasphi/errors.hpp"

namespace lucasphi {

using Natural = mpz_class;
using Rational = mpq_class;

constexpr uint64_t kSieveCapacity = 1'000'000'000ULL;

inline Natural pow_natural(const Natural& base, unsigned long exp) {
    Natural r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

inline Natural pow2(unsigned long exp) { return pow_natural(2, exp); }

inline Natural powmod(const Natural& base, const Natural& exp, const Natural& mod) {
    Natural r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

inline Natural gcd_natural(const Natural& a, const Natural& b) {
    Natural r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline bool fits_u64(const Natural& n) {
    return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

inline uint64_t to_u64(const Natural& n) {
    uint64_t lo = mpz_get_ui(n.get_mpz_t());
    if (mpz_sizeinbase(n.get_mpz_t(), 2) > 32) {
        Natural hi = n >> 32;
        return (static_cast<uint64_t>(mpz_get_ui(hi.get_mpz_t())) << 32) |
               (lo & 0xffffffffULL);
    }
    return lo;
}

inline unsigned long to_ulong_checked(const Natural& n, const char* what) {
    if (sgn(n) < 0 || !n.fits_ulong_p())
        throw CapacityError(std::string(what) + " does not fit a machine word: " + n.get_str());
    return n.get_ui();
}

// ---------------------------------------------------------------------------
// Prime sieve
// ---------------------------------------------------------------------------

/// All primes <= limit, ascending. Throws CapacityError above kSieveCapacity.
inline std::vector<uint64_t> sieve_primes(uint64_t limit) {
    if (limit > kSieveCapacity)
        throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds capacity " +
                            std::to_string(kSieveCapacity));
    std::vector<uint64_t> primes;
    if (limit < 2) return primes;
    // odd-only bitmap: bit i represents 2i+1 (i >= 1)
    const uint64_t half = (limit - 1) / 2;
    std::vector<bool> composite(half + 1, false);
    primes.push_back(2);
    for (uint64_t i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const uint64_t p = 2 * i + 1;
        primes.push_back(p);
        if (p * p > limit) continue;
        for (uint64_t j = (p * p - 1) / 2; j <= half; j += p)
            composite[j] = true;
    }
    return primes;
}

inline std::vector<uint64_t> sieve_primes(const Natural& limit) {
    if (sgn(limit) < 0) return {};
    if (!fits_u64(limit) || to_u64(limit) > kSieveCapacity)
        throw CapacityError("sieve limit " + limit.get_str() + " exceeds capacity");
    return sieve_primes(to_u64(limit));
}

namespace detail {

// Shared read-only table for trial division, built once.
inline const std::vector<uint64_t>& trial_primes() {
    static const std::vector<uint64_t> table = sieve_primes(uint64_t{1'000'000});
    return table;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

namespace detail {

inline bool miller_rabin_composite(const Natural& n, const Natural& d, unsigned long r,
                                   const Natural& a) {
    Natural x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (unsigned long i = 1; i < r; ++i) {
        x = (x * x) % n;
        if (x == n - 1) return false;
    }
    return true;
}

} // namespace detail

/// Primality test. Deterministic for n < 2^64 (fixed Miller-Rabin base set);
/// above that, 64 pseudo-random Miller-Rabin rounds seeded from n itself, so
/// results are reproducible and the error probability is below 4^-64.
inline bool is_prime(const Natural& n) {
    if (n < 2) return false;
    static constexpr unsigned small_primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                                31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
                                                73, 79, 83, 89, 97};
    for (unsigned p : small_primes) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    Natural d = n - 1;
    unsigned long r = mpz_scan1(d.get_mpz_t(), 0);
    d >>= r;
    if (fits_u64(n)) {
        // deterministic for all n < 2^64 with this base set
        static constexpr unsigned bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
        for (unsigned a : bases) {
            if (n == a) return true;
            if (detail::miller_rabin_composite(n, d, r, Natural(a))) return false;
        }
        return true;
    }
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(n); // deterministic per input
    for (int round = 0; round < 64; ++round) {
        Natural a = rng.get_z_range(n - 3) + 2;
        if (detail::miller_rabin_composite(n, d, r, a)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

/// Effort limits for factorization. rho_iterations is per composite.
struct Budget {
    uint64_t trial_limit = 1'000'000;
    uint64_t rho_iterations = uint64_t{1} << 22;
};

/// Multiset of (prime, exponent) pairs, primes strictly ascending, plus the
/// unfactored cofactor (1 when complete). The cofactor, when not 1, is a
/// proven composite: it already failed is_prime.
struct PrimeFactorization {
    std::vector<std::pair<Natural, unsigned long>> factors;
    Natural cofactor{1};

    bool complete() const { return cofactor == 1; }

    Natural value() const {
        Natural v = cofactor;
        for (const auto& [p, e] : factors) v *= pow_natural(p, e);
        return v;
    }

    unsigned long exponent_of(const Natural& p) const {
        for (const auto& [q, e] : factors)
            if (q == p) return e;
        return 0;
    }

    /// Any listed prime >= 2^64 was certified only probabilistically.
    bool has_probable_prime() const {
        for (const auto& [p, e] : factors)
            if (!fits_u64(p)) return true;
        return false;
    }

    void add_factor(const Natural& p, unsigned long e) {
        if (e == 0) return;
        auto it = std::lower_bound(factors.begin(), factors.end(), p,
                                   [](const auto& fe, const Natural& q) { return fe.first < q; });
        if (it != factors.end() && it->first == p)
            it->second += e;
        else
            factors.insert(it, {p, e});
    }

    void merge(const PrimeFactorization& other, unsigned long multiplier = 1) {
        if (multiplier == 0) return;
        for (const auto& [p, e] : other.factors) add_factor(p, e * multiplier);
        if (other.cofactor != 1) cofactor *= pow_natural(other.cofactor, multiplier);
    }

    std::string to_string() const {
        if (factors.empty() && cofactor == 1) return "1";
        std::string s;
        for (const auto& [p, e] : factors) {
            if (!s.empty()) s += " * ";
            s += p.get_str();
            if (e > 1) s += "^" + std::to_string(e);
        }
        if (cofactor != 1) {
            if (!s.empty()) s += " * ";
            s += "C" + cofactor.get_str();
        }
        return s;
    }
};

namespace detail {

/// Brent-cycle Pollard rho. Returns a nontrivial factor of n (odd composite,
/// not a prime power handled by caller) or 0 if the iteration budget ran out.
/// Deterministic: polynomial constant starts at 1 and is bumped on failure.
inline Natural pollard_rho_brent(const Natural& n, uint64_t max_iterations) {
    uint64_t used = 0;
    for (unsigned long c = 1; used < max_iterations; ++c) {
        Natural y = 2, q = 1, g = 1, x, ys;
        uint64_t r = 1;
        const uint64_t batch = 128;
        while (g == 1 && used < max_iterations) {
            x = y;
            for (uint64_t i = 0; i < r && used < max_iterations; ++i) {
                y = (y * y + c) % n;
                ++used;
            }
            uint64_t k = 0;
            while (k < r && g == 1 && used < max_iterations) {
                ys = y;
                uint64_t steps = std::min(batch, r - k);
                steps = std::min<uint64_t>(steps, max_iterations - used);
                for (uint64_t i = 0; i < steps; ++i) {
                    y = (y * y + c) % n;
                    Natural diff = x > y ? x - y : y - x;
                    q = (q * diff) % n;
                }
                used += steps;
                g = gcd_natural(q, n);
                k += steps;
            }
            r *= 2;
        }
        if (g == n) {
            // collision collapsed a whole batch; backtrack one step at a time
            do {
                ys = (ys * ys + c) % n;
                Natural diff = x > ys ? x - ys : ys - x;
                g = gcd_natural(diff, n);
            } while (g == 1);
        }
        if (g > 1 && g != n) return g;
    }
    return 0;
}

} // namespace detail

/// Factor n >= 1. Trial division by primes <= budget.trial_limit, then Brent
/// rho with recursive splitting; composites that survive the per-composite
/// iteration budget end up multiplied into the cofactor (Incomplete status).
inline PrimeFactorization factorize(const Natural& n, const Budget& budget = {}) {
    if (n < 1) throw DomainError("factorize requires n >= 1, got " + n.get_str());
    PrimeFactorization f;
    if (n == 1) return f;
    Natural rest = n;
    const auto& table = detail::trial_primes();
    for (uint64_t p : table) {
        if (p > budget.trial_limit) break;
        if (mpz_cmp_ui(rest.get_mpz_t(), p * p) < 0) break;
        if (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
            unsigned long e = 0;
            do {
                mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
                ++e;
            } while (mpz_divisible_ui_p(rest.get_mpz_t(), p));
            f.add_factor(p, e);
        }
    }
    if (rest == 1) return f;
    std::vector<Natural> stack{rest};
    while (!stack.empty()) {
        Natural c = stack.back();
        stack.pop_back();
        if (c == 1) continue;
        if (is_prime(c)) {
            f.add_factor(c, 1);
            continue;
        }
        // perfect powers: factor the root once
        if (mpz_perfect_power_p(c.get_mpz_t())) {
            for (unsigned long k = 2; k <= mpz_sizeinbase(c.get_mpz_t(), 2); ++k) {
                Natural root;
                if (mpz_root(root.get_mpz_t(), c.get_mpz_t(), k) != 0) {
                    PrimeFactorization part = factorize(root, budget);
                    f.merge(part, k);
                    c = 1;
                    break;
                }
            }
            if (c == 1) continue;
        }
        Natural d = detail::pollard_rho_brent(c, budget.rho_iterations);
        if (d == 0) {
            f.cofactor *= c; // proven composite (failed is_prime above)
            continue;
        }
        stack.push_back(d);
        stack.push_back(c / d);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Totient, valuation, divisor profile, multiplicative order
// ---------------------------------------------------------------------------

/// Euler's phi from a complete factorization: prod p^(e-1) (p-1).
inline Natural euler_phi(const PrimeFactorization& f) {
    if (!f.complete())
        throw IncompleteFactorizationError("euler_phi requires a complete factorization; cofactor " +
                                           f.cofactor.get_str());
    Natural phi = 1;
    for (const auto& [p, e] : f.factors) phi *= pow_natural(p, e - 1) * (p - 1);
    return phi;
}

inline Natural euler_phi(const Natural& n, const Budget& budget = {}) {
    return euler_phi(factorize(n, budget));
}

/// Exact exponent of prime p in a >= 1.
inline unsigned long valuation(const Natural& p, const Natural& a) {
    if (a < 1) throw DomainError("valuation requires a >= 1, got " + a.get_str());
    unsigned long k = 0;
    Natural rest = a;
    while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
        ++k;
    }
    return k;
}

/// d(m), p(m), Q_m, rad(m) and the prime valuations of one integer m >= 1.
struct DivisorProfile {
    Natural m;
    Natural divisor_count;                       // d(m)
    std::optional<Natural> least_prime;          // p(m); absent iff m = 1
    std::vector<Natural> prime_divisors;         // Q_m, ascending
    Natural radical;                             // rad(m)
    std::map<Natural, unsigned long> valuations; // q -> nu_q(m)
};

inline DivisorProfile divisor_profile(const Natural& m, const Budget& budget = {}) {
    if (m < 1) throw DomainError("divisor_profile requires m >= 1");
    PrimeFactorization f = factorize(m, budget);
    if (!f.complete())
        throw IncompleteFactorizationError("divisor_profile: factorization of " + m.get_str() +
                                           " incomplete (cofactor " + f.cofactor.get_str() + ")");
    DivisorProfile prof;
    prof.m = m;
    prof.divisor_count = 1;
    prof.radical = 1;
    for (const auto& [p, e] : f.factors) {
        prof.divisor_count *= (e + 1);
        prof.prime_divisors.push_back(p);
        prof.radical *= p;
        prof.valuations[p] = e;
    }
    if (!prof.prime_divisors.empty()) prof.least_prime = prof.prime_divisors.front();
    return prof;
}

/// Least e >= 1 with a^e = 1 mod p, computed by descending from p-1 through
/// its prime factorization.
inline Natural multiplicative_order(const Natural& a, const Natural& p,
                                    const PrimeFactorization& fact_p_minus_1) {
    if (mpz_divisible_p(a.get_mpz_t(), p.get_mpz_t()))
        throw DomainError("multiplicative_order: p divides a");
    if (!fact_p_minus_1.complete() || fact_p_minus_1.value() != p - 1)
        throw DomainError("multiplicative_order: need a complete factorization of p-1");
    Natural e = p - 1;
    for (const auto& [q, _] : fact_p_minus_1.factors) {
        while (mpz_divisible_p(e.get_mpz_t(), q.get_mpz_t())) {
            Natural reduced = e / q;
            if (powmod(a, reduced, p) != 1) break;
            e = reduced;
        }
    }
    return e;
}

} // namespace lucasphi
