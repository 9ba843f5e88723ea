#pragma once

// Lucas-type quantities for a coprime pair (x1, y1): the quotient
// (x1^m - y1^m)/(x1 - y1), homogeneous cyclotomic values, cyclotomic-aware
// factorization, rank of apparition and primitive prime divisors.

#include <map>
#include <tuple>
#include <vector>

#include "lucasphi/arith.hpp"

namespace lucasphi {

/// Coprime core of a pair: x1 > y1 >= 1, gcd(x1, y1) = 1.
struct LucasPair {
    Natural x1;
    Natural y1;

    LucasPair(Natural x, Natural y) : x1(std::move(x)), y1(std::move(y)) {
        if (y1 < 1 || x1 <= y1)
            throw DomainError("LucasPair requires x1 > y1 >= 1, got (" + x1.get_str() + ", " +
                              y1.get_str() + ")");
        if (gcd_natural(x1, y1) != 1)
            throw DomainError("LucasPair requires gcd(x1, y1) = 1, got (" + x1.get_str() + ", " +
                              y1.get_str() + ")");
    }

    bool both_odd() const { return mpz_odd_p(x1.get_mpz_t()) && mpz_odd_p(y1.get_mpz_t()); }

    friend bool operator<(const LucasPair& a, const LucasPair& b) {
        return std::tie(a.x1, a.y1) < std::tie(b.x1, b.y1);
    }
    friend bool operator==(const LucasPair& a, const LucasPair& b) {
        return a.x1 == b.x1 && a.y1 == b.y1;
    }
};

/// (x^m - y^m)/(x - y), exact. Does not require gcd(x, y) = 1.
inline Natural lucas_quotient(const Natural& x, const Natural& y, unsigned long m) {
    if (x == y) throw DomainError("lucas_quotient requires x != y");
    if (y < 1 || x < y) throw DomainError("lucas_quotient requires x > y >= 1");
    if (m < 1) throw DomainError("lucas_quotient requires m >= 1");
    Natural num = pow_natural(x, m) - pow_natural(y, m);
    Natural q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), Natural(x - y).get_mpz_t());
    if (r != 0) throw InternalError("lucas_quotient: inexact division");
    return q;
}

namespace detail {

/// Squarefree divisors of d together with their Moebius sign.
inline std::vector<std::pair<unsigned long, int>> moebius_divisors(unsigned long d) {
    PrimeFactorization f = factorize(Natural(d));
    std::vector<std::pair<unsigned long, int>> divs{{1, +1}};
    for (const auto& [p, _] : f.factors) {
        unsigned long pu = to_u64(p);
        size_t n = divs.size();
        for (size_t i = 0; i < n; ++i) divs.push_back({divs[i].first * pu, -divs[i].second});
    }
    return divs;
}

/// All divisors of m, ascending.
inline std::vector<unsigned long> divisors_of(unsigned long m) {
    std::vector<unsigned long> divs;
    for (unsigned long d = 1; d * d <= m; ++d) {
        if (m % d == 0) {
            divs.push_back(d);
            if (d != m / d) divs.push_back(m / d);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

} // namespace detail

/// Homogeneous cyclotomic value Phi_d(x, y) = prod_{e|d} (x^{d/e} - y^{d/e})^{mu(e)}.
/// Every intermediate division must be exact; a nonzero remainder is a bug.
inline Natural cyclotomic_value(unsigned long d, const Natural& x, const Natural& y) {
    if (d < 1) throw DomainError("cyclotomic_value requires d >= 1");
    if (y < 1 || x <= y) throw DomainError("cyclotomic_value requires x > y >= 1");
    Natural num = 1, den = 1;
    for (const auto& [e, mu] : detail::moebius_divisors(d)) {
        Natural term = pow_natural(x, d / e) - pow_natural(y, d / e);
        (mu > 0 ? num : den) *= term;
    }
    Natural q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (r != 0) throw InternalError("cyclotomic_value: inexact division for d=" + std::to_string(d));
    return q;
}

/// Memo for factorizations of cyclotomic values, shared within one task.
struct FactorCache {
    std::map<std::tuple<Natural, Natural, unsigned long>, PrimeFactorization> cyclotomic;
};

inline const PrimeFactorization& cyclotomic_factorization(const LucasPair& pair, unsigned long d,
                                                          const Budget& budget, FactorCache& cache) {
    auto key = std::make_tuple(pair.x1, pair.y1, d);
    auto it = cache.cyclotomic.find(key);
    if (it != cache.cyclotomic.end()) return it->second;
    PrimeFactorization f = factorize(cyclotomic_value(d, pair.x1, pair.y1), budget);
    return cache.cyclotomic.emplace(key, std::move(f)).first->second;
}

/// Factorization of x1^m - y1^m assembled from the factorizations of the
/// cyclotomic parts Phi_d, d | m. Incomplete if any part resists the budget.
inline PrimeFactorization factor_power_difference(const LucasPair& pair, unsigned long m,
                                                  const Budget& budget = {},
                                                  FactorCache* cache = nullptr) {
    if (m < 1) throw DomainError("factor_power_difference requires m >= 1");
    FactorCache local;
    FactorCache& c = cache ? *cache : local;
    PrimeFactorization result;
    for (unsigned long d : detail::divisors_of(m))
        result.merge(cyclotomic_factorization(pair, d, budget, c));
    if (result.value() != pow_natural(pair.x1, m) - pow_natural(pair.y1, m))
        throw InternalError("factor_power_difference: product invariant violated");
    return result;
}

/// Rank of apparition ell_p of an odd prime p with p not dividing x1*y1.
struct RankOfApparition {
    LucasPair pair;
    Natural p;
    Natural ell;
};

/// ell_p as the multiplicative order of x1 * y1^{-1} modulo p.
inline RankOfApparition rank_of_apparition(const LucasPair& pair, const Natural& p,
                                           const Budget& budget = {}) {
    if (p == 2 || mpz_even_p(p.get_mpz_t()) || !is_prime(p))
        throw DomainError("rank_of_apparition requires an odd prime, got " + p.get_str());
    if (mpz_divisible_p(pair.x1.get_mpz_t(), p.get_mpz_t()) ||
        mpz_divisible_p(pair.y1.get_mpz_t(), p.get_mpz_t()))
        throw DomainError("ell_p undefined: " + p.get_str() + " divides x1*y1");
    Natural y_inv;
    if (!mpz_invert(y_inv.get_mpz_t(), pair.y1.get_mpz_t(), p.get_mpz_t()))
        throw InternalError("rank_of_apparition: inverse must exist");
    Natural a = (pair.x1 * y_inv) % p;
    PrimeFactorization fpm1 = factorize(p - 1, budget);
    if (!fpm1.complete())
        throw IncompleteFactorizationError("rank_of_apparition: cannot factor p-1 for p=" +
                                           p.get_str());
    return RankOfApparition{pair, p, multiplicative_order(a, p, fpm1)};
}

/// Direct check that ell_p = n: p | x1^n - y1^n and p does not divide
/// x1^{n/q} - y1^{n/q} for any prime q | n. Needs only the factorization of n.
inline bool has_rank(const LucasPair& pair, const Natural& p, unsigned long n) {
    if (mpz_divisible_p(pair.x1.get_mpz_t(), p.get_mpz_t()) ||
        mpz_divisible_p(pair.y1.get_mpz_t(), p.get_mpz_t()))
        return false;
    auto divides_diff = [&](unsigned long e) {
        return powmod(pair.x1, e, p) == powmod(pair.y1, e, p);
    };
    if (!divides_diff(n)) return false;
    for (const auto& [q, _] : factorize(Natural(n)).factors)
        if (divides_diff(n / to_u64(q))) return false;
    return true;
}

/// Primes with rank of apparition exactly n, plus any unfactored remainder of
/// Phi_n(x1, y1) that may hide further ones.
struct PrimitiveDivisors {
    std::vector<Natural> primes; // ascending
    Natural unfactored{1};       // 1 iff the underlying factorization completed

    bool complete() const { return unfactored == 1; }
};

inline PrimitiveDivisors primitive_prime_divisors(const LucasPair& pair, unsigned long n,
                                                  const Budget& budget = {},
                                                  FactorCache* cache = nullptr) {
    if (n < 1) throw DomainError("primitive_prime_divisors requires n >= 1");
    FactorCache local;
    FactorCache& c = cache ? *cache : local;
    PrimitiveDivisors result;
    if (n == 1) {
        // ell_p = 1 iff p | x1 - y1
        const PrimeFactorization& f = cyclotomic_factorization(pair, 1, budget, c);
        for (const auto& [p, _] : f.factors) result.primes.push_back(p);
        result.unfactored = f.cofactor;
        return result;
    }
    const PrimeFactorization& f = cyclotomic_factorization(pair, n, budget, c);
    for (const auto& [p, _] : f.factors)
        if (has_rank(pair, p, n)) result.primes.push_back(p);
    result.unfactored = f.cofactor;
    return result;
}

} // namespace lucasphi
