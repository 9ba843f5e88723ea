#pragma once

// Instances of phi(z (x^m - y^m)/(x - y)) = z (x^n - y^n)/(x - y):
// evaluation, classification, reduction to coprime exponents, and the
// Mersenne-prime solution family.

#include <numeric>
#include <string>
#include <tuple>

#include "lucasphi/lucas.hpp"

namespace lucasphi {

struct EquationInstance {
    Natural x;
    Natural y;
    Natural z;
    unsigned long m;
    unsigned long n;

    EquationInstance(Natural x_, Natural y_, Natural z_, unsigned long m_, unsigned long n_)
        : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)), m(m_), n(n_) {
        if (y < 1 || x <= y) throw DomainError("EquationInstance requires x > y >= 1");
        if (z < 1) throw DomainError("EquationInstance requires z >= 1");
        if (m < 1 || n < 1) throw DomainError("EquationInstance requires m, n >= 1");
    }

    friend bool operator==(const EquationInstance& a, const EquationInstance& b) {
        return std::tie(a.x, a.y, a.z, a.m, a.n) == std::tie(b.x, b.y, b.z, b.m, b.n);
    }
    friend bool operator<(const EquationInstance& a, const EquationInstance& b) {
        return std::tie(a.x, a.y, a.z, a.m, a.n) < std::tie(b.x, b.y, b.z, b.m, b.n);
    }

    std::string to_string() const {
        return "(" + x.get_str() + ", " + y.get_str() + ", " + z.get_str() + ", " +
               std::to_string(m) + ", " + std::to_string(n) + ")";
    }
};

/// x = d1*x1, y = d1*y1 with d1 = gcd(x, y) and (x1, y1) coprime.
struct SplitPair {
    Natural d1;
    LucasPair pair;
};

inline SplitPair split_gcd(const Natural& x, const Natural& y) {
    if (y < 1 || x <= y) throw DomainError("split_gcd requires x > y >= 1");
    Natural d1 = gcd_natural(x, y);
    return SplitPair{d1, LucasPair(x / d1, y / d1)};
}

/// Outcome of evaluating one instance. Undecided means the factorization of
/// the left side did not complete within the budget.
struct EvalResult {
    bool decided = false;
    Natural lhs{0};
    Natural rhs{0};
    bool holds = false;
    std::string reason; // set when undecided
};

/// lhs = phi(z (x^m - y^m)/(x - y)) via complete factorization of
/// z * d1^{m-1} * prod_{d | m, d > 1} Phi_d(x1, y1); rhs by direct evaluation.
inline EvalResult evaluate(const EquationInstance& inst, const Budget& budget = {},
                           FactorCache* cache = nullptr) {
    FactorCache local;
    FactorCache& c = cache ? *cache : local;
    SplitPair split = split_gcd(inst.x, inst.y);

    PrimeFactorization left = factorize(inst.z, budget);
    if (split.d1 > 1) left.merge(factorize(split.d1, budget), inst.m - 1);
    for (unsigned long d : detail::divisors_of(inst.m))
        if (d > 1) left.merge(cyclotomic_factorization(split.pair, d, budget, c));

    EvalResult res;
    res.rhs = inst.z * lucas_quotient(inst.x, inst.y, inst.n);
    if (!left.complete()) {
        res.reason = "incomplete factorization, cofactor " + left.cofactor.get_str();
        return res;
    }
    if (left.value() != inst.z * lucas_quotient(inst.x, inst.y, inst.m))
        throw InternalError("evaluate: assembled factorization does not match the left side");
    res.decided = true;
    res.lhs = euler_phi(left);
    res.holds = (res.lhs == res.rhs);
    return res;
}

enum class SolutionKind { Trivial, NontrivialSolution, NotSolution, Undecided };

struct SolutionClass {
    SolutionKind kind;
    std::string reason; // set for Undecided

    bool is_solution() const {
        return kind == SolutionKind::Trivial || kind == SolutionKind::NontrivialSolution;
    }
};

inline const char* to_string(SolutionKind k) {
    switch (k) {
    case SolutionKind::Trivial: return "trivial";
    case SolutionKind::NontrivialSolution: return "nontrivial_solution";
    case SolutionKind::NotSolution: return "not_solution";
    case SolutionKind::Undecided: return "undecided";
    }
    return "?";
}

/// The family (a, b, 1, 1, 1) is trivial by definition and needs no
/// evaluation; everything else is decided by evaluate.
inline SolutionClass classify(const EquationInstance& inst, const Budget& budget = {},
                              FactorCache* cache = nullptr) {
    if (inst.m == 1 && inst.n == 1 && inst.z == 1) return {SolutionKind::Trivial, {}};
    EvalResult ev = evaluate(inst, budget, cache);
    if (!ev.decided) return {SolutionKind::Undecided, ev.reason};
    return {ev.holds ? SolutionKind::NontrivialSolution : SolutionKind::NotSolution, {}};
}

/// Exponent reduction: with d' = gcd(m, n), the instance
/// (x, y, z, m, n) maps to (x^{d'}, y^{d'}, z (x^{d'} - y^{d'})/(x - y), m/d', n/d'),
/// which has coprime exponents and preserves solution-hood and the z-window.
struct ReducedInstance {
    EquationInstance original;
    unsigned long d_prime;
    EquationInstance reduced;
};

inline ReducedInstance reduce_to_coprime(const EquationInstance& inst) {
    unsigned long d = std::gcd(inst.m, inst.n);
    if (d == 1) return {inst, 1, inst};
    Natural xd = pow_natural(inst.x, d);
    Natural yd = pow_natural(inst.y, d);
    Natural zd = inst.z * lucas_quotient(inst.x, inst.y, d);
    return {inst, d, EquationInstance(xd, yd, zd, inst.m / d, inst.n / d)};
}

/// Instance (2, 1, 2^beta p^u, q, q-1) with p = 2^q - 1 prime.
inline EquationInstance mersenne_family(unsigned long q, unsigned long beta, unsigned long u) {
    if (!is_prime(Natural(q))) throw DomainError("mersenne_family: q must be prime");
    if (beta < 1) throw DomainError("mersenne_family: beta >= 1 required");
    Natural p = pow2(q) - 1;
    if (!is_prime(p)) {
        PrimeFactorization f = factorize(p);
        std::string msg = "mersenne_family: 2^" + std::to_string(q) + "-1 = " + p.get_str() +
                          " is composite";
        if (!f.factors.empty()) msg += " (factor " + f.factors.front().first.get_str() + ")";
        throw DomainError(msg);
    }
    Natural z = pow2(beta) * pow_natural(p, u);
    return EquationInstance(2, 1, z, q, q - 1);
}

} // namespace lucasphi
