#pragma once

/**
 * Additive p-derivations and the machinery to verify them.
 *
 * An additive p-derivation on a commutative ring is a map d with d(0) =
 * d(1) = 0 and
 *
 *     d(x + y) = d(x) + d(y) + (x^p + y^p - (x+y)^p)/p.
 *
 * The fraction is notational: expanding (x+y)^p binomially, every mixed
 * term has a coefficient divisible by p, so the correction is a polynomial
 * with integer coefficients,
 *
 *     (x^p + y^p - (x+y)^p)/p = -sum_{i=1}^{p-1} (C(p,i)/p) x^i y^(p-i),
 *
 * and that is the form everything here evaluates. It makes the law
 * meaningful in rings where division by p is not available (for instance
 * Z/4), which is exactly where the nonexistence results live: in such
 * rings the torsion element 1 is not nilpotent, so no additive
 * p-derivation can exist, and an exhaustive search confirms it.
 *
 * On Q, on the p-local rationals, and on truncated p-adic integers the
 * unique additive p-derivation is the Fermat quotient (x - x^p)/p; those
 * instances are provided here. Each instance also induces a Frobenius
 * lift psi(x) = x^p + p*d(x), additive and congruent to x^p mod p. On Q
 * with the Fermat quotient psi collapses to the identity.
 *
 * The law checker is a template over any instance exposing the small ring
 * vocabulary (zero, one, add, neg, mul, delta, eq, from_integer, sample),
 * so the symbolic rig of spaces can be checked through the identical code
 * path as the numeric rings.
 */

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cardinal/padic.hpp"

namespace cardinal {
namespace delta {

// Coefficients of the integer-coefficient correction polynomial: pairs
// (i, -C(p,i)/p) for i = 1..p-1, so that the correction term is
// sum_i coeff_i * x^i * y^(p-i).
std::vector<std::pair<unsigned long, Integer>> correction_coefficients(const Prime& p);

// Fermat quotient of an integer, (t - t^p)/p; lands in Z by Fermat's
// little theorem. Used by the module-rule check in arbitrary instances.
Integer integer_fermat_quotient(const Integer& t, const Prime& p);

struct LawFailure {
    std::string law;
    std::string description;
};

struct LawReport {
    std::string ring;
    long checked = 0;
    std::vector<LawFailure> failures;
    bool passed() const { return failures.empty(); }
};

template <class R>
typename R::Element ring_pow(const R& ring, const typename R::Element& x, unsigned long k) {
    typename R::Element acc = ring.one();
    for (unsigned long i = 0; i < k; ++i)
        acc = ring.mul(acc, x);
    return acc;
}

template <class R>
typename R::Element ring_scale(const R& ring, const Integer& t, const typename R::Element& x) {
    return ring.mul(ring.from_integer(t), x);
}

// (x^p + y^p - (x+y)^p)/p evaluated through its integer-coefficient form.
template <class R>
typename R::Element additivity_correction(const R& ring, const typename R::Element& x,
                                          const typename R::Element& y) {
    typename R::Element acc = ring.zero();
    for (const auto& [i, coeff] : correction_coefficients(ring.prime())) {
        typename R::Element term =
            ring.mul(ring_pow(ring, x, i),
                     ring_pow(ring, y, static_cast<unsigned long>(ring.prime().value()) - i));
        acc = ring.add(acc, ring_scale(ring, coeff, term));
    }
    return acc;
}

// psi(x) = x^p + p*delta(x).
template <class R>
typename R::Element frobenius_lift(const R& ring, const typename R::Element& x) {
    unsigned long p = static_cast<unsigned long>(ring.prime().value());
    return ring.add(ring_pow(ring, x, p), ring_scale(ring, Integer(ring.prime().value()),
                                                     ring.delta(x)));
}

/**
 * Samples `samples` pairs from the instance and checks, exactly:
 *   - normalization: delta(0) = delta(1) = 0 (once),
 *   - additivity with the integer-coefficient correction,
 *   - the module rule delta(t x) = t delta(x) + dtilde(t) x^p for small
 *     integers t, with dtilde the integer Fermat quotient,
 *   - additivity of the induced Frobenius lift.
 * Failures carry printable descriptions; nothing stops at the first one.
 */
template <class R>
LawReport check_delta_laws(const R& ring, long samples, std::uint64_t seed) {
    LawReport report;
    report.ring = ring.name();
    std::mt19937_64 rng(seed);

    if (!ring.eq(ring.delta(ring.zero()), ring.zero()))
        report.failures.push_back({"normalization", "delta(0) != 0"});
    if (!ring.eq(ring.delta(ring.one()), ring.zero()))
        report.failures.push_back({"normalization", "delta(1) != 0"});
    report.checked += 2;

    std::uniform_int_distribution<long> ts(-6, 6);
    for (long i = 0; i < samples; ++i) {
        typename R::Element x = ring.sample(rng);
        typename R::Element y = ring.sample(rng);

        typename R::Element lhs = ring.delta(ring.add(x, y));
        typename R::Element rhs = ring.add(ring.add(ring.delta(x), ring.delta(y)),
                                           additivity_correction(ring, x, y));
        if (!ring.eq(lhs, rhs))
            report.failures.push_back(
                {"additivity", "x = " + ring.to_string(x) + ", y = " + ring.to_string(y)});

        Integer t(ts(rng));
        typename R::Element mod_lhs = ring.delta(ring_scale(ring, t, x));
        typename R::Element xp =
            ring_pow(ring, x, static_cast<unsigned long>(ring.prime().value()));
        typename R::Element mod_rhs =
            ring.add(ring_scale(ring, t, ring.delta(x)),
                     ring_scale(ring, integer_fermat_quotient(t, ring.prime()), xp));
        if (!ring.eq(mod_lhs, mod_rhs))
            report.failures.push_back(
                {"module-rule", "t = " + t.get_str() + ", x = " + ring.to_string(x)});

        typename R::Element frob_lhs = frobenius_lift(ring, ring.add(x, y));
        typename R::Element frob_rhs =
            ring.add(frobenius_lift(ring, x), frobenius_lift(ring, y));
        if (!ring.eq(frob_lhs, frob_rhs))
            report.failures.push_back(
                {"frobenius-additivity",
                 "x = " + ring.to_string(x) + ", y = " + ring.to_string(y)});

        report.checked += 3;
    }
    return report;
}

// Q with the Fermat quotient. Samples mix small integers, p-powers and
// random fractions, since those exercise different valuation regimes.
struct RationalFermatRing {
    using Element = Rational;

    explicit RationalFermatRing(Prime p) : p_(p) {}

    const Prime& prime() const { return p_; }
    std::string name() const { return "Q(fermat, p=" + std::to_string(p_.value()) + ")"; }
    Element zero() const { return Rational(0); }
    Element one() const { return Rational(1); }
    Element add(const Element& a, const Element& b) const { return a + b; }
    Element neg(const Element& a) const { return -a; }
    Element mul(const Element& a, const Element& b) const { return a * b; }
    Element delta(const Element& a) const { return padic::fermat_quotient(a, p_); }
    bool eq(const Element& a, const Element& b) const { return a == b; }
    Element from_integer(const Integer& n) const { return Rational(n); }
    std::string to_string(const Element& a) const { return a.get_str(); }
    Element sample(std::mt19937_64& rng) const;

private:
    Prime p_;
};

// Z_(p) with the Fermat quotient; closed because x - x^p always has
// positive valuation on p-local inputs.
struct PLocalFermatRing {
    using Element = Rational;

    explicit PLocalFermatRing(Prime p) : p_(p) {}

    const Prime& prime() const { return p_; }
    std::string name() const { return "Z_(p)(fermat, p=" + std::to_string(p_.value()) + ")"; }
    Element zero() const { return Rational(0); }
    Element one() const { return Rational(1); }
    Element add(const Element& a, const Element& b) const { return a + b; }
    Element neg(const Element& a) const { return -a; }
    Element mul(const Element& a, const Element& b) const { return a * b; }
    Element delta(const Element& a) const { return padic::fermat_quotient(a, p_); }
    bool eq(const Element& a, const Element& b) const { return a == b; }
    Element from_integer(const Integer& n) const { return Rational(n); }
    std::string to_string(const Element& a) const { return a.get_str(); }
    Element sample(std::mt19937_64& rng) const;

private:
    Prime p_;
};

// Truncated p-adic integers at a fixed working precision. Equality in the
// law checks is congruence at the shared precision, which is the honest
// statement after the one-digit cost of each Fermat quotient.
struct TruncatedFermatRing {
    using Element = padic::TruncatedPAdic;

    TruncatedFermatRing(Prime p, int precision) : p_(p), precision_(precision) {}

    const Prime& prime() const { return p_; }
    std::string name() const {
        return "Z_p(fermat, p=" + std::to_string(p_.value()) +
               ", N=" + std::to_string(precision_) + ")";
    }
    Element zero() const { return Element(p_, precision_, Integer(0)); }
    Element one() const { return Element(p_, precision_, Integer(1)); }
    Element add(const Element& a, const Element& b) const { return a + b; }
    Element neg(const Element& a) const { return -a; }
    Element mul(const Element& a, const Element& b) const { return a * b; }
    Element delta(const Element& a) const { return a.fermat_quotient(); }
    bool eq(const Element& a, const Element& b) const { return a.congruent(b); }
    Element from_integer(const Integer& n) const { return Element(p_, precision_, n); }
    std::string to_string(const Element& a) const { return a.to_string(); }
    Element sample(std::mt19937_64& rng) const;

private:
    Prime p_;
    int precision_;
};

// Negative control: any instance with its delta replaced by the identity
// map. Breaks additivity on purpose so the reporting path stays honest.
template <class R>
struct CorruptedDelta : R {
    explicit CorruptedDelta(const R& base) : R(base) {}
    std::string name() const { return R::name() + "[corrupted]"; }
    typename R::Element delta(const typename R::Element& x) const { return x; }
};

/**
 * A finite commutative unital ring given by full addition and
 * multiplication tables over elements 0..n-1. All axioms are checked
 * exhaustively at construction: abelian group under addition,
 * commutative monoid under multiplication, distributivity.
 */
class FiniteRingTable {
public:
    FiniteRingTable(std::vector<std::vector<int>> add_table,
                    std::vector<std::vector<int>> mul_table);

    static FiniteRingTable cyclic(int n); // Z/n

    int size() const { return n_; }
    int zero() const { return zero_; }
    int one() const { return one_; }
    int add(int a, int b) const { return add_[a][b]; }
    int mul(int a, int b) const { return mul_[a][b]; }
    int neg(int a) const { return neg_[a]; }

private:
    int n_;
    int zero_ = -1;
    int one_ = -1;
    std::vector<std::vector<int>> add_;
    std::vector<std::vector<int>> mul_;
    std::vector<int> neg_;
};

/**
 * Every additive p-derivation on the table ring, found by exhaustive
 * search over candidate value tables. Enumeration is depth-first with the
 * additivity constraint checked on every assigned triple, which prunes
 * without ever discarding a satisfying candidate; the result is the
 * complete list. The search space after the forced values delta(0) =
 * delta(1) = 0 is |R|^(|R|-2), guarded at 10^8.
 */
std::vector<std::vector<int>> search_torsion_derivations(const FiniteRingTable& ring,
                                                         const Prime& p);

} // namespace delta
} // namespace cardinal
