#pragma once

/**
 * Exact scalar arithmetic in the three coefficient rings the cardinality
 * calculus evaluates into:
 *
 *   - the rationals Q,
 *   - the p-local rationals Z_(p) (denominator prime to p), and
 *   - truncated p-adic integers, i.e. residues mod p^N with tracked
 *     precision N.
 *
 * Each ring carries the Fermat quotient x |-> (x - x^p)/p, which is the
 * unique additive p-derivation there. Two facts from that calculus drive
 * the design. First, x - x^p is always divisible by p on p-local inputs
 * (Fermat), so the quotient never leaves the ring; on truncated inputs the
 * division by p costs exactly one digit of precision, which the type
 * records instead of pretending the lost digit survived. Second, for
 * 0 < v(x) < infinity the quotient lowers the valuation by exactly one,
 * which is what the descent engine at higher levels leans on.
 *
 * Valuations are reported as a tagged value: finite(k), infinite (the
 * valuation of zero), or at-least(N) when a truncated residue is zero and
 * only a lower bound is knowable at precision N.
 *
 * Everything is exact; GMP supplies the underlying integers and rationals.
 */

#include <gmpxx.h>

#include <optional>
#include <string>

#include "cardinal/errors.hpp"
#include "cardinal/prime.hpp"

namespace cardinal {

using Integer = mpz_class;
using Rational = mpq_class;

// num/den reduced to lowest terms with positive denominator.
Rational make_rational(const Integer& num, const Integer& den);

Integer int_pow(const Integer& base, unsigned long exp);

// binomial(n, k) for any integer n, with the usual extension to negative n:
// binomial(-1, k) = (-1)^k and generally binomial(-n, k) = (-1)^k binomial(n+k-1, k).
Integer binomial(long n, unsigned long k);

namespace padic {

struct Valuation {
    enum class Kind { finite, infinite, at_least };

    Kind kind = Kind::infinite;
    long amount = 0; // the exact value for finite, the lower bound for at_least

    static Valuation finite(long k) { return {Kind::finite, k}; }
    static Valuation infinite() { return {Kind::infinite, 0}; }
    static Valuation at_least(long n) { return {Kind::at_least, n}; }

    bool is_finite() const { return kind == Kind::finite; }
    bool is_zero_valuation() const { return kind == Kind::finite && amount == 0; }

    friend bool operator==(const Valuation&, const Valuation&) = default;

    std::string to_string() const;
};

// Exact power of p dividing x; pre: x != 0.
long valuation_exact(const Integer& x, const Prime& p);

// v_p of a rational: finite(v(num) - v(den)), or infinite for zero.
Valuation valuation(const Rational& x, const Prime& p);

// True when the denominator of x (in lowest terms) is prime to p.
bool is_p_local(const Rational& x, const Prime& p);

// (x - x^p)/p. On p-local x the result is p-local again.
Rational fermat_quotient(const Rational& x, const Prime& p);

/**
 * A p-adic integer known modulo p^precision. Arithmetic combines operands
 * at the coarser of the two precisions; the Fermat quotient returns one
 * digit less than its input and throws precision_error when no digit is
 * left to give.
 */
class TruncatedPAdic {
public:
    TruncatedPAdic(Prime p, int precision, const Integer& value);

    const Prime& prime() const { return p_; }
    int precision() const { return precision_; }
    const Integer& residue() const { return residue_; }
    const Integer& modulus() const { return modulus_; }

    friend TruncatedPAdic operator+(const TruncatedPAdic& a, const TruncatedPAdic& b);
    friend TruncatedPAdic operator-(const TruncatedPAdic& a, const TruncatedPAdic& b);
    friend TruncatedPAdic operator*(const TruncatedPAdic& a, const TruncatedPAdic& b);
    TruncatedPAdic operator-() const;
    TruncatedPAdic pow(unsigned long exp) const;

    TruncatedPAdic fermat_quotient() const;

    // finite(k) for the exact power of p dividing the residue, or
    // at_least(precision) when the residue is zero.
    Valuation valuation() const;

    // Inverse mod p^precision when the residue is a unit (valuation zero).
    std::optional<TruncatedPAdic> try_invert() const;

    // Same residue at the coarser of the two precisions.
    bool congruent(const TruncatedPAdic& other) const;

    // Same prime, same precision, same residue.
    friend bool operator==(const TruncatedPAdic& a, const TruncatedPAdic& b);

    std::string to_string() const;

private:
    Prime p_;
    int precision_;
    Integer modulus_;
    Integer residue_;
};

// Reduce a p-local rational mod p^precision (denominator inverted mod p^precision).
TruncatedPAdic to_truncated(const Rational& x, const Prime& p, int precision);

/**
 * A scalar in one of the three coefficient rings, tagged with its ring and
 * prime. Mixed-ring or mixed-prime arithmetic is a contract violation and
 * throws; nothing coerces silently. p_local differs from exact_rational
 * only by its invariant (denominator prime to p) and by what counts as
 * invertible: a nonzero rational always inverts, a p-local value inverts
 * exactly when its valuation is zero.
 */
class Scalar {
public:
    enum class Ring { exact_rational, p_local, truncated };

    static Scalar exact(const Rational& v, const Prime& p);
    static Scalar p_local(const Rational& v, const Prime& p); // throws unless v is p-local
    static Scalar truncated(const TruncatedPAdic& v);
    static Scalar integer_in(Ring ring, const Integer& n, const Prime& p, int precision);

    Ring ring() const { return ring_; }
    const Prime& prime() const { return p_; }
    const Rational& rational_value() const;       // exact_rational or p_local only
    const TruncatedPAdic& truncated_value() const; // truncated only

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    Scalar operator-() const;
    Scalar pow(unsigned long exp) const;

    Scalar fermat_quotient() const;
    Valuation valuation() const;
    std::optional<Scalar> try_invert() const;

    bool is_zero() const;
    // Strict equality; for truncated scalars this includes equal precision.
    friend bool operator==(const Scalar& a, const Scalar& b);
    // Equality up to the coarser precision (only differs from == on truncated).
    bool congruent(const Scalar& other) const;

    std::string to_string() const;

private:
    Scalar(Ring ring, Prime p, Rational q, std::optional<TruncatedPAdic> t);

    Ring ring_;
    Prime p_;
    Rational q_;
    std::optional<TruncatedPAdic> t_;
};

} // namespace padic
} // namespace cardinal
