#include "cardinal/padic.hpp"

#include <utility>

namespace cardinal {

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Integer int_pow(const Integer& base, unsigned long exp) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

Integer binomial(long n, unsigned long k) {
    Integer r;
    Integer nz(n);
    mpz_bin_ui(r.get_mpz_t(), nz.get_mpz_t(), k);
    return r;
}

namespace padic {

std::string Valuation::to_string() const {
    switch (kind) {
    case Kind::finite:
        return std::to_string(amount);
    case Kind::infinite:
        return "infinite";
    case Kind::at_least:
        return ">=" + std::to_string(amount);
    }
    return "?";
}

long valuation_exact(const Integer& x, const Prime& p) {
    if (x == 0)
        throw std::invalid_argument("valuation_exact of zero");
    Integer q;
    return static_cast<long>(
        mpz_remove(q.get_mpz_t(), x.get_mpz_t(), Integer(p.value()).get_mpz_t()));
}

Valuation valuation(const Rational& x, const Prime& p) {
    if (x == 0)
        return Valuation::infinite();
    long vn = x.get_num() == 1 ? 0 : valuation_exact(x.get_num(), p);
    long vd = x.get_den() == 1 ? 0 : valuation_exact(x.get_den(), p);
    return Valuation::finite(vn - vd);
}

bool is_p_local(const Rational& x, const Prime& p) {
    return x.get_den() % p.value() != 0;
}

Rational fermat_quotient(const Rational& x, const Prime& p) {
    Rational xp;
    mpz_pow_ui(xp.get_num().get_mpz_t(), x.get_num().get_mpz_t(),
               static_cast<unsigned long>(p.value()));
    mpz_pow_ui(xp.get_den().get_mpz_t(), x.get_den().get_mpz_t(),
               static_cast<unsigned long>(p.value()));
    return (x - xp) / Rational(p.value());
}

TruncatedPAdic::TruncatedPAdic(Prime p, int precision, const Integer& value)
    : p_(p), precision_(precision) {
    if (precision < 1)
        throw std::invalid_argument("truncated p-adic precision must be >= 1");
    modulus_ = int_pow(Integer(p.value()), static_cast<unsigned long>(precision));
    mpz_mod(residue_.get_mpz_t(), value.get_mpz_t(), modulus_.get_mpz_t());
}

namespace {

// The shared precision of a binary operation is the coarser of the inputs.
int align(const TruncatedPAdic& a, const TruncatedPAdic& b) {
    if (a.prime() != b.prime())
        throw std::invalid_argument("truncated p-adic arithmetic across different primes");
    return std::min(a.precision(), b.precision());
}

} // namespace

TruncatedPAdic operator+(const TruncatedPAdic& a, const TruncatedPAdic& b) {
    return TruncatedPAdic(a.prime(), align(a, b), a.residue() + b.residue());
}

TruncatedPAdic operator-(const TruncatedPAdic& a, const TruncatedPAdic& b) {
    return TruncatedPAdic(a.prime(), align(a, b), a.residue() - b.residue());
}

TruncatedPAdic operator*(const TruncatedPAdic& a, const TruncatedPAdic& b) {
    return TruncatedPAdic(a.prime(), align(a, b), a.residue() * b.residue());
}

TruncatedPAdic TruncatedPAdic::operator-() const {
    return TruncatedPAdic(p_, precision_, -residue_);
}

TruncatedPAdic TruncatedPAdic::pow(unsigned long exp) const {
    Integer r;
    Integer e(static_cast<unsigned long>(exp));
    mpz_powm(r.get_mpz_t(), residue_.get_mpz_t(), e.get_mpz_t(), modulus_.get_mpz_t());
    return TruncatedPAdic(p_, precision_, r);
}

TruncatedPAdic TruncatedPAdic::fermat_quotient() const {
    if (precision_ < 2)
        throw precision_error("fermat quotient needs precision >= 2, have " +
                              std::to_string(precision_));
    // x - x^p is divisible by p for every residue (Fermat), so dividing by p
    // is exact and the result is determined mod p^(precision-1).
    TruncatedPAdic diff = *this - this->pow(static_cast<unsigned long>(p_.value()));
    Integer q = diff.residue() / p_.value();
    return TruncatedPAdic(p_, precision_ - 1, q);
}

Valuation TruncatedPAdic::valuation() const {
    if (residue_ == 0)
        return Valuation::at_least(precision_);
    return Valuation::finite(valuation_exact(residue_, p_));
}

std::optional<TruncatedPAdic> TruncatedPAdic::try_invert() const {
    Integer r;
    if (mpz_invert(r.get_mpz_t(), residue_.get_mpz_t(), modulus_.get_mpz_t()) == 0)
        return std::nullopt;
    return TruncatedPAdic(p_, precision_, r);
}

bool TruncatedPAdic::congruent(const TruncatedPAdic& other) const {
    int prec = align(*this, other);
    Integer m = int_pow(Integer(p_.value()), static_cast<unsigned long>(prec));
    Integer a, b;
    mpz_mod(a.get_mpz_t(), residue_.get_mpz_t(), m.get_mpz_t());
    mpz_mod(b.get_mpz_t(), other.residue().get_mpz_t(), m.get_mpz_t());
    return a == b;
}

bool operator==(const TruncatedPAdic& a, const TruncatedPAdic& b) {
    return a.p_ == b.p_ && a.precision_ == b.precision_ && a.residue_ == b.residue_;
}

std::string TruncatedPAdic::to_string() const {
    return residue_.get_str() + " mod " + std::to_string(p_.value()) + "^" +
           std::to_string(precision_);
}

TruncatedPAdic to_truncated(const Rational& x, const Prime& p, int precision) {
    if (!is_p_local(x, p))
        throw std::invalid_argument("cannot truncate a rational with denominator divisible by " +
                                    std::to_string(p.value()));
    Integer mod = int_pow(Integer(p.value()), static_cast<unsigned long>(precision));
    Integer den_inv;
    Integer den = x.get_den();
    if (mpz_invert(den_inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::invalid_argument("denominator not invertible at the requested precision");
    return TruncatedPAdic(p, precision, x.get_num() * den_inv);
}

Scalar::Scalar(Ring ring, Prime p, Rational q, std::optional<TruncatedPAdic> t)
    : ring_(ring), p_(p), q_(std::move(q)), t_(std::move(t)) {}

Scalar Scalar::exact(const Rational& v, const Prime& p) {
    return Scalar(Ring::exact_rational, p, v, std::nullopt);
}

Scalar Scalar::p_local(const Rational& v, const Prime& p) {
    if (!is_p_local(v, p))
        throw std::invalid_argument("value is not p-local at p = " + std::to_string(p.value()) +
                                    ": " + v.get_str());
    return Scalar(Ring::p_local, p, v, std::nullopt);
}

Scalar Scalar::truncated(const TruncatedPAdic& v) {
    return Scalar(Ring::truncated, v.prime(), Rational(), v);
}

Scalar Scalar::integer_in(Ring ring, const Integer& n, const Prime& p, int precision) {
    switch (ring) {
    case Ring::exact_rational:
        return exact(Rational(n), p);
    case Ring::p_local:
        return p_local(Rational(n), p);
    case Ring::truncated:
        return truncated(TruncatedPAdic(p, precision, n));
    }
    throw std::invalid_argument("unknown scalar ring");
}

const Rational& Scalar::rational_value() const {
    if (ring_ == Ring::truncated)
        throw std::invalid_argument("no rational value in a truncated scalar");
    return q_;
}

const TruncatedPAdic& Scalar::truncated_value() const {
    if (ring_ != Ring::truncated)
        throw std::invalid_argument("not a truncated scalar");
    return *t_;
}

namespace {

void require_same_ring(const Scalar& a, const Scalar& b) {
    if (a.ring() != b.ring() || a.prime() != b.prime())
        throw std::invalid_argument("scalar arithmetic across different rings");
}

} // namespace

Scalar operator+(const Scalar& a, const Scalar& b) {
    require_same_ring(a, b);
    if (a.ring() == Scalar::Ring::truncated)
        return Scalar::truncated(a.truncated_value() + b.truncated_value());
    Rational r = a.rational_value() + b.rational_value();
    return a.ring() == Scalar::Ring::p_local ? Scalar::p_local(r, a.prime())
                                             : Scalar::exact(r, a.prime());
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    require_same_ring(a, b);
    if (a.ring() == Scalar::Ring::truncated)
        return Scalar::truncated(a.truncated_value() - b.truncated_value());
    Rational r = a.rational_value() - b.rational_value();
    return a.ring() == Scalar::Ring::p_local ? Scalar::p_local(r, a.prime())
                                             : Scalar::exact(r, a.prime());
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    require_same_ring(a, b);
    if (a.ring() == Scalar::Ring::truncated)
        return Scalar::truncated(a.truncated_value() * b.truncated_value());
    Rational r = a.rational_value() * b.rational_value();
    return a.ring() == Scalar::Ring::p_local ? Scalar::p_local(r, a.prime())
                                             : Scalar::exact(r, a.prime());
}

Scalar Scalar::operator-() const {
    if (ring_ == Ring::truncated)
        return truncated(-*t_);
    Rational r = -q_;
    return ring_ == Ring::p_local ? p_local(r, p_) : exact(r, p_);
}

Scalar Scalar::pow(unsigned long exp) const {
    if (ring_ == Ring::truncated)
        return truncated(t_->pow(exp));
    Rational r;
    mpz_pow_ui(r.get_num().get_mpz_t(), q_.get_num().get_mpz_t(), exp);
    mpz_pow_ui(r.get_den().get_mpz_t(), q_.get_den().get_mpz_t(), exp);
    return ring_ == Ring::p_local ? p_local(r, p_) : exact(r, p_);
}

Scalar Scalar::fermat_quotient() const {
    if (ring_ == Ring::truncated)
        return truncated(t_->fermat_quotient());
    Rational r = padic::fermat_quotient(q_, p_);
    return ring_ == Ring::p_local ? p_local(r, p_) : exact(r, p_);
}

Valuation Scalar::valuation() const {
    if (ring_ == Ring::truncated)
        return t_->valuation();
    return padic::valuation(q_, p_);
}

std::optional<Scalar> Scalar::try_invert() const {
    switch (ring_) {
    case Ring::exact_rational: {
        if (q_ == 0)
            return std::nullopt;
        return exact(1 / q_, p_);
    }
    case Ring::p_local: {
        if (!padic::valuation(q_, p_).is_zero_valuation())
            return std::nullopt;
        return p_local(1 / q_, p_);
    }
    case Ring::truncated: {
        auto inv = t_->try_invert();
        if (!inv)
            return std::nullopt;
        return truncated(*inv);
    }
    }
    return std::nullopt;
}

bool Scalar::is_zero() const {
    return ring_ == Ring::truncated ? t_->residue() == 0 : q_ == 0;
}

bool operator==(const Scalar& a, const Scalar& b) {
    if (a.ring_ != b.ring_ || a.p_ != b.p_)
        return false;
    if (a.ring_ == Scalar::Ring::truncated)
        return *a.t_ == *b.t_;
    return a.q_ == b.q_;
}

bool Scalar::congruent(const Scalar& other) const {
    if (ring_ != other.ring_ || p_ != other.p_)
        return false;
    if (ring_ == Ring::truncated)
        return t_->congruent(*other.t_);
    return q_ == other.q_;
}

std::string Scalar::to_string() const {
    return ring_ == Ring::truncated ? t_->to_string() : q_.get_str();
}

} // namespace padic
} // namespace cardinal
