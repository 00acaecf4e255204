#pragma once

/**
 * Spans of finite groupoids and their matrix shadow. A span A <- E -> B
 * composes by homotopy pullback; to_matrix sends it to an exact rational
 * matrix indexed by isomorphism classes, and that assignment is
 * functorial. Integration along a map q is the sandwich by the right-way
 * and wrong-way span matrices of q, and check_calculus replays the
 * integral calculus (Fubini, homogeneity, distributivity, additivity)
 * on seeded random instances.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "cardinal/groupoids.hpp"
#include "cardinal/padic.hpp"

namespace cardinal {
namespace spans {

class SpanMatrix {
public:
    SpanMatrix(int rows, int cols);
    static SpanMatrix identity(int n);
    static SpanMatrix kronecker(const SpanMatrix& a, const SpanMatrix& b);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& at(int r, int c) { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Rational& at(int r, int c) const {
        return entries_[static_cast<std::size_t>(r) * cols_ + c];
    }

    friend SpanMatrix operator*(const SpanMatrix& a, const SpanMatrix& b);
    friend SpanMatrix operator+(const SpanMatrix& a, const SpanMatrix& b);
    friend bool operator==(const SpanMatrix& a, const SpanMatrix& b);
    friend bool operator!=(const SpanMatrix& a, const SpanMatrix& b) { return !(a == b); }

    bool is_diagonal() const;
    std::string to_string() const;

private:
    int rows_;
    int cols_;
    std::vector<Rational> entries_;
};

/**
 * A span A <- E -> B, stored as its two legs out of a shared apex. The
 * feet are the legs' codomains; composition requires the shared foot to
 * be the same groupoid instance, not merely an isomorphic one.
 */
class GroupoidSpan {
public:
    GroupoidSpan(groupoids::GroupoidMap left, groupoids::GroupoidMap right);

    static GroupoidSpan identity_span(groupoids::GroupoidPtr a);
    // A <- A -> B along q (the right-way form of a map)
    static GroupoidSpan right_way(const groupoids::GroupoidMap& q);
    // B <- A -> A along q (the wrong-way form)
    static GroupoidSpan wrong_way(const groupoids::GroupoidMap& q);

    const groupoids::FinGroupoid& apex() const { return left_.dom(); }
    const groupoids::GroupoidMap& left() const { return left_; }
    const groupoids::GroupoidMap& right() const { return right_; }
    const groupoids::GroupoidPtr& left_foot() const { return left_.cod_ptr(); }
    const groupoids::GroupoidPtr& right_foot() const { return right_.cod_ptr(); }

private:
    groupoids::GroupoidMap left_;
    groupoids::GroupoidMap right_;
};

// s2 after s1: pullback of s1.right against s2.left, with composite legs.
GroupoidSpan compose(const GroupoidSpan& s2, const GroupoidSpan& s1);

// Componentwise product of apexes and feet; its matrix is the Kronecker
// product of the factors' matrices.
GroupoidSpan tensor(const GroupoidSpan& a, const GroupoidSpan& b);

// Rows over iso classes of the right foot, columns over the left foot;
// entry[b][a] sums |Aut(a)| / |Aut(e)| over apex classes lying over (a, b).
SpanMatrix to_matrix(const GroupoidSpan& s);

// Right-way then wrong-way sandwich: the decategorified integral of the
// family f (a square matrix over dom(q) classes) along q.
SpanMatrix integrate(const groupoids::GroupoidMap& q, const SpanMatrix& f);

// Diagonal matrix over cod(q) classes whose (b, b) entry is the
// cardinality of the homotopy fiber of q over b.
SpanMatrix fiber_matrix(const groupoids::GroupoidMap& q);

// Trace of the identity through coevaluation, swap, and evaluation; equals
// the free-loop cardinality (asserted) and hence the component count.
Rational self_dual_dimension(groupoids::GroupoidPtr a);

struct CalculusFailure {
    std::uint64_t seed = 0;
    std::string description;
};

struct CalculusLawReport {
    std::string law;
    long instances = 0;
    std::vector<CalculusFailure> failures;
};

struct CalculusReport {
    std::uint64_t seed = 0;
    long count = 0;
    std::vector<CalculusLawReport> laws;
    bool passed() const;
    std::string to_json() const;
};

/**
 * Seeded random verification of the integral calculus. Each instance
 * draws small groupoids (disjoint unions of one-object group blocks and
 * points, at most five objects, automorphism groups of order at most
 * four) with random functors between them, then checks exactly over Q:
 *   fubini         matrix of a composed span = product of matrices, and
 *                  the two-step integral along composed maps
 *   homogeneity    integrate(q, g . q*h) = integrate(q, g) . h for
 *                  diagonal h, on both sides
 *   distributivity the fiber matrix of a pulled-back pair is the product
 *                  of the fiber matrices
 *   additivity     the integral over a disjoint union is the sum of the
 *                  restricted integrals
 */
CalculusReport check_calculus(std::uint64_t seed, long count);

} // namespace spans
} // namespace cardinal
