#pragma once

/**
 * Symbolic pi-finite p-spaces and their cardinality calculus.
 *
 * Expressions are built from the one-point space, the empty space, the
 * Eilenberg-MacLane generators B^k (k-fold deloopings of the cyclic group
 * of order p), finite disjoint unions and products, and a wreath operator
 * W(A) = (A^p)_{hCp}, the homotopy quotient of the p-fold product by the
 * cyclic shift. Loops and free loops are accepted as input but rewritten
 * away by the normalizer: Om(B^k) = B^(k-1) componentwise on products of
 * deloopings, and L(A) = A x Om(A) for loop spaces A.
 *
 * Every expression evaluates to a scalar in a chosen target: the rational
 * homotopy cardinality (one over the automorphism count, alternating up
 * the Postnikov tower), or the height-n cardinality with |B^k| = p to the
 * binomial(n-1, k). The two agree at n = 0 through the generalized
 * binomial. The wreath evaluates through the derivation identity
 *
 *     |W(A)| = |B^1| |A| - delta(|A|),
 *
 * with delta the Fermat quotient of the target; at the rational target
 * this collapses to |A|^p / p, the expected fibration count.
 *
 * The free rig on these generators (formal integer combinations of
 * monomials, with |A + B| and |A x B| identified with sum and product)
 * carries its own additive p-derivation: on a monomial,
 * delta|A| = |B^1 x A| - |W(A)|, extended to sums by the additivity law
 * and to integer multiples by the module rule. Evaluation is a map of
 * delta-rings, which is checked, not assumed.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cardinal/padic.hpp"

namespace cardinal {
namespace spaces {

enum class Kind { point, empty, em, disjoint, product, wreath };

class SpaceExpr {
public:
    // Constructors normalize: lists flatten and sort, units and absorbing
    // elements collapse, W(pt) becomes B^1, loops rewrite away or throw.
    static SpaceExpr point();
    static SpaceExpr empty();
    static SpaceExpr em(long k);
    static SpaceExpr disjoint(std::vector<SpaceExpr> parts);
    static SpaceExpr product(std::vector<SpaceExpr> parts);
    static SpaceExpr wreath(SpaceExpr inner);
    static SpaceExpr loop(const SpaceExpr& e);      // requires a connected loop space
    static SpaceExpr free_loop(const SpaceExpr& e); // requires a loop space

    Kind kind() const { return kind_; }
    long em_degree() const { return em_degree_; }
    const std::vector<SpaceExpr>& children() const { return children_; }

    bool is_empty() const { return kind_ == Kind::empty; }
    // Monomials are what the rig takes as keys: pt, a generator (B^k or a
    // wreath closure), or a product of generators.
    bool is_monomial() const;
    // Products of B^k with k >= 1 (and pt): connected with a delooping.
    bool is_connected_loop_space() const;
    // Products of B^k with k >= 0 (and pt): deloopable up to components.
    bool is_loop_space() const;

    // Total canonical term order: constructor tag, then parameters, then
    // children lexicographically.
    static int compare(const SpaceExpr& a, const SpaceExpr& b);
    friend bool operator==(const SpaceExpr& a, const SpaceExpr& b) { return compare(a, b) == 0; }
    friend bool operator<(const SpaceExpr& a, const SpaceExpr& b) { return compare(a, b) < 0; }

    std::string to_string() const;

private:
    SpaceExpr(Kind k, long deg, std::vector<SpaceExpr> ch);

    Kind kind_;
    long em_degree_ = 0;
    std::vector<SpaceExpr> children_;
};

struct Connectivity {
    enum class Kind { empty_space, finite, infinite };

    Kind kind = Kind::finite;
    long value = 0; // meaningful for finite only

    static Connectivity empty_space() { return {Kind::empty_space, 0}; }
    static Connectivity finite(long v) { return {Kind::finite, v}; }
    static Connectivity infinite() { return {Kind::infinite, 0}; }

    bool is_connected() const {
        return kind == Kind::infinite || (kind == Kind::finite && value >= 0);
    }
    friend bool operator==(const Connectivity&, const Connectivity&) = default;
    std::string to_string() const;
};

struct SpaceProfile {
    Connectivity connectivity;
    long level = 0;                     // least m such that the space is m-finite
    std::set<long> nonzero_pi;          // degrees with a provably nonzero homotopy group
    std::optional<Integer> components;  // exact count; empty when it depends on p
};

// Without a prime the component count stays symbolic whenever B^0 or a
// wreath is involved; connectivity, level and nonzero_pi never need it.
SpaceProfile profile(const SpaceExpr& e);
SpaceProfile profile(const SpaceExpr& e, const Prime& p);
Integer component_count(const SpaceExpr& e, const Prime& p);

/**
 * Where cardinalities land. ring = rational is the alternating homotopy
 * cardinality in Q; ring = height evaluates |B^k| = p^binomial(n-1, k),
 * landing in Z_(p) for n >= 1 (exactly or truncated mod p^precision).
 * Height 0 reproduces the rational values and has no truncated form.
 */
struct EvalTarget {
    enum class RingKind { rational, height };
    enum class Mode { exact, truncated };

    RingKind ring;
    long height = 0;
    Prime p;
    Mode mode = Mode::exact;
    int precision = 0;

    static EvalTarget rational(const Prime& p);
    static EvalTarget height_exact(const Prime& p, long n);
    static EvalTarget height_truncated(const Prime& p, long n, int precision);

    padic::Scalar scalar_from_integer(const Integer& n) const;
    std::string to_string() const;
};

padic::Scalar cardinality(const SpaceExpr& e, const EvalTarget& target);

// |L(A)| = |A| |Om(A)|; requires a loop-space expression.
padic::Scalar dimension(const SpaceExpr& e, const EvalTarget& target);

/**
 * An element of the free rig on space monomials: a finite formal integer
 * combination keyed by normal-form monomials. The ring structure is the
 * obvious one; the derivation and evaluation maps live below.
 */
class RigElement {
public:
    explicit RigElement(const Prime& p);
    static RigElement from_integer(const Prime& p, const Integer& n);
    static RigElement from_monomial(const Prime& p, const SpaceExpr& m,
                                    const Integer& coeff = Integer(1));

    const Prime& prime() const { return p_; }
    const std::map<SpaceExpr, Integer>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    friend RigElement operator+(const RigElement& a, const RigElement& b);
    friend RigElement operator-(const RigElement& a, const RigElement& b);
    friend RigElement operator*(const RigElement& a, const RigElement& b);
    RigElement operator-() const;
    RigElement pow(unsigned long k) const;

    friend bool operator==(const RigElement& a, const RigElement& b);

    std::string to_string() const;

private:
    void insert(const SpaceExpr& m, const Integer& c);

    Prime p_;
    std::map<SpaceExpr, Integer> terms_;
};

// The expression as a rig element: disjoint unions expand to sums,
// products distribute onto monomials.
RigElement to_rig(const SpaceExpr& e, const Prime& p);

// A rig element with non-negative coefficients, reassembled as a space.
SpaceExpr to_space(const RigElement& x);

// The additive p-derivation of the free rig: on a monomial m it is
// |B^1 x m| - |W(m)|; sums go through the additivity law with its
// integer-coefficient correction, integer multiples through the module rule.
RigElement rig_delta(const RigElement& x);

// Evaluation homomorphism into the target's scalar ring.
padic::Scalar evaluate_rig(const RigElement& x, const EvalTarget& target);

/**
 * Grammar, with '-' and bare integer coefficients meaningful for rig
 * elements and rejected by the space-level entry point when they leave
 * the non-negative cone:
 *
 *   expr   := term (('+' | '-') term)*
 *   term   := factor ('*' factor)*
 *   factor := atom ('^' nat)?
 *   atom   := 'pt' | 'empty' | 'B' nat | 'W(' expr ')' | 'Om(' expr ')'
 *           | 'L(' expr ')' | '(' expr ')' | nat
 *
 * Errors carry the source position. W, Om and L apply to spaces, so their
 * arguments must stay in the non-negative cone; Om additionally requires
 * a connected loop space and L a loop space.
 */
RigElement parse_rig(const std::string& text, const Prime& p);
SpaceExpr parse_space(const std::string& text, const Prime& p);

// Declared relation p^exponent * generator = 0 on the free rig.
struct TorsionRelation {
    SpaceExpr generator;
    long exponent = 1;
};

// Image in the torsion-free quotient: every monomial torsion under the
// delta-closure of the declared relations is dropped. A monomial is
// torsion when a declared generator divides it, or when it has a wreath
// factor whose argument is itself torsion; that closure is what makes the
// quotient commute with rig_delta.
RigElement torsion_free_quotient(const RigElement& x,
                                 const std::vector<TorsionRelation>& relations);

bool monomial_is_torsion(const SpaceExpr& m, const std::vector<TorsionRelation>& relations);

// Law-checker adapter so the free rig runs through the same delta-ring
// verification path as the numeric instances.
struct RigRing {
    using Element = RigElement;

    explicit RigRing(Prime p) : p_(p) {}

    const Prime& prime() const { return p_; }
    std::string name() const { return "free-rig(p=" + std::to_string(p_.value()) + ")"; }
    Element zero() const { return RigElement(p_); }
    Element one() const { return RigElement::from_integer(p_, 1); }
    Element add(const Element& a, const Element& b) const { return a + b; }
    Element neg(const Element& a) const { return -a; }
    Element mul(const Element& a, const Element& b) const { return a * b; }
    Element delta(const Element& a) const { return rig_delta(a); }
    bool eq(const Element& a, const Element& b) const { return a == b; }
    Element from_integer(const Integer& n) const { return RigElement::from_integer(p_, n); }
    std::string to_string(const Element& a) const { return a.to_string(); }
    Element sample(std::mt19937_64& rng) const;

private:
    Prime p_;
};

} // namespace spaces
} // namespace cardinal
