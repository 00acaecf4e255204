#pragma once

/**
 * Finite groupoids with explicit structure tables: the concrete model of
 * 1-finite spaces, and the brute-force oracle for everything the symbolic
 * layer claims at level <= 1. Cardinality is the weighted object count
 * sum of 1/|Aut| over isomorphism classes; pullbacks, free loops and the
 * cyclic-shift wreath are enumerated, never approximated.
 */

#include <memory>
#include <string>
#include <vector>

#include "cardinal/errors.hpp"
#include "cardinal/padic.hpp"

namespace cardinal {
namespace groupoids {

struct IsoClassTable {
    std::vector<int> class_of;       // object -> class index
    std::vector<int> representative; // class -> lowest object in it
    std::vector<long> object_count;  // class -> objects in it
    std::vector<long> aut_order;     // class -> |Aut| at the representative
};

class FinGroupoid {
public:
    struct Morphism {
        int src = 0;
        int dst = 0;
    };

    /**
     * Builds and fully validates: index bounds, identity laws, existence
     * of inverses, composition defined exactly on composable pairs with
     * the right endpoints, and associativity. Associativity runs over all
     * composable triples and is guarded; construction throws guard_error
     * rather than skip the check. Constructions derived in this module
     * (products, pullbacks, wreaths, ...) are correct by construction and
     * use a cheaper internal path, so the guard binds only external data.
     */
    FinGroupoid(int objects, std::vector<Morphism> morphisms, std::vector<int> identities,
                std::vector<std::vector<int>> compose_table);

    static FinGroupoid discrete(int n);
    static FinGroupoid empty_groupoid();
    // One-object groupoid on a finite group given by its multiplication
    // table (row-major, elements 0..n-1); the table's group axioms are
    // checked first.
    static FinGroupoid from_group(const std::vector<std::vector<int>>& mult_table);
    static FinGroupoid from_json(const std::string& text);

    int object_count() const { return n_objects_; }
    int morphism_count() const { return static_cast<int>(morphisms_.size()); }
    int source(int f) const { return morphisms_[f].src; }
    int target(int f) const { return morphisms_[f].dst; }
    int identity(int x) const { return identities_[x]; }
    bool composable(int g, int f) const { return target(f) == source(g); }
    int compose(int g, int f) const; // g after f; throws on a mismatch
    int inverse(int f) const { return inverse_[f]; }
    const std::vector<int>& hom(int x, int y) const { return hom_[x * n_objects_ + y]; }
    const std::vector<int>& out(int x) const { return out_[x]; }

    const IsoClassTable& iso_classes() const { return classes_; }
    int class_count() const { return static_cast<int>(classes_.representative.size()); }
    int class_of_object(int x) const { return classes_.class_of[x]; }

    Rational cardinality() const;

    std::string to_json() const;

private:
    struct Derived {}; // tag: structure produced by this module, light checks only
    FinGroupoid(Derived, int objects, std::vector<Morphism> morphisms,
                std::vector<int> identities, std::vector<std::vector<int>> compose_table);

    void index_structure();     // hom/out tables, inverses, iso classes
    void validate_basic() const;
    void validate_full() const;

    int n_objects_ = 0;
    std::vector<Morphism> morphisms_;
    std::vector<int> identities_;
    std::vector<std::vector<int>> comp_;
    std::vector<int> inverse_;
    std::vector<std::vector<int>> hom_;
    std::vector<std::vector<int>> out_;
    IsoClassTable classes_;

    friend FinGroupoid disjoint_union(const FinGroupoid&, const FinGroupoid&);
    friend FinGroupoid product(const FinGroupoid&, const FinGroupoid&);
    friend FinGroupoid doubled(const FinGroupoid&);
    friend FinGroupoid free_loop_groupoid(const FinGroupoid&);
    friend FinGroupoid wreath_groupoid(const FinGroupoid&, const Prime&);
    friend struct PullbackBuilder;
    friend struct SkeletonBuilder;
};

using GroupoidPtr = std::shared_ptr<const FinGroupoid>;

inline GroupoidPtr share(FinGroupoid g) { return std::make_shared<const FinGroupoid>(std::move(g)); }

/**
 * A functor between finite groupoids, stored as object and morphism
 * assignments over shared feet. Construction checks preservation of
 * endpoints, identities, and composition on every composable pair.
 */
class GroupoidMap {
public:
    GroupoidMap(GroupoidPtr dom, GroupoidPtr cod, std::vector<int> object_map,
                std::vector<int> morphism_map);

    static GroupoidMap identity(GroupoidPtr g);
    static GroupoidMap constant(GroupoidPtr dom, GroupoidPtr cod, int object);
    static GroupoidMap compose(const GroupoidMap& g, const GroupoidMap& f); // g after f

    const FinGroupoid& dom() const { return *dom_; }
    const FinGroupoid& cod() const { return *cod_; }
    const GroupoidPtr& dom_ptr() const { return dom_; }
    const GroupoidPtr& cod_ptr() const { return cod_; }
    int on_object(int x) const { return object_map_[x]; }
    int on_morphism(int f) const { return morphism_map_[f]; }

private:
    GroupoidPtr dom_;
    GroupoidPtr cod_;
    std::vector<int> object_map_;
    std::vector<int> morphism_map_;
};

FinGroupoid disjoint_union(const FinGroupoid& a, const FinGroupoid& b);
FinGroupoid product(const FinGroupoid& a, const FinGroupoid& b);

// An equivalent copy with every object duplicated; used to test that
// cardinality and friends only see the equivalence class.
FinGroupoid doubled(const FinGroupoid& a);

// Objects (x, alpha) with alpha an automorphism of x; a morphism h: x -> y
// carries (x, alpha) to (y, h alpha h^-1). Components correspond to
// conjugacy classes, one per class, each contributing cardinality
// 1/|centralizer|.
FinGroupoid free_loop_groupoid(const FinGroupoid& a);

// Action groupoid of the cyclic shift on the p-th power: objects are
// p-tuples of objects, morphisms are pairs (shift g, componentwise
// morphisms x_{(i-g) mod p} -> y_i). Guarded at 10^6 objects.
FinGroupoid wreath_groupoid(const FinGroupoid& a, const Prime& p);

struct SkeletonResult {
    GroupoidPtr skeleton;
    GroupoidMap inclusion; // skeleton -> original, the identity on representatives
};

// Full subgroupoid on one representative object per isomorphism class.
SkeletonResult skeletonize(GroupoidPtr a);

struct PullbackResult {
    GroupoidPtr apex;
    GroupoidMap to_left;  // apex -> dom(f)
    GroupoidMap to_right; // apex -> dom(g)
};

/**
 * Iso-comma groupoid of f: A -> C and g: B -> C. Objects are triples
 * (a, b, phi: f(a) -> g(b)); a morphism (u, v): (a, b, phi) -> (a', b',
 * phi') is a pair with phi' f(u) = g(v) phi, composed componentwise.
 * Feet must share the codomain instance.
 */
PullbackResult homotopy_pullback(const GroupoidMap& f, const GroupoidMap& g);

struct WreathDeltaReport {
    Rational product_side;  // |BC_p x A| - |A wr C_p|, both by enumeration
    Rational quotient_side; // Fermat quotient of |A|
    bool passed = false;
    std::string description;
};

// The derivation identity at the groupoid level, checked exactly over Q.
WreathDeltaReport verify_wreath_delta(const FinGroupoid& a, const Prime& p);

namespace groups {

using Table = std::vector<std::vector<int>>;

Table cyclic(int n);
Table direct_product(const Table& a, const Table& b);
Table dihedral(int n); // order 2n, n >= 1
Table quaternion();    // order 8
Table from_json(const std::string& text);

// Every group of order <= max_order (max_order <= 9), with display names.
std::vector<std::pair<std::string, Table>> catalog_up_to(int max_order);

} // namespace groups

} // namespace groupoids
} // namespace cardinal
