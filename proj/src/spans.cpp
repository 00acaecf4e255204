#include "cardinal/spans.hpp"

#include <random>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace cardinal {
namespace spans {

using groupoids::FinGroupoid;
using groupoids::GroupoidMap;
using groupoids::GroupoidPtr;
using groupoids::PullbackResult;

SpanMatrix::SpanMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("negative matrix dimension");
    entries_.assign(static_cast<std::size_t>(rows) * cols, Rational(0));
}

SpanMatrix SpanMatrix::identity(int n) {
    SpanMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        m.at(i, i) = 1;
    return m;
}

SpanMatrix SpanMatrix::kronecker(const SpanMatrix& a, const SpanMatrix& b) {
    SpanMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i1 = 0; i1 < a.rows(); ++i1)
        for (int j1 = 0; j1 < a.cols(); ++j1)
            for (int i2 = 0; i2 < b.rows(); ++i2)
                for (int j2 = 0; j2 < b.cols(); ++j2)
                    out.at(i1 * b.rows() + i2, j1 * b.cols() + j2) = a.at(i1, j1) * b.at(i2, j2);
    return out;
}

SpanMatrix operator*(const SpanMatrix& a, const SpanMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matrix shape mismatch in product");
    SpanMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            if (a.at(i, k) == 0)
                continue;
            for (int j = 0; j < b.cols(); ++j)
                out.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    return out;
}

SpanMatrix operator+(const SpanMatrix& a, const SpanMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix shape mismatch in sum");
    SpanMatrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.at(i, j) = a.at(i, j) + b.at(i, j);
    return out;
}

bool operator==(const SpanMatrix& a, const SpanMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a.at(i, j) != b.at(i, j))
                return false;
    return true;
}

bool SpanMatrix::is_diagonal() const {
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (i != j && at(i, j) != 0)
                return false;
    return true;
}

std::string SpanMatrix::to_string() const {
    std::string out = "[";
    for (int i = 0; i < rows_; ++i) {
        if (i)
            out += "; ";
        for (int j = 0; j < cols_; ++j) {
            if (j)
                out += " ";
            out += at(i, j).get_str();
        }
    }
    return out + "]";
}

GroupoidSpan::GroupoidSpan(GroupoidMap left, GroupoidMap right)
    : left_(std::move(left)), right_(std::move(right)) {
    if (left_.dom_ptr().get() != right_.dom_ptr().get())
        throw std::invalid_argument("span legs must share their apex");
}

GroupoidSpan GroupoidSpan::identity_span(GroupoidPtr a) {
    GroupoidMap id = GroupoidMap::identity(std::move(a));
    return GroupoidSpan(id, id);
}

GroupoidSpan GroupoidSpan::right_way(const GroupoidMap& q) {
    return GroupoidSpan(GroupoidMap::identity(q.dom_ptr()), q);
}

GroupoidSpan GroupoidSpan::wrong_way(const GroupoidMap& q) {
    return GroupoidSpan(q, GroupoidMap::identity(q.dom_ptr()));
}

GroupoidSpan compose(const GroupoidSpan& s2, const GroupoidSpan& s1) {
    if (s1.right_foot().get() != s2.left_foot().get())
        throw std::invalid_argument("span composition foot mismatch");
    PullbackResult pb = groupoids::homotopy_pullback(s1.right(), s2.left());
    return GroupoidSpan(GroupoidMap::compose(s1.left(), pb.to_left),
                        GroupoidMap::compose(s2.right(), pb.to_right));
}

namespace {

// the object and morphism encodings used by groupoids::product
GroupoidMap product_map(const GroupoidMap& f, const GroupoidMap& g, GroupoidPtr dom,
                        GroupoidPtr cod) {
    const FinGroupoid& df = f.dom();
    const FinGroupoid& dg = g.dom();
    const int cn = g.cod().object_count();
    const int cm = g.cod().morphism_count();
    std::vector<int> objs(static_cast<std::size_t>(df.object_count()) * dg.object_count());
    std::vector<int> mors(static_cast<std::size_t>(df.morphism_count()) * dg.morphism_count());
    for (int x = 0; x < df.object_count(); ++x)
        for (int y = 0; y < dg.object_count(); ++y)
            objs[x * dg.object_count() + y] = f.on_object(x) * cn + g.on_object(y);
    for (int u = 0; u < df.morphism_count(); ++u)
        for (int v = 0; v < dg.morphism_count(); ++v)
            mors[u * dg.morphism_count() + v] = f.on_morphism(u) * cm + g.on_morphism(v);
    return GroupoidMap(std::move(dom), std::move(cod), std::move(objs), std::move(mors));
}

} // namespace

GroupoidSpan tensor(const GroupoidSpan& a, const GroupoidSpan& b) {
    GroupoidPtr apex = groupoids::share(groupoids::product(a.apex(), b.apex()));
    GroupoidPtr lfoot =
        groupoids::share(groupoids::product(*a.left_foot(), *b.left_foot()));
    GroupoidPtr rfoot =
        groupoids::share(groupoids::product(*a.right_foot(), *b.right_foot()));
    return GroupoidSpan(product_map(a.left(), b.left(), apex, lfoot),
                        product_map(a.right(), b.right(), apex, rfoot));
}

SpanMatrix to_matrix(const GroupoidSpan& s) {
    const FinGroupoid& a = *s.left_foot();
    const FinGroupoid& b = *s.right_foot();
    const FinGroupoid& e = s.apex();
    SpanMatrix out(b.class_count(), a.class_count());
    for (int c = 0; c < e.class_count(); ++c) {
        int rep = e.iso_classes().representative[c];
        int ca = a.class_of_object(s.left().on_object(rep));
        int cb = b.class_of_object(s.right().on_object(rep));
        out.at(cb, ca) +=
            make_rational(a.iso_classes().aut_order[ca], e.iso_classes().aut_order[c]);
    }
    return out;
}

SpanMatrix integrate(const GroupoidMap& q, const SpanMatrix& f) {
    const int na = q.dom().class_count();
    if (f.rows() != na || f.cols() != na)
        throw std::invalid_argument("family shape does not match the domain classes");
    return to_matrix(GroupoidSpan::right_way(q)) * f * to_matrix(GroupoidSpan::wrong_way(q));
}

SpanMatrix fiber_matrix(const GroupoidMap& q) {
    return to_matrix(GroupoidSpan::right_way(q)) * to_matrix(GroupoidSpan::wrong_way(q));
}

Rational self_dual_dimension(GroupoidPtr a) {
    const int n = a->object_count();
    const int m = a->morphism_count();
    GroupoidPtr square = groupoids::share(groupoids::product(*a, *a));
    GroupoidPtr pt = groupoids::share(FinGroupoid::discrete(1));

    std::vector<int> diag_obj(n), diag_mor(m);
    for (int x = 0; x < n; ++x)
        diag_obj[x] = x * n + x;
    for (int f = 0; f < m; ++f)
        diag_mor[f] = f * m + f;
    GroupoidMap diagonal(a, square, diag_obj, diag_mor);

    std::vector<int> swap_obj(square->object_count()), swap_mor(square->morphism_count());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            swap_obj[x * n + y] = y * n + x;
    for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v)
            swap_mor[u * m + v] = v * m + u;
    GroupoidMap swap_map(square, square, std::move(swap_obj), std::move(swap_mor));

    GroupoidSpan coev(GroupoidMap::constant(a, pt, 0), diagonal);
    GroupoidSpan swap_span(GroupoidMap::identity(square), swap_map);
    GroupoidSpan ev(diagonal, GroupoidMap::constant(a, pt, 0));

    // the strict composite with the swap is hom-sized in the apex; cut it
    // down to its skeleton (the matrix only sees classes) before closing
    // the trace
    GroupoidSpan half = compose(swap_span, coev);
    groupoids::SkeletonResult sk = groupoids::skeletonize(half.left().dom_ptr());
    GroupoidSpan small(GroupoidMap::compose(half.left(), sk.inclusion),
                       GroupoidMap::compose(half.right(), sk.inclusion));
    GroupoidSpan trace = compose(ev, small);

    SpanMatrix mat = to_matrix(trace);
    Rational value = mat.at(0, 0);
    Rational loops = groupoids::free_loop_groupoid(*a).cardinality();
    if (value != loops)
        throw std::logic_error("self-dual dimension " + value.get_str() +
                               " disagrees with the free-loop cardinality " + loops.get_str());
    return value;
}

bool CalculusReport::passed() const {
    for (const auto& law : laws)
        if (!law.failures.empty())
            return false;
    return true;
}

std::string CalculusReport::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["count"] = count;
    j["passed"] = passed();
    j["laws"] = nlohmann::ordered_json::array();
    for (const auto& law : laws) {
        nlohmann::ordered_json l;
        l["law"] = law.law;
        l["instances"] = law.instances;
        l["failures"] = nlohmann::ordered_json::array();
        for (const auto& f : law.failures)
            l["failures"].push_back({{"seed", f.seed}, {"description", f.description}});
        j["laws"].push_back(std::move(l));
    }
    return j.dump();
}

namespace {

/**
 * Instance generator for the calculus checks. Groupoids are disjoint
 * unions of at most three blocks, each a point or the one-object
 * groupoid of a group of order <= 4, keeping every automorphism group
 * within four elements and pullback apexes small. Functors are built
 * blockwise: each block picks a target object and a group homomorphism
 * into its automorphism group, found by exhaustive search.
 */
class InstanceGenerator {
public:
    explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t draw(std::uint64_t bound) { return rng_() % bound; }

    struct Blocks {
        GroupoidPtr groupoid;
        std::vector<int> object_offset;   // block -> first object
        std::vector<int> morphism_offset; // block -> first morphism
        std::vector<groupoids::groups::Table> tables; // empty table = point block
    };

    Blocks random_groupoid() {
        Blocks out;
        const int nblocks = 1 + static_cast<int>(draw(3));
        FinGroupoid acc = FinGroupoid::empty_groupoid();
        for (int i = 0; i < nblocks; ++i) {
            out.object_offset.push_back(acc.object_count());
            out.morphism_offset.push_back(acc.morphism_count());
            groupoids::groups::Table table;
            switch (draw(6)) {
            case 0:
                break; // a bare point
            case 1:
                table = groupoids::groups::cyclic(2);
                break;
            case 2:
                table = groupoids::groups::cyclic(3);
                break;
            case 3:
                table = groupoids::groups::cyclic(4);
                break;
            case 4:
                table = groupoids::groups::direct_product(groupoids::groups::cyclic(2),
                                                          groupoids::groups::cyclic(2));
                break;
            default:
                break; // points twice as likely as any one group
            }
            FinGroupoid block = table.empty() ? FinGroupoid::discrete(1)
                                              : FinGroupoid::from_group(table);
            acc = disjoint_union(acc, block);
            out.tables.push_back(std::move(table));
        }
        out.groupoid = groupoids::share(std::move(acc));
        return out;
    }

    // all homomorphisms from the group given by `table` into the
    // automorphisms of `target` in cod, as morphism-id vectors
    static std::vector<std::vector<int>> homomorphisms(const groupoids::groups::Table& table,
                                                       const FinGroupoid& cod, int target) {
        const auto& auts = cod.hom(target, target);
        const int n = static_cast<int>(table.size());
        const int h = static_cast<int>(auts.size());
        std::vector<std::vector<int>> found;
        std::vector<int> idx(n, 0);
        for (;;) {
            bool ok = true;
            for (int x = 0; x < n && ok; ++x)
                for (int y = 0; y < n && ok; ++y)
                    ok = cod.compose(auts[idx[x]], auts[idx[y]]) == auts[idx[table[x][y]]];
            if (ok) {
                std::vector<int> image(n);
                for (int x = 0; x < n; ++x)
                    image[x] = auts[idx[x]];
                found.push_back(std::move(image));
            }
            int pos = 0;
            while (pos < n && ++idx[pos] == h) {
                idx[pos] = 0;
                ++pos;
            }
            if (pos == n)
                break;
        }
        return found;
    }

    GroupoidMap random_map(const Blocks& dom, const GroupoidPtr& cod) {
        std::vector<int> objs(dom.groupoid->object_count());
        std::vector<int> mors(dom.groupoid->morphism_count());
        for (std::size_t b = 0; b < dom.tables.size(); ++b) {
            const auto& table = dom.tables[b];
            if (table.empty()) {
                int target = static_cast<int>(draw(cod->object_count()));
                objs[dom.object_offset[b]] = target;
                mors[dom.morphism_offset[b]] = cod->identity(target);
                continue;
            }
            // pick targets until one admits a homomorphism; the identity
            // object always does (the trivial map), so this terminates
            std::vector<std::vector<int>> homs;
            int target = 0;
            for (;;) {
                target = static_cast<int>(draw(cod->object_count()));
                homs = homomorphisms(table, *cod, target);
                if (!homs.empty())
                    break;
            }
            const auto& image = homs[draw(homs.size())];
            objs[dom.object_offset[b]] = target;
            for (std::size_t g = 0; g < table.size(); ++g)
                mors[dom.morphism_offset[b] + g] = image[g];
        }
        return GroupoidMap(dom.groupoid, cod, std::move(objs), std::move(mors));
    }

    SpanMatrix random_matrix(int rows, int cols) {
        SpanMatrix out(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                out.at(i, j) = make_rational(static_cast<long>(draw(5)) - 2,
                                             static_cast<long>(draw(3)) + 1);
        return out;
    }

    SpanMatrix random_diagonal(int n) {
        SpanMatrix out(n, n);
        for (int i = 0; i < n; ++i)
            out.at(i, i) = make_rational(static_cast<long>(draw(5)) - 2,
                                         static_cast<long>(draw(3)) + 1);
        return out;
    }

private:
    std::mt19937_64 rng_;
};

SpanMatrix pullback_family(const GroupoidMap& q, const SpanMatrix& h) {
    const int na = q.dom().class_count();
    SpanMatrix out(na, na);
    for (int c = 0; c < na; ++c) {
        int rep = q.dom().iso_classes().representative[c];
        int image = q.cod().class_of_object(q.on_object(rep));
        out.at(c, c) = h.at(image, image);
    }
    return out;
}

} // namespace

CalculusReport check_calculus(std::uint64_t seed, long count) {
    CalculusReport report;
    report.seed = seed;
    report.count = count;
    CalculusLawReport fubini{"fubini", 0, {}};
    CalculusLawReport homogeneity{"homogeneity", 0, {}};
    CalculusLawReport distributivity{"distributivity", 0, {}};
    CalculusLawReport additivity{"additivity", 0, {}};

    std::mt19937_64 root(seed);
    for (long i = 0; i < count; ++i) {
        std::uint64_t instance_seed = root();
        InstanceGenerator gen(instance_seed);

        auto ab = gen.random_groupoid(); // A
        auto bb = gen.random_groupoid(); // B, shared by both spans
        auto cb = gen.random_groupoid(); // C
        auto e1 = gen.random_groupoid();
        auto e2 = gen.random_groupoid();
        GroupoidMap e1_to_a = gen.random_map(e1, ab.groupoid);
        GroupoidMap e1_to_b = gen.random_map(e1, bb.groupoid);
        GroupoidMap e2_to_b = gen.random_map(e2, bb.groupoid);
        GroupoidMap e2_to_c = gen.random_map(e2, cb.groupoid);
        GroupoidSpan s1(e1_to_a, e1_to_b);
        GroupoidSpan s2(e2_to_b, e2_to_c);

        // functoriality of the matrix semantics, the engine behind Fubini
        ++fubini.instances;
        if (to_matrix(compose(s2, s1)) != to_matrix(s2) * to_matrix(s1))
            fubini.failures.push_back({instance_seed, "matrix of composite span differs"});
        // two-step integration along composed maps
        ++fubini.instances;
        {
            GroupoidMap a_to_b = gen.random_map(ab, bb.groupoid);
            GroupoidMap b_to_c = gen.random_map(bb, cb.groupoid);
            GroupoidMap composite = GroupoidMap::compose(b_to_c, a_to_b);
            SpanMatrix f = gen.random_matrix(ab.groupoid->class_count(),
                                             ab.groupoid->class_count());
            if (integrate(composite, f) != integrate(b_to_c, integrate(a_to_b, f)))
                fubini.failures.push_back({instance_seed, "iterated integral differs"});
        }

        ++homogeneity.instances;
        {
            const GroupoidMap& q = e1_to_b;
            SpanMatrix g = gen.random_matrix(e1.groupoid->class_count(),
                                             e1.groupoid->class_count());
            SpanMatrix h = gen.random_diagonal(bb.groupoid->class_count());
            SpanMatrix qh = pullback_family(q, h);
            if (integrate(q, g * qh) != integrate(q, g) * h)
                homogeneity.failures.push_back({instance_seed, "right module law differs"});
            if (integrate(q, qh * g) != h * integrate(q, g))
                homogeneity.failures.push_back({instance_seed, "left module law differs"});
        }

        ++distributivity.instances;
        {
            PullbackResult pb = groupoids::homotopy_pullback(e1_to_b, e2_to_b);
            GroupoidMap onto_b = GroupoidMap::compose(e1_to_b, pb.to_left);
            if (fiber_matrix(onto_b) != fiber_matrix(e1_to_b) * fiber_matrix(e2_to_b))
                distributivity.failures.push_back(
                    {instance_seed, "fiber matrix of the pulled-back pair differs"});
        }

        ++additivity.instances;
        {
            GroupoidPtr uni =
                groupoids::share(disjoint_union(*e1.groupoid, *e2.groupoid));
            std::vector<int> objs(uni->object_count()), mors(uni->morphism_count());
            for (int x = 0; x < e1.groupoid->object_count(); ++x)
                objs[x] = e1_to_b.on_object(x);
            for (int x = 0; x < e2.groupoid->object_count(); ++x)
                objs[e1.groupoid->object_count() + x] = e2_to_b.on_object(x);
            for (int f = 0; f < e1.groupoid->morphism_count(); ++f)
                mors[f] = e1_to_b.on_morphism(f);
            for (int f = 0; f < e2.groupoid->morphism_count(); ++f)
                mors[e1.groupoid->morphism_count() + f] = e2_to_b.on_morphism(f);
            GroupoidMap q(uni, bb.groupoid, std::move(objs), std::move(mors));

            const int n1 = e1.groupoid->class_count();
            const int n2 = e2.groupoid->class_count();
            SpanMatrix f1 = gen.random_matrix(n1, n1);
            SpanMatrix f2 = gen.random_matrix(n2, n2);
            SpanMatrix f(n1 + n2, n1 + n2);
            for (int r = 0; r < n1; ++r)
                for (int c = 0; c < n1; ++c)
                    f.at(r, c) = f1.at(r, c);
            for (int r = 0; r < n2; ++r)
                for (int c = 0; c < n2; ++c)
                    f.at(n1 + r, n1 + c) = f2.at(r, c);
            if (integrate(q, f) != integrate(e1_to_b, f1) + integrate(e2_to_b, f2))
                additivity.failures.push_back(
                    {instance_seed, "integral over the union differs from the sum"});
        }
    }

    report.laws = {std::move(fubini), std::move(homogeneity), std::move(distributivity),
                   std::move(additivity)};
    return report;
}

} // namespace spans
} // namespace cardinal
