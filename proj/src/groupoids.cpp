#include "cardinal/groupoids.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <json.hpp>

namespace cardinal {
namespace groupoids {

namespace {

// Desk-scale budgets. Composition tables are dense (m x m), so the
// morphism cap is what actually bounds memory; the object cap bounds the
// hom index. External data beyond these limits is refused, not sampled.
constexpr int kMaxObjects = 1500;
constexpr long kMaxMorphisms = 8000;
constexpr long kMaxCompositionPairs = 150000000;
constexpr long kMaxAssociativityTriples = 200000000;

} // namespace

FinGroupoid::FinGroupoid(int objects, std::vector<Morphism> morphisms,
                         std::vector<int> identities, std::vector<std::vector<int>> compose_table)
    : n_objects_(objects),
      morphisms_(std::move(morphisms)),
      identities_(std::move(identities)),
      comp_(std::move(compose_table)) {
    validate_basic();
    index_structure();
    validate_full();
}

FinGroupoid::FinGroupoid(Derived, int objects, std::vector<Morphism> morphisms,
                         std::vector<int> identities, std::vector<std::vector<int>> compose_table)
    : n_objects_(objects),
      morphisms_(std::move(morphisms)),
      identities_(std::move(identities)),
      comp_(std::move(compose_table)) {
    validate_basic();
    index_structure();
}

void FinGroupoid::validate_basic() const {
    const int n = n_objects_;
    const int m = static_cast<int>(morphisms_.size());
    if (n < 0)
        throw std::invalid_argument("negative object count");
    if (n > kMaxObjects || static_cast<long>(m) > kMaxMorphisms)
        throw guard_error("groupoid exceeds the size budget (" + std::to_string(n) +
                          " objects, " + std::to_string(m) + " morphisms)");
    for (const auto& f : morphisms_)
        if (f.src < 0 || f.src >= n || f.dst < 0 || f.dst >= n)
            throw std::invalid_argument("morphism endpoint out of range");
    if (static_cast<int>(identities_.size()) != n)
        throw std::invalid_argument("identity table size mismatch");
    for (int x = 0; x < n; ++x) {
        int e = identities_[x];
        if (e < 0 || e >= m || morphisms_[e].src != x || morphisms_[e].dst != x)
            throw std::invalid_argument("identity of object " + std::to_string(x) +
                                        " is not an endomorphism of it");
    }
    if (static_cast<int>(comp_.size()) != m)
        throw std::invalid_argument("composition table row count mismatch");
    for (const auto& row : comp_) {
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("composition table column count mismatch");
        for (int c : row)
            if (c < -1 || c >= m)
                throw std::invalid_argument("composition table entry out of range");
    }
    // composable pairs: defined, with the endpoints of a composite
    long pairs = 0;
    for (int f = 0; f < m; ++f) {
        for (int g = 0; g < m; ++g) {
            if (morphisms_[g].src != morphisms_[f].dst)
                continue;
            if (++pairs > kMaxCompositionPairs)
                throw guard_error("composition check budget exceeded");
            int c = comp_[g][f];
            if (c < 0)
                throw std::invalid_argument("composable pair with undefined composite");
            if (morphisms_[c].src != morphisms_[f].src || morphisms_[c].dst != morphisms_[g].dst)
                throw std::invalid_argument("composite has wrong endpoints");
        }
    }
    // identity laws
    for (int f = 0; f < m; ++f) {
        if (comp_[f][identities_[morphisms_[f].src]] != f ||
            comp_[identities_[morphisms_[f].dst]][f] != f)
            throw std::invalid_argument("identity is not neutral at morphism " +
                                        std::to_string(f));
    }
}

void FinGroupoid::index_structure() {
    const int n = n_objects_;
    const int m = static_cast<int>(morphisms_.size());
    hom_.assign(static_cast<std::size_t>(n) * n, {});
    out_.assign(n, {});
    for (int f = 0; f < m; ++f) {
        hom_[static_cast<std::size_t>(morphisms_[f].src) * n + morphisms_[f].dst].push_back(f);
        out_[morphisms_[f].src].push_back(f);
    }
    inverse_.assign(m, -1);
    for (int f = 0; f < m; ++f) {
        for (int g : hom(morphisms_[f].dst, morphisms_[f].src)) {
            if (comp_[g][f] == identities_[morphisms_[f].src] &&
                comp_[f][g] == identities_[morphisms_[f].dst]) {
                inverse_[f] = g;
                break;
            }
        }
        if (inverse_[f] < 0)
            throw std::invalid_argument("morphism " + std::to_string(f) + " has no inverse");
    }
    // isomorphism classes by reachability (morphisms invert, so one sweep
    // of undirected reachability is enough)
    classes_.class_of.assign(n, -1);
    classes_.representative.clear();
    classes_.object_count.clear();
    classes_.aut_order.clear();
    std::vector<std::vector<int>> adj(n);
    for (const auto& f : morphisms_) {
        adj[f.src].push_back(f.dst);
        adj[f.dst].push_back(f.src);
    }
    for (int x = 0; x < n; ++x) {
        if (classes_.class_of[x] >= 0)
            continue;
        int c = static_cast<int>(classes_.representative.size());
        classes_.representative.push_back(x);
        long count = 0;
        std::vector<int> stack = {x};
        classes_.class_of[x] = c;
        while (!stack.empty()) {
            int y = stack.back();
            stack.pop_back();
            ++count;
            for (int z : adj[y]) {
                if (classes_.class_of[z] < 0) {
                    classes_.class_of[z] = c;
                    stack.push_back(z);
                }
            }
        }
        classes_.object_count.push_back(count);
        classes_.aut_order.push_back(static_cast<long>(hom(x, x).size()));
    }
}

void FinGroupoid::validate_full() const {
    const int m = static_cast<int>(morphisms_.size());
    // non-composable pairs must be undefined
    for (int f = 0; f < m; ++f)
        for (int g = 0; g < m; ++g)
            if (morphisms_[g].src != morphisms_[f].dst && comp_[g][f] != -1)
                throw std::invalid_argument("composite defined on a non-composable pair");
    // associativity over all composable triples
    long triples = 0;
    for (int f = 0; f < m; ++f) {
        for (int g : out_[morphisms_[f].dst]) {
            long fan = static_cast<long>(out_[morphisms_[g].dst].size());
            triples += fan;
        }
    }
    if (triples > kMaxAssociativityTriples)
        throw guard_error("associativity check needs " + std::to_string(triples) +
                          " triples, over budget");
    for (int f = 0; f < m; ++f)
        for (int g : out_[morphisms_[f].dst])
            for (int h : out_[morphisms_[g].dst])
                if (comp_[h][comp_[g][f]] != comp_[comp_[h][g]][f])
                    throw std::invalid_argument("composition is not associative");
}

int FinGroupoid::compose(int g, int f) const {
    if (f < 0 || g < 0 || f >= morphism_count() || g >= morphism_count())
        throw std::invalid_argument("morphism index out of range");
    if (!composable(g, f))
        throw std::invalid_argument("morphisms are not composable");
    return comp_[g][f];
}

Rational FinGroupoid::cardinality() const {
    Rational acc(0);
    for (long aut : classes_.aut_order)
        acc += make_rational(1, aut);
    return acc;
}

FinGroupoid FinGroupoid::discrete(int n) {
    if (n < 0)
        throw std::invalid_argument("negative object count");
    std::vector<Morphism> mor(n);
    std::vector<int> ids(n);
    std::vector<std::vector<int>> comp(n, std::vector<int>(n, -1));
    for (int i = 0; i < n; ++i) {
        mor[i] = {i, i};
        ids[i] = i;
        comp[i][i] = i;
    }
    return FinGroupoid(Derived{}, n, std::move(mor), std::move(ids), std::move(comp));
}

FinGroupoid FinGroupoid::empty_groupoid() { return discrete(0); }

FinGroupoid FinGroupoid::from_group(const std::vector<std::vector<int>>& t) {
    const int n = static_cast<int>(t.size());
    if (n == 0)
        throw std::invalid_argument("a group has at least one element");
    for (const auto& row : t) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("group table is not square");
        for (int v : row)
            if (v < 0 || v >= n)
                throw std::invalid_argument("group table entry out of range");
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (t[t[a][b]][c] != t[a][t[b][c]])
                    throw std::invalid_argument("group table is not associative");
    int e = -1;
    for (int cand = 0; cand < n && e < 0; ++cand) {
        bool ok = true;
        for (int a = 0; a < n && ok; ++a)
            ok = t[cand][a] == a && t[a][cand] == a;
        if (ok)
            e = cand;
    }
    if (e < 0)
        throw std::invalid_argument("group table has no identity");
    for (int a = 0; a < n; ++a) {
        bool has_inverse = false;
        for (int b = 0; b < n && !has_inverse; ++b)
            has_inverse = t[a][b] == e && t[b][a] == e;
        if (!has_inverse)
            throw std::invalid_argument("group table element " + std::to_string(a) +
                                        " has no inverse");
    }
    std::vector<Morphism> mor(n, Morphism{0, 0});
    std::vector<std::vector<int>> comp(n, std::vector<int>(n));
    for (int g = 0; g < n; ++g)
        for (int f = 0; f < n; ++f)
            comp[g][f] = t[g][f];
    return FinGroupoid(Derived{}, 1, std::move(mor), {e}, std::move(comp));
}

std::string FinGroupoid::to_json() const {
    nlohmann::ordered_json j;
    j["objects"] = n_objects_;
    j["morphisms"] = nlohmann::ordered_json::array();
    for (const auto& f : morphisms_)
        j["morphisms"].push_back({{"src", f.src}, {"dst", f.dst}});
    j["identities"] = identities_;
    j["compose"] = comp_;
    return j.dump();
}

FinGroupoid FinGroupoid::from_json(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        int n = j.at("objects").get<int>();
        std::vector<Morphism> mor;
        for (const auto& item : j.at("morphisms"))
            mor.push_back({item.at("src").get<int>(), item.at("dst").get<int>()});
        auto ids = j.at("identities").get<std::vector<int>>();
        auto comp = j.at("compose").get<std::vector<std::vector<int>>>();
        return FinGroupoid(n, std::move(mor), std::move(ids), std::move(comp));
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("groupoid JSON: ") + e.what(), 0);
    }
}

GroupoidMap::GroupoidMap(GroupoidPtr dom, GroupoidPtr cod, std::vector<int> object_map,
                         std::vector<int> morphism_map)
    : dom_(std::move(dom)),
      cod_(std::move(cod)),
      object_map_(std::move(object_map)),
      morphism_map_(std::move(morphism_map)) {
    if (!dom_ || !cod_)
        throw std::invalid_argument("functor needs both feet");
    const FinGroupoid& d = *dom_;
    const FinGroupoid& c = *cod_;
    if (static_cast<int>(object_map_.size()) != d.object_count() ||
        static_cast<int>(morphism_map_.size()) != d.morphism_count())
        throw std::invalid_argument("functor table size mismatch");
    for (int x : object_map_)
        if (x < 0 || x >= c.object_count())
            throw std::invalid_argument("functor object image out of range");
    for (int f : morphism_map_)
        if (f < 0 || f >= c.morphism_count())
            throw std::invalid_argument("functor morphism image out of range");
    for (int f = 0; f < d.morphism_count(); ++f) {
        int ff = morphism_map_[f];
        if (c.source(ff) != object_map_[d.source(f)] || c.target(ff) != object_map_[d.target(f)])
            throw std::invalid_argument("functor does not preserve endpoints");
    }
    for (int x = 0; x < d.object_count(); ++x)
        if (morphism_map_[d.identity(x)] != c.identity(object_map_[x]))
            throw std::invalid_argument("functor does not preserve identities");
    long pairs = 0;
    for (int f = 0; f < d.morphism_count(); ++f) {
        for (int g : d.out(d.target(f))) {
            if (++pairs > kMaxCompositionPairs)
                throw guard_error("functor composition check budget exceeded");
            if (morphism_map_[d.compose(g, f)] != c.compose(morphism_map_[g], morphism_map_[f]))
                throw std::invalid_argument("functor does not preserve composition");
        }
    }
}

GroupoidMap GroupoidMap::identity(GroupoidPtr g) {
    std::vector<int> objs(g->object_count());
    std::vector<int> mors(g->morphism_count());
    for (int i = 0; i < g->object_count(); ++i)
        objs[i] = i;
    for (int i = 0; i < g->morphism_count(); ++i)
        mors[i] = i;
    GroupoidPtr cod = g;
    return GroupoidMap(std::move(g), std::move(cod), std::move(objs), std::move(mors));
}

GroupoidMap GroupoidMap::constant(GroupoidPtr dom, GroupoidPtr cod, int object) {
    if (object < 0 || object >= cod->object_count())
        throw std::invalid_argument("constant functor target out of range");
    std::vector<int> objs(dom->object_count(), object);
    std::vector<int> mors(dom->morphism_count(), cod->identity(object));
    return GroupoidMap(std::move(dom), std::move(cod), std::move(objs), std::move(mors));
}

GroupoidMap GroupoidMap::compose(const GroupoidMap& g, const GroupoidMap& f) {
    if (f.cod_ptr().get() != g.dom_ptr().get())
        throw std::invalid_argument("functor composition foot mismatch");
    std::vector<int> objs(f.dom().object_count());
    std::vector<int> mors(f.dom().morphism_count());
    for (int x = 0; x < f.dom().object_count(); ++x)
        objs[x] = g.on_object(f.on_object(x));
    for (int m = 0; m < f.dom().morphism_count(); ++m)
        mors[m] = g.on_morphism(f.on_morphism(m));
    return GroupoidMap(f.dom_ptr(), g.cod_ptr(), std::move(objs), std::move(mors));
}

FinGroupoid disjoint_union(const FinGroupoid& a, const FinGroupoid& b) {
    const int n = a.object_count() + b.object_count();
    const int m = a.morphism_count() + b.morphism_count();
    const int on = a.object_count();
    const int om = a.morphism_count();
    std::vector<FinGroupoid::Morphism> mor;
    mor.reserve(m);
    for (int f = 0; f < a.morphism_count(); ++f)
        mor.push_back({a.source(f), a.target(f)});
    for (int f = 0; f < b.morphism_count(); ++f)
        mor.push_back({b.source(f) + on, b.target(f) + on});
    std::vector<int> ids;
    ids.reserve(n);
    for (int x = 0; x < a.object_count(); ++x)
        ids.push_back(a.identity(x));
    for (int x = 0; x < b.object_count(); ++x)
        ids.push_back(b.identity(x) + om);
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (int g = 0; g < a.morphism_count(); ++g)
        for (int f = 0; f < a.morphism_count(); ++f)
            if (a.composable(g, f))
                comp[g][f] = a.compose(g, f);
    for (int g = 0; g < b.morphism_count(); ++g)
        for (int f = 0; f < b.morphism_count(); ++f)
            if (b.composable(g, f))
                comp[g + om][f + om] = b.compose(g, f) + om;
    return FinGroupoid(FinGroupoid::Derived{}, n, std::move(mor), std::move(ids),
                       std::move(comp));
}

FinGroupoid product(const FinGroupoid& a, const FinGroupoid& b) {
    const long n = static_cast<long>(a.object_count()) * b.object_count();
    const long m = static_cast<long>(a.morphism_count()) * b.morphism_count();
    if (n > kMaxObjects || m > kMaxMorphisms)
        throw guard_error("product groupoid exceeds the size budget");
    const int nb = b.object_count();
    const int mb = b.morphism_count();
    std::vector<FinGroupoid::Morphism> mor(m);
    for (int fa = 0; fa < a.morphism_count(); ++fa)
        for (int fb = 0; fb < mb; ++fb)
            mor[fa * mb + fb] = {a.source(fa) * nb + b.source(fb),
                                 a.target(fa) * nb + b.target(fb)};
    std::vector<int> ids(n);
    for (int xa = 0; xa < a.object_count(); ++xa)
        for (int xb = 0; xb < nb; ++xb)
            ids[xa * nb + xb] = a.identity(xa) * mb + b.identity(xb);
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (long g = 0; g < m; ++g) {
        int ga = static_cast<int>(g / mb), gb = static_cast<int>(g % mb);
        for (long f = 0; f < m; ++f) {
            int fa = static_cast<int>(f / mb), fb = static_cast<int>(f % mb);
            if (a.composable(ga, fa) && b.composable(gb, fb))
                comp[g][f] = a.compose(ga, fa) * mb + b.compose(gb, fb);
        }
    }
    return FinGroupoid(FinGroupoid::Derived{}, static_cast<int>(n), std::move(mor),
                       std::move(ids), std::move(comp));
}

FinGroupoid doubled(const FinGroupoid& a) {
    const int n = 2 * a.object_count();
    const long m = 4L * a.morphism_count();
    if (n > kMaxObjects || m > kMaxMorphisms)
        throw guard_error("doubled groupoid exceeds the size budget");
    // morphism (f, i, j) runs from copy i of src(f) to copy j of dst(f)
    std::vector<FinGroupoid::Morphism> mor(m);
    for (int f = 0; f < a.morphism_count(); ++f)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                mor[f * 4 + i * 2 + j] = {a.source(f) * 2 + i, a.target(f) * 2 + j};
    std::vector<int> ids(n);
    for (int x = 0; x < a.object_count(); ++x)
        for (int i = 0; i < 2; ++i)
            ids[x * 2 + i] = a.identity(x) * 4 + i * 2 + i;
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (long g = 0; g < m; ++g) {
        int gf = static_cast<int>(g / 4), gi = static_cast<int>((g / 2) % 2),
            gj = static_cast<int>(g % 2);
        for (long f = 0; f < m; ++f) {
            int ff = static_cast<int>(f / 4), fi = static_cast<int>((f / 2) % 2),
                fj = static_cast<int>(f % 2);
            if (fj == gi && a.composable(gf, ff))
                comp[g][f] = a.compose(gf, ff) * 4 + fi * 2 + gj;
        }
    }
    return FinGroupoid(FinGroupoid::Derived{}, n, std::move(mor), std::move(ids),
                       std::move(comp));
}

FinGroupoid free_loop_groupoid(const FinGroupoid& a) {
    const int n = a.object_count();
    // objects (x, alpha): offsets into the automorphism lists
    std::vector<int> obj_base(n + 1, 0);
    for (int x = 0; x < n; ++x)
        obj_base[x + 1] = obj_base[x] + static_cast<int>(a.hom(x, x).size());
    const int loop_objects = obj_base[n];
    // position of a morphism inside hom(src, dst) and inside out(src)
    std::vector<int> pos_in_hom(a.morphism_count(), -1);
    std::vector<int> pos_in_out(a.morphism_count(), -1);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            const auto& h = a.hom(x, y);
            for (int i = 0; i < static_cast<int>(h.size()); ++i)
                pos_in_hom[h[i]] = i;
        }
        const auto& o = a.out(x);
        for (int i = 0; i < static_cast<int>(o.size()); ++i)
            pos_in_out[o[i]] = i;
    }
    // morphisms (obj, h) for h leaving the underlying object
    std::vector<int> mor_base(loop_objects + 1, 0);
    std::vector<int> obj_x(loop_objects), obj_alpha(loop_objects);
    for (int x = 0; x < n; ++x)
        for (int i = obj_base[x]; i < obj_base[x + 1]; ++i) {
            obj_x[i] = x;
            obj_alpha[i] = a.hom(x, x)[i - obj_base[x]];
        }
    for (int o = 0; o < loop_objects; ++o)
        mor_base[o + 1] = mor_base[o] + static_cast<int>(a.out(obj_x[o]).size());
    const long m = mor_base[loop_objects];
    if (loop_objects > kMaxObjects || m > kMaxMorphisms)
        throw guard_error("free-loop groupoid exceeds the size budget");
    std::vector<FinGroupoid::Morphism> mor(m);
    std::vector<int> underlying(m);
    for (int o = 0; o < loop_objects; ++o) {
        int x = obj_x[o], alpha = obj_alpha[o];
        const auto& outs = a.out(x);
        for (int i = 0; i < static_cast<int>(outs.size()); ++i) {
            int h = outs[i];
            int y = a.target(h);
            int beta = a.compose(a.compose(h, alpha), a.inverse(h));
            int dst = obj_base[y] + pos_in_hom[beta];
            mor[mor_base[o] + i] = {o, dst};
            underlying[mor_base[o] + i] = h;
        }
    }
    std::vector<int> ids(loop_objects);
    for (int o = 0; o < loop_objects; ++o)
        ids[o] = mor_base[o] + pos_in_out[a.identity(obj_x[o])];
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (long g = 0; g < m; ++g)
        for (long f = 0; f < m; ++f)
            if (mor[f].dst == mor[g].src)
                comp[g][f] = mor_base[mor[f].src] +
                             pos_in_out[a.compose(underlying[g], underlying[f])];
    return FinGroupoid(FinGroupoid::Derived{}, loop_objects, std::move(mor), std::move(ids),
                       std::move(comp));
}

FinGroupoid wreath_groupoid(const FinGroupoid& a, const Prime& p) {
    const int n = a.object_count();
    const long pv = p.value();
    if (n == 0)
        return FinGroupoid::empty_groupoid();
    Integer object_count = int_pow(Integer(n), static_cast<unsigned long>(pv));
    if (object_count > 1000000)
        throw guard_error("wreath object count " + object_count.get_str() + " over the guard");
    Integer morphism_count =
        Integer(pv) * int_pow(Integer(a.morphism_count()), static_cast<unsigned long>(pv));
    if (object_count > kMaxObjects || morphism_count > kMaxMorphisms)
        throw guard_error("wreath groupoid exceeds the size budget (" +
                          object_count.get_str() + " objects, " + morphism_count.get_str() +
                          " morphisms)");
    const int pn = static_cast<int>(pv);
    const int wn = static_cast<int>(object_count.get_si());

    auto decode = [&](int id) {
        std::vector<int> t(pn);
        for (int i = 0; i < pn; ++i) {
            t[i] = id % n;
            id /= n;
        }
        return t;
    };
    auto encode = [&](const std::vector<int>& t) {
        int id = 0;
        for (int i = pn - 1; i >= 0; --i)
            id = id * n + t[i];
        return id;
    };

    // a morphism is a shift g plus components f_i: x_{(i-g) mod p} -> y_i
    struct WreathMor {
        int src, dst, shift;
        std::vector<int> comps;
    };
    std::vector<WreathMor> wmor;
    std::map<std::vector<int>, int> mor_id; // key: src, shift, comps...
    for (int src = 0; src < wn; ++src) {
        std::vector<int> x = decode(src);
        for (int g = 0; g < pn; ++g) {
            std::vector<int> idx(pn, 0);
            for (;;) {
                std::vector<int> comps(pn), y(pn);
                bool ok = true;
                for (int i = 0; i < pn && ok; ++i) {
                    const auto& pool = a.out(x[(i - g + pn) % pn]);
                    if (pool.empty()) {
                        ok = false; // unreachable: every object has its identity
                        break;
                    }
                    comps[i] = pool[idx[i]];
                    y[i] = a.target(comps[i]);
                }
                if (ok) {
                    int dst = encode(y);
                    std::vector<int> key = {src, g};
                    key.insert(key.end(), comps.begin(), comps.end());
                    mor_id[key] = static_cast<int>(wmor.size());
                    wmor.push_back({src, dst, g, comps});
                }
                // odometer over the component choices
                int pos = 0;
                while (pos < pn) {
                    const auto& pool = a.out(x[(pos - g + pn) % pn]);
                    if (++idx[pos] < static_cast<int>(pool.size()))
                        break;
                    idx[pos] = 0;
                    ++pos;
                }
                if (pos == pn)
                    break;
            }
        }
    }

    const int m = static_cast<int>(wmor.size());
    std::vector<FinGroupoid::Morphism> mor(m);
    for (int f = 0; f < m; ++f)
        mor[f] = {wmor[f].src, wmor[f].dst};
    std::vector<int> ids(wn);
    for (int o = 0; o < wn; ++o) {
        std::vector<int> x = decode(o);
        std::vector<int> key = {o, 0};
        for (int i = 0; i < pn; ++i)
            key.push_back(a.identity(x[i]));
        ids[o] = mor_id.at(key);
    }
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (int f = 0; f < m; ++f) {
        for (int g = 0; g < m; ++g) {
            if (wmor[g].src != wmor[f].dst)
                continue;
            int shift = (wmor[g].shift + wmor[f].shift) % pn;
            std::vector<int> key = {wmor[f].src, shift};
            for (int i = 0; i < pn; ++i) {
                int fi = wmor[f].comps[(i - wmor[g].shift + pn) % pn];
                key.push_back(a.compose(wmor[g].comps[i], fi));
            }
            comp[g][f] = mor_id.at(key);
        }
    }
    return FinGroupoid(FinGroupoid::Derived{}, wn, std::move(mor), std::move(ids),
                       std::move(comp));
}

struct SkeletonBuilder {
    static SkeletonResult build(GroupoidPtr a);
};

SkeletonResult skeletonize(GroupoidPtr a) { return SkeletonBuilder::build(std::move(a)); }

SkeletonResult SkeletonBuilder::build(GroupoidPtr a) {
    const FinGroupoid& g = *a;
    std::vector<int> reps = g.iso_classes().representative;
    std::vector<int> obj_new(g.object_count(), -1);
    for (int c = 0; c < static_cast<int>(reps.size()); ++c)
        obj_new[reps[c]] = c;
    std::vector<int> mor_new(g.morphism_count(), -1);
    std::vector<int> mor_lift;
    std::vector<FinGroupoid::Morphism> mor;
    for (int f = 0; f < g.morphism_count(); ++f) {
        if (obj_new[g.source(f)] < 0 || obj_new[g.target(f)] < 0)
            continue;
        mor_new[f] = static_cast<int>(mor.size());
        mor.push_back({obj_new[g.source(f)], obj_new[g.target(f)]});
        mor_lift.push_back(f);
    }
    const int m = static_cast<int>(mor.size());
    std::vector<int> ids(reps.size());
    for (int c = 0; c < static_cast<int>(reps.size()); ++c)
        ids[c] = mor_new[g.identity(reps[c])];
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (int f = 0; f < m; ++f)
        for (int h = 0; h < m; ++h)
            if (g.composable(mor_lift[h], mor_lift[f]))
                comp[h][f] = mor_new[g.compose(mor_lift[h], mor_lift[f])];
    GroupoidPtr skel = share(FinGroupoid(FinGroupoid::Derived{},
                                         static_cast<int>(reps.size()), std::move(mor),
                                         std::move(ids), std::move(comp)));
    GroupoidMap incl(skel, std::move(a), std::move(reps), std::move(mor_lift));
    return {skel, std::move(incl)};
}

struct PullbackBuilder {
    static PullbackResult build(const GroupoidMap& f, const GroupoidMap& g) {
        if (f.cod_ptr().get() != g.cod_ptr().get())
            throw std::invalid_argument("pullback feet mismatch");
        const FinGroupoid& A = f.dom();
        const FinGroupoid& B = g.dom();
        const FinGroupoid& C = f.cod();

        struct Obj {
            int a, b, phi;
        };
        std::vector<Obj> objs;
        std::map<std::tuple<int, int, int>, int> obj_id;
        for (int a = 0; a < A.object_count(); ++a)
            for (int b = 0; b < B.object_count(); ++b)
                for (int phi : C.hom(f.on_object(a), g.on_object(b))) {
                    obj_id[{a, b, phi}] = static_cast<int>(objs.size());
                    objs.push_back({a, b, phi});
                }
        if (static_cast<int>(objs.size()) > kMaxObjects)
            throw guard_error("pullback apex exceeds the object budget");
        long mor_estimate = 0;
        for (const auto& o : objs)
            mor_estimate +=
                static_cast<long>(A.out(o.a).size()) * static_cast<long>(B.out(o.b).size());
        if (mor_estimate > kMaxMorphisms)
            throw guard_error("pullback apex exceeds the morphism budget (" +
                              std::to_string(mor_estimate) + ")");

        // a morphism is (u, v) with phi' f(u) = g(v) phi; the target
        // triangle determines phi' = g(v) phi f(u)^{-1}
        struct Mor {
            int src, dst, u, v;
        };
        std::vector<Mor> mors;
        std::map<std::tuple<int, int, int>, int> mor_id; // (src obj, u, v)
        std::vector<std::vector<int>> out_by_obj(objs.size());
        for (int o = 0; o < static_cast<int>(objs.size()); ++o) {
            for (int u : A.out(objs[o].a)) {
                int fu_inv = C.inverse(f.on_morphism(u));
                for (int v : B.out(objs[o].b)) {
                    int phi2 = C.compose(C.compose(g.on_morphism(v), objs[o].phi), fu_inv);
                    int dst = obj_id.at({A.target(u), B.target(v), phi2});
                    mor_id[{o, u, v}] = static_cast<int>(mors.size());
                    out_by_obj[o].push_back(static_cast<int>(mors.size()));
                    mors.push_back({o, dst, u, v});
                }
            }
        }
        const int m = static_cast<int>(mors.size());
        std::vector<FinGroupoid::Morphism> mor(m);
        for (int i = 0; i < m; ++i)
            mor[i] = {mors[i].src, mors[i].dst};
        std::vector<int> ids(objs.size());
        for (int o = 0; o < static_cast<int>(objs.size()); ++o)
            ids[o] = mor_id.at({o, A.identity(objs[o].a), B.identity(objs[o].b)});
        std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
        for (int m1 = 0; m1 < m; ++m1)
            for (int m2 : out_by_obj[mors[m1].dst])
                comp[m2][m1] = mor_id.at({mors[m1].src, A.compose(mors[m2].u, mors[m1].u),
                                          B.compose(mors[m2].v, mors[m1].v)});

        GroupoidPtr apex = share(FinGroupoid(FinGroupoid::Derived{},
                                             static_cast<int>(objs.size()), std::move(mor),
                                             std::move(ids), std::move(comp)));
        std::vector<int> po(objs.size()), qo(objs.size()), pm(m), qm(m);
        for (int o = 0; o < static_cast<int>(objs.size()); ++o) {
            po[o] = objs[o].a;
            qo[o] = objs[o].b;
        }
        for (int i = 0; i < m; ++i) {
            pm[i] = mors[i].u;
            qm[i] = mors[i].v;
        }
        GroupoidMap to_left(apex, f.dom_ptr(), std::move(po), std::move(pm));
        GroupoidMap to_right(apex, g.dom_ptr(), std::move(qo), std::move(qm));
        return {apex, std::move(to_left), std::move(to_right)};
    }
};

PullbackResult homotopy_pullback(const GroupoidMap& f, const GroupoidMap& g) {
    return PullbackBuilder::build(f, g);
}

WreathDeltaReport verify_wreath_delta(const FinGroupoid& a, const Prime& p) {
    FinGroupoid bcp = FinGroupoid::from_group(groups::cyclic(static_cast<int>(p.value())));
    Rational product_side =
        product(bcp, a).cardinality() - wreath_groupoid(a, p).cardinality();
    Rational quotient_side = padic::fermat_quotient(a.cardinality(), p);
    WreathDeltaReport report;
    report.product_side = product_side;
    report.quotient_side = quotient_side;
    report.passed = product_side == quotient_side;
    report.description = "|BC_p x A| - |A wr C_p| = " + product_side.get_str() +
                         " vs delta|A| = " + quotient_side.get_str() + " (p=" +
                         std::to_string(p.value()) + ", " +
                         std::to_string(a.object_count()) + " objects)";
    return report;
}

namespace groups {

Table cyclic(int n) {
    if (n < 1)
        throw std::invalid_argument("cyclic group order must be positive");
    Table t(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            t[a][b] = (a + b) % n;
    return t;
}

Table direct_product(const Table& a, const Table& b) {
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    Table t(na * nb, std::vector<int>(na * nb));
    for (int x = 0; x < na * nb; ++x)
        for (int y = 0; y < na * nb; ++y)
            t[x][y] = a[x / nb][y / nb] * nb + b[x % nb][y % nb];
    return t;
}

Table dihedral(int n) {
    if (n < 1)
        throw std::invalid_argument("dihedral parameter must be positive");
    // element k*n + i encodes s^k r^i with s r s = r^{-1}
    const int order = 2 * n;
    Table t(order, std::vector<int>(order));
    for (int x = 0; x < order; ++x) {
        int k1 = x / n, i1 = x % n;
        for (int y = 0; y < order; ++y) {
            int k2 = y / n, i2 = y % n;
            int k = (k1 + k2) % 2;
            int i = ((k2 == 0 ? i1 : n - i1) % n + i2) % n;
            t[x][y] = k * n + i;
        }
    }
    return t;
}

Table quaternion() {
    // elements s*4 + b: sign s in {0,1}, basis b in {1, i, j, k}
    auto mul_basis = [](int a, int b, int& sign) {
        static const int prod[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
        static const int sgn[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
        sign = sgn[a][b];
        return prod[a][b];
    };
    Table t(8, std::vector<int>(8));
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            int s = (x / 4 + y / 4) % 2;
            int extra = 0;
            int b = mul_basis(x % 4, y % 4, extra);
            t[x][y] = ((s + extra) % 2) * 4 + b;
        }
    return t;
}

Table from_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text).get<Table>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("group table JSON: ") + e.what(), 0);
    }
}

std::vector<std::pair<std::string, Table>> catalog_up_to(int max_order) {
    if (max_order < 1 || max_order > 9)
        throw std::invalid_argument("the group catalog covers orders 1 through 9");
    std::vector<std::pair<std::string, Table>> out;
    auto add = [&](int order, const std::string& name, Table t) {
        if (order <= max_order)
            out.emplace_back(name, std::move(t));
    };
    add(1, "C1", cyclic(1));
    add(2, "C2", cyclic(2));
    add(3, "C3", cyclic(3));
    add(4, "C4", cyclic(4));
    add(4, "C2xC2", direct_product(cyclic(2), cyclic(2)));
    add(5, "C5", cyclic(5));
    add(6, "C6", cyclic(6));
    add(6, "S3", dihedral(3));
    add(7, "C7", cyclic(7));
    add(8, "C8", cyclic(8));
    add(8, "C4xC2", direct_product(cyclic(4), cyclic(2)));
    add(8, "C2xC2xC2", direct_product(direct_product(cyclic(2), cyclic(2)), cyclic(2)));
    add(8, "D4", dihedral(4));
    add(8, "Q8", quaternion());
    add(9, "C9", cyclic(9));
    add(9, "C3xC3", direct_product(cyclic(3), cyclic(3)));
    return out;
}

} // namespace groups

} // namespace groupoids
} // namespace cardinal
