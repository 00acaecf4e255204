#include "cardinal/spaces.hpp"

#include <algorithm>
#include <cctype>

#include "cardinal/delta_ring.hpp"

namespace cardinal {
namespace spaces {

SpaceExpr::SpaceExpr(Kind k, long deg, std::vector<SpaceExpr> ch)
    : kind_(k), em_degree_(deg), children_(std::move(ch)) {}

SpaceExpr SpaceExpr::point() { return SpaceExpr(Kind::point, 0, {}); }

SpaceExpr SpaceExpr::empty() { return SpaceExpr(Kind::empty, 0, {}); }

SpaceExpr SpaceExpr::em(long k) {
    if (k < 0)
        throw std::invalid_argument("B^k needs k >= 0");
    return SpaceExpr(Kind::em, k, {});
}

SpaceExpr SpaceExpr::disjoint(std::vector<SpaceExpr> parts) {
    std::vector<SpaceExpr> flat;
    for (auto& e : parts) {
        if (e.kind_ == Kind::disjoint)
            flat.insert(flat.end(), e.children_.begin(), e.children_.end());
        else if (e.kind_ != Kind::empty)
            flat.push_back(std::move(e));
    }
    if (flat.empty())
        return empty();
    if (flat.size() == 1)
        return flat[0];
    std::sort(flat.begin(), flat.end());
    return SpaceExpr(Kind::disjoint, 0, std::move(flat));
}

SpaceExpr SpaceExpr::product(std::vector<SpaceExpr> parts) {
    std::vector<SpaceExpr> flat;
    for (auto& e : parts) {
        if (e.kind_ == Kind::empty)
            return empty();
        if (e.kind_ == Kind::product)
            flat.insert(flat.end(), e.children_.begin(), e.children_.end());
        else if (e.kind_ != Kind::point)
            flat.push_back(std::move(e));
    }
    if (flat.empty())
        return point();
    if (flat.size() == 1)
        return flat[0];
    std::sort(flat.begin(), flat.end());
    return SpaceExpr(Kind::product, 0, std::move(flat));
}

SpaceExpr SpaceExpr::wreath(SpaceExpr inner) {
    if (inner.kind_ == Kind::empty)
        return empty(); // the p-fold power of nothing is nothing
    if (inner.kind_ == Kind::point)
        return em(1); // pt^p // shift is the classifying space of the shift group
    return SpaceExpr(Kind::wreath, 0, {std::move(inner)});
}

bool SpaceExpr::is_monomial() const {
    switch (kind_) {
    case Kind::point:
    case Kind::em:
    case Kind::wreath:
        return true;
    case Kind::product:
        return std::all_of(children_.begin(), children_.end(), [](const SpaceExpr& c) {
            return c.kind_ == Kind::em || c.kind_ == Kind::wreath;
        });
    default:
        return false;
    }
}

bool SpaceExpr::is_connected_loop_space() const {
    switch (kind_) {
    case Kind::point:
        return true;
    case Kind::em:
        return em_degree_ >= 1;
    case Kind::product:
        return std::all_of(children_.begin(), children_.end(), [](const SpaceExpr& c) {
            return c.kind_ == Kind::em && c.em_degree_ >= 1;
        });
    default:
        return false;
    }
}

bool SpaceExpr::is_loop_space() const {
    switch (kind_) {
    case Kind::point:
        return true;
    case Kind::em:
        return true;
    case Kind::product:
        return std::all_of(children_.begin(), children_.end(),
                           [](const SpaceExpr& c) { return c.kind_ == Kind::em; });
    default:
        return false;
    }
}

namespace {

// Based loops of a loop space, with Om(B^0) the one-point space: based
// loops in a discrete space do not move.
SpaceExpr based_loop(const SpaceExpr& e) {
    switch (e.kind()) {
    case Kind::point:
        return SpaceExpr::point();
    case Kind::em:
        return e.em_degree() == 0 ? SpaceExpr::point() : SpaceExpr::em(e.em_degree() - 1);
    case Kind::product: {
        std::vector<SpaceExpr> parts;
        for (const auto& c : e.children())
            parts.push_back(based_loop(c));
        return SpaceExpr::product(std::move(parts));
    }
    default:
        throw std::invalid_argument("based loops of a non loop space: " + e.to_string());
    }
}

} // namespace

SpaceExpr SpaceExpr::loop(const SpaceExpr& e) {
    if (e.is_connected_loop_space())
        return based_loop(e);
    if (e.is_loop_space() || e.kind() == Kind::disjoint || e.is_empty())
        throw std::invalid_argument("loop space of an empty or disconnected expression: " +
                                    e.to_string());
    throw std::invalid_argument("not a loop space: " + e.to_string());
}

SpaceExpr SpaceExpr::free_loop(const SpaceExpr& e) {
    if (!e.is_loop_space())
        throw std::invalid_argument("free loops need a loop-space expression: " + e.to_string());
    // L(A) = A x Om(A) once A is a loop space
    return product({e, based_loop(e)});
}

int SpaceExpr::compare(const SpaceExpr& a, const SpaceExpr& b) {
    if (a.kind_ != b.kind_)
        return static_cast<int>(a.kind_) < static_cast<int>(b.kind_) ? -1 : 1;
    if (a.em_degree_ != b.em_degree_)
        return a.em_degree_ < b.em_degree_ ? -1 : 1;
    std::size_t n = std::min(a.children_.size(), b.children_.size());
    for (std::size_t i = 0; i < n; ++i)
        if (int c = compare(a.children_[i], b.children_[i]); c != 0)
            return c;
    if (a.children_.size() != b.children_.size())
        return a.children_.size() < b.children_.size() ? -1 : 1;
    return 0;
}

std::string SpaceExpr::to_string() const {
    switch (kind_) {
    case Kind::point:
        return "pt";
    case Kind::empty:
        return "empty";
    case Kind::em:
        return "B" + std::to_string(em_degree_);
    case Kind::wreath:
        return "W(" + children_[0].to_string() + ")";
    case Kind::product: {
        std::string out;
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (i)
                out += " * ";
            bool paren = children_[i].kind_ == Kind::disjoint;
            out += paren ? "(" + children_[i].to_string() + ")" : children_[i].to_string();
        }
        return out;
    }
    case Kind::disjoint: {
        std::string out;
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (i)
                out += " + ";
            out += children_[i].to_string();
        }
        return out;
    }
    }
    return "?";
}

std::string Connectivity::to_string() const {
    switch (kind) {
    case Kind::empty_space:
        return "empty";
    case Kind::infinite:
        return "infinite";
    case Kind::finite:
        return std::to_string(value);
    }
    return "?";
}

namespace {

Integer necklace_count(const Integer& c, const Prime& p) {
    // Orbits of the cyclic shift on c^p tuples; every non-identity power of
    // a p-cycle fixes only the diagonal, so Burnside gives (c^p + (p-1)c)/p.
    unsigned long pu = static_cast<unsigned long>(p.value());
    return (int_pow(c, pu) + Integer(p.value() - 1) * c) / p.value();
}

SpaceProfile profile_impl(const SpaceExpr& e, const Prime* p) {
    switch (e.kind()) {
    case Kind::point:
        return {Connectivity::infinite(), -2, {}, Integer(1)};
    case Kind::empty:
        return {Connectivity::empty_space(), -1, {}, Integer(0)};
    case Kind::em: {
        long k = e.em_degree();
        if (k == 0) {
            std::optional<Integer> comps;
            if (p)
                comps = Integer(p->value());
            return {Connectivity::finite(-1), 0, {0}, comps};
        }
        return {Connectivity::finite(k - 1), k, {k}, Integer(1)};
    }
    case Kind::disjoint: {
        SpaceProfile out;
        out.connectivity = Connectivity::finite(-1); // at least two nonempty summands
        out.level = 0;
        out.nonzero_pi = {0};
        out.components = Integer(0);
        for (const auto& c : e.children()) {
            SpaceProfile pc = profile_impl(c, p);
            out.level = std::max(out.level, pc.level);
            out.nonzero_pi.insert(pc.nonzero_pi.begin(), pc.nonzero_pi.end());
            if (out.components && pc.components)
                out.components = *out.components + *pc.components;
            else
                out.components.reset();
        }
        return out;
    }
    case Kind::product: {
        SpaceProfile out;
        out.connectivity = Connectivity::infinite();
        out.level = 0;
        out.components = Integer(1);
        for (const auto& c : e.children()) {
            SpaceProfile pc = profile_impl(c, p);
            // pi_i of a product vanishes exactly when it vanishes in every
            // factor, so connectivity is the minimum and nonzero degrees
            // accumulate.
            if (pc.connectivity.kind == Connectivity::Kind::finite &&
                (out.connectivity.kind == Connectivity::Kind::infinite ||
                 pc.connectivity.value < out.connectivity.value))
                out.connectivity = pc.connectivity;
            out.level = std::max(out.level, pc.level);
            out.nonzero_pi.insert(pc.nonzero_pi.begin(), pc.nonzero_pi.end());
            if (out.components && pc.components)
                out.components = *out.components * *pc.components;
            else
                out.components.reset();
        }
        return out;
    }
    case Kind::wreath: {
        SpaceProfile inner = profile_impl(e.children()[0], p);
        SpaceProfile out;
        bool connected = inner.connectivity.is_connected();
        out.connectivity = Connectivity::finite(connected ? 0 : -1);
        out.level = std::max(inner.level, 1L);
        // The fibration A^p -> W(A) -> B^1 keeps pi_i for i >= 2 and makes
        // pi_1 surject onto the shift group at a diagonal basepoint.
        out.nonzero_pi.insert(1);
        if (!connected)
            out.nonzero_pi.insert(0);
        for (long i : inner.nonzero_pi)
            if (i >= 2)
                out.nonzero_pi.insert(i);
        if (inner.components && p)
            out.components = necklace_count(*inner.components, *p);
        return out;
    }
    }
    throw std::logic_error("unreachable space kind");
}

} // namespace

SpaceProfile profile(const SpaceExpr& e) { return profile_impl(e, nullptr); }

SpaceProfile profile(const SpaceExpr& e, const Prime& p) { return profile_impl(e, &p); }

Integer component_count(const SpaceExpr& e, const Prime& p) {
    return *profile_impl(e, &p).components;
}

EvalTarget EvalTarget::rational(const Prime& p) {
    return {RingKind::rational, 0, p, Mode::exact, 0};
}

EvalTarget EvalTarget::height_exact(const Prime& p, long n) {
    if (n < 0)
        throw std::invalid_argument("height must be >= 0");
    return {RingKind::height, n, p, Mode::exact, 0};
}

EvalTarget EvalTarget::height_truncated(const Prime& p, long n, int precision) {
    if (n < 1)
        throw std::invalid_argument(
            "height-0 values are rational; there is no truncated p-adic form");
    if (precision < 1)
        throw std::invalid_argument("precision must be >= 1");
    return {RingKind::height, n, p, Mode::truncated, precision};
}

padic::Scalar EvalTarget::scalar_from_integer(const Integer& n) const {
    if (mode == Mode::truncated)
        return padic::Scalar::truncated(padic::TruncatedPAdic(p, precision, n));
    if (ring == RingKind::height && height >= 1)
        return padic::Scalar::p_local(Rational(n), p);
    return padic::Scalar::exact(Rational(n), p);
}

std::string EvalTarget::to_string() const {
    std::string base = ring == RingKind::rational ? "rational" : "height-" + std::to_string(height);
    base += "(p=" + std::to_string(p.value());
    if (mode == Mode::truncated)
        base += ", mod p^" + std::to_string(precision);
    return base + ")";
}

namespace {

padic::Scalar em_cardinality(long k, const EvalTarget& t) {
    long n = t.ring == EvalTarget::RingKind::rational ? 0 : t.height;
    Integer e = binomial(n - 1, static_cast<unsigned long>(k));
    if (e >= 0) {
        if (e > 1000000)
            throw guard_error("cardinality exponent " + e.get_str() + " too large");
        if (t.mode == EvalTarget::Mode::truncated && e >= t.precision)
            return t.scalar_from_integer(0); // p^e vanishes mod p^precision
        return t.scalar_from_integer(int_pow(Integer(t.p.value()), e.get_ui()));
    }
    // negative exponents only arise at height 0 / rational, where p inverts
    Integer den = int_pow(Integer(t.p.value()), Integer(-e).get_ui());
    return padic::Scalar::exact(make_rational(1, den), t.p);
}

} // namespace

padic::Scalar cardinality(const SpaceExpr& e, const EvalTarget& target) {
    switch (e.kind()) {
    case Kind::point:
        return target.scalar_from_integer(1);
    case Kind::empty:
        return target.scalar_from_integer(0);
    case Kind::em:
        return em_cardinality(e.em_degree(), target);
    case Kind::disjoint: {
        padic::Scalar acc = target.scalar_from_integer(0);
        for (const auto& c : e.children())
            acc = acc + cardinality(c, target);
        return acc;
    }
    case Kind::product: {
        padic::Scalar acc = target.scalar_from_integer(1);
        for (const auto& c : e.children())
            acc = acc * cardinality(c, target);
        return acc;
    }
    case Kind::wreath: {
        // |W(A)| = |B^1| |A| - delta|A|, the defining identity of the
        // derivation on cardinalities.
        padic::Scalar inner = cardinality(e.children()[0], target);
        padic::Scalar bcp = em_cardinality(1, target);
        return bcp * inner - inner.fermat_quotient();
    }
    }
    throw std::logic_error("unreachable space kind");
}

padic::Scalar dimension(const SpaceExpr& e, const EvalTarget& target) {
    return cardinality(SpaceExpr::free_loop(e), target);
}

RigElement::RigElement(const Prime& p) : p_(p) {}

RigElement RigElement::from_integer(const Prime& p, const Integer& n) {
    RigElement out(p);
    out.insert(SpaceExpr::point(), n);
    return out;
}

RigElement RigElement::from_monomial(const Prime& p, const SpaceExpr& m, const Integer& coeff) {
    if (!m.is_monomial())
        throw std::invalid_argument("rig keys must be monomials, got " + m.to_string());
    RigElement out(p);
    out.insert(m, coeff);
    return out;
}

void RigElement::insert(const SpaceExpr& m, const Integer& c) {
    if (c == 0)
        return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

namespace {

void require_same_rig(const RigElement& a, const RigElement& b) {
    if (a.prime() != b.prime())
        throw std::invalid_argument("rig arithmetic across different primes");
}

} // namespace

RigElement operator+(const RigElement& a, const RigElement& b) {
    require_same_rig(a, b);
    RigElement out = a;
    for (const auto& [m, c] : b.terms_)
        out.insert(m, c);
    return out;
}

RigElement RigElement::operator-() const {
    RigElement out(p_);
    for (const auto& [m, c] : terms_)
        out.insert(m, -c);
    return out;
}

RigElement operator-(const RigElement& a, const RigElement& b) { return a + (-b); }

RigElement operator*(const RigElement& a, const RigElement& b) {
    require_same_rig(a, b);
    RigElement out(a.prime());
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms())
            out.insert(SpaceExpr::product({ma, mb}), ca * cb);
    return out;
}

RigElement RigElement::pow(unsigned long k) const {
    RigElement acc = from_integer(p_, 1);
    for (unsigned long i = 0; i < k; ++i)
        acc = acc * *this;
    return acc;
}

bool operator==(const RigElement& a, const RigElement& b) {
    return a.prime() == b.prime() && a.terms() == b.terms();
}

std::string RigElement::to_string() const {
    if (terms_.empty())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Integer mag = c < 0 ? Integer(-c) : c;
        if (first) {
            if (c < 0)
                out += "-";
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (m == SpaceExpr::point()) {
            out += mag.get_str();
        } else {
            if (mag != 1)
                out += mag.get_str() + " * ";
            out += m.to_string();
        }
    }
    return out;
}

RigElement to_rig(const SpaceExpr& e, const Prime& p) {
    switch (e.kind()) {
    case Kind::point:
        return RigElement::from_integer(p, 1);
    case Kind::empty:
        return RigElement(p);
    case Kind::em:
    case Kind::wreath:
        return RigElement::from_monomial(p, e);
    case Kind::disjoint: {
        RigElement acc(p);
        for (const auto& c : e.children())
            acc = acc + to_rig(c, p);
        return acc;
    }
    case Kind::product: {
        RigElement acc = RigElement::from_integer(p, 1);
        for (const auto& c : e.children())
            acc = acc * to_rig(c, p);
        return acc;
    }
    }
    throw std::logic_error("unreachable space kind");
}

SpaceExpr to_space(const RigElement& x) {
    std::vector<SpaceExpr> parts;
    for (const auto& [m, c] : x.terms()) {
        if (c < 0)
            throw std::invalid_argument("not a space: negative coefficient in " + x.to_string());
        if (c > 100000)
            throw guard_error("space expansion of " + c.get_str() + " copies is too large");
        for (Integer i = 0; i < c; ++i)
            parts.push_back(m);
    }
    return SpaceExpr::disjoint(std::move(parts));
}

namespace {

// delta on a single monomial: |B^1 x m| - |W(m)|. W(pt) normalizes to B^1,
// which is what makes delta(1) = 0 come out by cancellation.
RigElement delta_monomial(const SpaceExpr& m, const Prime& p) {
    RigElement left =
        RigElement::from_monomial(p, SpaceExpr::product({SpaceExpr::em(1), m}));
    RigElement right = RigElement::from_monomial(p, SpaceExpr::wreath(m));
    return left - right;
}

// (x^p + y^p - (x+y)^p)/p in rig arithmetic, through the integer form.
RigElement rig_correction(const RigElement& x, const RigElement& y) {
    const Prime& p = x.prime();
    RigElement acc(p);
    unsigned long pu = static_cast<unsigned long>(p.value());
    for (const auto& [i, coeff] : delta::correction_coefficients(p))
        acc = acc + RigElement::from_integer(p, coeff) * x.pow(i) * y.pow(pu - i);
    return acc;
}

} // namespace

RigElement rig_delta(const RigElement& x) {
    const Prime& p = x.prime();
    if (x.is_zero())
        return RigElement(p);
    auto it = x.terms().begin();
    const SpaceExpr& m = it->first;
    const Integer& c = it->second;
    // delta(c m) = c delta(m) + dtilde(c) m^p, the module rule over Z
    RigElement head_delta =
        RigElement::from_integer(p, c) * delta_monomial(m, p) +
        RigElement::from_integer(p, delta::integer_fermat_quotient(c, p)) *
            RigElement::from_monomial(p, m).pow(static_cast<unsigned long>(p.value()));
    if (x.terms().size() == 1)
        return head_delta;
    RigElement head = RigElement::from_monomial(p, m, c);
    RigElement rest = x - head;
    return head_delta + rig_delta(rest) + rig_correction(head, rest);
}

padic::Scalar evaluate_rig(const RigElement& x, const EvalTarget& target) {
    padic::Scalar acc = target.scalar_from_integer(0);
    for (const auto& [m, c] : x.terms())
        acc = acc + target.scalar_from_integer(c) * cardinality(m, target);
    return acc;
}

namespace {

class Parser {
public:
    Parser(const std::string& text, const Prime& p) : s_(text), p_(p) {}

    RigElement run() {
        RigElement out = parse_expr();
        skip_ws();
        if (pos_ != s_.size())
            throw parse_error("trailing input '" + s_.substr(pos_) + "'", pos_);
        return out;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c))
            throw parse_error(std::string("expected '") + c + "'", pos_);
    }

    std::string parse_digits() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == start)
            throw parse_error("expected a number", pos_);
        return s_.substr(start, pos_ - start);
    }

    unsigned long parse_nat() {
        std::size_t at = pos_;
        std::string digits = parse_digits();
        try {
            return std::stoul(digits);
        } catch (const std::out_of_range&) {
            throw parse_error("number " + digits + " too large", at);
        }
    }

    RigElement parse_expr() {
        // a leading '-' is tolerated so printed rig elements read back
        skip_ws();
        RigElement acc = eat('-') ? -parse_term() : parse_term();
        for (;;) {
            if (eat('+'))
                acc = acc + parse_term();
            else if (eat('-'))
                acc = acc - parse_term();
            else
                return acc;
        }
    }

    RigElement parse_term() {
        RigElement acc = parse_factor();
        while (eat('*'))
            acc = acc * parse_factor();
        return acc;
    }

    RigElement parse_factor() {
        RigElement base = parse_atom();
        if (eat('^'))
            return base.pow(parse_nat());
        return base;
    }

    // Arguments of W, Om, L denote spaces; rebuild one from the rig value
    // and map constructor errors to parse errors at the call site.
    SpaceExpr space_argument(const char* op) {
        std::size_t at = pos_;
        expect('(');
        RigElement inner = parse_expr();
        expect(')');
        try {
            return to_space(inner);
        } catch (const std::invalid_argument& e) {
            throw parse_error(std::string(op) + " argument: " + e.what(), at);
        }
    }

    RigElement parse_atom() {
        skip_ws();
        std::size_t at = pos_;
        if (pos_ >= s_.size())
            throw parse_error("unexpected end of input", pos_);

        if (eat('(')) {
            RigElement inner = parse_expr();
            expect(')');
            return inner;
        }

        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)))
            return RigElement::from_integer(p_, Integer(parse_digits()));

        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            std::string word = s_.substr(start, pos_ - start);
            if (word == "pt")
                return RigElement::from_integer(p_, 1);
            if (word == "empty")
                return RigElement(p_);
            if (word == "B")
                return RigElement::from_monomial(p_, SpaceExpr::em(static_cast<long>(parse_nat())));
            try {
                if (word == "W")
                    return to_rig(SpaceExpr::wreath(space_argument("W")), p_);
                if (word == "Om")
                    return to_rig(SpaceExpr::loop(space_argument("Om")), p_);
                if (word == "L")
                    return to_rig(SpaceExpr::free_loop(space_argument("L")), p_);
            } catch (const parse_error&) {
                throw;
            } catch (const std::invalid_argument& e) {
                throw parse_error(e.what(), at);
            }
            throw parse_error("unknown name '" + word + "'", at);
        }
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    Prime p_;
};

} // namespace

RigElement parse_rig(const std::string& text, const Prime& p) { return Parser(text, p).run(); }

SpaceExpr parse_space(const std::string& text, const Prime& p) {
    RigElement rig = parse_rig(text, p);
    try {
        return to_space(rig);
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what(), 0);
    }
}

namespace {

// Generator factors of a monomial, with multiplicity.
std::vector<SpaceExpr> monomial_factors(const SpaceExpr& m) {
    switch (m.kind()) {
    case Kind::point:
        return {};
    case Kind::em:
    case Kind::wreath:
        return {m};
    case Kind::product:
        return m.children();
    default:
        throw std::invalid_argument("not a monomial: " + m.to_string());
    }
}

// Multiset inclusion of sorted factor lists.
bool monomial_divides(const SpaceExpr& g, const SpaceExpr& m) {
    std::vector<SpaceExpr> gf = monomial_factors(g);
    std::vector<SpaceExpr> mf = monomial_factors(m);
    std::size_t j = 0;
    for (const auto& f : gf) {
        while (j < mf.size() && mf[j] < f)
            ++j;
        if (j >= mf.size() || !(mf[j] == f))
            return false;
        ++j;
    }
    return true;
}

// Monomial expansion of an arbitrary expression, coefficients ignored.
std::vector<SpaceExpr> monomials_of(const SpaceExpr& e) {
    switch (e.kind()) {
    case Kind::point:
    case Kind::em:
    case Kind::wreath:
        return {e};
    case Kind::empty:
        return {};
    case Kind::disjoint: {
        std::vector<SpaceExpr> out;
        for (const auto& c : e.children())
            for (auto& m : monomials_of(c))
                out.push_back(std::move(m));
        return out;
    }
    case Kind::product: {
        std::vector<SpaceExpr> out = {SpaceExpr::point()};
        for (const auto& c : e.children()) {
            std::vector<SpaceExpr> next;
            for (const auto& acc : out)
                for (const auto& m : monomials_of(c))
                    next.push_back(SpaceExpr::product({acc, m}));
            out = std::move(next);
        }
        return out;
    }
    }
    throw std::logic_error("unreachable space kind");
}

} // namespace

bool monomial_is_torsion(const SpaceExpr& m, const std::vector<TorsionRelation>& relations) {
    for (const auto& r : relations)
        if (monomial_divides(r.generator, m))
            return true;
    // A wreath of torsion is torsion: delta keeps the torsion ideal stable,
    // and |W(A)| = |B^1 x A| - delta|A| sits inside it whenever |A| does.
    for (const auto& f : monomial_factors(m)) {
        if (f.kind() != Kind::wreath)
            continue;
        std::vector<SpaceExpr> inner = monomials_of(f.children()[0]);
        if (!inner.empty() && std::all_of(inner.begin(), inner.end(), [&](const SpaceExpr& im) {
                return monomial_is_torsion(im, relations);
            }))
            return true;
    }
    return false;
}

RigElement torsion_free_quotient(const RigElement& x,
                                 const std::vector<TorsionRelation>& relations) {
    for (const auto& r : relations) {
        if (!r.generator.is_monomial())
            throw std::invalid_argument("torsion relation generator must be a monomial");
        if (r.exponent < 1)
            throw std::invalid_argument("torsion relation exponent must be >= 1");
    }
    RigElement out(x.prime());
    for (const auto& [m, c] : x.terms())
        if (!monomial_is_torsion(m, relations))
            out = out + RigElement::from_monomial(x.prime(), m, c);
    return out;
}

RigElement RigRing::sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> nterms(1, 3);
    std::uniform_int_distribution<int> nfactors(1, 2);
    std::uniform_int_distribution<long> coeff(-4, 4);
    std::uniform_int_distribution<int> pick(0, 7);

    auto generator = [&](int which) -> SpaceExpr {
        switch (which) {
        case 0:
            return SpaceExpr::em(0);
        case 1:
            return SpaceExpr::em(1);
        case 2:
            return SpaceExpr::em(2);
        case 3:
            return SpaceExpr::em(3);
        case 4:
            return SpaceExpr::wreath(SpaceExpr::em(0));
        case 5:
            return SpaceExpr::wreath(SpaceExpr::em(1));
        case 6:
            return SpaceExpr::wreath(SpaceExpr::product({SpaceExpr::em(1), SpaceExpr::em(2)}));
        default:
            return SpaceExpr::wreath(SpaceExpr::wreath(SpaceExpr::em(1)));
        }
    };

    RigElement out(p_);
    int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) {
        long c;
        do {
            c = coeff(rng);
        } while (c == 0);
        std::vector<SpaceExpr> factors;
        int k = nfactors(rng);
        for (int i = 0; i < k; ++i)
            factors.push_back(generator(pick(rng)));
        out = out + RigElement::from_monomial(p_, SpaceExpr::product(std::move(factors)),
                                              Integer(c));
    }
    return out;
}

} // namespace spaces
} // namespace cardinal
