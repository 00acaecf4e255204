#include "cardinal/delta_ring.hpp"

#include <cmath>

namespace cardinal {
namespace delta {

std::vector<std::pair<unsigned long, Integer>> correction_coefficients(const Prime& p) {
    std::vector<std::pair<unsigned long, Integer>> out;
    unsigned long pu = static_cast<unsigned long>(p.value());
    for (unsigned long i = 1; i < pu; ++i) {
        Integer c = binomial(p.value(), i);
        // C(p,i) is divisible by p for 0 < i < p, so this division is exact.
        out.emplace_back(i, -(c / p.value()));
    }
    return out;
}

Integer integer_fermat_quotient(const Integer& t, const Prime& p) {
    Integer tp = int_pow(t, static_cast<unsigned long>(p.value()));
    return (t - tp) / p.value();
}

Rational RationalFermatRing::sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<long> small(-9, 9);
    std::uniform_int_distribution<long> den(1, 9);
    std::uniform_int_distribution<long> exp(1, 5);
    switch (kind(rng)) {
    case 0:
        return Rational(small(rng));
    case 1: {
        // signed p-power, the regime where valuations move
        long e = exp(rng);
        Integer pe = int_pow(Integer(p_.value()), static_cast<unsigned long>(e));
        return small(rng) % 2 == 0 ? Rational(pe) : make_rational(1, pe);
    }
    default:
        return make_rational(Integer(small(rng)), Integer(den(rng)));
    }
}

Rational PLocalFermatRing::sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<long> num(-30, 30);
    std::uniform_int_distribution<long> den(1, 30);
    std::uniform_int_distribution<long> exp(0, 4);
    long b;
    do {
        b = den(rng);
    } while (b % p_.value() == 0);
    Integer scale = int_pow(Integer(p_.value()), static_cast<unsigned long>(exp(rng)));
    return make_rational(Integer(num(rng)) * scale, Integer(b));
}

padic::TruncatedPAdic TruncatedFermatRing::sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<unsigned long> word;
    Integer acc = 0;
    for (int i = 0; i < 3; ++i)
        acc = acc * Integer(word(rng)) + Integer(word(rng));
    return Element(p_, precision_, acc);
}

FiniteRingTable::FiniteRingTable(std::vector<std::vector<int>> add_table,
                                 std::vector<std::vector<int>> mul_table)
    : n_(static_cast<int>(add_table.size())), add_(std::move(add_table)),
      mul_(std::move(mul_table)) {
    auto square = [this](const std::vector<std::vector<int>>& t, const char* which) {
        if (static_cast<int>(t.size()) != n_)
            throw std::invalid_argument(std::string(which) + " table is not n x n");
        for (const auto& row : t) {
            if (static_cast<int>(row.size()) != n_)
                throw std::invalid_argument(std::string(which) + " table is not n x n");
            for (int v : row)
                if (v < 0 || v >= n_)
                    throw std::invalid_argument(std::string(which) + " table entry out of range");
        }
    };
    if (n_ == 0)
        throw std::invalid_argument("empty ring table");
    square(add_, "addition");
    square(mul_, "multiplication");

    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            if (add_[a][b] != add_[b][a])
                throw std::invalid_argument("addition is not commutative");
            if (mul_[a][b] != mul_[b][a])
                throw std::invalid_argument("multiplication is not commutative");
            for (int c = 0; c < n_; ++c) {
                if (add_[add_[a][b]][c] != add_[a][add_[b][c]])
                    throw std::invalid_argument("addition is not associative");
                if (mul_[mul_[a][b]][c] != mul_[a][mul_[b][c]])
                    throw std::invalid_argument("multiplication is not associative");
                if (mul_[a][add_[b][c]] != add_[mul_[a][b]][mul_[a][c]])
                    throw std::invalid_argument("multiplication does not distribute");
            }
        }

    for (int e = 0; e < n_; ++e) {
        bool is_zero = true, is_one = true;
        for (int a = 0; a < n_; ++a) {
            if (add_[e][a] != a)
                is_zero = false;
            if (mul_[e][a] != a)
                is_one = false;
        }
        if (is_zero && zero_ < 0)
            zero_ = e;
        if (is_one && one_ < 0)
            one_ = e;
    }
    if (zero_ < 0)
        throw std::invalid_argument("no additive identity");
    if (one_ < 0)
        throw std::invalid_argument("no multiplicative identity");

    neg_.assign(n_, -1);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b)
            if (add_[a][b] == zero_) {
                neg_[a] = b;
                break;
            }
        if (neg_[a] < 0)
            throw std::invalid_argument("element without additive inverse");
    }
}

FiniteRingTable FiniteRingTable::cyclic(int n) {
    if (n < 1)
        throw std::invalid_argument("cyclic ring size must be >= 1");
    std::vector<std::vector<int>> add(n, std::vector<int>(n));
    std::vector<std::vector<int>> mul(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            add[a][b] = (a + b) % n;
            mul[a][b] = (a * b) % n;
        }
    return FiniteRingTable(std::move(add), std::move(mul));
}

namespace {

// t * a in the table ring, by repeated addition (t may be negative).
int table_scale(const FiniteRingTable& ring, const Integer& t, int a) {
    Integer count = t >= 0 ? t : -t;
    int x = t >= 0 ? a : ring.neg(a);
    int acc = ring.zero();
    for (Integer i = 0; i < count; ++i)
        acc = ring.add(acc, x);
    return acc;
}

int table_pow(const FiniteRingTable& ring, int a, unsigned long k) {
    int acc = ring.one();
    for (unsigned long i = 0; i < k; ++i)
        acc = ring.mul(acc, a);
    return acc;
}

} // namespace

std::vector<std::vector<int>> search_torsion_derivations(const FiniteRingTable& ring,
                                                         const Prime& p) {
    const int n = ring.size();

    if (n > 2) {
        double space = std::pow(static_cast<double>(n), n - 2);
        if (space > 1e8)
            throw guard_error("derivation search space " + std::to_string(n) + "^" +
                              std::to_string(n - 2) + " exceeds 10^8");
    }

    // Correction table c[x][y] = (x^p + y^p - (x+y)^p)/p in its
    // integer-coefficient form, evaluated inside the table ring.
    auto coeffs = correction_coefficients(p);
    unsigned long pu = static_cast<unsigned long>(p.value());
    std::vector<std::vector<int>> corr(n, std::vector<int>(n, ring.zero()));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            int acc = ring.zero();
            for (const auto& [i, coeff] : coeffs) {
                int term = ring.mul(table_pow(ring, x, i), table_pow(ring, y, pu - i));
                acc = ring.add(acc, table_scale(ring, coeff, term));
            }
            corr[x][y] = acc;
        }

    std::vector<int> assign(n, -1);
    assign[ring.zero()] = ring.zero();
    assign[ring.one()] = ring.zero(); // normalization forces both

    // A partial assignment is consistent when every pair (x, y) with x, y
    // and x+y all assigned satisfies additivity. `touching` restricts the
    // recheck to pairs involving the element assigned last.
    auto consistent_touching = [&](int e) {
        for (int x = 0; x < n; ++x) {
            if (assign[x] < 0)
                continue;
            for (int y = x; y < n; ++y) {
                if (assign[y] < 0)
                    continue;
                int s = ring.add(x, y);
                if (assign[s] < 0)
                    continue;
                if (x != e && y != e && s != e)
                    continue;
                int want = ring.add(ring.add(assign[x], assign[y]), corr[x][y]);
                if (assign[s] != want)
                    return false;
            }
        }
        return true;
    };

    // Pairs whose three participants are all forced (for instance 1+1 = 0
    // in characteristic 2) are never touched by a later assignment, so
    // they get one full pass up front.
    for (int x = 0; x < n; ++x) {
        if (assign[x] < 0)
            continue;
        for (int y = x; y < n; ++y) {
            if (assign[y] < 0)
                continue;
            int s = ring.add(x, y);
            if (assign[s] < 0)
                continue;
            if (assign[s] != ring.add(ring.add(assign[x], assign[y]), corr[x][y]))
                return {};
        }
    }

    std::vector<int> order;
    for (int e = 0; e < n; ++e)
        if (assign[e] < 0)
            order.push_back(e);

    std::vector<std::vector<int>> found;
    auto dfs = [&](auto&& self, std::size_t depth) -> void {
        if (depth == order.size()) {
            found.push_back(assign);
            return;
        }
        int e = order[depth];
        for (int v = 0; v < n; ++v) {
            assign[e] = v;
            if (consistent_touching(e))
                self(self, depth + 1);
            assign[e] = -1;
        }
    };

    dfs(dfs, 0);
    return found;
}

} // namespace delta
} // namespace cardinal
