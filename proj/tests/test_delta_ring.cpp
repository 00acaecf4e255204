#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cardinal/delta_ring.hpp"

using namespace cardinal;
using namespace cardinal::delta;

TEST_CASE("correction polynomial has the known integer coefficients") {
    // (x^p + y^p - (x+y)^p)/p = sum_i c_i x^i y^(p-i) with c_i = -C(p,i)/p
    auto c2 = correction_coefficients(Prime(2));
    REQUIRE(c2.size() == 1);
    CHECK(c2[0] == std::pair<unsigned long, Integer>{1, Integer(-1)});

    auto c3 = correction_coefficients(Prime(3));
    REQUIRE(c3.size() == 2);
    CHECK(c3[0].second == -1);
    CHECK(c3[1].second == -1);

    auto c5 = correction_coefficients(Prime(5));
    REQUIRE(c5.size() == 4);
    CHECK(c5[0].second == -1);
    CHECK(c5[1].second == -2);
    CHECK(c5[2].second == -2);
    CHECK(c5[3].second == -1);
}

TEST_CASE("integer fermat quotient") {
    CHECK(integer_fermat_quotient(Integer(2), Prime(2)) == -1);
    CHECK(integer_fermat_quotient(Integer(2), Prime(3)) == -2);
    CHECK(integer_fermat_quotient(Integer(0), Prime(5)) == 0);
    CHECK(integer_fermat_quotient(Integer(1), Prime(5)) == 0);
    CHECK(integer_fermat_quotient(Integer(-3), Prime(2)) == -6); // (-3 - 9)/2
}

TEST_CASE("delta laws hold on the numeric instances") {
    for (long pv : {2L, 3L, 5L}) {
        Prime p(pv);
        auto rq = check_delta_laws(RationalFermatRing(p), 500, 11);
        CHECK(rq.passed());
        auto rl = check_delta_laws(PLocalFermatRing(p), 500, 22);
        CHECK(rl.passed());
        auto rt = check_delta_laws(TruncatedFermatRing(p, 48), 500, 33);
        CHECK(rt.passed());
        CHECK(rq.checked >= 1500);
    }
}

TEST_CASE("corrupted delta is caught") {
    auto report = check_delta_laws(CorruptedDelta(PLocalFermatRing(Prime(2))), 100, 5);
    CHECK_FALSE(report.passed());
    bool saw_additivity = false;
    for (const auto& f : report.failures)
        saw_additivity |= f.law == "additivity";
    CHECK(saw_additivity);
}

TEST_CASE("frobenius lift") {
    SUBCASE("collapses to the identity on Q with the Fermat quotient") {
        RationalFermatRing ring(Prime(3));
        std::mt19937_64 rng(77);
        for (int i = 0; i < 100; ++i) {
            Rational x = ring.sample(rng);
            CHECK(frobenius_lift(ring, x) == x);
        }
    }

    SUBCASE("is congruent to x^p mod p on p-local inputs") {
        for (long pv : {2L, 3L, 5L}) {
            Prime p(pv);
            PLocalFermatRing ring(p);
            std::mt19937_64 rng(78);
            for (int i = 0; i < 100; ++i) {
                Rational x = ring.sample(rng);
                Rational diff = frobenius_lift(ring, x) - ring_pow(ring, x, pv);
                if (diff != 0) {
                    auto v = padic::valuation(diff, p);
                    CHECK(v.kind == padic::Valuation::Kind::finite);
                    CHECK(v.amount >= 1);
                }
            }
        }
    }
}

TEST_CASE("finite ring tables validate exhaustively") {
    CHECK_NOTHROW(FiniteRingTable::cyclic(1));
    CHECK_NOTHROW(FiniteRingTable::cyclic(9));

    auto z4 = FiniteRingTable::cyclic(4);
    CHECK(z4.zero() == 0);
    CHECK(z4.one() == 1);
    CHECK(z4.neg(3) == 1);
    CHECK(z4.add(3, 2) == 1);
    CHECK(z4.mul(3, 3) == 1);

    SUBCASE("broken associativity is rejected") {
        std::vector<std::vector<int>> add = {{0, 1}, {1, 0}};
        std::vector<std::vector<int>> mul = {{0, 0}, {0, 1}};
        CHECK_NOTHROW(FiniteRingTable(add, mul)); // this is Z/2, fine
        add[1][1] = 1; // now 1+1 = 1, breaking inverses/commutative group
        CHECK_THROWS_AS(FiniteRingTable(add, mul), std::invalid_argument);
    }
}

TEST_CASE("derivation search on torsion rings") {
    SUBCASE("Z/4 at p = 2 has none") {
        // 1 is 4-torsion but not nilpotent, so no additive 2-derivation can
        // exist; the exhaustive search agrees.
        auto found = search_torsion_derivations(FiniteRingTable::cyclic(4), Prime(2));
        CHECK(found.empty());
    }

    SUBCASE("Z/9 at p = 3 has none") {
        auto found = search_torsion_derivations(FiniteRingTable::cyclic(9), Prime(3));
        CHECK(found.empty());
    }

    SUBCASE("Z/8 at p = 2 has none") {
        auto found = search_torsion_derivations(FiniteRingTable::cyclic(8), Prime(2));
        CHECK(found.empty());
    }

    SUBCASE("Z/2 at p = 2 has none") {
        auto found = search_torsion_derivations(FiniteRingTable::cyclic(2), Prime(2));
        CHECK(found.empty());
    }

    SUBCASE("trivial ring has exactly the zero map") {
        auto found = search_torsion_derivations(FiniteRingTable::cyclic(1), Prime(2));
        REQUIRE(found.size() == 1);
        CHECK(found[0] == std::vector<int>{0});
    }

    SUBCASE("Z/3 at p = 2 has exactly one, d(x) = x^2 + 2x") {
        // Z/3 is not 2-local (3 is not invertible), so the torsion
        // obstruction does not apply; additivity forces d(2) = d(1+1) =
        // -1 = 2 and the rest closes. Unique because d(1) = 0 generates.
        auto found = search_torsion_derivations(FiniteRingTable::cyclic(3), Prime(2));
        REQUIRE(found.size() == 1);
        CHECK(found[0] == std::vector<int>{0, 0, 2});
    }

    SUBCASE("Z/5 at p = 2 has exactly one") {
        // 2 is invertible mod 5, so d(x) = (x - x^2) * inv(2) = 3(x - x^2).
        auto found = search_torsion_derivations(FiniteRingTable::cyclic(5), Prime(2));
        REQUIRE(found.size() == 1);
        CHECK(found[0] == std::vector<int>{0, 0, 4, 2, 4});
    }

    SUBCASE("oversized search space trips the guard") {
        CHECK_THROWS_AS(search_torsion_derivations(FiniteRingTable::cyclic(16), Prime(2)),
                        guard_error);
    }
}

TEST_CASE("found derivations satisfy the laws they were searched for") {
    // Cross-validation: re-check every reported table against additivity
    // and normalization directly, independent of the search's own pruning.
    for (int n : {1, 3, 5, 7}) {
        auto ring = FiniteRingTable::cyclic(n);
        Prime p(2);
        auto found = search_torsion_derivations(ring, p);
        for (const auto& d : found) {
            CHECK(d[ring.zero()] == ring.zero());
            CHECK(d[ring.one()] == ring.zero());
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) {
                    // c(x,y) = -xy at p = 2
                    int corr = ring.neg(ring.mul(x, y));
                    CHECK(d[ring.add(x, y)] == ring.add(ring.add(d[x], d[y]), corr));
                }
        }
    }
}
