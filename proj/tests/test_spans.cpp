#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cardinal/spans.hpp"

using namespace cardinal;
using namespace cardinal::groupoids;
using namespace cardinal::spans;

namespace {

GroupoidPtr bg(const groups::Table& t) { return share(FinGroupoid::from_group(t)); }

GroupoidPtr point() { return share(FinGroupoid::discrete(1)); }

// pt <- A -> pt, the span whose matrix is the groupoid cardinality
GroupoidSpan cardinality_span(GroupoidPtr a, GroupoidPtr pt) {
    return GroupoidSpan(GroupoidMap::constant(a, pt, 0), GroupoidMap::constant(a, pt, 0));
}

SpanMatrix scalar(const Rational& v) {
    SpanMatrix m(1, 1);
    m.at(0, 0) = v;
    return m;
}

} // namespace

TEST_CASE("matrix arithmetic") {
    SpanMatrix id2 = SpanMatrix::identity(2);
    CHECK(id2.at(0, 0) == 1);
    CHECK(id2.at(0, 1) == 0);
    CHECK(id2.is_diagonal());

    SpanMatrix a(2, 3);
    a.at(0, 0) = make_rational(1, 2);
    a.at(1, 2) = 3;
    CHECK(id2 * a == a);
    CHECK_FALSE(a.is_diagonal());
    CHECK_THROWS_AS(a * id2, std::invalid_argument);
    CHECK_THROWS_AS(a + id2, std::invalid_argument);

    SpanMatrix k = SpanMatrix::kronecker(id2, a);
    CHECK(k.rows() == 4);
    CHECK(k.cols() == 6);
    CHECK(k.at(0, 0) == make_rational(1, 2));
    CHECK(k.at(3, 5) == 3);
    CHECK(k.at(2, 0) == 0);

    CHECK(a.to_string() == "[1/2 0 0; 0 0 3]");
}

TEST_CASE("span matrices of basic shapes") {
    GroupoidPtr pt = point();

    SUBCASE("point span is the cardinality") {
        CHECK(to_matrix(cardinality_span(bg(groups::cyclic(2)), pt)) == scalar(make_rational(1, 2)));
        CHECK(to_matrix(cardinality_span(share(FinGroupoid::discrete(4)), pt)) ==
              scalar(Rational(4)));
        GroupoidPtr mixed = share(
            disjoint_union(FinGroupoid::from_group(groups::dihedral(3)), FinGroupoid::discrete(1)));
        CHECK(to_matrix(cardinality_span(mixed, pt)) == scalar(make_rational(7, 6)));
    }
    SUBCASE("identity span gives the identity matrix") {
        GroupoidPtr mixed = share(disjoint_union(
            disjoint_union(FinGroupoid::from_group(groups::dihedral(3)), FinGroupoid::discrete(1)),
            FinGroupoid::from_group(groups::cyclic(2))));
        CHECK(to_matrix(GroupoidSpan::identity_span(mixed)) == SpanMatrix::identity(3));
    }
    SUBCASE("summation row") {
        GroupoidPtr d3 = share(FinGroupoid::discrete(3));
        GroupoidSpan s(GroupoidMap::identity(d3), GroupoidMap::constant(d3, pt, 0));
        SpanMatrix m = to_matrix(s);
        CHECK(m.rows() == 1);
        CHECK(m.cols() == 3);
        for (int j = 0; j < 3; ++j)
            CHECK(m.at(0, j) == 1);
    }
    SUBCASE("empty apex gives the zero matrix") {
        GroupoidPtr e = share(FinGroupoid::empty_groupoid());
        GroupoidPtr c2 = bg(groups::cyclic(2));
        GroupoidSpan s(GroupoidMap(e, c2, {}, {}), GroupoidMap(e, c2, {}, {}));
        SpanMatrix m = to_matrix(s);
        CHECK(m == SpanMatrix(1, 1));
    }
}

TEST_CASE("composition is pullback and the matrix is functorial") {
    GroupoidPtr pt = point();

    SUBCASE("squared half") {
        GroupoidPtr c2 = bg(groups::cyclic(2));
        GroupoidSpan s = cardinality_span(c2, pt);
        GroupoidSpan ss = compose(s, s);
        CHECK(to_matrix(ss) == scalar(make_rational(1, 4)));
        // the apex is the product group
        CHECK(ss.apex().class_count() == 1);
        CHECK(ss.apex().cardinality() == make_rational(1, 4));
        CHECK(ss.apex().iso_classes().aut_order[0] == 4);
    }
    SUBCASE("loops of a one-object groupoid by composing through it") {
        GroupoidPtr s3 = bg(groups::dihedral(3));
        GroupoidSpan in(GroupoidMap::identity(pt), GroupoidMap::constant(pt, s3, 0));
        GroupoidSpan out(GroupoidMap::constant(pt, s3, 0), GroupoidMap::identity(pt));
        GroupoidSpan loop = compose(out, in);
        CHECK(loop.apex().object_count() == 6);
        CHECK(loop.apex().morphism_count() == 6);
        CHECK(loop.apex().cardinality() == Rational(6));
        CHECK(to_matrix(loop) == scalar(Rational(6)));
        CHECK(to_matrix(loop) == to_matrix(out) * to_matrix(in));
    }
    SUBCASE("unit law on matrices") {
        GroupoidPtr a = share(
            disjoint_union(FinGroupoid::from_group(groups::cyclic(3)), FinGroupoid::discrete(2)));
        GroupoidPtr b = bg(groups::cyclic(2));
        GroupoidPtr e = share(FinGroupoid::discrete(2));
        GroupoidSpan s(GroupoidMap(e, a, {0, 1}, {a->identity(0), a->identity(1)}),
                       GroupoidMap::constant(e, b, 0));
        SpanMatrix m = to_matrix(s);
        CHECK(to_matrix(compose(s, GroupoidSpan::identity_span(a))) == m);
        CHECK(to_matrix(compose(GroupoidSpan::identity_span(b), s)) == m);
    }
    SUBCASE("foot mismatch throws") {
        GroupoidPtr c2 = bg(groups::cyclic(2));
        GroupoidSpan s = cardinality_span(c2, pt);
        GroupoidSpan t = cardinality_span(c2, point()); // a different point instance
        CHECK_THROWS_AS(compose(t, s), std::invalid_argument);
    }
}

TEST_CASE("tensor matches the kronecker product") {
    GroupoidPtr pt = point();
    GroupoidSpan a = cardinality_span(bg(groups::cyclic(2)), pt);
    GroupoidPtr mixed = share(
        disjoint_union(FinGroupoid::from_group(groups::cyclic(3)), FinGroupoid::discrete(1)));
    GroupoidSpan b = GroupoidSpan::identity_span(mixed);
    CHECK(to_matrix(tensor(a, b)) ==
          SpanMatrix::kronecker(to_matrix(a), to_matrix(b)));
    CHECK(to_matrix(tensor(b, a)) ==
          SpanMatrix::kronecker(to_matrix(b), to_matrix(a)));
}

TEST_CASE("integration along maps") {
    GroupoidPtr pt = point();

    SUBCASE("summation over a finite set") {
        GroupoidPtr d3 = share(FinGroupoid::discrete(3));
        GroupoidMap q = GroupoidMap::constant(d3, pt, 0);
        CHECK(integrate(q, SpanMatrix::identity(3)) == scalar(Rational(3)));
    }
    SUBCASE("weighted orbit count over a classifying space") {
        for (long p : {2L, 3L}) {
            GroupoidMap q = GroupoidMap::constant(bg(groups::cyclic(static_cast<int>(p))), pt, 0);
            CHECK(integrate(q, SpanMatrix::identity(1)) == scalar(make_rational(1, p)));
        }
    }
    SUBCASE("identity map changes nothing") {
        GroupoidPtr mixed = share(disjoint_union(
            FinGroupoid::from_group(groups::cyclic(2)), FinGroupoid::discrete(2)));
        SpanMatrix f(3, 3);
        f.at(0, 1) = make_rational(2, 3);
        f.at(2, 2) = 5;
        f.at(1, 0) = make_rational(-1, 2);
        CHECK(integrate(GroupoidMap::identity(mixed), f) == f);
    }
    SUBCASE("shape mismatch throws") {
        GroupoidMap q = GroupoidMap::constant(share(FinGroupoid::discrete(2)), pt, 0);
        CHECK_THROWS_AS(integrate(q, SpanMatrix::identity(3)), std::invalid_argument);
    }
    SUBCASE("fiber matrices") {
        GroupoidMap collapse = GroupoidMap::constant(bg(groups::cyclic(2)), pt, 0);
        CHECK(fiber_matrix(collapse) == scalar(make_rational(1, 2)));
        // index-two inclusion: the homotopy fiber is the coset set
        GroupoidPtr c2 = bg(groups::cyclic(2));
        GroupoidPtr c4 = bg(groups::cyclic(4));
        GroupoidMap incl(c2, c4, {0}, {0, 2});
        CHECK(fiber_matrix(incl) == scalar(Rational(2)));
        CHECK(fiber_matrix(GroupoidMap::identity(c4)) == scalar(Rational(1)));
    }
}

TEST_CASE("self-dual dimension counts components") {
    CHECK(self_dual_dimension(bg(groups::dihedral(3))) == Rational(1));
    CHECK(self_dual_dimension(bg(groups::cyclic(6))) == Rational(1));
    CHECK(self_dual_dimension(share(FinGroupoid::discrete(4))) == Rational(4));
    CHECK(self_dual_dimension(share(FinGroupoid::empty_groupoid())) == Rational(0));
    GroupoidPtr mixed = share(
        disjoint_union(FinGroupoid::from_group(groups::cyclic(3)), FinGroupoid::discrete(1)));
    CHECK(self_dual_dimension(mixed) == Rational(2));
    GroupoidPtr three = share(disjoint_union(
        disjoint_union(FinGroupoid::from_group(groups::cyclic(2)),
                       FinGroupoid::from_group(groups::cyclic(2))),
        FinGroupoid::discrete(1)));
    CHECK(self_dual_dimension(three) == Rational(3));
    CHECK(self_dual_dimension(three) == Rational(three->class_count()));
}

TEST_CASE("calculus check suite") {
    CalculusReport report = check_calculus(20260816, 25);
    CHECK(report.passed());
    REQUIRE(report.laws.size() == 4);
    CHECK(report.laws[0].law == "fubini");
    CHECK(report.laws[0].instances == 50); // span and map forms
    CHECK(report.laws[1].law == "homogeneity");
    CHECK(report.laws[1].instances == 25);
    CHECK(report.laws[2].law == "distributivity");
    CHECK(report.laws[3].law == "additivity");
    for (const auto& law : report.laws)
        CHECK(law.failures.empty());

    // the report is deterministic for a fixed seed
    CHECK(report.to_json() == check_calculus(20260816, 25).to_json());
    CHECK(report.to_json() != check_calculus(20260817, 25).to_json());
    CHECK(report.to_json().find("\"law\":\"fubini\"") != std::string::npos);
}
