#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardinal/bootstrap.hpp"
#include "cardinal/errors.hpp"

using namespace cardinal;
using namespace cardinal::bootstrap;

namespace {

// The oracle below rebuilds the descent with bare mpz arithmetic: seed
// p^C(n-1, m), then x -> p^(n-1) x - (x - x^p)/p until the valuation hits
// zero. No library code beyond GMP itself.

long choose(long n, long k) {
    if (k < 0 || k > n)
        return 0;
    long r = 1;
    for (long i = 0; i < k; ++i)
        r = r * (n - i) / (i + 1);
    return r;
}

Integer pow_int(long base, long exp) {
    Integer out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(exp));
    return out;
}

Integer oracle_step(const Integer& x, long p, long n) {
    Integer xp;
    mpz_pow_ui(xp.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p));
    return pow_int(p, n - 1) * x - (x - xp) / p;
}

long oracle_valuation(Integer x, long p) {
    REQUIRE(x != 0);
    long v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

std::vector<Integer> oracle_values(long p, long n, long m) {
    std::vector<Integer> out;
    Integer x = pow_int(p, choose(n - 1, m));
    out.push_back(x);
    while (oracle_valuation(x, p) > 0) {
        x = oracle_step(x, p, n);
        out.push_back(x);
    }
    return out;
}

} // namespace

TEST_CASE("descent length formula") {
    CHECK(predict_length(2, 1) == 1);
    CHECK(predict_length(4, 2) == 3);
    CHECK(predict_length(1, 1) == 0);
    CHECK(predict_length(1, 5) == 0);
    CHECK(predict_length(4, 0) == 1);
    CHECK(predict_length(5, 3) == 4);
    CHECK(predict_length(7, 3) == 20);
    CHECK_THROWS_AS(predict_length(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(predict_length(1, -1), std::invalid_argument);
}

TEST_CASE("frozen traces at small heights") {
    SUBCASE("one step at height 2") {
        BootstrapTrace tr = descend(Prime(2), 2, 1, Mode::exact());
        CHECK(tr.succeeded());
        CHECK(tr.predicted_length == 1);
        CHECK(tr.observed_length == 1);
        REQUIRE(tr.steps.size() == 2);
        CHECK(tr.steps[0].space == spaces::SpaceExpr::em(1));
        CHECK(tr.steps[0].cardinality.rational_value() == 2);
        CHECK(tr.steps[0].valuation == padic::Valuation::finite(1));
        CHECK(tr.steps[1].space == spaces::SpaceExpr::wreath(spaces::SpaceExpr::em(1)));
        CHECK(tr.steps[1].cardinality.rational_value() == 5);
        CHECK(tr.steps[1].valuation == padic::Valuation::finite(0));
        CHECK(tr.verdict == Verdict::amenable_witness);
        CHECK(tr.verdict_string() == "amenable-witness(W(B1))");
    }

    SUBCASE("two steps at height 3") {
        BootstrapTrace tr = descend(Prime(2), 3, 1, Mode::exact());
        CHECK(tr.observed_length == 2);
        CHECK(tr.predicted_length == 2);
        REQUIRE(tr.steps.size() == 3);
        CHECK(tr.steps[0].cardinality.rational_value() == 4);
        CHECK(tr.steps[1].cardinality.rational_value() == 22);
        CHECK(tr.steps[2].cardinality.rational_value() == 319);
        CHECK(tr.steps[0].valuation == padic::Valuation::finite(2));
        CHECK(tr.steps[1].valuation == padic::Valuation::finite(1));
        CHECK(tr.steps[2].valuation == padic::Valuation::finite(0));
        CHECK(tr.steps[2].space.to_string() == "W(W(B1))");
        CHECK(tr.verdict_string() == "amenable-witness(W(W(B1)))");
    }

    SUBCASE("one step at an odd prime") {
        BootstrapTrace tr = descend(Prime(3), 2, 1, Mode::exact());
        REQUIRE(tr.steps.size() == 2);
        CHECK(tr.steps[0].cardinality.rational_value() == 3);
        CHECK(tr.steps[1].cardinality.rational_value() == 17);
        CHECK(tr.verdict_string() == "amenable-witness(W(B1))");
    }

    SUBCASE("height at most target needs no steps") {
        for (auto [pv, n, m] : {std::tuple<long, long, long>{2, 1, 1},
                                {2, 1, 3},
                                {3, 2, 2},
                                {5, 3, 4}}) {
            BootstrapTrace tr = descend(Prime(pv), n, m, Mode::exact());
            CHECK(tr.verdict == Verdict::already_invertible);
            CHECK(tr.verdict_string() == "already-invertible");
            CHECK(tr.steps.empty());
            CHECK(tr.predicted_length == 0);
            CHECK(tr.observed_length == 0);
            CHECK(tr.succeeded());
        }
    }
}

TEST_CASE("exact descents match the independent iteration") {
    for (long pv : {2L, 3L, 5L}) {
        for (long n = 1; n <= 4; ++n) {
            for (long m = 1; m <= 3; ++m) {
                CAPTURE(pv);
                CAPTURE(n);
                CAPTURE(m);
                BootstrapTrace tr = descend(Prime(pv), n, m, Mode::exact());
                long len = choose(n - 1, m);
                CHECK(tr.succeeded());
                CHECK(tr.predicted_length == len);
                CHECK(tr.observed_length == len);
                if (len == 0) {
                    CHECK(tr.verdict == Verdict::already_invertible);
                    continue;
                }
                std::vector<Integer> expect = oracle_values(pv, n, m);
                REQUIRE(tr.steps.size() == expect.size());
                for (std::size_t i = 0; i < expect.size(); ++i) {
                    const DescentStep& s = tr.steps[i];
                    CHECK(s.cardinality.rational_value().get_den() == 1);
                    CHECK(s.cardinality.rational_value().get_num() == expect[i]);
                    REQUIRE(s.valuation.is_finite());
                    CHECK(s.valuation.amount == oracle_valuation(expect[i], pv));
                    CHECK(s.valuation.amount == len - static_cast<long>(i));
                    if (i == 0)
                        CHECK(s.space == spaces::SpaceExpr::em(m));
                    else
                        CHECK(s.space == spaces::SpaceExpr::wreath(tr.steps[i - 1].space));
                }
                CHECK(tr.verdict_string() ==
                      "amenable-witness(" + tr.steps.back().space.to_string() + ")");
            }
        }
    }
}

TEST_CASE("every step stays h-good and carries its own cardinality") {
    for (long pv : {2L, 3L}) {
        for (long n = 1; n <= 4; ++n) {
            for (long m = 1; m <= 3; ++m) {
                BootstrapTrace tr = descend(Prime(pv), n, m, Mode::exact());
                for (const DescentStep& s : tr.steps) {
                    CAPTURE(s.space.to_string());
                    spaces::SpaceProfile pr = spaces::profile(s.space, Prime(pv));
                    CHECK(pr.connectivity.is_connected());
                    CHECK(pr.nonzero_pi.count(m) == 1);
                    CHECK(pr.level == std::max(m, 1L));
                }
            }
        }
    }

    // The recorded scalar is literally the cardinality of the recorded
    // expression; re-evaluating must reproduce it.
    spaces::EvalTarget t = spaces::EvalTarget::height_exact(Prime(2), 4);
    for (long m = 1; m <= 3; ++m) {
        BootstrapTrace tr = descend(Prime(2), 4, m, Mode::exact());
        for (const DescentStep& s : tr.steps)
            CHECK(spaces::cardinality(s.space, t) == s.cardinality);
    }
}

TEST_CASE("truncated mode tracks exact mode") {
    const int digits = 64;
    for (long pv : {2L, 3L}) {
        for (long n = 1; n <= 4; ++n) {
            for (long m = 1; m <= 3; ++m) {
                CAPTURE(pv);
                CAPTURE(n);
                CAPTURE(m);
                BootstrapTrace ex = descend(Prime(pv), n, m, Mode::exact());
                BootstrapTrace tc = descend(Prime(pv), n, m, Mode::truncated(digits));
                CHECK(tc.verdict_string() == ex.verdict_string());
                CHECK(tc.predicted_length == ex.predicted_length);
                CHECK(tc.observed_length == ex.observed_length);
                REQUIRE(tc.steps.size() == ex.steps.size());
                for (std::size_t i = 0; i < tc.steps.size(); ++i) {
                    CHECK(tc.steps[i].valuation == ex.steps[i].valuation);
                    CHECK(tc.steps[i].space == ex.steps[i].space);
                    const padic::TruncatedPAdic& got = tc.steps[i].cardinality.truncated_value();
                    CHECK(got.precision() == digits - static_cast<int>(i));
                    Integer expect = ex.steps[i].cardinality.rational_value().get_num();
                    Integer reduced = expect % got.modulus();
                    if (reduced < 0)
                        reduced += got.modulus();
                    CHECK(got.residue() == reduced);
                }
            }
        }
    }
}

TEST_CASE("precision exhaustion is a verdict, not a crash") {
    SUBCASE("seed valuation invisible") {
        // Seed 4 vanishes mod 2^2, so the descent cannot even start.
        BootstrapTrace tr = descend(Prime(2), 3, 1, Mode::truncated(2));
        CHECK_FALSE(tr.succeeded());
        CHECK(tr.verdict_string() == "failed(precision-exhausted)");
        REQUIRE(tr.steps.size() == 1);
        CHECK(tr.steps[0].valuation == padic::Valuation::at_least(2));
        CHECK(tr.observed_length == 0);
        CHECK(tr.predicted_length == 2);
    }

    SUBCASE("one more digit suffices") {
        BootstrapTrace tr = descend(Prime(2), 3, 1, Mode::truncated(3));
        CHECK(tr.succeeded());
        CHECK(tr.observed_length == 2);
        REQUIRE(tr.steps.size() == 3);
        CHECK(tr.steps[0].valuation == padic::Valuation::finite(2));
        CHECK(tr.steps[2].valuation == padic::Valuation::finite(0));
    }

    SUBCASE("deeper seed, same story") {
        BootstrapTrace tr = descend(Prime(2), 4, 1, Mode::truncated(3));
        CHECK(tr.verdict_string() == "failed(precision-exhausted)");
        BootstrapTrace ok = descend(Prime(2), 4, 1, Mode::truncated(4));
        CHECK(ok.succeeded());
        CHECK(ok.observed_length == 3);
    }

    SUBCASE("zero digits is not a mode") {
        CHECK_THROWS_AS(Mode::truncated(0), std::invalid_argument);
        CHECK_THROWS_AS(Mode::truncated(-3), std::invalid_argument);
    }
}

TEST_CASE("argument and size guards") {
    CHECK_THROWS_AS(descend(Prime(2), 0, 1, Mode::exact()), std::invalid_argument);
    CHECK_THROWS_AS(descend(Prime(2), 1, 0, Mode::exact()), std::invalid_argument);
    CHECK_THROWS_AS(descend(Prime(2), -2, 1, Mode::exact()), std::invalid_argument);

    // Height 25 seeds at valuation 24, and the values square every step;
    // the digit budget cuts the run off mid-descent.
    CHECK_THROWS_AS(descend(Prime(2), 25, 1, Mode::exact()), guard_error);
}

TEST_CASE("sweep covers the grid and reports cells") {
    SUBCASE("exact sweep passes everywhere") {
        SweepReport rep = sweep({Prime(2), Prime(3)}, 4, 3, Mode::exact());
        REQUIRE(rep.cells.size() == 24);
        CHECK(rep.all_pass());
        // Cells come out in (p, n, m) lexicographic order.
        CHECK(rep.cells[0].prime == 2);
        CHECK(rep.cells[0].height == 1);
        CHECK(rep.cells[0].target == 1);
        CHECK(rep.cells[23].prime == 3);
        CHECK(rep.cells[23].height == 4);
        CHECK(rep.cells[23].target == 3);
        const SweepCell& c = rep.cells[6]; // p=2, n=3, m=1
        CHECK(c.height == 3);
        CHECK(c.target == 1);
        CHECK(c.predicted == 2);
        CHECK(c.observed == 2);
        CHECK(c.verdict == "amenable-witness(W(W(B1)))");
        std::string text = rep.to_string();
        CHECK(text.find("[pass]") != std::string::npos);
        CHECK(text.find("[FAIL]") == std::string::npos);
        CHECK(std::count(text.begin(), text.end(), '\n') == 24);
    }

    SUBCASE("truncated sweep matches") {
        SweepReport rep = sweep({Prime(2), Prime(3)}, 4, 3, Mode::truncated(64));
        CHECK(rep.cells.size() == 24);
        CHECK(rep.all_pass());
    }

    SUBCASE("starved precision fails cells but not the sweep") {
        SweepReport rep = sweep({Prime(2)}, 4, 3, Mode::truncated(2));
        REQUIRE(rep.cells.size() == 12);
        CHECK_FALSE(rep.all_pass());
        long failures = 0;
        for (const SweepCell& c : rep.cells) {
            if (!c.pass) {
                ++failures;
                CHECK(c.verdict == "failed(precision-exhausted)");
            }
        }
        // Exactly the cells whose seed valuation is >= 2 digits:
        // (n=3, m=1), (n=4, m=1), (n=4, m=2).
        CHECK(failures == 3);
        CHECK(rep.to_string().find("[FAIL]") != std::string::npos);
    }
}

TEST_CASE("trace JSON matches the published shape") {
    SUBCASE("successful exact trace") {
        BootstrapTrace tr = descend(Prime(2), 2, 1, Mode::exact());
        std::string text = tr.to_json();
        CHECK(text == descend(Prime(2), 2, 1, Mode::exact()).to_json());
        nlohmann::json j = nlohmann::json::parse(text);
        CHECK(j["prime"] == 2);
        CHECK(j["height"] == 2);
        CHECK(j["target"] == 1);
        CHECK(j["mode"] == "exact");
        REQUIRE(j["steps"].size() == 2);
        CHECK(j["steps"][0]["space"] == "B1");
        CHECK(j["steps"][0]["value"] == "2");
        CHECK(j["steps"][0]["valuation"] == 1);
        CHECK(j["steps"][1]["space"] == "W(B1)");
        CHECK(j["steps"][1]["value"] == "5");
        CHECK(j["steps"][1]["valuation"] == 0);
        CHECK(j["verdict"] == "amenable-witness(W(B1))");
        CHECK(j["predicted_length"] == 1);
        CHECK(j["observed_length"] == 1);
    }

    SUBCASE("truncated values carry their modulus") {
        BootstrapTrace tr = descend(Prime(2), 2, 1, Mode::truncated(64));
        nlohmann::json j = nlohmann::json::parse(tr.to_json());
        CHECK(j["mode"] == "truncated(64)");
        CHECK(j["steps"][0]["value"] == "2 mod 2^64");
    }

    SUBCASE("empty and failed traces") {
        nlohmann::json inv = nlohmann::json::parse(descend(Prime(2), 1, 1, Mode::exact()).to_json());
        CHECK(inv["steps"].is_array());
        CHECK(inv["steps"].empty());
        CHECK(inv["verdict"] == "already-invertible");
        CHECK(inv["observed_length"] == 0);

        nlohmann::json bad =
            nlohmann::json::parse(descend(Prime(2), 3, 1, Mode::truncated(2)).to_json());
        CHECK(bad["verdict"] == "failed(precision-exhausted)");
        CHECK(bad["steps"][0]["valuation"] == ">=2");
    }
}
