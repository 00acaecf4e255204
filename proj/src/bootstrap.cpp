#include "cardinal/bootstrap.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "cardinal/errors.hpp"

namespace cardinal {
namespace bootstrap {

namespace {

// Values grow like x^p per wreath step, so a runaway descent doubles (or
// worse) its digit count every iteration. Cap the operand size well above
// anything a sensible height reaches but low enough to fail fast.
constexpr std::size_t kMaxValueBits = 1u << 20;

void require_digit_budget(const padic::Scalar& value) {
    if (value.ring() == padic::Scalar::Ring::truncated)
        return; // residues are bounded by p^precision
    const Rational& q = value.rational_value();
    std::size_t bits = mpz_sizeinbase(q.get_num().get_mpz_t(), 2);
    if (bits > kMaxValueBits)
        throw guard_error("descent value exceeds the digit budget (" + std::to_string(bits) +
                          " bits, cap " + std::to_string(kMaxValueBits) + ")");
}

// Every space the descent visits must stay h-good for the target m:
// connected, m-finite, with a nonzero pi_m. The seed B^m satisfies this
// and the wreath rules preserve it, so a violation is an internal bug.
void require_h_good(const spaces::SpaceExpr& space, const Prime& p, long m) {
    spaces::SpaceProfile pr = spaces::profile(space, p);
    bool ok = pr.connectivity.is_connected() && pr.nonzero_pi.count(m) > 0 &&
              pr.level == std::max(m, 1L);
    if (!ok)
        throw std::logic_error("descent step is not h-good: " + space.to_string());
}

} // namespace

Mode Mode::truncated(int precision) {
    if (precision < 1)
        throw std::invalid_argument("truncated mode needs at least one digit of precision");
    return {true, precision};
}

std::string Mode::to_string() const {
    return is_truncated ? "truncated(" + std::to_string(precision) + ")" : "exact";
}

BootstrapTrace::BootstrapTrace(const Prime& p, long n, long m, const Mode& md)
    : prime(p), height(n), target(m), mode(md), verdict(Verdict::failed), predicted_length(0),
      observed_length(0) {}

std::string BootstrapTrace::verdict_string() const {
    switch (verdict) {
    case Verdict::amenable_witness:
        return "amenable-witness(" + steps.back().space.to_string() + ")";
    case Verdict::already_invertible:
        return "already-invertible";
    case Verdict::failed:
        return "failed(" + failure_reason + ")";
    }
    return "?";
}

std::string BootstrapTrace::to_json() const {
    nlohmann::ordered_json j;
    j["prime"] = prime.value();
    j["height"] = height;
    j["target"] = target;
    j["mode"] = mode.to_string();
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const DescentStep& s : steps) {
        nlohmann::ordered_json e;
        e["space"] = s.space.to_string();
        e["value"] = s.cardinality.to_string();
        if (s.valuation.is_finite())
            e["valuation"] = s.valuation.amount;
        else
            e["valuation"] = s.valuation.to_string();
        list.push_back(e);
    }
    j["steps"] = list;
    j["verdict"] = verdict_string();
    j["predicted_length"] = predicted_length;
    j["observed_length"] = observed_length;
    return j.dump();
}

long predict_length(long height, long target) {
    if (height < 1)
        throw std::invalid_argument("predict_length: height must be at least 1");
    if (target < 0)
        throw std::invalid_argument("predict_length: target must be non-negative");
    Integer b = binomial(height - 1, static_cast<unsigned long>(target));
    if (!b.fits_slong_p())
        throw guard_error("predicted descent length does not fit in a machine word");
    return b.get_si();
}

BootstrapTrace descend(const Prime& p, long height, long target, const Mode& mode) {
    if (height < 1)
        throw std::invalid_argument("descend: height must be at least 1");
    if (target < 1)
        throw std::invalid_argument("descend: target must be at least 1");

    BootstrapTrace trace(p, height, target, mode);
    trace.predicted_length = predict_length(height, target);

    spaces::EvalTarget t = mode.is_truncated
                               ? spaces::EvalTarget::height_truncated(p, height, mode.precision)
                               : spaces::EvalTarget::height_exact(p, height);

    spaces::SpaceExpr space = spaces::SpaceExpr::em(target);
    require_h_good(space, p, target);
    padic::Scalar value = spaces::cardinality(space, t);
    padic::Valuation val = value.valuation();

    if (val.is_zero_valuation()) {
        trace.verdict = Verdict::already_invertible;
        return trace;
    }

    trace.steps.push_back({space, value, val});
    bool done = false;
    if (!val.is_finite()) {
        // The residue vanished at this precision, so the seed valuation is
        // only known as a lower bound and the stopping rule cannot run.
        if (!mode.is_truncated)
            throw std::logic_error("descent seed has no finite valuation in exact mode");
        trace.failure_reason = "precision-exhausted";
        done = true;
    }

    while (!done) {
        require_digit_budget(value);
        space = spaces::SpaceExpr::wreath(space);
        require_h_good(space, p, target);

        std::optional<padic::Scalar> next;
        try {
            next = spaces::cardinality(space, t);
        } catch (const precision_error&) {
            trace.failure_reason = "precision-exhausted";
            break;
        }
        padic::Valuation nval = next->valuation();
        trace.steps.push_back({space, *next, nval});

        if (!nval.is_finite()) {
            if (!mode.is_truncated)
                throw std::logic_error("descent value has no finite valuation in exact mode");
            trace.failure_reason = "precision-exhausted";
            break;
        }
        if (nval.amount != val.amount - 1) {
            trace.failure_reason = "valuation-did-not-drop";
            break;
        }
        value = *next;
        val = nval;
        if (val.is_zero_valuation()) {
            trace.verdict = Verdict::amenable_witness;
            done = true;
        }
    }

    trace.observed_length =
        trace.steps.empty() ? 0 : static_cast<long>(trace.steps.size()) - 1;
    return trace;
}

bool SweepReport::all_pass() const {
    return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.pass; });
}

std::string SweepReport::to_string() const {
    std::string out;
    for (const SweepCell& c : cells) {
        out += "p=" + std::to_string(c.prime) + " n=" + std::to_string(c.height) +
               " m=" + std::to_string(c.target) + ": predicted " + std::to_string(c.predicted) +
               ", observed " + std::to_string(c.observed) + ", " + c.verdict +
               (c.pass ? " [pass]" : " [FAIL]") + "\n";
    }
    return out;
}

SweepReport sweep(const std::vector<Prime>& primes, long n_max, long m_max, const Mode& mode) {
    SweepReport report;
    for (const Prime& p : primes) {
        for (long n = 1; n <= n_max; ++n) {
            for (long m = 1; m <= m_max; ++m) {
                SweepCell cell{p.value(), n, m, 0, 0, "", false};
                try {
                    cell.predicted = predict_length(n, m);
                    BootstrapTrace tr = descend(p, n, m, mode);
                    cell.observed = tr.observed_length;
                    cell.verdict = tr.verdict_string();
                    cell.pass = tr.succeeded() && cell.observed == cell.predicted;
                } catch (const std::exception& ex) {
                    cell.verdict = std::string("error(") + ex.what() + ")";
                }
                report.cells.push_back(cell);
            }
        }
    }
    return report;
}

} // namespace bootstrap
} // namespace cardinal
