#pragma once

/**
 * Valuation descent: the iterative construction that turns a non-invertible
 * cardinality into an invertible one by repeatedly passing to the wreath
 * W(A) = (A^p)_{hCp}.
 *
 * At height n the seed space B^m has cardinality p^binomial(n-1, m), so its
 * valuation is binomial(n-1, m). Each wreath step replaces the value x by
 * |B^1| x - delta(x) with delta the Fermat quotient, and the quotient's
 * valuation law forces the valuation down by exactly one. After
 * binomial(n-1, m) steps the value is a unit and the final expression is an
 * amenability certificate: anyone can re-evaluate its cardinality and check
 * the valuation is zero.
 *
 * Descents run either in exact p-local arithmetic or on p-adics truncated
 * to a fixed digit count. Truncation can run out of digits before the
 * descent finishes; that outcome is reported as a failed trace, not an
 * exception, so a sweep over many (p, n, m) cells can record it and move on.
 */

#include <string>
#include <vector>

#include "cardinal/padic.hpp"
#include "cardinal/prime.hpp"
#include "cardinal/spaces.hpp"

namespace cardinal {
namespace bootstrap {

// Scalar carrier for a descent: exact p-local rationals (integers, in
// fact), or truncated p-adics with the given digit count.
struct Mode {
    bool is_truncated = false;
    int precision = 0; // digits, meaningful when truncated

    static Mode exact() { return {false, 0}; }
    static Mode truncated(int precision);

    friend bool operator==(const Mode&, const Mode&) = default;
    std::string to_string() const; // "exact" or "truncated(64)"
};

// One rung of the descent ladder. The space determines the cardinality
// (it is re-evaluated from the expression, never carried separately), and
// the valuation is the descent invariant.
struct DescentStep {
    spaces::SpaceExpr space;
    padic::Scalar cardinality;
    padic::Valuation valuation;
};

enum class Verdict {
    amenable_witness,   // descent reached valuation 0; last step is the certificate
    already_invertible, // the seed was already a unit; no steps recorded
    failed,             // see BootstrapTrace::failure_reason
};

struct BootstrapTrace {
    Prime prime;
    long height;
    long target;
    Mode mode;
    std::vector<DescentStep> steps;
    Verdict verdict;
    std::string failure_reason; // "valuation-did-not-drop" or "precision-exhausted"
    long predicted_length;
    long observed_length; // steps past the seed; 0 when no steps were taken

    BootstrapTrace(const Prime& p, long n, long m, const Mode& mode);

    bool succeeded() const { return verdict != Verdict::failed; }
    // "amenable-witness(W(W(B1)))", "already-invertible",
    // "failed(precision-exhausted)".
    std::string verdict_string() const;
    std::string to_json() const;
};

/**
 * Run the descent at height n >= 1 with target m >= 1. Seeds at B^m,
 * wreathes while the valuation is positive, and stops with one of the
 * three verdicts. Valuation failures and exhausted precision land in the
 * verdict; a value whose digit count outgrows the desk-scale budget throws
 * guard_error, and bad arguments throw std::invalid_argument.
 */
BootstrapTrace descend(const Prime& p, long height, long target, const Mode& mode);

// binomial(n-1, m): the seed valuation, hence the number of wreath steps a
// successful descent takes. Requires n >= 1, m >= 0.
long predict_length(long height, long target);

struct SweepCell {
    long prime;
    long height;
    long target;
    long predicted;
    long observed;
    std::string verdict;
    bool pass; // trace succeeded and observed == predicted
};

struct SweepReport {
    std::vector<SweepCell> cells;

    bool all_pass() const;
    std::string to_string() const; // pass/fail matrix, one row per cell
};

// Descend every (p, n, m) with p in primes, 1 <= n <= n_max,
// 1 <= m <= m_max. Cells fail independently; the sweep always completes.
SweepReport sweep(const std::vector<Prime>& primes, long n_max, long m_max, const Mode& mode);

} // namespace bootstrap
} // namespace cardinal
