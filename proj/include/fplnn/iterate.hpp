#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fplnn/errors.hpp"
#include "fplnn/linalg.hpp"
#include "fplnn/model.hpp"

namespace fplnn {

struct IterationOptions {
    double tol = 1e-10;
    std::size_t max_iter = 10000;
};

/// Plain fixed-point iteration x^(t) = f(x^(t−1)) until ‖x^(t) − x^(t−1)‖∞ ≤ tol.
inline IterationTrace iterate_to_fixed_point(const VectorMap& map, const Vector& x0,
                                             IterationOptions opts = {}) {
    if (!(opts.tol > 0.0)) throw InvalidInput("iterate_to_fixed_point: tol must be positive");
    if (opts.max_iter < 1) throw InvalidInput("iterate_to_fixed_point: max_iter must be at least 1");
    check_iterate(x0, 0);

    IterationTrace trace;
    trace.start(x0);
    for (std::size_t t = 1; t <= opts.max_iter; ++t) {
        Vector next = map(trace.iterates.back());
        require_same_size(next.size(), x0.size(), "iterate_to_fixed_point");
        check_iterate(next, t);
        trace.push(std::move(next));
        if (trace.residuals.back() <= opts.tol) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

inline IterationTrace iterate_to_fixed_point(const ScalarMap& f, double x0, IterationOptions opts = {}) {
    return iterate_to_fixed_point(lift(f), Vector{x0}, opts);
}

/// Additive slack on every bound comparison; the bounds are exact only in real arithmetic.
inline constexpr double kBoundSlack = 1e-12;

struct LedgerRecord {
    std::size_t t = 0;
    double err = 0.0;
    double apriori = 0.0;
    double aposteriori = 0.0;
    double onestep = 0.0;
    bool apriori_ok = true;
    bool aposteriori_ok = true;
    bool onestep_ok = true;

    [[nodiscard]] bool ok() const noexcept { return apriori_ok && aposteriori_ok && onestep_ok; }
};

/// Per-step check of the three Banach error bounds against a reference fixed point.
struct BoundLedger {
    double K = 0.0;
    Vector p;
    std::string p_source;
    std::vector<LedgerRecord> records;

    [[nodiscard]] std::size_t violations() const {
        return static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [](const LedgerRecord& r) { return !r.ok(); }));
    }
};

/// Evaluates, for every t ≥ 1,
///   err_t ≤ K^t/(1−K)·‖x¹−x⁰‖∞,  err_t ≤ K/(1−K)·‖x^t−x^{t−1}‖∞,  err_t ≤ K·err_{t−1}
/// with err_t = ‖x^t − p‖∞. `p` must come from outside the trace being judged.
inline BoundLedger banach_ledger(const IterationTrace& trace, double K, const Vector& p,
                                 std::string p_source = "external") {
    if (!(K >= 0.0 && K < 1.0)) {
        throw HypothesisViolation("banach_ledger: K = " + std::to_string(K) + " outside [0, 1)");
    }
    if (trace.iterates.empty()) throw InvalidInput("banach_ledger: empty trace");
    require_same_size(p.size(), trace.dim(), "banach_ledger");

    BoundLedger ledger{K, p, std::move(p_source), {}};
    const std::size_t T = trace.steps();
    ledger.records.reserve(T);
    if (T == 0) return ledger;

    const double first_step = trace.residuals.front();
    double prev_err = inf_distance(trace.iterates.front(), p);
    double K_pow = 1.0;
    for (std::size_t t = 1; t <= T; ++t) {
        K_pow *= K;
        LedgerRecord r;
        r.t = t;
        r.err = inf_distance(trace.iterates[t], p);
        r.apriori = K_pow / (1.0 - K) * first_step;
        r.aposteriori = K / (1.0 - K) * trace.residuals[t - 1];
        r.onestep = K * prev_err;
        r.apriori_ok = r.err <= r.apriori + kBoundSlack;
        r.aposteriori_ok = r.err <= r.aposteriori + kBoundSlack;
        r.onestep_ok = r.err <= r.onestep + kBoundSlack;
        ledger.records.push_back(r);
        prev_err = r.err;
    }
    return ledger;
}

/// Median of successive residual ratios r_t / r_{t−1} over the second half of
/// the usable ratios. Ratios whose denominator is at rounding level are skipped.
inline double geometric_rate_estimate(const IterationTrace& trace) {
    if (!trace.converged) throw InsufficientData("geometric_rate_estimate: trace did not converge");
    if (trace.residuals.size() < 2) {
        throw InsufficientData("geometric_rate_estimate: need at least two steps");
    }
    const double scale = 1.0 + inf_norm(trace.final_iterate());
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    std::vector<double> ratios;
    for (std::size_t t = 1; t < trace.residuals.size(); ++t) {
        const double prev = trace.residuals[t - 1];
        if (prev <= floor) continue;
        ratios.push_back(trace.residuals[t] / prev);
    }
    if (ratios.empty()) throw InsufficientData("geometric_rate_estimate: no usable residual ratios");

    std::vector<double> tail(ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2), ratios.end());
    const auto mid = tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2);
    std::nth_element(tail.begin(), mid, tail.end());
    if (tail.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(tail.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace fplnn
