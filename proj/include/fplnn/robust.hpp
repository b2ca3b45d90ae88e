#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fplnn/errors.hpp"
#include "fplnn/iterate.hpp"
#include "fplnn/linalg.hpp"
#include "fplnn/model.hpp"

namespace fplnn {

/// Bounded perturbation h with ‖h‖∞ ≤ 1/m.
///
/// By default h is per-coordinate uniform on [−1/m, 1/m], drawn from a
/// generator seeded by (seed, step) so the stream does not depend on call
/// order. A user-supplied `deterministic` h(x) replaces the random draw; its
/// output is checked against the same bound. m = +inf gives h ≡ 0.
struct NoiseModel {
    double m = 100.0;
    std::uint64_t seed = 0;
    std::function<Vector(const Vector&)> deterministic;

    [[nodiscard]] double amplitude() const { return 1.0 / m; }

    [[nodiscard]] Vector sample(std::size_t step, const Vector& x) const {
        if (!(m > 0.0)) throw InvalidInput("NoiseModel: m must be positive");
        const double amp = amplitude();
        if (deterministic) {
            Vector h = deterministic(x);
            require_same_size(h.size(), x.size(), "NoiseModel::deterministic");
            if (inf_norm(h) > amp) throw InvalidInput("NoiseModel: deterministic h exceeds 1/m");
            return h;
        }
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(std::uint64_t{step} >> 32)};
        std::mt19937_64 gen(seq);
        Vector h(x.size());
        for (double& v : h) {
            // 53 random bits → u ∈ [0, 1); h ∈ [−amp, amp)
            const double u = std::ldexp(static_cast<double>(gen() >> 11), -53);
            v = (2.0 * u - 1.0) * amp;
        }
        return h;
    }
};

/// Exactly T steps of x^(t) = f(x^(t−1)) + h_t, recording each h_t.
inline IterationTrace perturbed_iterate(const VectorMap& map, const Vector& x0, const NoiseModel& noise,
                                        std::size_t steps) {
    if (steps < 1) throw InvalidInput("perturbed_iterate: T must be at least 1");
    check_iterate(x0, 0);

    IterationTrace trace;
    trace.start(x0);
    trace.noise_applied.emplace();
    trace.noise_applied->reserve(steps);
    for (std::size_t t = 1; t <= steps; ++t) {
        const Vector& prev = trace.iterates.back();
        Vector next = map(prev);
        require_same_size(next.size(), x0.size(), "perturbed_iterate");
        Vector h = noise.sample(t, prev);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += h[i];
        check_iterate(next, t);
        trace.noise_applied->push_back(std::move(h));
        trace.push(std::move(next));
    }
    trace.converged = false;
    return trace;
}

inline IterationTrace perturbed_iterate(const ScalarMap& f, double x0, const NoiseModel& noise,
                                        std::size_t steps) {
    return perturbed_iterate(lift(f), Vector{x0}, noise, steps);
}

inline constexpr double kRobustMaxK = 0.95;

inline void require_robust_hypothesis(double K) {
    if (!(K >= 0.0 && K <= kRobustMaxK)) {
        throw HypothesisViolation("robust bound needs K in [0, 0.95] (the constant 20 in 20/m relies on it); got K = " +
                                  std::to_string(K));
    }
}

/// K^t·e0 + 20/m
inline double robust_bound(double K, double m, std::size_t t, double e0) {
    require_robust_hypothesis(K);
    if (!(m > 0.0)) throw InvalidInput("robust_bound: m must be positive");
    if (!(e0 >= 0.0)) throw InvalidInput("robust_bound: e0 must be non-negative");
    return std::pow(K, static_cast<double>(t)) * e0 + 20.0 / m;
}

struct RobustViolation {
    enum class Kind { OneStep, Cumulative };
    std::size_t t = 0;
    Kind kind = Kind::OneStep;
    double err = 0.0;
    double bound = 0.0;
};

inline const char* to_string(RobustViolation::Kind k) {
    return k == RobustViolation::Kind::OneStep ? "onestep" : "cumulative";
}

struct RobustReport {
    double K = 0.0;
    double m = 0.0;
    Vector p;
    std::vector<double> errors;  ///< ‖x^(t) − p‖∞ for t = 0..T
    std::vector<RobustViolation> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Checks ‖x^t−p‖ ≤ K‖x^{t−1}−p‖ + 1/m and ‖x^t−p‖ ≤ K^t‖x⁰−p‖ + 20/m at every step.
inline RobustReport verify_robust(const IterationTrace& trace, const Vector& p, double K, double m) {
    require_robust_hypothesis(K);
    if (!(m > 0.0)) throw InvalidInput("verify_robust: m must be positive");
    if (trace.iterates.empty()) throw InvalidInput("verify_robust: empty trace");
    require_same_size(p.size(), trace.dim(), "verify_robust");

    RobustReport report{K, m, p, {}, {}};
    report.errors.reserve(trace.iterates.size());
    for (const Vector& x : trace.iterates) report.errors.push_back(inf_distance(x, p));

    const double e0 = report.errors.front();
    for (std::size_t t = 1; t < report.errors.size(); ++t) {
        const double err = report.errors[t];
        const double onestep = K * report.errors[t - 1] + 1.0 / m;
        if (err > onestep + kBoundSlack) {
            report.violations.push_back({t, RobustViolation::Kind::OneStep, err, onestep});
        }
        const double cumulative = robust_bound(K, m, t, e0);
        if (err > cumulative + kBoundSlack) {
            report.violations.push_back({t, RobustViolation::Kind::Cumulative, err, cumulative});
        }
    }
    return report;
}

}  // namespace fplnn
