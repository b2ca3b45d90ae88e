#pragma once

// Brute-force ground truth, kept independent of the iteration engine where it
// is used to judge it: sign-change scanning with bisection in 1-D and
// exhaustive residual grids in up to three dimensions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fplnn/certify.hpp"
#include "fplnn/errors.hpp"
#include "fplnn/iterate.hpp"
#include "fplnn/linalg.hpp"
#include "fplnn/model.hpp"
#include "fplnn/numeric.hpp"

namespace fplnn {

struct FixedPointRecord {
    Vector location;
    double residual = 0.0;  ///< ‖f(p) − p‖∞
    std::optional<double> derivative_at;  ///< |f′(p)|; 1-D only
    bool attracting = false;
};

/// Every sign change of f(x) − x on an n-point grid, refined by bisection.
///
/// Tangential roots (f − id touching zero without changing sign) are not
/// reported unless they fall exactly on a grid point.
inline std::vector<FixedPointRecord> scan_fixed_points_1d(const ScalarMap& f, const RegionBox& interval,
                                                          std::size_t n, double tol = 1e-12) {
    if (interval.dim() != 1) throw InvalidInput("scan_fixed_points_1d: interval must be 1-D");
    if (n < 3) throw InvalidInput("scan_fixed_points_1d: need at least 3 grid points");
    if (!(tol > 0.0)) throw InvalidInput("scan_fixed_points_1d: tol must be positive");

    auto r = [&f](double x) { return f.value(x) - x; };
    auto record = [&f](double p, double residual) {
        const double slope = std::abs(f.derivative(p));
        return FixedPointRecord{{p}, residual, slope, slope < 1.0};
    };

    std::vector<FixedPointRecord> out;
    double x_prev = interval.grid_coordinate(0, 0, n);
    double r_prev = r(x_prev);
    if (r_prev == 0.0) out.push_back(record(x_prev, 0.0));
    for (std::size_t k = 1; k < n; ++k) {
        const double x = interval.grid_coordinate(0, k, n);
        const double rx = r(x);
        if (rx == 0.0) {
            out.push_back(record(x, 0.0));
        } else if (r_prev != 0.0 && (rx > 0.0) != (r_prev > 0.0)) {
            const BisectionResult b = bisect(r, x_prev, x, tol);
            out.push_back(record(b.root, b.residual));
        }
        x_prev = x;
        r_prev = rx;
    }
    return out;
}

inline constexpr double kMaxOracleGrid = 1e7;

namespace detail {

/// max row-L1 norm of a central-difference Jacobian.
inline double fd_jacobian_norm(const VectorMap& map, const Vector& p) {
    const std::size_t d = p.size();
    std::vector<Vector> cols;
    cols.reserve(d);
    for (std::size_t c = 0; c < d; ++c) {
        const double h = 1e-6 * std::max(1.0, std::abs(p[c]));
        Vector plus = p, minus = p;
        plus[c] += h;
        minus[c] -= h;
        const Vector fp = map(plus), fm = map(minus);
        Vector col(d);
        for (std::size_t r = 0; r < d; ++r) col[r] = (fp[r] - fm[r]) / (2.0 * h);
        cols.push_back(std::move(col));
    }
    double out = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < d; ++c) row += std::abs(cols[c][r]);
        out = std::max(out, row);
    }
    return out;
}

}  // namespace detail

/// Local minima of ‖f(x) − x‖∞ on a grid whose value is at most `tol`, each
/// refined by fixed-point iteration from its grid point. Refined locations
/// within two grid cells of an earlier record merge into it.
///
/// Grid hits whose iteration diverges or fails to converge are dropped. For
/// d > 1, `attracting` is the sufficient test max-row-L1(J) < 1 on a
/// finite-difference Jacobian.
inline std::vector<FixedPointRecord> grid_fixed_points(const VectorMap& map, const RegionBox& box, std::size_t n,
                                                       double tol) {
    const std::size_t d = box.dim();
    if (d > 3) throw InvalidInput("grid_fixed_points: at most 3 dimensions");
    if (n < 2) throw InvalidInput("grid_fixed_points: need at least 2 grid points per axis");
    detail::check_grid_budget(n, d, kMaxOracleGrid);

    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= n;
    std::vector<double> residual(total);
    std::size_t flat = 0;
    detail::for_each_grid_point(box, n, [&](const Vector& x, const std::vector<std::size_t>&) {
        const Vector fx = map(x);
        residual[flat++] = all_finite(fx) ? inf_distance(fx, x) : std::numeric_limits<double>::infinity();
    });

    std::vector<std::size_t> stride(d, 1);
    for (std::size_t i = d; i-- > 1;) stride[i - 1] = stride[i] * n;

    Vector spacing(d);
    for (std::size_t i = 0; i < d; ++i) spacing[i] = (box.upper()[i] - box.lower()[i]) / static_cast<double>(n - 1);

    auto is_local_min = [&](std::size_t at) {
        const double v = residual[at];
        std::vector<std::size_t> idx(d);
        for (std::size_t i = 0; i < d; ++i) idx[i] = (at / stride[i]) % n;
        std::size_t neighbours = 1;
        for (std::size_t i = 0; i < d; ++i) neighbours *= 3;
        for (std::size_t code = 0; code < neighbours; ++code) {
            std::size_t c = code;
            std::size_t other = 0;
            bool valid = true;
            bool self = true;
            for (std::size_t i = 0; i < d; ++i) {
                const int off = static_cast<int>(c % 3) - 1;
                c /= 3;
                if (off != 0) self = false;
                const long j = static_cast<long>(idx[i]) + off;
                if (j < 0 || j >= static_cast<long>(n)) {
                    valid = false;
                    break;
                }
                other += static_cast<std::size_t>(j) * stride[i];
            }
            if (!valid || self) continue;
            if (residual[other] < v) return false;
        }
        return true;
    };

    std::vector<FixedPointRecord> out;
    Vector x(d);
    for (std::size_t at = 0; at < total; ++at) {
        if (!(residual[at] <= tol) || !is_local_min(at)) continue;
        for (std::size_t i = 0; i < d; ++i) x[i] = box.grid_coordinate(i, (at / stride[i]) % n, n);

        IterationTrace trace;
        try {
            trace = iterate_to_fixed_point(map, x, {1e-13, 10000});
        } catch (const DivergenceError&) {
            continue;
        }
        if (!trace.converged) continue;
        const Vector& p = trace.final_iterate();

        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const FixedPointRecord& rec) {
            for (std::size_t i = 0; i < d; ++i) {
                if (std::abs(rec.location[i] - p[i]) > 2.0 * spacing[i]) return false;
            }
            return true;
        });
        if (duplicate) continue;

        FixedPointRecord rec;
        rec.location = p;
        rec.residual = inf_distance(map(p), p);
        const double jac = detail::fd_jacobian_norm(map, p);
        if (d == 1) rec.derivative_at = jac;
        rec.attracting = jac < 1.0;
        out.push_back(std::move(rec));
    }
    return out;
}

/// Both fixed points of f(x) = ax² + bx + c and the derivative identities
/// f′(x₁) = 1 + √Δ > 1, f′(x₂) = 1 − √Δ < 1 with Δ = (b − 1)² − 4ac.
struct QuadraticReport {
    double a = 0.0, b = 0.0, c = 0.0;
    double discriminant = 0.0;
    double x1 = 0.0, x2 = 0.0;
    double slope1 = 0.0, slope2 = 0.0;  ///< f′ evaluated at x₁, x₂
    bool larger_slope_exceeds_one = false;
    bool smaller_slope_below_one = false;
    bool x2_attracting = false;  ///< |f′(x₂)| < 1; reported, not part of the property

    [[nodiscard]] bool holds() const noexcept { return larger_slope_exceeds_one && smaller_slope_below_one; }
};

inline QuadraticReport quadratic_fixed_point_property(double a, double b, double c) {
    if (a == 0.0) throw InvalidInput("quadratic_fixed_point_property: a must be non-zero");
    const double disc = (b - 1.0) * (b - 1.0) - 4.0 * a * c;
    if (!(disc > 0.0)) throw InvalidInput("quadratic_fixed_point_property: needs (b-1)^2 - 4ac > 0");
    QuadraticReport rep{a, b, c, disc};
    const double s = std::sqrt(disc);
    rep.x1 = ((1.0 - b) + s) / (2.0 * a);
    rep.x2 = ((1.0 - b) - s) / (2.0 * a);
    rep.slope1 = 2.0 * a * rep.x1 + b;
    rep.slope2 = 2.0 * a * rep.x2 + b;
    rep.larger_slope_exceeds_one = rep.slope1 > 1.0;
    rep.smaller_slope_below_one = rep.slope2 < 1.0;
    rep.x2_attracting = std::abs(rep.slope2) < 1.0;
    return rep;
}

/// The three classic textbook cases for the scalar contraction theorem.
struct TextbookReport {
    // (x² − 1)/3 on [−1, 1]: contraction and closure hold, unique fixed point.
    ContractionCertificate success_cert;
    double success_image_min = 0.0;
    double success_image_max = 0.0;
    double success_fixed_point = 0.0;
    std::size_t success_scan_count = 0;
    bool success_ok = false;

    // (x² − 1)/3 on [3, 4]: closure fails at x = 4 although a fixed point exists.
    ContractionCertificate closure_fail_cert;
    double closure_fail_g4 = 0.0;
    std::size_t closure_fail_scan_count = 0;
    bool closure_fail_ok = false;

    // 3^(−x) on [0, 1]: |g′(0)| = ln 3 > 1 although the fixed point is unique.
    ContractionCertificate slope_fail_cert;
    std::size_t slope_fail_scan_count = 0;
    bool slope_fail_ok = false;

    [[nodiscard]] bool ok() const noexcept { return success_ok && closure_fail_ok && slope_fail_ok; }
};

inline TextbookReport textbook_examples_check(std::size_t n = 10001) {
    const ScalarMap quad{[](double x) { return (x * x - 1.0) / 3.0; }, [](double x) { return 2.0 * x / 3.0; },
                         "(x^2 - 1)/3"};
    const double ln3 = std::log(3.0);
    const ScalarMap inv3{[](double x) { return std::pow(3.0, -x); },
                         [ln3](double x) { return -ln3 * std::pow(3.0, -x); }, "3^(-x)"};

    TextbookReport rep;

    const RegionBox unit = RegionBox::interval(-1.0, 1.0);
    rep.success_cert = certify_contraction_scalar(quad, unit, n);
    rep.success_image_min = std::numeric_limits<double>::infinity();
    rep.success_image_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double y = quad.value(unit.grid_coordinate(0, k, n));
        rep.success_image_min = std::min(rep.success_image_min, y);
        rep.success_image_max = std::max(rep.success_image_max, y);
    }
    const IterationTrace trace = iterate_to_fixed_point(quad, 0.5, {1e-14, 10000});
    rep.success_fixed_point = trace.final_iterate()[0];
    rep.success_scan_count = scan_fixed_points_1d(quad, unit, n).size();
    rep.success_ok = rep.success_cert.K_hat <= 2.0 / 3.0 && rep.success_cert.closure_ok &&
                     rep.success_image_min >= -1.0 / 3.0 - 1e-15 && rep.success_image_max <= 0.0 &&
                     trace.converged && rep.success_scan_count == 1 && unit.contains(trace.final_iterate());

    const RegionBox far = RegionBox::interval(3.0, 4.0);
    rep.closure_fail_cert = certify_contraction_scalar(quad, far, n);
    rep.closure_fail_g4 = quad.value(4.0);
    rep.closure_fail_scan_count = scan_fixed_points_1d(quad, far, n).size();
    rep.closure_fail_ok = !rep.closure_fail_cert.closure_ok && rep.closure_fail_g4 == 5.0 &&
                          rep.closure_fail_scan_count == 1;

    const RegionBox zero_one = RegionBox::interval(0.0, 1.0);
    rep.slope_fail_cert = certify_contraction_scalar(inv3, zero_one, n);
    rep.slope_fail_scan_count = scan_fixed_points_1d(inv3, zero_one, n).size();
    rep.slope_fail_ok = rep.slope_fail_cert.K_hat > 1.0 && rep.slope_fail_cert.closure_ok &&
                        rep.slope_fail_scan_count == 1;
    return rep;
}

}  // namespace fplnn
