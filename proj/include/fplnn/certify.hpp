#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fplnn/errors.hpp"
#include "fplnn/linalg.hpp"
#include "fplnn/model.hpp"

namespace fplnn {

/// Closed axis-aligned box ∏ [lower_i, upper_i].
class RegionBox {
public:
    RegionBox() = default;
    RegionBox(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
        require_same_size(lower_.size(), upper_.size(), "RegionBox");
        if (lower_.empty()) throw InvalidInput("RegionBox: zero-dimensional box");
        for (std::size_t i = 0; i < lower_.size(); ++i) {
            if (!(lower_[i] <= upper_[i])) {
                throw InvalidInput("RegionBox: lower > upper on axis " + std::to_string(i));
            }
        }
    }

    static RegionBox interval(double lo, double hi) { return {Vector{lo}, Vector{hi}}; }

    static RegionBox cube(std::size_t d, double lo, double hi) {
        return {Vector(d, lo), Vector(d, hi)};
    }

    [[nodiscard]] std::size_t dim() const noexcept { return lower_.size(); }
    [[nodiscard]] const Vector& lower() const noexcept { return lower_; }
    [[nodiscard]] const Vector& upper() const noexcept { return upper_; }

    [[nodiscard]] bool contains(std::span<const double> x) const {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
        }
        return true;
    }

    /// sup_{y,z ∈ box} ‖y − z‖∞
    [[nodiscard]] double inf_diameter() const {
        double out = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) out = std::max(out, upper_[i] - lower_[i]);
        return out;
    }

    /// k-th of n equally spaced points on axis i, endpoints exact.
    [[nodiscard]] double grid_coordinate(std::size_t axis, std::size_t k, std::size_t n) const {
        if (n < 2 || k == 0) return lower_[axis];
        if (k == n - 1) return upper_[axis];
        const double width = upper_[axis] - lower_[axis];
        return lower_[axis] + width * static_cast<double>(k) / static_cast<double>(n - 1);
    }

    friend bool operator==(const RegionBox&, const RegionBox&) = default;

private:
    Vector lower_;
    Vector upper_;
};

/// Empirical contraction certificate over a box.
///
/// A sampled sup, not a proof: K_hat is the largest contraction quantity seen
/// on the grid and closure_ok records whether every sampled image stayed in
/// the box.
struct ContractionCertificate {
    RegionBox region;
    double K_hat = 0.0;
    bool closure_ok = false;
    std::size_t grid_points_per_axis = 0;
    Vector worst_point;
    /// True when partials came from finite differences rather than an analytic form.
    bool approximate = false;

    /// Guaranteed convergence is only advertised when both Banach hypotheses hold.
    [[nodiscard]] bool certifies_contraction() const noexcept { return K_hat < 1.0 && closure_ok; }
};

inline constexpr double kMaxGridEvaluations = 1e8;

namespace detail {

inline void check_grid_budget(std::size_t n, std::size_t d, double budget) {
    const double total = std::pow(static_cast<double>(n), static_cast<double>(d));
    if (total > budget) {
        throw GridTooLarge("grid of " + std::to_string(n) + "^" + std::to_string(d) +
                           " points exceeds budget");
    }
}

/// Visit every grid point in lexicographic index order (last axis fastest).
template <class Visit>
void for_each_grid_point(const RegionBox& box, std::size_t n, Visit&& visit) {
    const std::size_t d = box.dim();
    std::vector<std::size_t> idx(d, 0);
    Vector x(d);
    for (;;) {
        for (std::size_t i = 0; i < d; ++i) x[i] = box.grid_coordinate(i, idx[i], n);
        visit(std::as_const(x), std::as_const(idx));
        std::size_t axis = d;
        while (axis > 0) {
            --axis;
            if (++idx[axis] < n) break;
            idx[axis] = 0;
            if (axis == 0) return;
        }
    }
}

}  // namespace detail

/// sup |f′| on n equally spaced points of a 1-D interval, plus sampled closure.
inline ContractionCertificate certify_contraction_scalar(const ScalarMap& f, const RegionBox& interval,
                                                         std::size_t n) {
    if (interval.dim() != 1) throw InvalidInput("certify_contraction_scalar: interval must be 1-D");
    if (n < 2) throw InvalidInput("certify_contraction_scalar: need at least 2 grid points");

    ContractionCertificate cert{interval, 0.0, true, n, {interval.lower()[0]}, false};
    for (std::size_t k = 0; k < n; ++k) {
        const double x = interval.grid_coordinate(0, k, n);
        const double slope = std::abs(f.derivative(x));
        if (slope > cert.K_hat || std::isnan(slope)) {
            cert.K_hat = std::isnan(slope) ? std::numeric_limits<double>::infinity() : slope;
            cert.worst_point = {x};
        }
        const double y = f.value(x);
        if (!(y >= interval.lower()[0] && y <= interval.upper()[0])) cert.closure_ok = false;
    }
    return cert;
}

/// max over grid points x and rows j of |g′(⟨w_j,x⟩+b_j)|·‖w_j‖₁, plus sampled closure.
inline ContractionCertificate certify_contraction_vector(const LoopedNetwork& net, const RegionBox& region,
                                                         std::size_t n) {
    require_same_size(region.dim(), net.dim(), "certify_contraction_vector");
    if (n < 2) throw InvalidInput("certify_contraction_vector: need at least 2 grid points per axis");
    detail::check_grid_budget(n, region.dim(), kMaxGridEvaluations);

    ContractionCertificate cert{region, 0.0, true, n, region.lower(), false};
    bool first = true;
    detail::for_each_grid_point(region, n, [&](const Vector& x, const std::vector<std::size_t>&) {
        const double k = net.max_jacobian_row_l1(x);
        // strict > keeps the lexicographically smallest index on ties
        if (first || k > cert.K_hat) {
            cert.K_hat = k;
            cert.worst_point = x;
            first = false;
        }
        if (!region.contains(net.forward(x))) cert.closure_ok = false;
    });
    return cert;
}

/// A map on n×d matrices, flattened row-major to n·d coordinates.
///
/// `partial(X, i, j, k, l)` returns ∂f(X)_{ij}/∂X_{kl}. When it is empty the
/// certificate falls back to central differences and is flagged approximate.
struct MatrixMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::function<Matrix(const Matrix&)> value;
    std::function<double(const Matrix&, std::size_t, std::size_t, std::size_t, std::size_t)> partial;
};

inline ContractionCertificate certify_contraction_matrix(const MatrixMap& map, const RegionBox& region,
                                                         std::size_t grid) {
    const std::size_t entries = map.rows * map.cols;
    if (entries == 0) throw InvalidInput("certify_contraction_matrix: empty matrix shape");
    require_same_size(region.dim(), entries, "certify_contraction_matrix");
    if (grid < 2) throw InvalidInput("certify_contraction_matrix: need at least 2 grid points per axis");
    detail::check_grid_budget(grid, entries, kMaxGridEvaluations);

    const bool approximate = !map.partial;
    constexpr double h = 1e-6;
    auto partial = [&](const Matrix& X, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        if (!approximate) return map.partial(X, i, j, k, l);
        Matrix plus = X;
        Matrix minus = X;
        plus(k, l) += h;
        minus(k, l) -= h;
        return (map.value(plus)(i, j) - map.value(minus)(i, j)) / (2.0 * h);
    };

    ContractionCertificate cert{region, 0.0, true, grid, region.lower(), approximate};
    double max_partial = -1.0;
    Matrix X(map.rows, map.cols);
    detail::for_each_grid_point(region, grid, [&](const Vector& x, const std::vector<std::size_t>&) {
        std::copy(x.begin(), x.end(), X.flat().begin());
        const Matrix fx = map.value(X);
        if (fx.rows() != map.rows || fx.cols() != map.cols) {
            throw InvalidInput("certify_contraction_matrix: map changed the matrix shape");
        }
        double local = 0.0;
        for (std::size_t i = 0; i < map.rows; ++i)
            for (std::size_t j = 0; j < map.cols; ++j)
                for (std::size_t k = 0; k < map.rows; ++k)
                    for (std::size_t l = 0; l < map.cols; ++l)
                        local = std::max(local, std::abs(partial(X, i, j, k, l)));
        if (local > max_partial) {
            max_partial = local;
            cert.worst_point = x;
        }
        if (!region.contains(fx.flat())) cert.closure_ok = false;
    });
    // sufficient condition: every partial ≤ K/(nd)
    cert.K_hat = static_cast<double>(entries) * max_partial;
    return cert;
}

/// ε = ∞-diameter of the region and c = 1/(1 − K_hat).
struct ErrorCoefficients {
    double epsilon = 0.0;
    double c = 0.0;
};

inline ErrorCoefficients certified_error_coefficients(const ContractionCertificate& cert) {
    if (!(cert.K_hat < 1.0)) {
        throw HypothesisViolation("certified_error_coefficients: K_hat = " + std::to_string(cert.K_hat) +
                                  " is not a contraction constant");
    }
    return {cert.region.inf_diameter(), 1.0 / (1.0 - cert.K_hat)};
}

}  // namespace fplnn
