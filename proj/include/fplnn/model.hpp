#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fplnn/errors.hpp"
#include "fplnn/linalg.hpp"

namespace fplnn {

/// Any iterate whose ∞-norm exceeds this is treated as divergent.
inline constexpr double kDivergenceLimit = 1e12;

/// Differentiable scalar function with an exact derivative.
///
/// Used both as a network activation and as a standalone 1-D map. The
/// derivative is always supplied analytically; finite differences only
/// appear in tests.
struct Activation {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::string description;

    double operator()(double x) const { return value(x); }
};

/// A differentiable map ℝ → ℝ. Same shape as an activation.
using ScalarMap = Activation;

/// A map ℝ^d → ℝ^d.
using VectorMap = std::function<Vector(const Vector&)>;

/// Throws DivergenceError if x is non-finite or beyond the magnitude guard.
inline void check_iterate(std::span<const double> x, std::size_t iteration) {
    if (!all_finite(x)) throw DivergenceError(iteration, "non-finite entry");
    if (inf_norm(x) > kDivergenceLimit) throw DivergenceError(iteration, "magnitude above 1e12");
}

/// One weight-tied layer x ↦ g(Wx + b), g applied entrywise.
class LoopedNetwork {
public:
    LoopedNetwork(Matrix weights, Vector bias, Activation activation)
        : weights_(std::move(weights)), bias_(std::move(bias)), activation_(std::move(activation)) {
        if (weights_.rows() == 0 || weights_.rows() != weights_.cols()) {
            throw InvalidInput("LoopedNetwork: weight matrix must be square and non-empty");
        }
        require_same_size(bias_.size(), weights_.rows(), "LoopedNetwork bias");
        if (!activation_.value || !activation_.derivative) {
            throw InvalidInput("LoopedNetwork: activation needs both value and derivative");
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return bias_.size(); }
    [[nodiscard]] const Matrix& weights() const noexcept { return weights_; }
    [[nodiscard]] const Vector& bias() const noexcept { return bias_; }
    [[nodiscard]] const Activation& activation() const noexcept { return activation_; }

    /// Wx + b
    [[nodiscard]] Vector pre_activation(const Vector& x) const {
        require_same_size(x.size(), dim(), "forward");
        Vector z = weights_.multiply(x);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += bias_[i];
        return z;
    }

    [[nodiscard]] Vector forward(const Vector& x) const {
        Vector z = pre_activation(x);
        for (double& v : z) v = activation_.value(v);
        return z;
    }

    Vector operator()(const Vector& x) const { return forward(x); }

    /// L-fold composition of forward. Throws DivergenceError naming the loop index.
    [[nodiscard]] Vector run_loops(const Vector& x0, std::size_t loops) const {
        require_same_size(x0.size(), dim(), "run_loops");
        Vector x = x0;
        for (std::size_t t = 1; t <= loops; ++t) {
            x = forward(x);
            check_iterate(x, t);
        }
        return x;
    }

    /// |g′(⟨w_j, x⟩ + b_j)| · ‖w_j‖₁ with 1-based row index j.
    [[nodiscard]] double jacobian_row_l1(const Vector& x, std::size_t j) const {
        require_same_size(x.size(), dim(), "jacobian_row_l1");
        if (j < 1 || j > dim()) {
            throw InvalidInput("jacobian_row_l1: row index " + std::to_string(j) +
                               " outside [1, " + std::to_string(dim()) + "]");
        }
        const auto row = weights_.row(j - 1);
        double z = bias_[j - 1];
        for (std::size_t c = 0; c < row.size(); ++c) z += row[c] * x[c];
        return std::abs(activation_.derivative(z)) * l1_norm(row);
    }

    [[nodiscard]] double max_jacobian_row_l1(const Vector& x) const {
        double out = 0.0;
        for (std::size_t j = 1; j <= dim(); ++j) out = std::max(out, jacobian_row_l1(x, j));
        return out;
    }

    [[nodiscard]] VectorMap as_map() const {
        return [net = *this](const Vector& x) { return net.forward(x); };
    }

private:
    Matrix weights_;
    Vector bias_;
    Activation activation_;
};

inline Vector forward(const LoopedNetwork& net, const Vector& x) { return net.forward(x); }

inline Vector run_loops(const LoopedNetwork& net, const Vector& x0, std::size_t loops) {
    return net.run_loops(x0, loops);
}

inline double jacobian_row_l1(const LoopedNetwork& net, const Vector& x, std::size_t j) {
    return net.jacobian_row_l1(x, j);
}

/// Lift a scalar map to a 1-D vector map.
inline VectorMap lift(const ScalarMap& f) {
    return [value = f.value](const Vector& x) {
        require_same_size(x.size(), 1, "scalar map");
        return Vector{value(x[0])};
    };
}

/// Iterates x^(0..T) with successive ∞-norm residuals.
struct IterationTrace {
    std::vector<Vector> iterates;
    std::vector<double> residuals;
    std::optional<std::vector<Vector>> noise_applied;
    bool converged = false;

    [[nodiscard]] std::size_t steps() const noexcept {
        return iterates.empty() ? 0 : iterates.size() - 1;
    }
    [[nodiscard]] std::size_t dim() const noexcept {
        return iterates.empty() ? 0 : iterates.front().size();
    }
    [[nodiscard]] const Vector& final_iterate() const { return iterates.back(); }

    void start(Vector x0) {
        iterates.clear();
        residuals.clear();
        iterates.push_back(std::move(x0));
    }

    void push(Vector x) {
        residuals.push_back(inf_distance(x, iterates.back()));
        iterates.push_back(std::move(x));
    }
};

}  // namespace fplnn
