#pragma once

// Explicit looped networks with 2^d robust fixed points.
//
// Both families shift a one-dimensional "reduced" map by a constant C so that
// g(x + C) equals the reduced map exactly:
//   polynomial:  g(x + C) = −(2/5)x⁴ + (3/2)x²,   4C⁴ − 15C² + 10 = 0, C > 0
//   exponential: g(x + C) = exp(x³ − 2x²) − 1,    C³ + 2C² + ln 2 = 0
// A near-diagonal weight matrix then runs one copy of the reduced map per
// coordinate, up to a (1/m²) coupling residue.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fplnn/certify.hpp"
#include "fplnn/errors.hpp"
#include "fplnn/linalg.hpp"
#include "fplnn/model.hpp"
#include "fplnn/numeric.hpp"

namespace fplnn {

enum class Family { Polynomial, Exponential };

inline std::string_view to_string(Family f) {
    return f == Family::Polynomial ? "poly" : "exp";
}

inline Family parse_family(std::string_view s) {
    if (s == "poly" || s == "polynomial") return Family::Polynomial;
    if (s == "exp" || s == "exponential") return Family::Exponential;
    throw InvalidInput("unknown family '" + std::string(s) + "' (expected poly or exp)");
}

/// Positive root of 4C⁴ − 15C² + 10, i.e. sqrt((15 + √65)/8).
inline double poly_constant() {
    static const double C =
        bisect([](double c) { return 4.0 * c * c * c * c - 15.0 * c * c + 10.0; }, 1.5, 2.0, 1e-14).root;
    return C;
}

/// Root of C³ + 2C² + ln 2 near −2.15.
inline double exp_constant() {
    static const double C =
        bisect([](double c) { return c * c * c + 2.0 * c * c + std::log(2.0); }, -3.0, -2.0, 1e-14).root;
    return C;
}

inline double family_constant(Family f) {
    return f == Family::Polynomial ? poly_constant() : exp_constant();
}

/// g(z) = −(2/5)z⁴ + (8/5)Cz³ + (3/2 − (12/5)C²)z² + ((8/5)C³ − 3C)z + 1
inline Activation poly_activation(double C) {
    const double a4 = -2.0 / 5.0;
    const double a3 = 8.0 / 5.0 * C;
    const double a2 = 1.5 - 12.0 / 5.0 * C * C;
    const double a1 = 8.0 / 5.0 * C * C * C - 3.0 * C;
    return {
        [=](double z) { return (((a4 * z + a3) * z + a2) * z + a1) * z + 1.0; },
        [=](double z) { return ((4.0 * a4 * z + 3.0 * a3) * z + 2.0 * a2) * z + a1; },
        "poly: -(2/5)z^4 + (8/5)Cz^3 + (3/2 - (12/5)C^2)z^2 + ((8/5)C^3 - 3C)z + 1",
    };
}

/// g(z) = exp(z³ + (−2 − 3C)z² + (3C² + 4C)z + ln 2) − 1
inline Activation exp_activation(double C) {
    const double a2 = -2.0 - 3.0 * C;
    const double a1 = 3.0 * C * C + 4.0 * C;
    const double a0 = std::log(2.0);
    return {
        [=](double z) { return std::exp(((z + a2) * z + a1) * z + a0) - 1.0; },
        [=](double z) {
            return ((3.0 * z + 2.0 * a2) * z + a1) * std::exp(((z + a2) * z + a1) * z + a0);
        },
        "exp: exp(z^3 + (-2 - 3C)z^2 + (3C^2 + 4C)z + ln 2) - 1",
    };
}

inline Activation family_activation(Family f) {
    return f == Family::Polynomial ? poly_activation(poly_constant()) : exp_activation(exp_constant());
}

/// A box on which the reduced map is claimed contractive, with the claimed K
/// and the approximate fixed point it contains.
struct CertifiedInterval {
    RegionBox region;
    double K_claimed = 0.0;
    double p_nominal = 0.0;
};

struct ReducedMap {
    Family family = Family::Polynomial;
    ScalarMap map;
    std::array<CertifiedInterval, 2> regions;
};

inline ReducedMap reduced_map(Family family) {
    if (family == Family::Polynomial) {
        return {
            family,
            {[](double x) { return -0.4 * x * x * x * x + 1.5 * x * x; },
             [](double x) { return -1.6 * x * x * x + 3.0 * x; },
             "-(2/5)x^4 + (3/2)x^2"},
            {CertifiedInterval{RegionBox::interval(-0.3, 0.3), 0.9, 0.0},
             CertifiedInterval{RegionBox::interval(1.3028, 1.5028), 0.92, 1.4028}},
        };
    }
    return {
        family,
        {[](double x) { return std::exp(x * x * x - 2.0 * x * x) - 1.0; },
         [](double x) { return (3.0 * x * x - 4.0 * x) * std::exp(x * x * x - 2.0 * x * x); },
         "exp(x^3 - 2x^2) - 1"},
        {CertifiedInterval{RegionBox::interval(-0.1, 0.1), 0.5, 0.0},
         CertifiedInterval{RegionBox::interval(-1.010, -0.810), 0.85, -0.9104}},
    };
}

/// W = diag(1) with every off-diagonal entry 1/m², b = C·1.
inline LoopedNetwork build_coupled_network(Family family, std::size_t d, double m) {
    if (d < 1) throw InvalidInput("build_coupled_network: d must be at least 1");
    if (!(m > static_cast<double>(d))) {
        throw InvalidInput("build_coupled_network: need m > d (got m = " + std::to_string(m) +
                           ", d = " + std::to_string(d) + ")");
    }
    const double off = 1.0 / (m * m);
    Matrix W(d, d, off);
    for (std::size_t i = 0; i < d; ++i) W(i, i) = 1.0;
    return {std::move(W), Vector(d, family_constant(family)), family_activation(family)};
}

/// 3-D dummy-variable network: row 1 = [1, 1, C − 1], rows 2–3 zero, no bias.
/// On inputs (x, 1, 1) the first output is the reduced map at x and the
/// others are g(0) = 1.
inline LoopedNetwork build_dummy_network(Family family) {
    const double C = family_constant(family);
    Matrix W(3, 3, 0.0);
    W(0, 0) = 1.0;
    W(0, 1) = 1.0;
    W(0, 2) = C - 1.0;
    return {std::move(W), Vector(3, 0.0), family_activation(family)};
}

/// d-dimensional exponential dummy network: row 1 = [1, 1/(d−1), …, 1/(d−1) + C − 1].
inline LoopedNetwork build_ddim_exp_network(std::size_t d) {
    if (d < 2) throw InvalidInput("build_ddim_exp_network: d must be at least 2");
    const double C = exp_constant();
    const double share = 1.0 / static_cast<double>(d - 1);
    Matrix W(d, d, 0.0);
    W(0, 0) = 1.0;
    for (std::size_t c = 1; c < d; ++c) W(0, c) = share;
    W(0, d - 1) = share + C - 1.0;
    return {std::move(W), Vector(d, 0.0), exp_activation(C)};
}

struct CaseStudySpec {
    Family family = Family::Polynomial;
    double C = 0.0;
    std::size_t d = 1;
    double m = 0.0;
    std::array<CertifiedInterval, 2> per_coordinate;
};

inline CaseStudySpec make_case_study(Family family, std::size_t d, double m) {
    if (d < 1) throw InvalidInput("make_case_study: d must be at least 1");
    if (!(m > static_cast<double>(d))) throw InvalidInput("make_case_study: need m > d");
    return {family, family_constant(family), d, m, reduced_map(family).regions};
}

struct FixedPointCandidate {
    std::size_t index = 0;
    std::vector<int> choice;  ///< per coordinate: 0 → first region, 1 → second
    Vector location;
    double residual = 0.0;  ///< ‖f(p) − p‖∞ on the coupled network
    std::size_t refinement_steps = 0;
};

inline constexpr std::size_t kMaxEnumerationDim = 20;

/// All 2^d per-coordinate combinations of the two reduced-map fixed points,
/// each refined on the full coupled network.
///
/// Candidate i takes region bit j of i for coordinate j + 1 (coordinate 1
/// fastest). Refinement is a damped iteration x ← x + ½(f(x) − x) that must
/// stay in the product of certified boxes and end with
/// ‖f(p) − p‖∞ ≤ 1/m + 1e−8.
inline std::vector<FixedPointCandidate> enumerate_fixed_points(const CaseStudySpec& spec) {
    if (spec.d > kMaxEnumerationDim) {
        throw InvalidInput("enumerate_fixed_points: d = " + std::to_string(spec.d) + " exceeds the limit of 20");
    }
    const LoopedNetwork net = build_coupled_network(spec.family, spec.d, spec.m);
    const double threshold = 1.0 / spec.m + 1e-8;
    constexpr double damping = 0.5;
    constexpr double target = 1e-14;
    constexpr std::size_t max_steps = 5000;

    const std::size_t count = std::size_t{1} << spec.d;
    std::vector<FixedPointCandidate> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        FixedPointCandidate cand;
        cand.index = i;
        cand.choice.resize(spec.d);
        cand.location.resize(spec.d);
        Vector lo(spec.d), hi(spec.d);
        for (std::size_t j = 0; j < spec.d; ++j) {
            const int bit = static_cast<int>((i >> j) & 1U);
            const CertifiedInterval& ci = spec.per_coordinate[static_cast<std::size_t>(bit)];
            cand.choice[j] = bit;
            cand.location[j] = ci.p_nominal;
            lo[j] = ci.region.lower()[0];
            hi[j] = ci.region.upper()[0];
        }
        const RegionBox box(lo, hi);

        Vector x = cand.location;
        Vector fx = net.forward(x);
        double residual = inf_distance(fx, x);
        std::size_t step = 0;
        while (residual > target && step < max_steps) {
            for (std::size_t j = 0; j < spec.d; ++j) x[j] += damping * (fx[j] - x[j]);
            ++step;
            check_iterate(x, step);
            if (!box.contains(x)) throw RefinementFailure(i, "left its certified box during refinement");
            fx = net.forward(x);
            residual = inf_distance(fx, x);
        }
        if (!(residual <= threshold)) {
            throw RefinementFailure(i, "residual " + std::to_string(residual) + " above 1/m + 1e-8");
        }
        cand.location = std::move(x);
        cand.residual = residual;
        cand.refinement_steps = step;
        out.push_back(std::move(cand));
    }
    return out;
}

/// The two forms of the per-candidate error bound after t loops:
/// the statement form K^t·ε + 20/m and the proof form K^t·c·ε + 20/m, c = 1/(1 − K).
struct CaseBoundForms {
    double statement = 0.0;
    double with_c = 0.0;
};

inline CaseBoundForms case_error_bounds(double K, double epsilon, std::size_t t, double m) {
    if (!(K >= 0.0 && K < 1.0)) throw HypothesisViolation("case_error_bounds: K must lie in [0, 1)");
    if (!(m > 0.0)) throw InvalidInput("case_error_bounds: m must be positive");
    const double Kt = std::pow(K, static_cast<double>(t));
    return {Kt * epsilon + 20.0 / m, Kt * epsilon / (1.0 - K) + 20.0 / m};
}

}  // namespace fplnn
