#pragma once

// Reproduction of the three figure experiments. Every figure writes the CSV
// and JSON it plots alongside the SVG so downstream checks never parse SVG.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fplnn/caselib.hpp"
#include "fplnn/certify.hpp"
#include "fplnn/io.hpp"
#include "fplnn/iterate.hpp"
#include "fplnn/oracle.hpp"
#include "fplnn/robust.hpp"
#include "fplnn/svg.hpp"

namespace fplnn {

struct ExperimentConfig {
    Family family = Family::Polynomial;
    std::size_t d = 2;
    double m = 1000.0;
    std::uint64_t seed = 42;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    std::size_t steps = 200;
    std::filesystem::path output_dir = "out";
};

// ---- fig1: reduced maps, fixed points, cobwebs -------------------------------

struct CobwebPath {
    double x0 = 0.0;
    double final_value = 0.0;
    bool converged = false;
    std::vector<svg::Point> vertices;
};

struct Fig1Panel {
    Family family = Family::Polynomial;
    std::vector<FixedPointRecord> fixed_points;
    std::vector<CobwebPath> cobwebs;
};

struct Fig1Result {
    std::array<Fig1Panel, 2> panels;
};

/// (x0, x0) → (x0, f(x0)) → (f(x0), f(x0)) → …
inline CobwebPath cobweb(const ScalarMap& f, double x0, IterationOptions opts) {
    const IterationTrace trace = iterate_to_fixed_point(f, x0, opts);
    CobwebPath path{x0, trace.final_iterate()[0], trace.converged, {}};
    path.vertices.push_back({x0, x0});
    for (std::size_t t = 1; t < trace.iterates.size(); ++t) {
        const double prev = trace.iterates[t - 1][0];
        const double next = trace.iterates[t][0];
        path.vertices.push_back({prev, next});
        path.vertices.push_back({next, next});
    }
    return path;
}

inline Fig1Result reproduce_fig1(const ExperimentConfig& cfg) {
    struct PanelSetup {
        Family family;
        double lo, hi;
        std::vector<double> starts;
    };
    const std::array<PanelSetup, 2> setups{{
        {Family::Polynomial, -0.6, 1.7, {0.25, -0.25, 1.35, 1.48}},
        {Family::Exponential, -1.3, 0.4, {0.08, -0.05, -0.95, -0.85}},
    }};
    const IterationOptions opts{std::min(cfg.tol, 1e-12), cfg.max_iter};
    static const std::array<const char*, 4> colors{"#d62728", "#ff7f0e", "#2ca02c", "#9467bd"};

    Fig1Result result;
    for (std::size_t i = 0; i < setups.size(); ++i) {
        const PanelSetup& s = setups[i];
        const ReducedMap rm = reduced_map(s.family);
        const std::string name = "fig1_" + std::string(to_string(s.family));
        Fig1Panel& panel = result.panels[i];
        panel.family = s.family;
        panel.fixed_points = scan_fixed_points_1d(rm.map, RegionBox::interval(s.lo, s.hi), 10000);

        constexpr std::size_t samples = 461;
        CsvTable curve({"x", "f", "identity"});
        std::vector<svg::Point> fpts, ipts;
        for (std::size_t k = 0; k < samples; ++k) {
            const double x = s.lo + (s.hi - s.lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
            const double y = rm.map.value(x);
            curve.row({x, y, x});
            fpts.push_back({x, y});
            ipts.push_back({x, x});
        }
        write_text_file(cfg.output_dir / (name + "_curve.csv"), curve.str());

        CsvTable fp_csv({"location", "residual", "derivative", "attracting"});
        std::vector<svg::Point> markers;
        for (const auto& r : panel.fixed_points) {
            fp_csv.row({r.location[0], r.residual, r.derivative_at.value_or(0.0), r.attracting ? 1.0 : 0.0});
            markers.push_back({r.location[0], r.location[0]});
        }
        write_text_file(cfg.output_dir / (name + "_fixed_points.csv"), fp_csv.str());

        CsvTable cob_csv({"start", "step", "x", "y"});
        svg::Plot plot(std::string("Fixed-point iteration: f(x) = ") + rm.map.description, "x", "f(x)");
        plot.line(fpts, "#1f77b4", "f(x)", 2.0).line(ipts, "#7f7f7f", "y = x");
        json cob_json = json::array();
        for (std::size_t c = 0; c < s.starts.size(); ++c) {
            CobwebPath path = cobweb(rm.map, s.starts[c], opts);
            for (std::size_t v = 0; v < path.vertices.size(); ++v) {
                cob_csv.row({path.x0, static_cast<double>(v), path.vertices[v].x, path.vertices[v].y});
            }
            cob_json.push_back({{"x0", path.x0}, {"final", path.final_value}, {"converged", path.converged},
                                {"vertices", path.vertices.size()}});
            plot.line(path.vertices, colors[c % colors.size()], "cobweb x0=" + format_double(path.x0).substr(0, 6), 1.0);
            panel.cobwebs.push_back(std::move(path));
        }
        plot.markers(markers, "black", "fixed points");
        write_text_file(cfg.output_dir / (name + "_cobweb.csv"), cob_csv.str());
        write_text_file(cfg.output_dir / (name + ".svg"), plot.render());
        write_text_file(cfg.output_dir / (name + ".json"),
                        json{{"family", std::string(to_string(s.family))},
                             {"map", rm.map.description},
                             {"fixed_points", to_json(panel.fixed_points)},
                             {"cobwebs", cob_json}}
                                .dump(2));
    }
    return result;
}

// ---- fig2: per-dimension slices of the 2-D coupled network -------------------

struct SliceFixedValues {
    std::size_t dim = 1;       ///< 1-based dimension whose output is plotted
    double other_value = 0.0;  ///< value held by the other coordinate
    std::vector<FixedPointRecord> roots;  ///< every root of f_dim − x on the slice

    [[nodiscard]] std::vector<double> attracting() const {
        std::vector<double> out;
        for (const auto& r : roots)
            if (r.attracting) out.push_back(r.location[0]);
        return out;
    }
};

struct Fig2Result {
    double m = 0.0;
    std::vector<FixedPointCandidate> candidates;
    std::vector<SliceFixedValues> slices;
    double max_deviation_from_reduced = 0.0;  ///< max |f_j(slice) − reduced(x)| over all samples
};

/// One coordinate of the coupled network as a function of coordinate `dim`
/// with the other held fixed. The derivative is exact via the chain rule.
inline ScalarMap network_slice(const LoopedNetwork& net, std::size_t dim, double other_value) {
    return {
        [net, dim, other_value](double x) {
            Vector v(2, other_value);
            v[dim - 1] = x;
            return net.forward(v)[dim - 1];
        },
        [net, dim, other_value](double x) {
            Vector v(2, other_value);
            v[dim - 1] = x;
            const double z = net.pre_activation(v)[dim - 1];
            return net.activation().derivative(z) * net.weights()(dim - 1, dim - 1);
        },
        "coupled network slice",
    };
}

inline Fig2Result reproduce_fig2(const ExperimentConfig& cfg) {
    const LoopedNetwork net = build_coupled_network(Family::Polynomial, 2, cfg.m);
    const ReducedMap rm = reduced_map(Family::Polynomial);

    Fig2Result result;
    result.m = cfg.m;
    result.candidates = enumerate_fixed_points(make_case_study(Family::Polynomial, 2, cfg.m));

    const double lo = -0.6, hi = 1.7;
    constexpr std::size_t samples = 461;
    std::array<double, 2> holds{result.candidates[0].location[0], result.candidates[3].location[0]};

    CsvTable csv({"dim", "other_value", "x", "f", "identity", "reduced"});
    json slices_json = json::array();
    for (std::size_t dim = 1; dim <= 2; ++dim) {
        svg::Plot plot("Coupled network, dimension " + std::to_string(dim) + " (m = " + format_double(cfg.m) + ")",
                       "x" + std::to_string(dim), "f" + std::to_string(dim) + "(x1, x2)");
        std::vector<svg::Point> ident;
        std::vector<svg::Point> marks;
        for (std::size_t h = 0; h < holds.size(); ++h) {
            const double other = holds[h];
            const ScalarMap slice = network_slice(net, dim, other);
            std::vector<svg::Point> pts;
            for (std::size_t k = 0; k < samples; ++k) {
                const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
                const double y = slice.value(x);
                const double red = rm.map.value(x);
                result.max_deviation_from_reduced = std::max(result.max_deviation_from_reduced, std::abs(y - red));
                csv.row({static_cast<double>(dim), other, x, y, x, red});
                pts.push_back({x, y});
                if (h == 0) ident.push_back({x, x});
            }
            SliceFixedValues sfv{dim, other, scan_fixed_points_1d(slice, RegionBox::interval(lo, hi), 10000)};
            for (double v : sfv.attracting()) marks.push_back({v, v});
            slices_json.push_back({{"dim", dim}, {"other_value", other}, {"roots", to_json(sfv.roots)},
                                   {"robust_fixed_values", sfv.attracting()}});
            result.slices.push_back(std::move(sfv));
            plot.line(std::move(pts), h == 0 ? "#2ca02c" : "#17becf",
                      "f" + std::to_string(dim) + ", other = " + format_double(other).substr(0, 6), 2.0);
        }
        plot.line(std::move(ident), "#9467bd", "y = x").markers(std::move(marks), "#d62728", "fixed values");
        write_text_file(cfg.output_dir / ("fig2_dim" + std::to_string(dim) + ".svg"), plot.render());
    }
    write_text_file(cfg.output_dir / "fig2_slices.csv", csv.str());
    write_text_file(cfg.output_dir / "fig2.json",
                    json{{"m", cfg.m},
                         {"candidates", to_json(result.candidates)},
                         {"slices", slices_json},
                         {"max_deviation_from_reduced", result.max_deviation_from_reduced}}
                        .dump(2));
    return result;
}

// ---- fig3: perturbed trajectories for several noise levels --------------------

struct Fig3Trajectory {
    double m = 0.0;  ///< inverse noise level
    Vector noiseless_fixed_point;
    ContractionCertificate certificate;
    IterationTrace trace;
    RobustReport report;
    double final_error = 0.0;

    [[nodiscard]] bool within_bound() const { return final_error <= 20.0 / m; }
};

struct Fig3Result {
    double coupling_m = 0.0;
    Vector x0;
    Vector noiseless_fixed_point;
    std::vector<Fig3Trajectory> trajectories;

    [[nodiscard]] bool ok() const {
        for (const auto& t : trajectories)
            if (!t.report.ok() || !t.within_bound()) return false;
        return true;
    }
};

inline const std::array<double, 3> kFig3NoiseLevels{5.0, 15.0, 100.0};
inline const Vector kFig3Start{0.25, 0.2};

/// One fig3 trajectory on the coupled 2-D polynomial network built with
/// `coupling_m`, perturbed by noise of amplitude 1/m and started at x0 inside
/// [−0.3, 0.3]². K comes from a vector certificate on that box.
inline Fig3Trajectory fig3_trajectory(double coupling_m, double m, std::uint64_t seed, std::size_t steps,
                                      const Vector& x0, double noise_scale = 1.0) {
    const LoopedNetwork net = build_coupled_network(Family::Polynomial, 2, coupling_m);
    const VectorMap f = net.as_map();
    Fig3Trajectory out;
    out.m = m;
    out.noiseless_fixed_point = iterate_to_fixed_point(f, x0, {1e-14, 10000}).final_iterate();
    out.certificate = certify_contraction_vector(net, RegionBox::cube(2, -0.3, 0.3), 201);
    // noise_scale = 0 gives an infinite noise m, i.e. h = 0
    const NoiseModel noise{m / noise_scale, seed, {}};
    out.trace = perturbed_iterate(f, x0, noise, steps);
    out.report = verify_robust(out.trace, out.noiseless_fixed_point, out.certificate.K_hat, m);
    out.final_error = inf_distance(out.trace.final_iterate(), out.noiseless_fixed_point);
    return out;
}

inline Fig3Result reproduce_fig3(const ExperimentConfig& cfg) {
    Fig3Result result;
    result.coupling_m = cfg.m;
    result.x0 = kFig3Start;
    static const std::array<const char*, 3> colors{"#d62728", "#2ca02c", "#1f77b4"};

    CsvTable csv({"m", "t", "x1", "x2", "h1", "h2"});
    svg::Plot plot("Perturbed fixed-point iteration, seed " + std::to_string(cfg.seed), "x1", "x2");
    json runs = json::array();
    for (std::size_t i = 0; i < kFig3NoiseLevels.size(); ++i) {
        const double m = kFig3NoiseLevels[i];
        Fig3Trajectory traj = fig3_trajectory(cfg.m, m, cfg.seed, cfg.steps, result.x0);
        std::vector<svg::Point> pts;
        for (std::size_t t = 0; t < traj.trace.iterates.size(); ++t) {
            const Vector& x = traj.trace.iterates[t];
            const Vector h = t == 0 ? Vector{0.0, 0.0} : (*traj.trace.noise_applied)[t - 1];
            csv.row({m, static_cast<double>(t), x[0], x[1], h[0], h[1]});
            pts.push_back({x[0], x[1]});
        }
        plot.line(std::move(pts), colors[i], "m = " + format_double(m), 1.0);
        runs.push_back({{"m", m},
                        {"K", traj.certificate.K_hat},
                        {"noiseless_fixed_point", traj.noiseless_fixed_point},
                        {"final_iterate", traj.trace.final_iterate()},
                        {"final_error", traj.final_error},
                        {"bound_20_over_m", 20.0 / m},
                        {"within_bound", traj.within_bound()},
                        {"report", to_json(traj.report)}});
        result.trajectories.push_back(std::move(traj));
    }
    result.noiseless_fixed_point = result.trajectories.front().noiseless_fixed_point;
    plot.markers({{result.x0[0], result.x0[1]}}, "#ff0000", "start")
        .markers({{result.noiseless_fixed_point[0], result.noiseless_fixed_point[1]}}, "black", "noiseless fixed point");
    write_text_file(cfg.output_dir / "fig3_trajectories.csv", csv.str());
    write_text_file(cfg.output_dir / "fig3.svg", plot.render());
    write_text_file(cfg.output_dir / "fig3.json",
                    json{{"seed", cfg.seed},
                         {"steps", cfg.steps},
                         {"coupling_m", cfg.m},
                         {"x0", result.x0},
                         {"noiseless_fixed_point", result.noiseless_fixed_point},
                         {"ok", result.ok()},
                         {"runs", runs}}
                        .dump(2));
    return result;
}

}  // namespace fplnn
