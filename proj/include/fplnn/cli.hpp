#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fplnn/caselib.hpp"
#include "fplnn/certify.hpp"
#include "fplnn/experiments.hpp"
#include "fplnn/io.hpp"
#include "fplnn/iterate.hpp"
#include "fplnn/oracle.hpp"
#include "fplnn/robust.hpp"

namespace fplnn::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2 };

struct Options {
    std::string family = "poly";
    std::size_t dim = 1;
    double m = 1000.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    std::string out;
    std::vector<double> region;
    std::vector<double> x0;
    std::optional<double> K;
    std::size_t grid = 0;
    std::size_t steps = 200;
    std::string kind = "coupled";
    std::string mode = "scan";
};

/// --out, then $FPLNN_OUT, then ./fplnn_out
inline std::filesystem::path output_dir(const Options& o) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv("FPLNN_OUT"); env && *env) return env;
    return "fplnn_out";
}

inline std::size_t default_grid(std::size_t d) {
    if (d <= 1) return 10001;
    if (d == 2) return 201;
    return 51;
}

/// Region from --region lo hi (applied to every axis) or the family's first certified interval.
inline RegionBox region_or_default(const Options& o, Family family, std::size_t d) {
    if (o.region.empty()) {
        const RegionBox r = reduced_map(family).regions[0].region;
        return RegionBox::cube(d, r.lower()[0], r.upper()[0]);
    }
    if (o.region.size() != 2) throw InvalidInput("--region expects exactly two numbers: lo hi");
    return RegionBox::cube(d, o.region[0], o.region[1]);
}

inline Vector start_or_default(const Options& o, Family family, std::size_t d) {
    if (o.x0.empty()) return Vector(d, family == Family::Polynomial ? 0.2 : 0.05);
    if (o.x0.size() == 1) return Vector(d, o.x0[0]);
    require_same_size(o.x0.size(), d, "--x0");
    return o.x0;
}

/// Product of the certified intervals containing each coordinate of x, if any.
inline std::optional<RegionBox> certified_box_containing(Family family, const Vector& x) {
    const ReducedMap rm = reduced_map(family);
    Vector lo(x.size()), hi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool found = false;
        for (const auto& ci : rm.regions) {
            if (ci.region.contains(Vector{x[i]})) {
                lo[i] = ci.region.lower()[0];
                hi[i] = ci.region.upper()[0];
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    return RegionBox(lo, hi);
}

/// Vector map for the family: the reduced map when d = 1, else the coupled network.
inline VectorMap family_map(Family family, std::size_t d, double m) {
    if (d == 1) return lift(reduced_map(family).map);
    return build_coupled_network(family, d, m).as_map();
}

inline ContractionCertificate certify_family(Family family, std::size_t d, double m, const RegionBox& region,
                                             std::size_t grid) {
    if (d == 1) return certify_contraction_scalar(reduced_map(family).map, region, grid);
    return certify_contraction_vector(build_coupled_network(family, d, m), region, grid);
}

inline int run_certify(const Options& o, std::ostream& out) {
    const Family family = parse_family(o.family);
    const RegionBox region = region_or_default(o, family, o.dim);
    const std::size_t grid = o.grid ? o.grid : default_grid(o.dim);
    const ContractionCertificate cert = certify_family(family, o.dim, o.m, region, grid);
    const json j = to_json(cert);
    write_text_file(output_dir(o) / "certify.json", j.dump(2));
    out << j.dump(2) << '\n';
    return cert.certifies_contraction() ? kOk : kVerificationFailed;
}

inline int run_iterate(const Options& o, std::ostream& out) {
    const Family family = parse_family(o.family);
    const VectorMap f = family_map(family, o.dim, o.m);
    const Vector x0 = start_or_default(o, family, o.dim);
    const IterationTrace trace = iterate_to_fixed_point(f, x0, {o.tol, o.max_iter});

    std::optional<BoundLedger> ledger;
    json summary{{"T", trace.steps()}, {"converged", trace.converged}, {"final", trace.final_iterate()}};
    const std::optional<RegionBox> box =
        o.region.empty() ? certified_box_containing(family, x0) : std::optional(region_or_default(o, family, o.dim));
    if (box) {
        double K = 0.0;
        if (o.K) {
            K = *o.K;
        } else {
            K = certify_family(family, o.dim, o.m, *box, default_grid(o.dim)).K_hat;
        }
        if (K < 1.0) {
            const Vector p = iterate_to_fixed_point(f, x0, {1e-14, 100000}).final_iterate();
            ledger = banach_ledger(trace, K, p, "tight-iteration tol=1e-14");
            summary["ledger"] = {{"K", K}, {"p", p}, {"violations", ledger->violations()}};
        }
    }
    write_text_file(output_dir(o) / "iterate.csv", trace_to_csv(trace, ledger ? &*ledger : nullptr));
    json full{{"trace", to_json(trace)}};
    if (ledger) full["ledger"] = to_json(*ledger);
    write_text_file(output_dir(o) / "iterate.json", full.dump(2));
    out << summary.dump(2) << '\n';
    return ledger && ledger->violations() > 0 ? kVerificationFailed : kOk;
}

inline int run_robust(const Options& o, std::ostream& out) {
    const Family family = parse_family(o.family);
    const std::size_t d = o.dim;
    // coupling uses the same m as the noise once d > 1; it must exceed d
    const VectorMap f = family_map(family, d, o.m);
    const Vector x0 = start_or_default(o, family, d);
    const NoiseModel noise{o.m, o.seed_set ? o.seed : 7, {}};
    const IterationTrace trace = perturbed_iterate(f, x0, noise, o.steps);

    const Vector p = iterate_to_fixed_point(f, x0, {1e-14, 100000}).final_iterate();
    double K = 0.0;
    if (o.K) {
        K = *o.K;
    } else {
        const std::optional<RegionBox> box = certified_box_containing(family, x0);
        if (!box) throw InvalidInput("robust: x0 lies outside every certified region; pass --K explicitly");
        K = certify_family(family, d, o.m, *box, default_grid(d)).K_hat;
    }
    const RobustReport report = verify_robust(trace, p, K, o.m);
    const std::string csv = trace_to_csv(trace);
    write_text_file(output_dir(o) / "robust.csv", csv);
    write_text_file(output_dir(o) / "robust.json",
                    json{{"seed", noise.seed}, {"steps", o.steps}, {"x0", x0}, {"report", to_json(report)}}.dump(2));
    out << csv;
    return report.ok() ? kOk : kVerificationFailed;
}

inline int run_construct(const Options& o, std::ostream& out) {
    const Family family = parse_family(o.family);
    json j;
    if (o.kind == "coupled") {
        j["spec"] = to_json(make_case_study(family, o.dim, o.m));
        j["network"] = to_json(build_coupled_network(family, o.dim, o.m));
    } else if (o.kind == "dummy") {
        j["network"] = to_json(build_dummy_network(family));
    } else if (o.kind == "ddim") {
        if (family != Family::Exponential) throw InvalidInput("--kind ddim is only defined for --family exp");
        j["network"] = to_json(build_ddim_exp_network(o.dim));
    } else {
        throw InvalidInput("unknown --kind '" + o.kind + "' (expected coupled, dummy or ddim)");
    }
    j["family"] = std::string(to_string(family));
    j["C"] = family_constant(family);
    write_text_file(output_dir(o) / "construct.json", j.dump(2));
    out << j.dump(2) << '\n';
    return kOk;
}

inline int run_enumerate(const Options& o, std::ostream& out) {
    const CaseStudySpec spec = make_case_study(parse_family(o.family), o.dim, o.m);
    const json j{{"spec", to_json(spec)}, {"candidates", to_json(enumerate_fixed_points(spec))}};
    write_text_file(output_dir(o) / "enumerate.json", j.dump(2));
    out << j.dump(2) << '\n';
    return kOk;
}

inline int run_oracle(const Options& o, std::ostream& out) {
    json j;
    int code = kOk;
    if (o.mode == "scan") {
        const Family family = parse_family(o.family);
        const RegionBox region = o.region.empty() ? RegionBox::interval(-2.0, 2.0) : region_or_default(o, family, 1);
        j = to_json(scan_fixed_points_1d(reduced_map(family).map, region, o.grid ? o.grid : 10000, o.tol));
    } else if (o.mode == "grid") {
        const Family family = parse_family(o.family);
        const RegionBox region = o.region.empty() ? RegionBox::cube(o.dim, -0.5, 1.6) : region_or_default(o, family, o.dim);
        j = to_json(grid_fixed_points(family_map(family, o.dim, o.m), region, o.grid ? o.grid : 300, 0.05));
    } else if (o.mode == "textbook") {
        const TextbookReport rep = textbook_examples_check();
        j = {{"success_case", {{"certificate", to_json(rep.success_cert)}, {"fixed_point", rep.success_fixed_point}, {"ok", rep.success_ok}}},
             {"closure_failure", {{"certificate", to_json(rep.closure_fail_cert)}, {"g4", rep.closure_fail_g4}, {"ok", rep.closure_fail_ok}}},
             {"slope_failure", {{"certificate", to_json(rep.slope_fail_cert)}, {"scan_count", rep.slope_fail_scan_count}, {"ok", rep.slope_fail_ok}}},
             {"ok", rep.ok()}};
        code = rep.ok() ? kOk : kVerificationFailed;
    } else {
        throw InvalidInput("unknown --mode '" + o.mode + "' (expected scan, grid or textbook)");
    }
    write_text_file(output_dir(o) / "oracle.json", j.dump(2));
    out << j.dump(2) << '\n';
    return code;
}

inline ExperimentConfig experiment_config(const Options& o, std::uint64_t default_seed) {
    ExperimentConfig cfg;
    cfg.family = parse_family(o.family);
    cfg.d = o.dim;
    cfg.m = o.m;
    cfg.seed = o.seed_set ? o.seed : default_seed;
    cfg.tol = o.tol;
    cfg.max_iter = o.max_iter;
    cfg.steps = o.steps;
    cfg.output_dir = output_dir(o);
    return cfg;
}

inline int run_fig1(const Options& o, std::ostream& out) {
    const Fig1Result r = reproduce_fig1(experiment_config(o, 0));
    json j = json::array();
    for (const auto& panel : r.panels) {
        std::vector<double> locs;
        for (const auto& fp : panel.fixed_points) locs.push_back(fp.location[0]);
        j.push_back({{"family", std::string(to_string(panel.family))}, {"fixed_points", locs}});
    }
    out << j.dump(2) << '\n';
    return kOk;
}

inline int run_fig2(const Options& o, std::ostream& out) {
    const Fig2Result r = reproduce_fig2(experiment_config(o, 0));
    json j{{"m", r.m}, {"max_deviation_from_reduced", r.max_deviation_from_reduced}};
    for (const auto& s : r.slices) j["slices"].push_back({{"dim", s.dim}, {"other_value", s.other_value}, {"fixed", s.attracting()}});
    out << j.dump(2) << '\n';
    return kOk;
}

inline int run_fig3(const Options& o, std::ostream& out) {
    const Fig3Result r = reproduce_fig3(experiment_config(o, 42));
    json j = json::array();
    for (const auto& t : r.trajectories) {
        j.push_back({{"m", t.m}, {"final_error", t.final_error}, {"violations", t.report.violations.size()},
                     {"within_bound", t.within_bound()}});
    }
    out << j.dump(2) << '\n';
    return r.ok() ? kOk : kVerificationFailed;
}

/// Routes a full argv (program name first). Exit 0 on success, 1 on a failed
/// verification or runtime error, 2 on usage errors.
inline int dispatch(const std::vector<std::string>& argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"Fixed-point iteration toolkit for looped neural networks", "fplnn"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--family", o.family, "Activation family: poly or exp")->check(CLI::IsMember({"poly", "exp"}));
        sub->add_option("--dim", o.dim, "Dimension d")->check(CLI::PositiveNumber);
        sub->add_option("--m", o.m, "Coupling m (noise level 1/m for robust; fig3 sweeps noise m = 5, 15, 100)")->check(CLI::PositiveNumber);
        sub->add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t s) { o.seed = s; o.seed_set = true; },
                                                "Noise seed");
        sub->add_option("--tol", o.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", o.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "Output directory (default $FPLNN_OUT or ./fplnn_out)");
    };

    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const Options&, std::ostream&);
    };
    const std::vector<Entry> entries{
        {"certify", "Contraction/closure certificate on a box", run_certify},
        {"iterate", "Noiseless iteration with Banach bound ledger", run_iterate},
        {"robust", "Perturbed iteration with robust bound check", run_robust},
        {"construct", "Build a case-study network", run_construct},
        {"enumerate", "Enumerate and refine the 2^d fixed points", run_enumerate},
        {"oracle", "Brute-force fixed point search", run_oracle},
        {"fig1", "Reduced maps, fixed points and cobwebs", run_fig1},
        {"fig2", "Per-dimension slices of the 2-D coupled network", run_fig2},
        {"fig3", "Perturbed trajectories for m = 5, 15, 100", run_fig3},
    };
    std::vector<std::pair<CLI::App*, const Entry*>> subs;
    for (const Entry& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        common(sub);
        subs.emplace_back(sub, &e);
    }
    auto* certify = subs[0].first;
    certify->add_option("--region", o.region, "Box lo hi (applied to every axis)")->expected(2);
    certify->add_option("--grid", o.grid, "Grid points per axis");
    auto* iterate = subs[1].first;
    iterate->add_option("--x0", o.x0, "Start point (one value or d values)");
    iterate->add_option("--region", o.region, "Certified box lo hi for the ledger")->expected(2);
    iterate->add_option("--K", o.K, "Contraction constant for the ledger");
    auto* robust = subs[2].first;
    robust->add_option("--x0", o.x0, "Start point (one value or d values)");
    robust->add_option("--steps", o.steps, "Number of perturbed steps")->check(CLI::PositiveNumber);
    robust->add_option("--K", o.K, "Contraction constant in [0, 0.95]");
    subs[3].first->add_option("--kind", o.kind, "coupled, dummy or ddim");
    auto* oracle = subs[5].first;
    oracle->add_option("--mode", o.mode, "scan, grid or textbook");
    oracle->add_option("--region", o.region, "Interval / box lo hi")->expected(2);
    oracle->add_option("--grid", o.grid, "Grid points per axis");
    subs[8].first->add_option("--steps", o.steps, "Number of perturbed steps")->check(CLI::PositiveNumber);

    if (argv.size() <= 1) {
        err << app.help();
        return kUsage;
    }
    std::vector<std::string> rest(argv.rbegin(), argv.rend() - 1);
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    for (const auto& [sub, entry] : subs) {
        if (!sub->parsed()) continue;
        try {
            return entry->run(o, out);
        } catch (const InvalidInput& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kVerificationFailed;
        }
    }
    err << app.help();
    return kUsage;
}

}  // namespace fplnn::cli
