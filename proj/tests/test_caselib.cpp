#include <gtest/gtest.h>

#include <set>

#include "fplnn/caselib.hpp"
#include "fplnn/oracle.hpp"
#include "test_support.hpp"

namespace fplnn {
namespace {

double poly_reduced(double x) { return -0.4 * std::pow(x, 4) + 1.5 * x * x; }
double exp_reduced(double x) { return std::exp(x * x * x - 2.0 * x * x) - 1.0; }

TEST(Constants, MatchReferenceValues) {
    EXPECT_NEAR(poly_constant(), testing::kPolyC, 1e-14);
    EXPECT_NEAR(poly_constant(), std::sqrt((15.0 + std::sqrt(65.0)) / 8.0), 1e-14);
    EXPECT_NEAR(exp_constant(), testing::kExpC, 1e-14);
    EXPECT_NEAR(exp_constant(), -2.15, 1e-3);
}

TEST(Constants, SolveTheirDefiningEquations) {
    const double P = poly_constant();
    const double E = exp_constant();
    EXPECT_LE(std::abs(4 * std::pow(P, 4) - 15 * P * P + 10), 1e-12);
    EXPECT_LE(std::abs(E * E * E + 2 * E * E + std::log(2.0)), 1e-12);
    EXPECT_GT(P, 0.0);
}

TEST(Family, ParsesNames) {
    EXPECT_EQ(parse_family("poly"), Family::Polynomial);
    EXPECT_EQ(parse_family("exp"), Family::Exponential);
    EXPECT_EQ(to_string(Family::Exponential), "exp");
    EXPECT_THROW(parse_family("tanh"), InvalidInput);
}

TEST(PolyActivation, Examples) {
    const double C = poly_constant();
    const Activation g = poly_activation(C);
    EXPECT_EQ(g.value(0.0), 1.0);
    for (double x : {-1.0, 0.5, 1.4}) EXPECT_NEAR(g.value(x + C), poly_reduced(x), 1e-10);
    EXPECT_LE(testing::rel_error(g.derivative(C), testing::central_difference(g.value, C)), 1e-6);
}

TEST(ExpActivation, Examples) {
    const double C = exp_constant();
    const Activation g = exp_activation(C);
    for (double x : {-0.9, 0.0, 0.1}) EXPECT_NEAR(g.value(x + C), exp_reduced(x), 1e-9);
    EXPECT_NEAR(g.value(C), 0.0, 1e-14);
    EXPECT_NEAR(g.value(0.0), 1.0, 1e-15);
    EXPECT_LE(testing::rel_error(g.derivative(C), testing::central_difference(g.value, C)), 1e-6);
}

TEST(ShiftIdentity, PolynomialOverTenThousandSamples) {
    const double C = poly_constant();
    const Activation g = poly_activation(C);
    auto gen = testing::rng(1);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = testing::uniform(gen, -2.0, 2.0);
        worst = std::max(worst, std::abs(g.value(x + C) - poly_reduced(x)));
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(ShiftIdentity, ExponentialOverTenThousandSamples) {
    const double C = exp_constant();
    const Activation g = exp_activation(C);
    auto gen = testing::rng(2);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = testing::uniform(gen, -1.2, 0.3);
        worst = std::max(worst, std::abs(g.value(x + C) - exp_reduced(x)));
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(CoupledNetwork, OneDimensionIsTheShiftedActivation) {
    for (Family f : {Family::Polynomial, Family::Exponential}) {
        const auto net = build_coupled_network(f, 1, 7.0);
        EXPECT_EQ(net.weights(), Matrix::from_rows({{1.0}}));
        EXPECT_EQ(net.bias(), Vector{family_constant(f)});
        for (double x : {-0.3, 0.0, 0.4}) {
            EXPECT_EQ(net.forward(Vector{x})[0], family_activation(f).value(x + family_constant(f)));
        }
    }
}

TEST(CoupledNetwork, ResidueAtOriginBelowOneOverM) {
    const auto net = build_coupled_network(Family::Polynomial, 3, 1000.0);
    EXPECT_LE(inf_norm(net.forward(Vector(3, 0.0))), 1.0 / 1000.0);
}

TEST(CoupledNetwork, WeightLayout) {
    const auto net = build_coupled_network(Family::Exponential, 2, 10.0);
    EXPECT_EQ(net.weights()(0, 1), 0.01);
    EXPECT_EQ(net.weights()(1, 0), 0.01);
    EXPECT_EQ(net.weights()(0, 0), 1.0);
    EXPECT_EQ(net.weights()(1, 1), 1.0);
}

TEST(CoupledNetwork, RejectsSmallM) {
    EXPECT_THROW(build_coupled_network(Family::Polynomial, 3, 3.0), InvalidInput);
    EXPECT_THROW(build_coupled_network(Family::Polynomial, 0, 3.0), InvalidInput);
    EXPECT_NO_THROW(build_coupled_network(Family::Polynomial, 3, 3.5));
}

TEST(DummyNetwork, PolynomialCarriesReducedMap) {
    const auto net = build_dummy_network(Family::Polynomial);
    const Vector y = net.forward(Vector{0.2, 1.0, 1.0});
    EXPECT_NEAR(y[0], poly_reduced(0.2), 1e-12);
    EXPECT_EQ(y[1], 1.0);
    EXPECT_EQ(y[2], 1.0);
}

TEST(DummyNetwork, PolynomialIterationReachesSecondFixedPoint) {
    const auto net = build_dummy_network(Family::Polynomial);
    const auto trace = iterate_to_fixed_point(net.as_map(), Vector{1.35, 1.0, 1.0}, {1e-12, 10000});
    ASSERT_TRUE(trace.converged);
    EXPECT_NEAR(trace.final_iterate()[0], 1.4028, 1e-3);
    EXPECT_EQ(trace.final_iterate()[1], 1.0);
}

TEST(DummyNetwork, ExponentialInnerProduct) {
    const auto net = build_dummy_network(Family::Exponential);
    const double C = exp_constant();
    for (double x : {-0.9, 0.0, 0.25}) {
        EXPECT_EQ(net.pre_activation(Vector{x, 1.0, 1.0})[0], x + 1.0 + (C - 1.0));
        EXPECT_NEAR(net.pre_activation(Vector{x, 1.0, 1.0})[0], x + C, 1e-15);
    }
    const Vector y = net.forward(Vector{-0.5, 1.0, 1.0});
    EXPECT_NEAR(y[1], 1.0, 1e-15);
    EXPECT_NEAR(y[0], exp_reduced(-0.5), 1e-12);
}

TEST(DdimExpNetwork, InnerProductIsShift) {
    const double C = exp_constant();
    for (std::size_t d : {2u, 3u, 5u, 9u}) {
        const auto net = build_ddim_exp_network(d);
        for (double x : {-0.9, 0.0, 0.3}) {
            Vector in(d, 1.0);
            in[0] = x;
            EXPECT_NEAR(net.pre_activation(in)[0], x + C, 1e-14) << "d = " << d;
        }
    }
}

TEST(DdimExpNetwork, Examples) {
    Vector in(5, 1.0);
    in[0] = 0.0;
    EXPECT_NEAR(build_ddim_exp_network(5).forward(in)[0], 0.0, 1e-14);
    const auto two = build_ddim_exp_network(2);
    EXPECT_EQ(two.weights()(0, 0), 1.0);
    EXPECT_EQ(two.weights()(0, 1), exp_constant());
    EXPECT_THROW(build_ddim_exp_network(1), InvalidInput);
}

TEST(ReducedMap, PolynomialFixedPoints) {
    const auto rm = reduced_map(Family::Polynomial);
    EXPECT_EQ(rm.map.value(0.0), 0.0);
    EXPECT_NEAR(rm.map.value(testing::kPolyP2), testing::kPolyP2, 1e-14);
    EXPECT_NEAR(rm.regions[1].p_nominal, 1.4028, 1e-3);
    for (double x : {-1.0, 0.3, 1.2}) EXPECT_DOUBLE_EQ(rm.map.value(x), poly_reduced(x));
}

TEST(ReducedMap, ExponentialFixedPoints) {
    const auto rm = reduced_map(Family::Exponential);
    EXPECT_EQ(rm.map.value(0.0), 0.0);
    EXPECT_NEAR(rm.map.value(testing::kExpP2), testing::kExpP2, 1e-14);
    EXPECT_NEAR(rm.regions[1].p_nominal, -0.9104, 1e-3);
}

TEST(ReducedMap, RegionMetadata) {
    const auto p = reduced_map(Family::Polynomial);
    EXPECT_EQ(p.regions[0].region.lower()[0], -0.3);
    EXPECT_EQ(p.regions[0].K_claimed, 0.9);
    EXPECT_EQ(p.regions[1].region.upper()[0], 1.5028);
    const auto e = reduced_map(Family::Exponential);
    EXPECT_EQ(e.regions[0].K_claimed, 0.5);
    EXPECT_EQ(e.regions[1].region.lower()[0], -1.010);
    EXPECT_EQ(e.regions[1].K_claimed, 0.85);
}

TEST(ReducedMap, PolynomialImageOfSecondRegion) {
    const auto rm = reduced_map(Family::Polynomial);
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k <= 100000; ++k) {
        const double y = rm.map.value(1.302 + 0.2 * k / 100000.0);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    EXPECT_GE(lo, 1.34);
    EXPECT_LE(hi, 1.41);
    // maximum is at the critical point sqrt(1.875)
    EXPECT_NEAR(hi, poly_reduced(std::sqrt(1.875)), 1e-9);
}

TEST(Enumerate, OneDimensionGivesReducedFixedPoints) {
    const auto cands = enumerate_fixed_points(make_case_study(Family::Exponential, 1, 10.0));
    ASSERT_EQ(cands.size(), 2u);
    EXPECT_NEAR(cands[0].location[0], 0.0, 1e-12);
    EXPECT_NEAR(cands[1].location[0], testing::kExpP2, 1e-12);
}

TEST(Enumerate, TwoDimensionPolynomial) {
    const auto spec = make_case_study(Family::Polynomial, 2, 1000.0);
    const auto cands = enumerate_fixed_points(spec);
    ASSERT_EQ(cands.size(), 4u);
    const double targets[2] = {0.0, 1.4028};
    for (const auto& c : cands) {
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_EQ(c.choice[j], static_cast<int>((c.index >> j) & 1U));
            EXPECT_NEAR(c.location[j], targets[c.choice[j]], 2e-3);
        }
    }
    // coordinate 1 is the fast bit
    EXPECT_EQ(cands[1].choice, (std::vector<int>{1, 0}));
}

TEST(Enumerate, ThreeDimensionsAgreeWithGridOracle) {
    const auto spec = make_case_study(Family::Polynomial, 3, 1e4);
    const auto cands = enumerate_fixed_points(spec);
    ASSERT_EQ(cands.size(), 8u);
    const auto net = build_coupled_network(Family::Polynomial, 3, 1e4);
    const auto grid = grid_fixed_points(net.as_map(), RegionBox::cube(3, -0.5, 1.6), 106, 0.05);
    std::vector<FixedPointRecord> attracting;
    for (const auto& r : grid)
        if (r.attracting) attracting.push_back(r);
    ASSERT_EQ(attracting.size(), 8u);
    for (const auto& c : cands) {
        const bool matched = std::any_of(attracting.begin(), attracting.end(), [&](const FixedPointRecord& r) {
            return inf_distance(r.location, c.location) <= 1e-2;
        });
        EXPECT_TRUE(matched) << "candidate " << c.index;
    }
}

TEST(Enumerate, CandidatesAreValid) {
    for (Family f : {Family::Polynomial, Family::Exponential}) {
        for (std::size_t d : {1u, 2u, 3u, 4u}) {
            for (double m : {10.0, 1000.0}) {
                const auto net = build_coupled_network(f, d, m);
                for (const auto& c : enumerate_fixed_points(make_case_study(f, d, m))) {
                    EXPECT_LE(inf_distance(net.forward(c.location), c.location), 1.0 / m + 1e-8);
                    EXPECT_EQ(c.residual, inf_distance(net.forward(c.location), c.location));
                }
            }
        }
    }
}

TEST(Enumerate, BasinsAreSeparated) {
    for (Family f : {Family::Polynomial, Family::Exponential}) {
        for (std::size_t d : {1u, 2u, 3u}) {
            for (double m : {1e3, 1e4}) {
                const auto net = build_coupled_network(f, d, m);
                for (const auto& c : enumerate_fixed_points(make_case_study(f, d, m))) {
                    Vector x = c.location;
                    for (double& v : x) v += 0.05;
                    EXPECT_LE(inf_distance(net.run_loops(x, 500), c.location), 1e-6)
                        << to_string(f) << " d=" << d << " m=" << m << " candidate " << c.index;
                }
            }
        }
    }
}

TEST(Enumerate, CandidatesAreDistinct) {
    const auto cands = enumerate_fixed_points(make_case_study(Family::Exponential, 4, 100.0));
    ASSERT_EQ(cands.size(), 16u);
    for (std::size_t i = 0; i < cands.size(); ++i)
        for (std::size_t j = i + 1; j < cands.size(); ++j)
            EXPECT_GT(inf_distance(cands[i].location, cands[j].location), 0.5);
}

TEST(Enumerate, Rejections) {
    EXPECT_THROW(make_case_study(Family::Polynomial, 2, 2.0), InvalidInput);
    auto spec = make_case_study(Family::Polynomial, 2, 1000.0);
    spec.d = 21;
    EXPECT_THROW(enumerate_fixed_points(spec), InvalidInput);
}

TEST(Enumerate, RefinementFailureNamesCandidate) {
    // m barely above d: the coupling pushes candidates out of their boxes
    auto spec = make_case_study(Family::Polynomial, 2, 2.01);
    try {
        enumerate_fixed_points(spec);
        FAIL() << "expected refinement failure";
    } catch (const RefinementFailure& e) {
        EXPECT_LT(e.candidate(), 4u);
    }
}

TEST(CaseBounds, BothForms) {
    const auto b = case_error_bounds(0.9, 0.6, 10, 100.0);
    EXPECT_NEAR(b.statement, std::pow(0.9, 10) * 0.6 + 0.2, 1e-15);
    EXPECT_NEAR(b.with_c, std::pow(0.9, 10) * 0.6 * 10.0 + 0.2, 1e-14);
    EXPECT_GE(b.with_c, b.statement);
    EXPECT_THROW(case_error_bounds(1.0, 0.6, 1, 100.0), HypothesisViolation);
}

}  // namespace
}  // namespace fplnn
