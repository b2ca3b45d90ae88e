#include <gtest/gtest.h>

#include "fplnn/caselib.hpp"
#include "fplnn/certify.hpp"
#include "fplnn/iterate.hpp"
#include "test_support.hpp"

namespace fplnn {
namespace {

TEST(Iterate, PolyFromQuarterConvergesToZero) {
    const auto rm = reduced_map(Family::Polynomial);
    const auto trace = iterate_to_fixed_point(rm.map, 0.25, {1e-12, 10000});
    ASSERT_TRUE(trace.converged);
    EXPECT_LE(std::abs(trace.final_iterate()[0]), 1e-10);
}

TEST(Iterate, ExpFromMinusPointNineFive) {
    const auto rm = reduced_map(Family::Exponential);
    const auto trace = iterate_to_fixed_point(rm.map, -0.95, {1e-12, 10000});
    ASSERT_TRUE(trace.converged);
    EXPECT_NEAR(trace.final_iterate()[0], -0.9104, 1e-3);
    EXPECT_NEAR(trace.final_iterate()[0], testing::kExpP2, 1e-10);
}

TEST(Iterate, IdentityConvergesInOneStep) {
    const ScalarMap id{[](double x) { return x; }, [](double) { return 1.0; }, "id"};
    const auto trace = iterate_to_fixed_point(id, 3.7, {1e-12, 10000});
    EXPECT_TRUE(trace.converged);
    EXPECT_EQ(trace.steps(), 1u);
    EXPECT_EQ(trace.residuals[0], 0.0);
    EXPECT_EQ(trace.final_iterate()[0], 3.7);
}

TEST(Iterate, ReportsNonConvergenceAtCap) {
    const ScalarMap flip{[](double x) { return -x; }, [](double) { return -1.0; }, "flip"};
    const auto trace = iterate_to_fixed_point(flip, 1.0, {1e-12, 7});
    EXPECT_FALSE(trace.converged);
    EXPECT_EQ(trace.steps(), 7u);
}

TEST(Iterate, RejectsBadOptionsAndDiverges) {
    const ScalarMap id{[](double x) { return x; }, [](double) { return 1.0; }, "id"};
    EXPECT_THROW(iterate_to_fixed_point(id, 0.0, {0.0, 10}), InvalidInput);
    EXPECT_THROW(iterate_to_fixed_point(id, 0.0, {1e-3, 0}), InvalidInput);
    const ScalarMap grow{[](double x) { return 10.0 * x; }, [](double) { return 10.0; }, "grow"};
    try {
        iterate_to_fixed_point(grow, 1.0, {1e-12, 100});
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.iteration(), 13u);
    }
}

TEST(Ledger, ConvergedPolyTraceHasNoViolations) {
    const auto rm = reduced_map(Family::Polynomial);
    const auto trace = iterate_to_fixed_point(rm.map, 0.25, {1e-12, 10000});
    const auto ledger = banach_ledger(trace, 0.9, Vector{0.0}, "oracle");
    EXPECT_EQ(ledger.violations(), 0u);
    EXPECT_EQ(ledger.p_source, "oracle");
}

TEST(Ledger, RecordsMatchDirectArithmetic) {
    const ScalarMap half{[](double x) { return 0.5 * x + 1.0; }, [](double) { return 0.5; }, "half"};
    const auto trace = iterate_to_fixed_point(half, 0.0, {1e-3, 100});
    const auto ledger = banach_ledger(trace, 0.5, Vector{2.0});
    ASSERT_GE(ledger.records.size(), 3u);
    // x = 0, 1, 1.5, 1.75, ...
    const auto& r2 = ledger.records[1];
    EXPECT_EQ(r2.t, 2u);
    EXPECT_DOUBLE_EQ(r2.err, 0.5);
    EXPECT_DOUBLE_EQ(r2.apriori, 0.25 / 0.5 * 1.0);
    EXPECT_DOUBLE_EQ(r2.aposteriori, 0.5 / 0.5 * 0.5);
    EXPECT_DOUBLE_EQ(r2.onestep, 0.5 * 1.0);
    EXPECT_EQ(ledger.violations(), 0u);
}

TEST(Ledger, DetectsFalseCertificate) {
    const ScalarMap id{[](double x) { return x; }, [](double) { return 1.0; }, "id"};
    IterationTrace trace;
    trace.start(Vector{1.0});
    for (int i = 0; i < 5; ++i) trace.push(Vector{1.0});
    const auto ledger = banach_ledger(trace, 0.5, Vector{0.0});
    EXPECT_GT(ledger.violations(), 0u);
    EXPECT_FALSE(ledger.records[0].onestep_ok);
}

TEST(Ledger, SingleStepAtFixedPoint) {
    const auto rm = reduced_map(Family::Polynomial);
    const auto trace = iterate_to_fixed_point(rm.map, 0.0, {1e-12, 10});
    ASSERT_EQ(trace.steps(), 1u);
    const auto ledger = banach_ledger(trace, 0.9, Vector{0.0});
    ASSERT_EQ(ledger.records.size(), 1u);
    EXPECT_EQ(ledger.records[0].err, 0.0);
    EXPECT_EQ(ledger.violations(), 0u);
}

TEST(Ledger, RejectsKAtLeastOne) {
    IterationTrace trace;
    trace.start(Vector{0.0});
    EXPECT_THROW(banach_ledger(trace, 1.0, Vector{0.0}), HypothesisViolation);
    EXPECT_THROW(banach_ledger(trace, -0.1, Vector{0.0}), HypothesisViolation);
    EXPECT_THROW(banach_ledger(IterationTrace{}, 0.5, Vector{0.0}), InvalidInput);
}

TEST(Ledger, OneRecordPerStep) {
    auto gen = testing::rng(5);
    const auto rm = reduced_map(Family::Exponential);
    for (int s = 0; s < 20; ++s) {
        const double x0 = testing::uniform(gen, -1.01, -0.81);
        const auto trace = iterate_to_fixed_point(rm.map, x0, {1e-12, 10000});
        const auto ledger = banach_ledger(trace, 0.85, Vector{testing::kExpP2});
        ASSERT_EQ(ledger.records.size(), trace.steps());
        for (std::size_t t = 0; t < ledger.records.size(); ++t) EXPECT_EQ(ledger.records[t].t, t + 1);
    }
}

struct Region {
    Family family;
    int index;
};

class CertifiedRegion : public ::testing::TestWithParam<Region> {};

TEST_P(CertifiedRegion, UniqueLimitFromRandomStarts) {
    const auto rm = reduced_map(GetParam().family);
    const auto& box = rm.regions[GetParam().index].region;
    const auto cert = certify_contraction_scalar(rm.map, box, 100000);
    ASSERT_TRUE(cert.closure_ok);
    if (!cert.certifies_contraction()) GTEST_SKIP() << "no certificate on this box";
    auto gen = testing::rng(100 + GetParam().index);
    std::vector<double> limits;
    for (int s = 0; s < 25; ++s) {
        const double x0 = testing::uniform(gen, box.lower()[0], box.upper()[0]);
        const auto trace = iterate_to_fixed_point(rm.map, x0, {1e-13, 10000});
        ASSERT_TRUE(trace.converged);
        limits.push_back(trace.final_iterate()[0]);
    }
    for (double a : limits)
        for (double b : limits) EXPECT_LE(std::abs(a - b), 1e-8);
}

TEST_P(CertifiedRegion, ResidualEnvelope) {
    const auto rm = reduced_map(GetParam().family);
    const auto& box = rm.regions[GetParam().index].region;
    const auto cert = certify_contraction_scalar(rm.map, box, 100000);
    auto gen = testing::rng(200 + GetParam().index);
    for (int s = 0; s < 25; ++s) {
        const double x0 = testing::uniform(gen, box.lower()[0], box.upper()[0]);
        const auto trace = iterate_to_fixed_point(rm.map, x0, {1e-13, 10000});
        for (std::size_t t = 1; t < trace.residuals.size(); ++t) {
            EXPECT_LE(trace.residuals[t], cert.K_hat * trace.residuals[t - 1] + 1e-12);
        }
    }
}

TEST_P(CertifiedRegion, LedgerHoldsWithCertifiedK) {
    const auto rm = reduced_map(GetParam().family);
    const auto& box = rm.regions[GetParam().index].region;
    const auto cert = certify_contraction_scalar(rm.map, box, 100000);
    const double p = rm.regions[GetParam().index].p_nominal == 0.0
                         ? 0.0
                         : iterate_to_fixed_point(rm.map, rm.regions[GetParam().index].p_nominal, {1e-14, 10000})
                               .final_iterate()[0];
    auto gen = testing::rng(300 + GetParam().index);
    for (int s = 0; s < 25; ++s) {
        const double x0 = testing::uniform(gen, box.lower()[0], box.upper()[0]);
        const auto trace = iterate_to_fixed_point(rm.map, x0, {1e-12, 10000});
        EXPECT_EQ(banach_ledger(trace, cert.K_hat, Vector{p}).violations(), 0u) << "x0 = " << x0;
    }
}

INSTANTIATE_TEST_SUITE_P(AllFour, CertifiedRegion,
                         ::testing::Values(Region{Family::Polynomial, 0}, Region{Family::Polynomial, 1},
                                           Region{Family::Exponential, 0}, Region{Family::Exponential, 1}));

TEST(RateEstimate, PolyNearSecondFixedPoint) {
    const auto rm = reduced_map(Family::Polynomial);
    const auto trace = iterate_to_fixed_point(rm.map, 1.35, {1e-13, 10000});
    const double rate = geometric_rate_estimate(trace);
    EXPECT_LE(rate, 0.93);
    // local rate is |f'(p2)|
    EXPECT_NEAR(rate, std::abs(rm.map.derivative(testing::kPolyP2)), 1e-3);
}

TEST(RateEstimate, ExpNearZero) {
    const auto rm = reduced_map(Family::Exponential);
    const auto trace = iterate_to_fixed_point(rm.map, 0.08, {1e-13, 10000});
    EXPECT_LE(geometric_rate_estimate(trace), 0.5);
}

TEST(RateEstimate, ConstantMapIsZero) {
    const ScalarMap c{[](double) { return 0.7; }, [](double) { return 0.0; }, "const"};
    const auto trace = iterate_to_fixed_point(c, 3.0, {1e-12, 100});
    EXPECT_EQ(geometric_rate_estimate(trace), 0.0);
}

TEST(RateEstimate, RejectsUnconvergedOrShortTraces) {
    const ScalarMap flip{[](double x) { return -x; }, [](double) { return -1.0; }, "flip"};
    EXPECT_THROW(geometric_rate_estimate(iterate_to_fixed_point(flip, 1.0, {1e-12, 20})), InsufficientData);
    const ScalarMap id{[](double x) { return x; }, [](double) { return 1.0; }, "id"};
    EXPECT_THROW(geometric_rate_estimate(iterate_to_fixed_point(id, 1.0, {1e-12, 20})), InsufficientData);
}

}  // namespace
}  // namespace fplnn
