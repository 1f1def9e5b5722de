#include <gtest/gtest.h>

#include <cmath>

#include "ivtf/ar.hpp"
#include "ivtf/errors.hpp"
#include "ivtf/quantiles.hpp"
#include "ivtf/rng.hpp"
#include "oracles.hpp"

using namespace ivtf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ModelData raw_sample(Eigen::Index n, std::uint64_t seed, double pi, double rho, int controls = 0)
{
    CounterRng rng(derive_key(seed, 7), 0);
    VectorXd y(n), x(n), z(n);
    MatrixXd w(n, std::max(controls, 1));
    for (Eigen::Index i = 0; i < n; ++i)
    {
        for (int c = 0; c < controls; ++c)
            w(i, c) = c == 0 ? 1.0 : rng.normal();
        z[i] = rng.normal() + (controls > 1 ? 0.4 * w(i, 1) : 0.0);
        const double e1 = rng.normal(), e2 = rng.normal();
        const double v = rho * e1 + std::sqrt(1 - rho * rho) * e2;
        x[i] = pi * z[i] + v + (controls > 1 ? w(i, 1) : 0.0);
        y[i] = 0.7 * x[i] + e1 + (controls > 0 ? 1.0 : 0.0);
    }
    if (controls == 0)
        return ModelData::make(y, x, z);
    return partial_out(ModelData::make(y, x, z, w));
}

// Raw data whose 2SLS summary is exactly (beta_hat, se, f_hat, rho).
ModelData constructed(double beta_hat, double se, double f_hat, double rho, Eigen::Index n = 100)
{
    CounterRng rng(derive_key(3, 3), 0);
    MatrixXd g(n, 3);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < 3; ++j)
            g(i, j) = rng.normal();
    const Eigen::HouseholderQR<MatrixXd> qr(g);
    const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, 3);
    const double root = std::sqrt(static_cast<double>(n - 1));
    const VectorXd z = q.col(0);
    const double pi = f_hat;  // SE(pi) = 1 because v.v = n - 1 and z.z = 1
    const VectorXd v = root * q.col(1);
    const VectorXd x = pi * z + v;
    const double su = se * std::abs(pi) * root;
    const VectorXd u = su * (rho * q.col(1) + std::sqrt(1 - rho * rho) * q.col(2));
    const VectorXd y = beta_hat * x + u;
    return ModelData::make(y, x, z);
}

}  // namespace

TEST(ArRaw, ZeroAtTheEstimate)
{
    const ModelData d = raw_sample(60, 1, 0.4, 0.3);
    const SummaryStats s = estimate_2sls(d);
    EXPECT_NEAR(ar_statistic_raw(d, s.beta_hat), 0.0, 1e-20);
}

TEST(ArRaw, MatchesProjectionOracle)
{
    const ModelData d = raw_sample(20, 2, 0.6, -0.4);
    for (double b0 : {-2.0, 0.0, 0.5, 0.7, 3.0})
    {
        const double expect = oracle::ar_projection(d.y, d.x, d.z, b0);
        EXPECT_NEAR(ar_statistic_raw(d, b0), expect, 1e-12 * std::max(1.0, expect));
    }
}

TEST(ArRaw, SummaryIdentityHoldsOnRawData)
{
    for (std::uint64_t seed = 0; seed < 60; ++seed)
    {
        const double pi = (seed % 2 ? -1.0 : 1.0) * (0.02 + 0.01 * static_cast<double>(seed));
        const double rho = -0.9 + 0.03 * static_cast<double>(seed);
        const ModelData d = raw_sample(150, 100 + seed, pi, rho, seed % 3 == 0 ? 3 : 0);
        const SummaryStats s = estimate_2sls(d);
        for (double b0 : {-1.0, 0.0, 0.7, 2.5})
        {
            const double raw = ar_statistic_raw(d, b0);
            const double sum = ar_statistic_summary(s.t_at(b0), s.f_hat, s.rho_hat);
            EXPECT_NEAR(sum, raw, 1e-9 * std::max(1.0, raw)) << "seed " << seed << " b0 " << b0;
        }
    }
}

TEST(ArSummary, SpotValues)
{
    EXPECT_EQ(ar_statistic_summary(0.0, 3.0, 0.4), 0.0);
    EXPECT_EQ(ar_statistic_summary(0.0, -1.0, -0.9), 0.0);
    EXPECT_NEAR(ar_statistic_summary(1.96, 1e4, 0.0), 3.8416, 1e-4);
    EXPECT_NEAR(ar_statistic_summary(2.0, std::sqrt(10.0), 0.5), 40.0 / (14.0 + 2.0 * std::sqrt(10.0)), 1e-14);
    EXPECT_NEAR(ar_statistic_summary(2.0, std::sqrt(10.0), 0.5), 1.96806, 1e-5);
}

TEST(ArSummary, ConstructedDataReproducesClosedForm)
{
    const ModelData d = constructed(1.0, 0.5, std::sqrt(10.0), 0.5);
    const SummaryStats s = estimate_2sls(d);
    ASSERT_NEAR(s.beta_hat, 1.0, 1e-12);
    ASSERT_NEAR(s.se, 0.5, 1e-12);
    ASSERT_NEAR(s.big_f, 10.0, 1e-10);
    ASSERT_NEAR(s.rho_hat, 0.5, 1e-12);
    EXPECT_NEAR(ar_statistic_raw(d, 0.0), 40.0 / (14.0 + 2.0 * std::sqrt(10.0)), 1e-10);
}

TEST(ArSummary, DegenerateDenominatorThrows)
{
    EXPECT_THROW(ar_statistic_summary(-2.0, 2.0, 1.0), DegenerateSpecificationError);
}

TEST(RecoverRho, RoundTrips)
{
    const double ar = ar_statistic_summary(2.0, std::sqrt(10.0), 0.5);
    EXPECT_NEAR(recover_rho(2.0, std::sqrt(10.0), ar), 0.5, 1e-10);
    CounterRng rng(derive_key(4, 4), 0);
    for (int i = 0; i < 500; ++i)
    {
        const double t = 6 * rng.uniform() - 3;
        const double f = (rng.uniform() < 0.5 ? -1 : 1) * (0.2 + 15 * rng.uniform());
        const double rho = 1.98 * rng.uniform() - 0.99;
        if (std::abs(t) < 1e-3)
            continue;
        EXPECT_NEAR(recover_rho(t, f, ar_statistic_summary(t, f, rho)), rho, 1e-9);
    }
}

TEST(RecoverRho, ZeroStatisticIsNotRecoverable)
{
    EXPECT_THROW(recover_rho(2.0, 3.0, 0.0), NotRecoverableError);
    EXPECT_THROW(recover_rho(0.0, 3.0, 1.0), NotRecoverableError);
    EXPECT_THROW(recover_rho(2.0, 0.0, 1.0), NotRecoverableError);
}

TEST(RecoverRho, OutOfRangeValueIsReturned)
{
    const double ar = 4.0 * 10.0 / (10.0 + 2.0 * 1.2 * std::sqrt(10.0) * 2.0 + 4.0);
    EXPECT_NEAR(recover_rho(2.0, std::sqrt(10.0), ar), 1.2, 1e-10);
}

TEST(ArConfidenceSet, StrongInstrumentLimit)
{
    const auto s = SummaryStats::from_reported(0.3, 2.0, 1e4, 0.0);
    const ConfidenceSet cs = ar_confidence_set(s, 0.95);
    ASSERT_EQ(cs.kind(), ConfidenceSet::Kind::Bounded);
    EXPECT_NEAR(cs.lo(), 0.3 - 1.959964 * 2.0, 1e-4 * 2.0);
    EXPECT_NEAR(cs.hi(), 0.3 + 1.959964 * 2.0, 1e-4 * 2.0);
}

TEST(ArConfidenceSet, WeakInstrumentGivesWholeLine)
{
    const auto s = SummaryStats::from_reported(1.0, 0.5, std::sqrt(2.0), 0.0);
    EXPECT_EQ(ar_confidence_set(s, 0.95).kind(), ConfidenceSet::Kind::WholeLine);
    EXPECT_EQ(oracle::grid_invert_ar(1.0, 0.5, std::sqrt(2.0), 0.0, chi2_1_critical(0.05)).kind, "whole_line");
}

TEST(ArConfidenceSet, ModerateInstrumentMatchesGrid)
{
    const auto s = SummaryStats::from_reported(1.0, 0.5, std::sqrt(5.0), 0.3);
    const ConfidenceSet cs = ar_confidence_set(s, 0.95);
    const auto g = oracle::grid_invert_ar(1.0, 0.5, std::sqrt(5.0), 0.3, chi2_1_critical(0.05));
    ASSERT_EQ(std::string(to_string(cs.kind())), g.kind);
    EXPECT_EQ(g.kind, "bounded");
    EXPECT_NEAR(cs.lo(), g.lo, g.step);
    EXPECT_NEAR(cs.hi(), g.hi, g.step);
}

TEST(ArConfidenceSet, TwoRaysBetweenThresholds)
{
    // c (1 - rho^2) = 2.88 < F = 3.6 < c = 3.84
    const auto s = SummaryStats::from_reported(-0.4, 1.3, std::sqrt(3.6), 0.5);
    const ConfidenceSet cs = ar_confidence_set(s, 0.95);
    const auto g = oracle::grid_invert_ar(-0.4, 1.3, std::sqrt(3.6), 0.5, chi2_1_critical(0.05));
    ASSERT_EQ(cs.kind(), ConfidenceSet::Kind::TwoRays);
    ASSERT_EQ(g.kind, "two_rays");
    EXPECT_NEAR(cs.lo(), g.lo, g.step);
    EXPECT_NEAR(cs.hi(), g.hi, g.step);
    EXPECT_FALSE(cs.length().has_value());
}

TEST(ArConfidenceSet, LinearLimitKeepsOneFiniteEdge)
{
    const double c = chi2_1_critical(0.05);
    SummaryStats s = SummaryStats::from_reported(0.0, 1.0, std::sqrt(c), 0.4);
    s.big_f = c;
    const ConfidenceSet cs = ar_confidence_set(s, 0.95);
    ASSERT_EQ(cs.kind(), ConfidenceSet::Kind::TwoRays);
    EXPECT_TRUE(std::isinf(cs.hi()));
    for (double b0 : {-100.0, -3.0, 0.0, cs.lo() - 1e-6, cs.lo() + 1e-6, 5.0, 100.0})
        EXPECT_EQ(cs.contains(b0), oracle::ar_from_summary(0.0, 1.0, std::sqrt(c), 0.4, b0) <= c) << b0;
}

TEST(ArConfidenceSet, ContainsEstimateAndAgreesWithTest)
{
    CounterRng rng(derive_key(8, 8), 0);
    const double c = chi2_1_critical(0.05);
    for (int i = 0; i < 300; ++i)
    {
        const double bh = 10 * rng.uniform() - 5, se = 0.1 + 3 * rng.uniform();
        const double f = std::sqrt(0.05 + 80 * rng.uniform()) * (rng.uniform() < 0.5 ? -1 : 1);
        const double rho = 2 * rng.uniform() - 1;
        const ConfidenceSet cs = ar_confidence_set(SummaryStats::from_reported(bh, se, f, rho), 0.95);
        EXPECT_TRUE(cs.contains(bh));
        for (int k = 0; k < 20; ++k)
        {
            const double b0 = bh + se * (40 * rng.uniform() - 20);
            const double ar = oracle::ar_from_summary(bh, se, f, rho, b0);
            if (std::abs(ar - c) < 1e-7)
                continue;
            EXPECT_EQ(cs.contains(b0), ar <= c);
        }
    }
}

TEST(ArConfidenceSet, RejectsInvalidInputs)
{
    EXPECT_THROW(ar_confidence_set(SummaryStats::from_reported(0, 1, 3, 1.2), 0.95), DomainError);
    EXPECT_THROW(SummaryStats::from_reported(0, 0, 3, 0.1), DomainError);
    EXPECT_THROW(ConfidenceSet::bounded(2, 1, 0.95), DomainError);
    EXPECT_THROW(ConfidenceSet::two_rays(1, 1, 0.95), DomainError);
}
