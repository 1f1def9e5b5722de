#include <gtest/gtest.h>

#include <cmath>

#include "ivtf/errors.hpp"
#include "ivtf/iv_core.hpp"
#include "ivtf/rng.hpp"
#include "oracles.hpp"

using namespace ivtf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Raw
{
    VectorXd y, x, z;
    MatrixXd w;
};

Raw random_raw(Eigen::Index n, int controls, std::uint64_t seed, double pi = 0.3, double rho = 0.4)
{
    CounterRng rng(derive_key(seed, 99), 0);
    Raw r{VectorXd(n), VectorXd(n), VectorXd(n), MatrixXd(n, controls)};
    for (Eigen::Index i = 0; i < n; ++i)
    {
        for (int c = 0; c < controls; ++c)
            r.w(i, c) = c == 0 ? 1.0 : rng.normal();
        const double wsum = controls > 1 ? r.w.row(i).tail(controls - 1).sum() : 0.0;
        r.z[i] = rng.normal() + 0.5 * wsum;
        const double e1 = rng.normal(), e2 = rng.normal();
        const double u = e1, v = rho * e1 + std::sqrt(1 - rho * rho) * e2;
        r.x[i] = pi * r.z[i] + v + 0.3 * wsum;
        r.y[i] = 1.5 * r.x[i] + u - 0.2 * wsum + (controls > 0 ? 2.0 : 0.0);
    }
    return r;
}

long double dot(const VectorXd& a, const VectorXd& b)
{
    long double s = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        s += static_cast<long double>(a[i]) * b[i];
    return s;
}

}  // namespace

TEST(PartialOut, NoControlsIsIdentity)
{
    const Raw r = random_raw(20, 0, 1);
    const ModelData d = partial_out(ModelData::make(r.y, r.x, r.z));
    EXPECT_EQ(d.y, r.y);
    EXPECT_EQ(d.x, r.x);
    EXPECT_EQ(d.z, r.z);
    EXPECT_EQ(d.absorbed_controls, 0);
}

TEST(PartialOut, InterceptDemeans)
{
    VectorXd y(3), x(3), z(3);
    y << 1, 2, 3;
    x << 0.5, -1, 2;
    z << 1, 0, 4;
    const ModelData d = partial_out(ModelData::make(y, x, z, MatrixXd::Ones(3, 1)));
    EXPECT_NEAR(d.y[0], -1.0, 1e-15);
    EXPECT_NEAR(d.y[1], 0.0, 1e-15);
    EXPECT_NEAR(d.y[2], 1.0, 1e-15);
    EXPECT_EQ(d.absorbed_controls, 1);
    EXPECT_FALSE(d.w.has_value());
}

TEST(PartialOut, MatchesNormalEquationsAndIsIdempotent)
{
    const Raw r = random_raw(50, 4, 2);
    const ModelData d = partial_out(ModelData::make(r.y, r.x, r.z, r.w));
    const VectorXd oy = oracle::residualize(r.y, r.w);
    const VectorXd oz = oracle::residualize(r.z, r.w);
    EXPECT_LT((d.y - oy).norm(), 1e-10 * r.y.norm());
    EXPECT_LT((d.z - oz).norm(), 1e-10 * r.z.norm());
    const ModelData twice = partial_out(ModelData::make(d.y, d.x, d.z, r.w));
    EXPECT_LT((twice.y - d.y).norm(), 1e-10 * d.y.norm());
    EXPECT_LT((twice.x - d.x).norm(), 1e-10 * d.x.norm());
}

TEST(PartialOut, RankDeficientControlsThrow)
{
    Raw r = random_raw(30, 3, 3);
    r.w.col(2) = 2.0 * r.w.col(1);
    EXPECT_THROW(partial_out(ModelData::make(r.y, r.x, r.z, r.w)), SingularDesignError);
}

TEST(PartialOut, InstrumentInControlSpanThrows)
{
    Raw r = random_raw(30, 3, 4);
    r.z = r.w.col(1) - 3.0 * r.w.col(0);
    EXPECT_THROW(partial_out(ModelData::make(r.y, r.x, r.z, r.w)), NoIdentificationError);
}

TEST(ModelData, RejectsMismatchedLengths)
{
    EXPECT_THROW(ModelData::make(VectorXd::Ones(5), VectorXd::Ones(4), VectorXd::Ones(5)), DomainError);
    EXPECT_THROW(ModelData::make(VectorXd::Ones(1), VectorXd::Ones(1), VectorXd::Ones(1)), DomainError);
}

TEST(Estimate2sls, ExactFitIsDegenerate)
{
    const Raw r = random_raw(25, 0, 5);
    const SummaryStats s = estimate_2sls(ModelData::make(2.0 * r.x, r.x, r.z));
    EXPECT_NEAR(s.beta_hat, 2.0, 1e-12);
    EXPECT_EQ(s.rho_hat, 0.0);
    EXPECT_TRUE(s.degenerate);
}

TEST(Estimate2sls, ZeroInstrumentMomentsThrow)
{
    const Raw r = random_raw(10, 0, 6);
    EXPECT_THROW(estimate_2sls(ModelData::make(r.y, r.x, VectorXd::Zero(10))), NoIdentificationError);
    VectorXd z = VectorXd::Zero(10), x = VectorXd::Zero(10);
    z[0] = 1.0;
    x[1] = 1.0;
    EXPECT_THROW(estimate_2sls(ModelData::make(r.y, x, z)), NoIdentificationError);
    MatrixXd w = MatrixXd::Ones(10, 1);
    EXPECT_THROW(estimate_2sls(ModelData::make(r.y, r.x, r.z, w)), DomainError);
}

// n = 30 with integer data whose sums can be checked by hand:
// z = 1..30, x = z + (-1)^i, y = 3x + (i mod 3 - 1).
TEST(Estimate2sls, HandCheckableFixture)
{
    const int n = 30;
    VectorXd y(n), x(n), z(n);
    for (int i = 0; i < n; ++i)
    {
        z[i] = i + 1;
        x[i] = z[i] + (i % 2 == 0 ? 1.0 : -1.0);
        y[i] = 3.0 * x[i] + (i % 3 - 1);
    }
    // sum z^2 = 9455, sum zx = 9455 - 15 = 9440, sum zy = 3 * 9440 + sum z (i mod 3 - 1) = 28320 + 20.
    EXPECT_EQ(z.squaredNorm(), 9455.0);
    EXPECT_EQ(z.dot(x), 9440.0);
    EXPECT_EQ(z.dot(y), 28340.0);
    const SummaryStats s = estimate_2sls(ModelData::make(y, x, z));
    EXPECT_NEAR(s.beta_hat, 28340.0 / 9440.0, 1e-12);
    EXPECT_NEAR(s.beta_hat, oracle::ratio_of_sums_beta(y, x, z), 1e-12);
}

TEST(Estimate2sls, MatchesIndependentFormulas)
{
    for (std::uint64_t seed = 10; seed < 30; ++seed)
    {
        const Raw r = random_raw(200, 0, seed);
        const SummaryStats s = estimate_2sls(ModelData::make(r.y, r.x, r.z));
        const long double zz = dot(r.z, r.z), zx = dot(r.z, r.x), zy = dot(r.z, r.y);
        const long double b = zy / zx;
        VectorXd u = r.y - static_cast<double>(b) * r.x;
        VectorXd v = r.x - static_cast<double>(zx / zz) * r.z;
        const long double uu = dot(u, u), vv = dot(v, v), uv = dot(u, v);
        const long double se = std::sqrt(uu / 199.0L * zz) / std::fabs(zx);
        const long double f = (zx / zz) / std::sqrt(vv / 199.0L / zz);
        EXPECT_NEAR(s.beta_hat, static_cast<double>(b), 1e-12 * std::fabs(static_cast<double>(b)));
        EXPECT_NEAR(s.se, static_cast<double>(se), 1e-10 * static_cast<double>(se));
        EXPECT_NEAR(s.f_hat, static_cast<double>(f), 1e-10 * std::fabs(static_cast<double>(f)));
        EXPECT_NEAR(s.big_f, s.f_hat * s.f_hat, 1e-12 * s.big_f);
        EXPECT_NEAR(s.rho_hat, static_cast<double>(uv / std::sqrt(uu * vv)), 1e-10);
    }
}

TEST(Estimate2sls, MomentsPathAgrees)
{
    const Raw r = random_raw(300, 3, 31);
    const ModelData d = partial_out(ModelData::make(r.y, r.x, r.z, r.w));
    const SummaryStats a = estimate_2sls(d);
    const SummaryStats b = IvMoments::from(d).summary();
    EXPECT_NEAR(a.beta_hat, b.beta_hat, 1e-12 * std::abs(a.beta_hat));
    EXPECT_NEAR(a.se, b.se, 1e-9 * a.se);
    EXPECT_NEAR(a.f_hat, b.f_hat, 1e-9 * std::abs(a.f_hat));
    EXPECT_NEAR(a.rho_hat, b.rho_hat, 1e-9);
}

TEST(Estimate2sls, ScaleEquivariance)
{
    for (std::uint64_t seed = 40; seed < 60; ++seed)
    {
        const Raw r = random_raw(120, 0, seed);
        const SummaryStats base = estimate_2sls(ModelData::make(r.y, r.x, r.z));
        for (double c : {-3.0, 0.01, 250.0})
        {
            const SummaryStats sz = estimate_2sls(ModelData::make(r.y, r.x, c * r.z));
            EXPECT_NEAR(sz.beta_hat, base.beta_hat, 1e-10 * std::abs(base.beta_hat));
            EXPECT_NEAR(sz.se, base.se, 1e-10 * base.se);
            EXPECT_NEAR(sz.big_f, base.big_f, 1e-10 * base.big_f);
            EXPECT_NEAR(sz.rho_hat, base.rho_hat, 1e-10);

            const SummaryStats sy = estimate_2sls(ModelData::make(c * r.y, r.x, r.z));
            EXPECT_NEAR(sy.beta_hat, c * base.beta_hat, 1e-10 * std::abs(c * base.beta_hat));
            EXPECT_NEAR(sy.se, std::abs(c) * base.se, 1e-10 * std::abs(c) * base.se);
            EXPECT_NEAR(sy.t_at(0), std::copysign(1.0, c) * base.t_at(0), 1e-9 * std::abs(base.t_at(0)));
            EXPECT_NEAR(sy.big_f, base.big_f, 1e-10 * base.big_f);
            EXPECT_NEAR(sy.rho_hat, std::copysign(1.0, c) * base.rho_hat, 1e-10);
        }
    }
}

TEST(DegreesOfFreedom, DivisorCountsAbsorbedControls)
{
    EXPECT_EQ(degrees_of_freedom_policy(), DofPolicy::SmallSample);
    EXPECT_EQ(variance_divisor(1000, 1), 999.0);
    const Raw r = random_raw(1000, 4, 70);
    const IvMoments m = IvMoments::from(partial_out(ModelData::make(r.y, r.x, r.z, r.w)));
    EXPECT_EQ(m.k, 5);
    EXPECT_EQ(variance_divisor(m.n, m.k), 995.0);
    EXPECT_EQ(variance_divisor(1000, 5, DofPolicy::LargeSample), 1000.0);
    EXPECT_THROW(variance_divisor(3, 3), DomainError);
}

TEST(DegreesOfFreedom, PolicyScalesSeAndF)
{
    const Raw r = random_raw(80, 0, 71);
    const ModelData d = ModelData::make(r.y, r.x, r.z);
    const SummaryStats small = estimate_2sls(d, DofPolicy::SmallSample);
    const SummaryStats large = estimate_2sls(d, DofPolicy::LargeSample);
    EXPECT_NEAR(small.se / large.se, std::sqrt(80.0 / 79.0), 1e-12);
    EXPECT_NEAR(large.big_f / small.big_f, 80.0 / 79.0, 1e-12);
    EXPECT_NEAR(small.rho_hat, large.rho_hat, 1e-14);
}
