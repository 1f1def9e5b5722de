#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ivtf/errors.hpp"
#include "ivtf/ar.hpp"
#include "ivtf/mc_sim.hpp"

using namespace ivtf;

namespace {

const CVTable& table5()
{
    static const CVTable t = load_cv_table(std::string(IVTF_TEST_DATA_DIR) + "/cv_tf_05.csv", 0.05);
    return t;
}

}  // namespace

TEST(Dgp, SameRepIsBitIdentical)
{
    const DGPConfig c{200, 1.0, 3.0, -0.4, 9};
    const ModelData a = draw_dataset(c, 17), b = draw_dataset(c, 17), other = draw_dataset(c, 18);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.z, b.z);
    EXPECT_NE(a.z, other.z);
}

TEST(Dgp, CellIdentityTracksParameters)
{
    const DGPConfig c{1000, 1.0, 2.0, 0.5, 1};
    DGPConfig d = c;
    EXPECT_EQ(c.cell_id(), d.cell_id());
    d.rho = -0.5;
    EXPECT_NE(c.cell_id(), d.cell_id());
    d = c;
    d.f0 = 2.0000001;
    EXPECT_NE(c.cell_id(), d.cell_id());
}

TEST(Dgp, RejectsBadParameters)
{
    EXPECT_THROW((DGPConfig{1000, 1.0, 2.0, 1.0, 0}).validate(), DomainError);
    EXPECT_THROW((DGPConfig{5, 1.0, 2.0, 0.0, 0}).validate(), DomainError);
}

TEST(Dgp, IndependentErrorsWhenRhoIsZero)
{
    const DGPConfig c{1000, 1.0, 10.0, 0.0, 3};
    const ModelData d = draw_dataset(c, 0);
    const Eigen::VectorXd u = d.y - c.beta * d.x;
    const Eigen::VectorXd v = d.x - c.pi() * d.z;
    const double corr = u.dot(v) / std::sqrt(u.squaredNorm() * v.squaredNorm());
    EXPECT_LT(std::abs(corr), 3.0 / std::sqrt(1000.0));
}

TEST(Dgp, FirstStageMomentIdentity)
{
    const DGPConfig c{1000, 1.0, 4.0, 0.3, 5};
    const int reps = 10000;
    double s1 = 0, s2 = 0;
    for (int r = 0; r < reps; ++r)
    {
        const double f = IvMoments::from(draw_dataset(c, r)).summary().big_f;
        s1 += f;
        s2 += f * f;
    }
    const double mean = s1 / reps;
    const double sd = std::sqrt(s2 / reps - mean * mean);
    EXPECT_NEAR(mean, 17.0, 4 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST(PowerStudy, CardinalityAndRoundTrip)
{
    const DGPConfig c{200, 1.0, 2.0, -0.5, 11};
    const auto devs = default_deviation_grid();
    ASSERT_EQ(devs.size(), 32u);
    EXPECT_DOUBLE_EQ(devs.front(), -1.6);
    EXPECT_DOUBLE_EQ(devs.back(), 1.5);
    const std::vector<PowerCurve> curves{run_power_study(c, devs, 1000, table5(), 2)};

    std::ostringstream out;
    write_power_report(out, curves);
    const std::string text = out.str();
    std::size_t lines = 0;
    for (char ch : text)
        lines += ch == '\n';
    EXPECT_EQ(lines, 1u + 96u);

    std::istringstream in(text);
    const auto back = read_power_report(in);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].deviations, curves[0].deviations);
    EXPECT_EQ(back[0].rejections, curves[0].rejections);
    EXPECT_EQ(back[0].f0, c.f0);
    EXPECT_EQ(back[0].rho, c.rho);
    std::ostringstream again;
    write_power_report(again, back);
    EXPECT_EQ(again.str(), text);
}

TEST(PowerStudy, ThreadCountDoesNotChangeCounts)
{
    const DGPConfig c{100, 1.0, 1.0, 0.7, 2};
    const std::vector<double> devs{-1.0, 0.0, 0.5};
    const PowerCurve a = run_power_study(c, devs, 3000, table5(), 1);
    const PowerCurve b = run_power_study(c, devs, 3000, table5(), 4);
    EXPECT_EQ(a.rejections, b.rejections);
}

TEST(PowerStudy, ProceduresAgreeWithDirectComputation)
{
    const DGPConfig c{150, 1.0, 3.0, 0.4, 8};
    const std::vector<double> devs{-0.5, 0.0, 0.8};
    const PowerCurve pc = run_power_study(c, devs, 1000, table5(), 1);
    std::array<std::vector<std::uint64_t>, 3> expect;
    for (auto& e : expect)
        e.assign(devs.size(), 0);
    for (std::uint64_t r = 0; r < 1000; ++r)
    {
        const ModelData d = draw_dataset(c, r);
        const SummaryStats s = estimate_2sls(d);
        for (std::size_t j = 0; j < devs.size(); ++j)
        {
            const double b0 = c.beta - devs[j];
            const double t = s.t_at(b0);
            expect[0][j] += ar_statistic_summary(t, s.f_hat, s.rho_hat) > 3.841458820694124;
            expect[1][j] += std::abs(t) > cv_lookup(table5(), s.big_f);
            expect[2][j] += std::abs(t) > 1.959963984540054;
        }
    }
    EXPECT_EQ(pc.rejections, expect);
}

TEST(PowerStudy, RejectsTooFewReplications)
{
    const DGPConfig c{100, 1.0, 1.0, 0.0, 0};
    const std::vector<double> devs{0.0};
    EXPECT_THROW(run_power_study(c, devs, 999, table5()), DomainError);
}
