#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ivtf/quantiles.hpp"
#include "ivtf/rng.hpp"
#include "ivtf/tf.hpp"

using namespace ivtf;

TEST(Pretest, ClosedFormAgreesWithSimulation)
{
    const double f0 = 2.5, f_star = 10.0, c = 3.0;
    CounterRng rng(derive_key(31, 0), 0);
    const int n = 400000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
    {
        const auto d = draw_asymptotic_null(f0, 1.0 - 1e-15, rng);
        hits += d.big_f() > f_star && d.t_squared() > c * c;
    }
    const double p = pretest_size_rho_one(f0, f_star, c);
    EXPECT_NEAR(static_cast<double>(hits) / n, p, 4.5 * std::sqrt(p * (1 - p) / n));
}

TEST(Pretest, CriticalValueAnchor)
{
    EXPECT_NEAR(pretest_critical_value(10.0, 0.05), 3.43, 0.01);
    const double c = pretest_critical_value(10.0, 0.05);
    EXPECT_NEAR(pretest_worst_case_size(10.0, c), 0.05, 1e-6);
    EXPECT_EQ(pretest_critical_value(500.0, 0.05), two_sided_z(0.05));
}

TEST(Calibration, ReproducesShippedFivePercentTable)
{
    const CVTable fresh = calibrate_cv_table(0.05);
    const CVTable shipped = load_cv_table(std::string(IVTF_TEST_DATA_DIR) + "/cv_tf_05.csv", 0.05);
    ASSERT_EQ(fresh.knots.size(), shipped.knots.size());
    for (std::size_t i = 0; i < fresh.knots.size(); ++i)
    {
        EXPECT_EQ(fresh.knots[i].big_f, shipped.knots[i].big_f) << i;
        EXPECT_EQ(fresh.knots[i].cv, shipped.knots[i].cv) << i;
    }
}
