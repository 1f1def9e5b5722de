#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "ivtf/errors.hpp"
#include "ivtf/parallel.hpp"
#include "ivtf/quantiles.hpp"
#include "ivtf/tf.hpp"

namespace ivtf {

namespace {

constexpr double kF0Step = 0.02;

}  // namespace

double pretest_size_rho_one(double f0, double f_star, double c)
{
    if (!(f0 > 0.0))
        throw DomainError("pretest_size_rho_one: f0 must be positive");

    // With rho = 1, z = z_u = z_v, f_bar = f0 + z and |t| = |z (f0 + z)| / f0.
    // Rejection: (f0 + z)^2 > f_star and |z (f0 + z)| > c f0. Every edge of
    // that set is a root of one of three quadratics in z.
    const double s = std::sqrt(f_star);
    std::vector<double> edges{s - f0, -s - f0};
    const double d1 = f0 * f0 + 4.0 * c * f0;
    edges.push_back(0.5 * (-f0 - std::sqrt(d1)));
    edges.push_back(0.5 * (-f0 + std::sqrt(d1)));
    const double d2 = f0 * f0 - 4.0 * c * f0;
    if (d2 > 0.0) {
        edges.push_back(0.5 * (-f0 - std::sqrt(d2)));
        edges.push_back(0.5 * (-f0 + std::sqrt(d2)));
    }
    std::sort(edges.begin(), edges.end());

    auto rejects = [&](double z) {
        const double fb = f0 + z;
        return fb * fb > f_star && std::abs(z * fb) > c * f0;
    };

    double total = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= edges.size(); ++i) {
        const double hi = i < edges.size() ? edges[i] : std::numeric_limits<double>::infinity();
        if (hi > lo) {
            const double probe = std::isinf(lo) ? hi - 1.0 : (std::isinf(hi) ? lo + 1.0 : 0.5 * (lo + hi));
            if (rejects(probe))
                total += normal_cdf(hi) - normal_cdf(lo);
        }
        lo = hi;
    }
    return total;
}

double pretest_worst_case_size(double f_star, double c)
{
    const double f0_max = std::sqrt(f_star) + 40.0;
    double best = 0.0;
    double best_f0 = kF0Step;
    for (double f0 = kF0Step; f0 <= f0_max; f0 += kF0Step) {
        const double p = pretest_size_rho_one(f0, f_star, c);
        if (p > best) {
            best = p;
            best_f0 = f0;
        }
    }
    // Golden-section refinement around the best grid point.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(1e-6, best_f0 - kF0Step);
    double b = best_f0 + kF0Step;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double p1 = pretest_size_rho_one(x1, f_star, c);
    double p2 = pretest_size_rho_one(x2, f_star, c);
    for (int it = 0; it < 40; ++it) {
        if (p1 > p2) {
            b = x2;
            x2 = x1;
            p2 = p1;
            x1 = b - g * (b - a);
            p1 = pretest_size_rho_one(x1, f_star, c);
        } else {
            a = x1;
            x1 = x2;
            p1 = p2;
            x2 = a + g * (b - a);
            p2 = pretest_size_rho_one(x2, f_star, c);
        }
    }
    return std::max({best, p1, p2});
}

double pretest_critical_value(double f_star, double alpha)
{
    const double z = two_sided_z(alpha);
    if (!(f_star > z * z))
        throw DomainError("pretest_critical_value: F threshold must exceed z^2");
    if (pretest_worst_case_size(f_star, z) <= alpha)
        return z;
    double lo = z;
    double hi = 2.0 * z;
    while (pretest_worst_case_size(f_star, hi) > alpha) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9)
            throw DomainError("pretest_critical_value: no finite critical value");
    }
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        (pretest_worst_case_size(f_star, mid) > alpha ? lo : hi) = mid;
    }
    return hi;
}

CVTable calibrate_cv_table(double alpha, const CalibrationOptions& options)
{
    const double z = two_sided_z(alpha);
    const double threshold = z * z;

    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double f = threshold + options.first_offset * std::pow(10.0, static_cast<double>(k) / options.knots_per_decade);
        if (f > options.max_f)
            break;
        grid.push_back(f);
    }

    std::vector<double> cv(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) { cv[i] = pretest_critical_value(grid[i], alpha); });

    // Nonincreasing envelope from the right.
    for (std::size_t i = cv.size() - 1; i-- > 0;)
        cv[i] = std::max(cv[i], cv[i + 1]);

    std::vector<CvKnot> knots;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (cv[i] <= z) {
            // cv reaches z exactly between grid[i-1] and grid[i]: locate the
            // smallest F at which z already controls the worst-case size.
            double lo = i > 0 ? grid[i - 1] : threshold;
            double hi = grid[i];
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (pretest_worst_case_size(mid, z) <= alpha ? hi : lo) = mid;
            }
            knots.push_back({hi, z});
            break;
        }
        if (cv[i] - z <= options.limit_tolerance) {
            knots.push_back({grid[i], z});
            break;
        }
        knots.push_back({grid[i], cv[i]});
    }
    return CVTable::make(alpha, std::move(knots));
}

}  // namespace ivtf
