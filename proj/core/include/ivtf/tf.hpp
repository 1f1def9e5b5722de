#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ivtf/ar.hpp"
#include "ivtf/iv_core.hpp"

namespace ivtf {

struct CvKnot
{
    double big_f;
    double cv;
};

/// The tF critical-value function for one significance level: |t| is
/// compared against cv(F). cv is +inf at or below f_threshold = z^2, follows
/// the knots (log-linear in F) above it, and equals cv_limit = z beyond the
/// last knot.
struct CVTable
{
    double level = 0.05;
    double f_threshold = 0.0;
    double cv_limit = 0.0;
    std::vector<CvKnot> knots;

    /// Validates monotonicity and the threshold/limit invariants; the error
    /// message lists every offending knot (1-based).
    static CVTable make(double level, std::vector<CvKnot> knots);
};

/// Reads a `F,cv` table. Blank lines and lines starting with '#' are skipped.
CVTable load_cv_table(std::istream& in, double level);
CVTable load_cv_table(const std::filesystem::path& path, double level);

/// Writes the table in the format load_cv_table reads; `comment` lines are
/// emitted first, each prefixed with "# ".
void write_cv_table(std::ostream& out, const CVTable& table, const std::vector<std::string>& comment = {});

double cv_lookup(const CVTable& table, double big_f);

/// Rejects iff |t| > cv(F); statistic and critical value are reported on the
/// |t| scale.
HypothesisTestResult tf_test(double t, double big_f, const CVTable& table);

/// [beta_hat - cv se, beta_hat + cv se], or the whole line when cv = +inf.
ConfidenceSet tf_confidence_interval(const SummaryStats& stats, const CVTable& table);

/// One draw of the weak-instrument limit experiment under the null:
/// (z_u, z_v) standard bivariate normal with correlation rho, f_bar = f0 + z_v.
struct AsymptoticNullDraw
{
    double z_u = 0.0;
    double z_v = 0.0;
    double f0 = 0.0;
    double rho = 0.0;

    double f_bar() const { return f0 + z_v; }
    double big_f() const { return f_bar() * f_bar(); }
    double t_squared() const;
    /// AR statistic in the limit experiment: exactly chi-square(1).
    double ar() const { return z_u * z_u; }
};

class CounterRng;
AsymptoticNullDraw draw_asymptotic_null(double f0, double rho, CounterRng& rng);

struct SizeCell
{
    double f0 = 0.0;
    double rho = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t tf_rejections = 0;
    std::uint64_t ar_rejections = 0;

    double tf_rate() const { return static_cast<double>(tf_rejections) / static_cast<double>(reps); }
    double ar_rate() const { return static_cast<double>(ar_rejections) / static_cast<double>(reps); }
    double tf_mc_se() const;
};

struct SizeReport
{
    double alpha = 0.05;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<SizeCell> cells;
    std::size_t worst_cell = 0;
    double sup_rate = 0.0;
    double mc_se = 0.0;      // sqrt(alpha (1 - alpha) / reps)
    double threshold = 0.0;  // alpha + 3 mc_se
    bool pass = false;
};

std::vector<double> default_size_f0_grid();
std::vector<double> default_size_rho_grid();

/// Monte Carlo size check of the tF rule in the limit experiment. Cell
/// streams are keyed by (seed, cell index), so results do not depend on the
/// thread count. Requires reps >= 10^4.
SizeReport verify_size(const CVTable& table, std::span<const double> f0_grid,
                       std::span<const double> rho_grid, std::uint64_t reps, std::uint64_t seed,
                       unsigned threads = 0);

void write_size_report(std::ostream& out, const SizeReport& report);

/// Deterministic null rejection probability of "reject iff |t| > cutoff(F)"
/// in the limit experiment, by quadrature over z_v with the z_u | z_v
/// probability in closed form. `breaks` lists F values where cutoff jumps.
/// |rho| = 1 is handled by locating the rejection region's edges directly.
double null_rejection_probability(const std::function<double(double)>& cutoff,
                                  std::span<const double> breaks, double f0, double rho);

double tf_null_rejection_probability(const CVTable& table, double f0, double rho);

// Calibration of a cv function (used to produce the shipped tables).

/// Size at rho = 1 of the pretest rule "reject iff F > f_star and |t| > c",
/// in closed form.
double pretest_size_rho_one(double f0, double f_star, double c);

/// sup over f0 of pretest_size_rho_one; f0 is searched on a grid then refined.
double pretest_worst_case_size(double f_star, double c);

/// Smallest c with pretest_worst_case_size(f_star, c) <= alpha, by bisection.
double pretest_critical_value(double f_star, double alpha);

struct CalibrationOptions
{
    int knots_per_decade = 24;   // in F - f_threshold
    double first_offset = 0.005; // first knot at f_threshold + first_offset
    double limit_tolerance = 1e-3;
    double max_f = 1e5;
    unsigned threads = 0;
};

/// Builds a table by bisection at each knot followed by a nonincreasing
/// envelope. The table ends at the first knot whose cv is within
/// limit_tolerance of z (that knot is set to z).
CVTable calibrate_cv_table(double alpha, const CalibrationOptions& options = {});

}  // namespace ivtf
