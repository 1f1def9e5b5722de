#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ivtf/iv_core.hpp"
#include "ivtf/tf.hpp"

namespace ivtf {

/// Finite-sample design: z ~ N(0, 1); (u, v) standard bivariate normal with
/// correlation rho; x = z pi + v; y = x beta + u; pi = f0 / sqrt(n).
/// No intercept, unit residual variances.
struct DGPConfig
{
    Eigen::Index n = 1000;
    double beta = 1.0;
    double f0 = 1.0;
    double rho = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    double pi() const;
    /// Stream-family identifier built from (n, beta, f0, rho), so a
    /// configuration draws the same data wherever it sits in a grid.
    std::uint64_t cell_id() const;
};

/// Replication `rep_index` of the design: a pure function of (config, rep).
ModelData draw_dataset(const DGPConfig& config, std::uint64_t rep_index);

enum class Procedure
{
    AR,
    TF,
    ConventionalT,
};

inline constexpr std::array<Procedure, 3> kProcedures = {Procedure::AR, Procedure::TF, Procedure::ConventionalT};

std::string_view to_string(Procedure p);

struct PowerCurve
{
    Eigen::Index n = 0;
    double beta = 1.0;
    double f0 = 0.0;
    double rho = 0.0;
    double alpha = 0.05;
    std::uint64_t reps = 0;
    std::vector<double> deviations;  // beta - beta0
    // rejections[p][j]: count for procedure p at deviations[j]
    std::array<std::vector<std::uint64_t>, 3> rejections;

    double rate(Procedure p, std::size_t j) const;
    double mc_se(Procedure p, std::size_t j) const;
};

/// Deviation grid -1.6, -1.5, ..., 1.5.
std::vector<double> default_deviation_grid();

/// Rejection rates of AR (chi-square(1) cutoff), tF (cv_table) and the
/// conventional t (fixed z cutoff) at beta0 = beta - deviation, all computed
/// on the same replications. Requires reps >= 10^3.
PowerCurve run_power_study(const DGPConfig& config, std::span<const double> deviations, std::uint64_t reps,
                           const CVTable& cv_table, unsigned threads = 0);

/// Long-format export: f0,rho,deviation,procedure,rate,mc_se (plus n, reps,
/// rejections so the rows carry everything needed to re-import).
void write_power_report(std::ostream& out, std::span<const PowerCurve> curves);

/// Inverse of write_power_report.
std::vector<PowerCurve> read_power_report(std::istream& in);

}  // namespace ivtf
