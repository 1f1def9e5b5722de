#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivtf/ar.hpp"
#include "ivtf/tf.hpp"

namespace ivtf {

/// One reported IV specification, tested at beta0 = 0.
///
/// Column dictionary (header `study_id,spec_id,t,f_hat,beta_hat,se,ar_stat,rho_hat`):
///   study_id, spec_id  identifiers; the pair must be unique
///   t                  reported 2SLS t-ratio for beta = 0
///   f_hat              signed first-stage t-statistic (F = f_hat^2); a
///                      source that only reports F should supply +sqrt(F)
///   beta_hat, se       2SLS estimate and its standard error (se > 0)
///   ar_stat            optional AR statistic at beta0 = 0
///   rho_hat            optional structural/first-stage residual correlation
/// Optional fields are left blank. Extra columns are ignored.
struct SpecificationRecord
{
    std::string study_id;
    std::string spec_id;
    double t = 0.0;
    double f_hat = 0.0;
    double beta_hat = 0.0;
    double se = 1.0;
    std::optional<double> ar_stat;
    std::optional<double> rho_hat;
    std::size_t source_line = 0;

    double big_f() const { return f_hat * f_hat; }
};

struct IngestResult
{
    std::vector<SpecificationRecord> records;
    // Rows that parsed but carry neither rho_hat nor ar_stat.
    std::vector<SpecificationRecord> rho_unrecoverable;
};

/// Schema problems (missing columns, non-numeric or missing required fields,
/// se <= 0, duplicate ids) raise ValidationError listing every bad row.
IngestResult ingest(std::istream& in);

void write_specifications(std::ostream& out, std::span<const SpecificationRecord> records);

struct StandardCoords
{
    double x = 0.0;  // (F/10) / (1 + F/10)
    double y = 0.0;  // (t^2/1.96^2) / (1 + t^2/1.96^2)
};

double standardize_f(double big_f);
double standardize_t(double t);
StandardCoords standardize_coords(double t, double big_f);

enum class Significance
{
    Insignificant,
    FivePercentOnly,
    OnePercent,
};

std::string_view to_string(Significance s);
inline int strictness(Significance s) { return static_cast<int>(s); }

enum class ExclusionReason
{
    RhoUnrecoverable,
    InvalidCorrelation,
};

std::string_view to_string(ExclusionReason r);

struct LevelComparison
{
    std::optional<ConfidenceSet> ar_set;
    std::optional<ConfidenceSet> tf_set;
    // ln(length_tF / length_AR); present iff both sets are bounded.
    std::optional<double> log_length_ratio;
};

/// ln(length tF / length AR) when both sets are bounded with positive length.
std::optional<double> log_length_ratio(const ConfidenceSet& ar_set, const ConfidenceSet& tf_set);

struct ComparisonRecord
{
    std::string study_id;
    std::string spec_id;
    std::size_t source_line = 0;
    double t = 0.0;
    double f_hat = 0.0;
    double big_f = 0.0;
    std::optional<double> rho_hat;  // reported or recovered
    std::optional<double> ar_stat;  // reported or implied, at beta0 = 0

    Significance t_class = Significance::Insignificant;
    std::optional<Significance> ar_class;
    Significance tf_class = Significance::Insignificant;
    StandardCoords coords;

    std::optional<ExclusionReason> exclusion;
    LevelComparison at5;
    LevelComparison at1;

    bool excluded() const { return exclusion.has_value(); }
    const LevelComparison& at(double alpha) const { return alpha == kOnePercent ? at1 : at5; }

    static constexpr double kOnePercent = 0.01;
};

/// cv5 and cv1 must be the 5% and 1% tables.
ComparisonRecord classify(const SpecificationRecord& record, const CVTable& cv5, const CVTable& cv1);

/// classify over a list; output order follows input order.
std::vector<ComparisonRecord> classify_all(std::span<const SpecificationRecord> records, const CVTable& cv5,
                                           const CVTable& cv1, unsigned threads = 1);

struct AgreementTable
{
    std::size_t considered = 0;  // records with an AR class
    std::size_t tf_insignificant = 0;
    std::size_t ar_significant_given_tf_insignificant = 0;
    std::size_t tf_five_only = 0;
    std::size_t ar_one_given_tf_five_only = 0;
    // [tF class][AR class] and [t class][AR class]
    std::array<std::array<std::size_t, 3>, 3> tf_by_ar{};
    std::array<std::array<std::size_t, 3>, 3> t_by_ar{};
    // "study_id/spec_id" of records significant under tF at a stricter level than under AR
    std::vector<std::string> tf_stricter_than_ar;

    std::optional<double> share_ar_significant_given_tf_insignificant() const;
    std::optional<double> share_ar_one_given_tf_five_only() const;
};

AgreementTable aggregate_figure1(std::span<const ComparisonRecord> records);
void write_agreement(std::ostream& out, const AgreementTable& table);

struct LogLengthReport
{
    double alpha = 0.05;
    double bin_width = 0.05;
    std::map<std::int64_t, std::size_t> bins;  // bin k covers [k w, (k+1) w)
    std::vector<double> values;                // in input order
    std::optional<double> share_ar_shorter;
    std::optional<double> mean_when_ar_shorter;
    std::optional<double> mean_when_ar_longer;
    std::optional<double> share_above_030;
    std::size_t input_records = 0;
    std::vector<std::pair<std::string, std::size_t>> excluded;  // reason -> count

    static double reference_95_vs_90();
    static double reference_99_vs_95();
};

LogLengthReport loglength_distribution(std::span<const ComparisonRecord> records, double alpha);
void write_loglength_report(std::ostream& out, const LogLengthReport& report);

struct HeatmapSpec
{
    int nx = 50;             // cells along |rho|
    int ny = 50;             // cells along (F/10)/(1+F/10)
    double bandwidth = 0.08; // Gaussian kernel sd, standardized units
    double reach = 3.0;      // kernel truncated beyond reach * bandwidth
};

struct HeatPoint
{
    double abs_rho;
    double f_coord;
    double value;
};

struct HeatmapGrid
{
    HeatmapSpec spec;
    double alpha = 0.05;
    std::vector<std::optional<double>> values;  // row-major: index = j * nx + i
    std::vector<double> weights;

    double x_center(int i) const { return (i + 0.5) / spec.nx; }
    double y_center(int j) const { return (j + 0.5) / spec.ny; }
    const std::optional<double>& at(int i, int j) const { return values[static_cast<std::size_t>(j * spec.nx + i)]; }
};

/// Kernel-weighted average of point values at each cell centre; cells with
/// no point within reach are missing.
HeatmapGrid heatmap_grid(std::span<const HeatPoint> points, const HeatmapSpec& spec);
HeatmapGrid heatmap_grid(std::span<const ComparisonRecord> records, double alpha, const HeatmapSpec& spec);
void write_heatmap(std::ostream& out, const HeatmapGrid& grid);

/// Per-record status table: every input row, classified or excluded.
void write_ledger(std::ostream& out, std::span<const ComparisonRecord> records);

}  // namespace ivtf
