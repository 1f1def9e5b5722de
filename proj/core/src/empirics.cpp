#include "ivtf/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "ivtf/csv.hpp"
#include "ivtf/errors.hpp"
#include "ivtf/parallel.hpp"
#include "ivtf/quantiles.hpp"

namespace ivtf {

namespace {

constexpr std::string_view kColumns[] = {"study_id", "spec_id", "t", "f_hat", "beta_hat", "se", "ar_stat", "rho_hat"};
constexpr std::size_t kRequiredColumns = 6;

std::string opt_field(const std::optional<double>& v) { return v ? csv::format(*v) : std::string(); }

std::string na_field(const std::optional<double>& v) { return v ? csv::format(*v) : std::string("NA"); }

Significance classify_statistic(double stat, double cut5, double cut1)
{
    if (stat > cut1)
        return Significance::OnePercent;
    if (stat > cut5)
        return Significance::FivePercentOnly;
    return Significance::Insignificant;
}

LevelComparison compare_at(const SummaryStats& stats, const CVTable& table)
{
    LevelComparison out;
    out.ar_set = ar_confidence_set(stats, 1.0 - table.level);
    out.tf_set = tf_confidence_interval(stats, table);
    out.log_length_ratio = log_length_ratio(*out.ar_set, *out.tf_set);
    return out;
}

std::string set_kind(const std::optional<ConfidenceSet>& s)
{
    return s ? std::string(to_string(s->kind())) : std::string();
}

std::string set_lo(const std::optional<ConfidenceSet>& s)
{
    return s && s->kind() != ConfidenceSet::Kind::WholeLine ? csv::format(s->lo()) : std::string();
}

std::string set_hi(const std::optional<ConfidenceSet>& s)
{
    return s && s->kind() != ConfidenceSet::Kind::WholeLine ? csv::format(s->hi()) : std::string();
}

std::optional<double> share(std::size_t num, std::size_t den)
{
    if (den == 0)
        return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> log_length_ratio(const ConfidenceSet& ar_set, const ConfidenceSet& tf_set)
{
    const auto ar_len = ar_set.length();
    const auto tf_len = tf_set.length();
    if (!ar_len || !tf_len || !(*ar_len > 0.0) || !(*tf_len > 0.0))
        return std::nullopt;
    return std::log(*tf_len / *ar_len);
}

IngestResult ingest(std::istream& in)
{
    const csv::Document doc = csv::read(in);
    if (doc.header.empty())
        throw ValidationError("specifications: missing header line");

    std::array<std::optional<std::size_t>, std::size(kColumns)> index;
    for (std::size_t c = 0; c < doc.header.size(); ++c)
    {
        for (std::size_t k = 0; k < std::size(kColumns); ++k)
        {
            if (doc.header[c] == kColumns[k])
            {
                if (index[k])
                    throw ValidationError("specifications: duplicate column '" + doc.header[c] + "'");
                index[k] = c;
            }
        }
    }
    std::vector<std::string> missing;
    for (std::size_t k = 0; k < kRequiredColumns; ++k)
        if (!index[k])
            missing.emplace_back(kColumns[k]);
    if (!missing.empty())
    {
        std::string msg = "specifications: missing required column(s):";
        for (const auto& m : missing)
            msg += " " + m;
        throw ValidationError(msg);
    }

    IngestResult result;
    std::vector<std::string> problems;
    std::set<std::pair<std::string, std::string>> seen;

    for (const csv::Row& row : doc.rows)
    {
        const std::string where = "line " + std::to_string(row.line_number) + ": ";
        auto field = [&](std::size_t k) -> std::string_view {
            if (!index[k] || *index[k] >= row.fields.size())
                return {};
            return row.fields[*index[k]];
        };
        std::vector<std::string> row_problems;
        auto required = [&](std::size_t k) -> double {
            const std::string_view f = field(k);
            if (f.empty())
            {
                row_problems.push_back(std::string(kColumns[k]) + " is missing");
                return 0.0;
            }
            const auto v = csv::parse_double(f);
            if (!v || !std::isfinite(*v))
            {
                row_problems.push_back(std::string(kColumns[k]) + " is not a finite number ('" + std::string(f) + "')");
                return 0.0;
            }
            return *v;
        };
        auto optional = [&](std::size_t k) -> std::optional<double> {
            const std::string_view f = field(k);
            if (f.empty())
                return std::nullopt;
            const auto v = csv::parse_double(f);
            if (!v || !std::isfinite(*v))
            {
                row_problems.push_back(std::string(kColumns[k]) + " is not a finite number ('" + std::string(f) + "')");
                return std::nullopt;
            }
            return v;
        };

        SpecificationRecord rec;
        rec.source_line = row.line_number;
        rec.study_id = std::string(field(0));
        rec.spec_id = std::string(field(1));
        if (rec.study_id.empty())
            row_problems.emplace_back("study_id is missing");
        if (rec.spec_id.empty())
            row_problems.emplace_back("spec_id is missing");
        rec.t = required(2);
        rec.f_hat = required(3);
        rec.beta_hat = required(4);
        rec.se = required(5);
        rec.ar_stat = optional(6);
        rec.rho_hat = optional(7);
        if (field(5).size() && row_problems.empty() && !(rec.se > 0.0))
            row_problems.emplace_back("se must be positive");
        if (rec.ar_stat && *rec.ar_stat < 0.0)
            row_problems.emplace_back("ar_stat must be non-negative");
        if (!rec.study_id.empty() && !rec.spec_id.empty() && !seen.emplace(rec.study_id, rec.spec_id).second)
            row_problems.push_back("duplicate (study_id, spec_id) = (" + rec.study_id + ", " + rec.spec_id + ")");

        if (!row_problems.empty())
        {
            for (const auto& p : row_problems)
                problems.push_back(where + p);
            continue;
        }
        if (!rec.ar_stat && !rec.rho_hat)
            result.rho_unrecoverable.push_back(std::move(rec));
        else
            result.records.push_back(std::move(rec));
    }

    if (!problems.empty())
    {
        std::string msg = "specifications: " + std::to_string(problems.size()) + " problem(s)";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ValidationError(msg);
    }
    return result;
}

void write_specifications(std::ostream& out, std::span<const SpecificationRecord> records)
{
    out << "study_id,spec_id,t,f_hat,beta_hat,se,ar_stat,rho_hat\n";
    for (const auto& r : records)
    {
        out << csv::join({r.study_id, r.spec_id, csv::format(r.t), csv::format(r.f_hat), csv::format(r.beta_hat),
                          csv::format(r.se), opt_field(r.ar_stat), opt_field(r.rho_hat)})
            << '\n';
    }
}

double standardize_f(double big_f)
{
    const double s = big_f / 10.0;
    return s / (1.0 + s);
}

double standardize_t(double t)
{
    const double s = t * t / (1.96 * 1.96);
    return s / (1.0 + s);
}

StandardCoords standardize_coords(double t, double big_f) { return {standardize_f(big_f), standardize_t(t)}; }

std::string_view to_string(Significance s)
{
    switch (s)
    {
    case Significance::Insignificant:
        return "insignificant";
    case Significance::FivePercentOnly:
        return "5%-only";
    case Significance::OnePercent:
        return "1%";
    }
    return "?";
}

std::string_view to_string(ExclusionReason r)
{
    switch (r)
    {
    case ExclusionReason::RhoUnrecoverable:
        return "rho unrecoverable";
    case ExclusionReason::InvalidCorrelation:
        return "invalid estimated correlation";
    }
    return "?";
}

ComparisonRecord classify(const SpecificationRecord& record, const CVTable& cv5, const CVTable& cv1)
{
    ComparisonRecord out;
    out.study_id = record.study_id;
    out.spec_id = record.spec_id;
    out.source_line = record.source_line;
    out.t = record.t;
    out.f_hat = record.f_hat;
    out.big_f = record.big_f();
    out.coords = standardize_coords(record.t, out.big_f);

    const double z5 = two_sided_z(kAlpha5);
    const double z1 = two_sided_z(kAlpha1);
    out.t_class = classify_statistic(std::abs(record.t), z5, z1);
    if (tf_test(record.t, out.big_f, cv1).reject)
        out.tf_class = Significance::OnePercent;
    else if (tf_test(record.t, out.big_f, cv5).reject)
        out.tf_class = Significance::FivePercentOnly;

    std::optional<double> rho = record.rho_hat;
    if (!rho && record.ar_stat)
    {
        try
        {
            rho = recover_rho(record.t, record.f_hat, *record.ar_stat);
        }
        catch (const NotRecoverableError&)
        {
        }
    }
    out.rho_hat = rho;

    if (!rho)
        out.exclusion = ExclusionReason::RhoUnrecoverable;
    else if (!(std::abs(*rho) <= 1.0))
        out.exclusion = ExclusionReason::InvalidCorrelation;

    out.ar_stat = record.ar_stat;
    if (!out.ar_stat && !out.exclusion)
    {
        try
        {
            out.ar_stat = ar_statistic_summary(record.t, record.f_hat, *rho);
        }
        catch (const DegenerateSpecificationError&)
        {
        }
    }
    if (out.ar_stat)
        out.ar_class = classify_statistic(*out.ar_stat, chi2_1_critical(kAlpha5), chi2_1_critical(kAlpha1));

    if (!out.exclusion)
    {
        const SummaryStats stats = SummaryStats::from_reported(record.beta_hat, record.se, record.f_hat, *rho);
        out.at5 = compare_at(stats, cv5);
        out.at1 = compare_at(stats, cv1);
    }
    return out;
}

std::vector<ComparisonRecord> classify_all(std::span<const SpecificationRecord> records, const CVTable& cv5,
                                           const CVTable& cv1, unsigned threads)
{
    std::vector<ComparisonRecord> out(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) { out[i] = classify(records[i], cv5, cv1); });
    return out;
}

std::optional<double> AgreementTable::share_ar_significant_given_tf_insignificant() const
{
    return share(ar_significant_given_tf_insignificant, tf_insignificant);
}

std::optional<double> AgreementTable::share_ar_one_given_tf_five_only() const
{
    return share(ar_one_given_tf_five_only, tf_five_only);
}

AgreementTable aggregate_figure1(std::span<const ComparisonRecord> records)
{
    AgreementTable t;
    for (const auto& r : records)
    {
        if (!r.ar_class)
            continue;
        const Significance ar = *r.ar_class;
        ++t.considered;
        ++t.tf_by_ar[static_cast<std::size_t>(r.tf_class)][static_cast<std::size_t>(ar)];
        ++t.t_by_ar[static_cast<std::size_t>(r.t_class)][static_cast<std::size_t>(ar)];
        if (r.tf_class == Significance::Insignificant)
        {
            ++t.tf_insignificant;
            if (ar != Significance::Insignificant)
                ++t.ar_significant_given_tf_insignificant;
        }
        if (r.tf_class == Significance::FivePercentOnly)
        {
            ++t.tf_five_only;
            if (ar == Significance::OnePercent)
                ++t.ar_one_given_tf_five_only;
        }
        if (strictness(r.tf_class) > strictness(ar))
            t.tf_stricter_than_ar.push_back(r.study_id + "/" + r.spec_id);
    }
    return t;
}

void write_agreement(std::ostream& out, const AgreementTable& t)
{
    out << "section,name,value\n";
    out << "count,considered," << t.considered << '\n';
    out << "count,tf_insignificant," << t.tf_insignificant << '\n';
    out << "count,ar_significant_given_tf_insignificant," << t.ar_significant_given_tf_insignificant << '\n';
    out << "count,tf_five_only," << t.tf_five_only << '\n';
    out << "count,ar_one_given_tf_five_only," << t.ar_one_given_tf_five_only << '\n';
    out << "count,tf_stricter_than_ar," << t.tf_stricter_than_ar.size() << '\n';
    out << "share,ar_significant_given_tf_insignificant," << na_field(t.share_ar_significant_given_tf_insignificant())
        << '\n';
    out << "share,ar_one_given_tf_five_only," << na_field(t.share_ar_one_given_tf_five_only()) << '\n';
    constexpr Significance kAll[] = {Significance::Insignificant, Significance::FivePercentOnly,
                                     Significance::OnePercent};
    for (const auto a : kAll)
        for (const auto b : kAll)
            out << "tf_by_ar," << csv::escape(std::string(to_string(a)) + " | " + std::string(to_string(b))) << ','
                << t.tf_by_ar[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] << '\n';
    for (const auto a : kAll)
        for (const auto b : kAll)
            out << "t_by_ar," << csv::escape(std::string(to_string(a)) + " | " + std::string(to_string(b))) << ','
                << t.t_by_ar[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] << '\n';
    for (const auto& id : t.tf_stricter_than_ar)
        out << "violation," << csv::escape(id) << ",tf stricter than ar\n";
}

double LogLengthReport::reference_95_vs_90() { return std::log(1.96 / 1.645); }
double LogLengthReport::reference_99_vs_95() { return std::log(2.58 / 1.96); }

LogLengthReport loglength_distribution(std::span<const ComparisonRecord> records, double alpha)
{
    LogLengthReport rep;
    rep.alpha = alpha;
    rep.input_records = records.size();

    std::size_t rho_unrec = 0, invalid = 0, ar_unbounded = 0, tf_unbounded = 0;
    for (const auto& r : records)
    {
        if (r.exclusion)
        {
            (*r.exclusion == ExclusionReason::RhoUnrecoverable ? rho_unrec : invalid)++;
            continue;
        }
        const LevelComparison& lc = r.at(alpha);
        if (!lc.ar_set || !lc.ar_set->is_bounded())
        {
            ++ar_unbounded;
            continue;
        }
        if (!lc.tf_set || !lc.tf_set->is_bounded() || !lc.log_length_ratio)
        {
            ++tf_unbounded;
            continue;
        }
        rep.values.push_back(*lc.log_length_ratio);
    }
    rep.excluded = {{std::string(to_string(ExclusionReason::RhoUnrecoverable)), rho_unrec},
                    {std::string(to_string(ExclusionReason::InvalidCorrelation)), invalid},
                    {"AR set unbounded", ar_unbounded},
                    {"tF interval unbounded", tf_unbounded}};

    std::size_t shorter = 0, longer = 0, above = 0;
    double sum_shorter = 0.0, sum_longer = 0.0;
    for (const double v : rep.values)
    {
        ++rep.bins[static_cast<std::int64_t>(std::floor(v / rep.bin_width))];
        if (v > 0.0)
        {
            ++shorter;
            sum_shorter += v;
        }
        else if (v < 0.0)
        {
            ++longer;
            sum_longer += v;
        }
        if (v > 0.30)
            ++above;
    }
    const std::size_t n = rep.values.size();
    rep.share_ar_shorter = share(shorter, n);
    rep.share_above_030 = share(above, n);
    if (shorter > 0)
        rep.mean_when_ar_shorter = sum_shorter / static_cast<double>(shorter);
    if (longer > 0)
        rep.mean_when_ar_longer = sum_longer / static_cast<double>(longer);
    return rep;
}

void write_loglength_report(std::ostream& out, const LogLengthReport& rep)
{
    out << "section,name,value\n";
    out << "summary,alpha," << csv::format(rep.alpha) << '\n';
    out << "summary,bin_width," << csv::format(rep.bin_width) << '\n';
    out << "summary,input_records," << rep.input_records << '\n';
    out << "summary,compared," << rep.values.size() << '\n';
    out << "summary,share_ar_shorter," << na_field(rep.share_ar_shorter) << '\n';
    out << "summary,mean_log_diff_when_ar_shorter," << na_field(rep.mean_when_ar_shorter) << '\n';
    out << "summary,mean_log_diff_when_ar_longer," << na_field(rep.mean_when_ar_longer) << '\n';
    out << "summary,share_above_0.30," << na_field(rep.share_above_030) << '\n';
    for (const auto& [reason, count] : rep.excluded)
        out << "excluded," << csv::escape(reason) << ',' << count << '\n';
    // bin k covers [k * bin_width, (k + 1) * bin_width)
    for (const auto& [k, count] : rep.bins)
        out << "bin," << k << ',' << count << '\n';
    out << "reference,ln(1.96/1.645)," << csv::format(LogLengthReport::reference_95_vs_90()) << '\n';
    out << "reference,ln(2.58/1.96)," << csv::format(LogLengthReport::reference_99_vs_95()) << '\n';
}

HeatmapGrid heatmap_grid(std::span<const HeatPoint> points, const HeatmapSpec& spec)
{
    if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth))
        throw DomainError("heatmap: bandwidth must be positive");
    if (spec.nx < 1 || spec.ny < 1)
        throw DomainError("heatmap: grid must have at least one cell per axis");
    if (!(spec.reach > 0.0))
        throw DomainError("heatmap: reach must be positive");

    HeatmapGrid grid;
    grid.spec = spec;
    const auto cells = static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny);
    grid.values.assign(cells, std::nullopt);
    grid.weights.assign(cells, 0.0);

    const double h2 = spec.bandwidth * spec.bandwidth;
    const double reach2 = spec.reach * spec.reach * h2;
    for (int j = 0; j < spec.ny; ++j)
    {
        const double cy = grid.y_center(j);
        for (int i = 0; i < spec.nx; ++i)
        {
            const double cx = grid.x_center(i);
            double sw = 0.0, swv = 0.0;
            bool any = false;
            for (const auto& p : points)
            {
                const double dx = p.abs_rho - cx;
                const double dy = p.f_coord - cy;
                const double d2 = dx * dx + dy * dy;
                if (d2 > reach2)
                    continue;
                const double w = std::exp(-0.5 * d2 / h2);
                sw += w;
                swv += w * p.value;
                any = true;
            }
            const auto idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.nx) + static_cast<std::size_t>(i);
            grid.weights[idx] = sw;
            if (any && sw > 0.0)
                grid.values[idx] = swv / sw;
        }
    }
    return grid;
}

HeatmapGrid heatmap_grid(std::span<const ComparisonRecord> records, double alpha, const HeatmapSpec& spec)
{
    std::vector<HeatPoint> points;
    for (const auto& r : records)
    {
        if (r.excluded())
            continue;
        const auto& ratio = r.at(alpha).log_length_ratio;
        if (!ratio)
            continue;
        points.push_back({std::abs(*r.rho_hat), r.coords.x, *ratio});
    }
    HeatmapGrid grid = heatmap_grid(std::span<const HeatPoint>(points), spec);
    grid.alpha = alpha;
    return grid;
}

void write_heatmap(std::ostream& out, const HeatmapGrid& grid)
{
    out << "i,j,abs_rho,f_coord,value,weight\n";
    for (int j = 0; j < grid.spec.ny; ++j)
    {
        for (int i = 0; i < grid.spec.nx; ++i)
        {
            const auto idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.spec.nx) + static_cast<std::size_t>(i);
            out << i << ',' << j << ',' << csv::format(grid.x_center(i)) << ',' << csv::format(grid.y_center(j)) << ','
                << na_field(grid.values[idx]) << ',' << csv::format(grid.weights[idx]) << '\n';
        }
    }
}

void write_ledger(std::ostream& out, std::span<const ComparisonRecord> records)
{
    out << "line,study_id,spec_id,status,reason,t,F,rho_hat,ar_stat,t_class,ar_class,tf_class,x,y";
    for (const char* lvl : {"05", "01"})
    {
        out << ",ar_kind_" << lvl << ",ar_lo_" << lvl << ",ar_hi_" << lvl << ",tf_kind_" << lvl << ",tf_lo_" << lvl
            << ",tf_hi_" << lvl << ",log_ratio_" << lvl;
    }
    out << '\n';
    for (const auto& r : records)
    {
        std::vector<std::string> f = {
            std::to_string(r.source_line),
            r.study_id,
            r.spec_id,
            r.excluded() ? "excluded" : "classified",
            r.exclusion ? std::string(to_string(*r.exclusion)) : std::string(),
            csv::format(r.t),
            csv::format(r.big_f),
            opt_field(r.rho_hat),
            opt_field(r.ar_stat),
            std::string(to_string(r.t_class)),
            r.ar_class ? std::string(to_string(*r.ar_class)) : std::string(),
            std::string(to_string(r.tf_class)),
            csv::format(r.coords.x),
            csv::format(r.coords.y),
        };
        for (const LevelComparison* lc : {&r.at5, &r.at1})
        {
            f.push_back(set_kind(lc->ar_set));
            f.push_back(set_lo(lc->ar_set));
            f.push_back(set_hi(lc->ar_set));
            f.push_back(set_kind(lc->tf_set));
            f.push_back(set_lo(lc->tf_set));
            f.push_back(set_hi(lc->tf_set));
            f.push_back(opt_field(lc->log_length_ratio));
        }
        out << csv::join(f) << '\n';
    }
}

}  // namespace ivtf
