#include "ivtf/tf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ivtf/csv.hpp"
#include "ivtf/errors.hpp"
#include "ivtf/parallel.hpp"
#include "ivtf/quantiles.hpp"
#include "ivtf/rng.hpp"

namespace ivtf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CVTable validated(double level, std::vector<CvKnot> knots, const std::vector<std::string>& labels)
{
    CVTable table;
    table.level = level;
    table.f_threshold = chi2_1_critical(level);
    table.cv_limit = two_sided_z(level);

    std::vector<std::string> problems;
    if (knots.empty())
        problems.push_back("table has no knots");
    const double limit_floor = table.cv_limit * (1.0 - 1e-12);
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const auto& k = knots[i];
        const std::string& where = labels[i];
        if (!std::isfinite(k.big_f) || !std::isfinite(k.cv)) {
            problems.push_back(where + ": non-finite value");
            continue;
        }
        if (k.big_f < table.f_threshold)
            problems.push_back(where + ": F = " + csv::format(k.big_f) + " is below the threshold " +
                               csv::format(table.f_threshold));
        if (k.cv < limit_floor)
            problems.push_back(where + ": cv = " + csv::format(k.cv) + " is below the limit " +
                               csv::format(table.cv_limit));
        if (i > 0) {
            if (!(k.big_f > knots[i - 1].big_f))
                problems.push_back(where + ": F is not strictly increasing");
            if (k.cv > knots[i - 1].cv)
                problems.push_back(where + ": cv increases with F");
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid cv table:";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ValidationError(msg);
    }
    table.knots = std::move(knots);
    return table;
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

constexpr double kZRange = 9.0;
constexpr double kPanelWidth = 0.05;

double phi(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// P(t^2 > c^2 | z_v) with z_u | z_v ~ N(rho z_v, 1 - rho^2), |rho| < 1.
double conditional_rejection(double f_bar, double c, double z_v, double rho)
{
    if (!std::isfinite(c) || f_bar == 0.0)
        return 0.0;
    const double s = std::sqrt(1.0 - rho * rho);
    const double mu = rho * z_v;
    const double c2 = c * c;
    const double fb2 = f_bar * f_bar;

    // z_u^2 (fb^2 - c^2) + 2 rho c^2 fb z_u - c^2 fb^2 > 0
    const double a = fb2 - c2;
    const double b = 2.0 * rho * c2 * f_bar;
    const double cc = -c2 * fb2;
    auto cdf = [&](double z) { return normal_cdf((z - mu) / s); };
    auto sf = [&](double z) { return normal_cdf(-(z - mu) / s); };

    if (a == 0.0) {
        if (b == 0.0)
            return 0.0;
        const double edge = -cc / b;
        return b > 0.0 ? sf(edge) : cdf(edge);
    }
    const double disc = 4.0 * c2 * fb2 * (fb2 - c2 * s * s);
    if (disc <= 0.0)
        return a > 0.0 ? 1.0 : 0.0;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b == 0.0 ? 1.0 : b));
    double r1 = q / a;
    double r2 = cc / q;
    if (r1 > r2)
        std::swap(r1, r2);
    if (a > 0.0)
        return cdf(r1) + sf(r2);
    return std::max(0.0, cdf(r2) - cdf(r1));
}

// |rho| = 1: z_u = rho z_v and |t| = |z_v f_bar| / f0.
double rejection_rho_one(const std::function<double(double)>& cutoff, double f0)
{
    auto rejects = [&](double z) {
        const double fb = f0 + z;
        const double c = cutoff(fb * fb);
        if (!std::isfinite(c))
            return false;
        if (f0 == 0.0)
            return true;
        return std::abs(z * fb) > c * f0;
    };
    constexpr double step = 1e-3;
    const int steps = static_cast<int>(2.0 * kZRange / step);
    double total = 0.0;
    double prev_z = -kZRange;
    bool prev = rejects(prev_z);
    double run_start = prev ? -kInf : 0.0;
    for (int i = 1; i <= steps; ++i) {
        const double z = -kZRange + i * step;
        const bool cur = rejects(z);
        if (cur != prev) {
            double lo = prev_z, hi = z;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (rejects(mid) == prev ? lo : hi) = mid;
            }
            const double edge = 0.5 * (lo + hi);
            if (cur)
                run_start = edge;
            else
                total += normal_cdf(edge) - normal_cdf(run_start);
        }
        prev = cur;
        prev_z = z;
    }
    if (prev)
        total += 1.0 - normal_cdf(run_start);
    return total;
}

}  // namespace

CVTable CVTable::make(double level, std::vector<CvKnot> knots)
{
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < knots.size(); ++i)
        labels.push_back("knot " + std::to_string(i + 1));
    return validated(level, std::move(knots), labels);
}

CVTable load_cv_table(std::istream& in, double level)
{
    const auto doc = csv::read(in);
    if (doc.header.size() != 2 || doc.header[0] != "F" || doc.header[1] != "cv")
        throw ValidationError("invalid cv table: header must be `F,cv`");

    std::vector<CvKnot> knots;
    std::vector<std::string> labels;
    std::vector<std::string> problems;
    for (const auto& row : doc.rows) {
        const std::string where = "line " + std::to_string(row.line_number);
        if (row.fields.size() != 2) {
            problems.push_back(where + ": expected 2 fields");
            continue;
        }
        const auto f = csv::parse_double(row.fields[0]);
        const auto cv = csv::parse_double(row.fields[1]);
        if (!f || !cv) {
            problems.push_back(where + ": non-numeric field");
            continue;
        }
        knots.push_back({*f, *cv});
        labels.push_back(where);
    }
    if (!problems.empty()) {
        std::string msg = "invalid cv table:";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ValidationError(msg);
    }
    return validated(level, std::move(knots), labels);
}

CVTable load_cv_table(const std::filesystem::path& path, double level)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open cv table " + path.string());
    return load_cv_table(in, level);
}

void write_cv_table(std::ostream& out, const CVTable& table, const std::vector<std::string>& comment)
{
    for (const auto& line : comment)
        out << "# " << line << '\n';
    out << "F,cv\n";
    for (const auto& k : table.knots)
        out << csv::format(k.big_f) << ',' << csv::format(k.cv) << '\n';
}

double cv_lookup(const CVTable& table, double big_f)
{
    if (!(big_f > table.f_threshold))
        return kInf;
    const auto& k = table.knots;
    if (big_f <= k.front().big_f)
        return k.front().cv;
    if (big_f >= k.back().big_f)
        return big_f == k.back().big_f ? k.back().cv : table.cv_limit;

    const auto upper = std::upper_bound(k.begin(), k.end(), big_f,
                                        [](double f, const CvKnot& knot) { return f < knot.big_f; });
    const auto& hi = *upper;
    const auto& lo = *(upper - 1);
    if (big_f == lo.big_f)
        return lo.cv;
    const double w = (std::log(big_f) - std::log(lo.big_f)) / (std::log(hi.big_f) - std::log(lo.big_f));
    return lo.cv + w * (hi.cv - lo.cv);
}

HypothesisTestResult tf_test(double t, double big_f, const CVTable& table)
{
    return HypothesisTestResult::make(std::abs(t), cv_lookup(table, big_f), table.level);
}

ConfidenceSet tf_confidence_interval(const SummaryStats& stats, const CVTable& table)
{
    if (!(stats.se > 0.0))
        throw DomainError("tf_confidence_interval: se must be positive");
    const double confidence = 1.0 - table.level;
    const double cv = cv_lookup(table, stats.big_f);
    if (!std::isfinite(cv))
        return ConfidenceSet::whole_line(confidence);
    return ConfidenceSet::bounded(stats.beta_hat - cv * stats.se, stats.beta_hat + cv * stats.se, confidence);
}

double AsymptoticNullDraw::t_squared() const
{
    const double fb = f_bar();
    const double den = fb * fb - 2.0 * rho * z_u * fb + z_u * z_u;
    if (!(den > 0.0))
        return 0.0;
    return z_u * z_u * fb * fb / den;
}

AsymptoticNullDraw draw_asymptotic_null(double f0, double rho, CounterRng& rng)
{
    const double a = rng.normal();
    const double b = rng.normal();
    return {a, rho * a + std::sqrt(1.0 - rho * rho) * b, f0, rho};
}

double SizeCell::tf_mc_se() const
{
    const double p = tf_rate();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

std::vector<double> default_size_f0_grid()
{
    return {0.5, 1, 2, 4, 6, 8, 10, 20, 50};
}

std::vector<double> default_size_rho_grid()
{
    std::vector<double> g;
    for (int i = -19; i <= 19; ++i)
        g.push_back(i / 20.0);
    return g;
}

SizeReport verify_size(const CVTable& table, std::span<const double> f0_grid,
                       std::span<const double> rho_grid, std::uint64_t reps, std::uint64_t seed,
                       unsigned threads)
{
    if (reps < 10000)
        throw DomainError("verify_size: reps must be at least 10^4");
    if (f0_grid.empty() || rho_grid.empty())
        throw DomainError("verify_size: empty grid");
    for (double rho : rho_grid)
        if (!(std::abs(rho) < 1.0))
            throw DomainError("verify_size: |rho| must be < 1");

    SizeReport report;
    report.alpha = table.level;
    report.reps = reps;
    report.seed = seed;
    for (double f0 : f0_grid)
        for (double rho : rho_grid)
            report.cells.push_back({f0, rho, reps, 0, 0});

    const double ar_cut = table.f_threshold;
    parallel_for(report.cells.size(), threads, [&](std::size_t idx) {
        SizeCell& cell = report.cells[idx];
        CounterRng rng(derive_key(seed, idx), 0);
        std::uint64_t tf_rej = 0, ar_rej = 0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            const auto d = draw_asymptotic_null(cell.f0, cell.rho, rng);
            const double cv = cv_lookup(table, d.big_f());
            if (d.t_squared() > cv * cv)
                ++tf_rej;
            if (d.ar() > ar_cut)
                ++ar_rej;
        }
        cell.tf_rejections = tf_rej;
        cell.ar_rejections = ar_rej;
    });

    for (std::size_t i = 0; i < report.cells.size(); ++i)
        if (report.cells[i].tf_rate() > report.cells[report.worst_cell].tf_rate())
            report.worst_cell = i;
    report.sup_rate = report.cells[report.worst_cell].tf_rate();
    report.mc_se = std::sqrt(report.alpha * (1.0 - report.alpha) / static_cast<double>(reps));
    report.threshold = report.alpha + 3.0 * report.mc_se;
    report.pass = report.sup_rate <= report.threshold;
    return report;
}

void write_size_report(std::ostream& out, const SizeReport& report)
{
    const auto& w = report.cells[report.worst_cell];
    out << "# alpha=" << csv::format(report.alpha) << " reps=" << report.reps << " seed=" << report.seed << '\n';
    out << "# sup_rate=" << csv::format(report.sup_rate) << " at f0=" << csv::format(w.f0)
        << " rho=" << csv::format(w.rho) << " mc_se=" << csv::format(report.mc_se)
        << " threshold=" << csv::format(report.threshold) << " verdict=" << (report.pass ? "PASS" : "FAIL")
        << '\n';
    out << "f0,rho,reps,tf_rejections,tf_rate,tf_mc_se,ar_rejections,ar_rate\n";
    for (const auto& c : report.cells) {
        out << csv::format(c.f0) << ',' << csv::format(c.rho) << ',' << c.reps << ',' << c.tf_rejections << ','
            << csv::format(c.tf_rate()) << ',' << csv::format(c.tf_mc_se()) << ',' << c.ar_rejections << ','
            << csv::format(c.ar_rate()) << '\n';
    }
}

double null_rejection_probability(const std::function<double(double)>& cutoff,
                                  std::span<const double> breaks, double f0, double rho)
{
    if (std::abs(rho) >= 1.0)
        return rejection_rho_one(cutoff, f0);

    std::vector<double> edges{-kZRange, kZRange};
    for (double fb : breaks) {
        if (!(fb > 0.0))
            continue;
        for (double z : {std::sqrt(fb) - f0, -std::sqrt(fb) - f0})
            if (z > -kZRange && z < kZRange)
                edges.push_back(z);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    double total = 0.0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double a = edges[s];
        const double b = edges[s + 1];
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / kPanelWidth)));
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            for (std::size_t g = 0; g < kGlNodes.size(); ++g) {
                const double z = mid + 0.5 * h * kGlNodes[g];
                const double fb = f0 + z;
                const double c = cutoff(fb * fb);
                total += 0.5 * h * kGlWeights[g] * phi(z) * conditional_rejection(fb, c, z, rho);
            }
        }
    }
    return total;
}

double tf_null_rejection_probability(const CVTable& table, double f0, double rho)
{
    std::vector<double> breaks{table.f_threshold};
    for (const auto& k : table.knots)
        breaks.push_back(k.big_f);
    return null_rejection_probability([&](double f) { return cv_lookup(table, f); }, breaks, f0, rho);
}

}  // namespace ivtf
