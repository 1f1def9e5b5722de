#include "ivtf/mc_sim.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

#include "ivtf/csv.hpp"
#include "ivtf/errors.hpp"
#include "ivtf/parallel.hpp"
#include "ivtf/quantiles.hpp"
#include "ivtf/rng.hpp"

namespace ivtf {

void DGPConfig::validate() const
{
    if (n < 10)
        throw DomainError("DGPConfig: n must be at least 10");
    if (!(std::abs(rho) < 1.0))
        throw DomainError("DGPConfig: |rho| must be < 1");
    if (!std::isfinite(f0) || !std::isfinite(beta))
        throw DomainError("DGPConfig: f0 and beta must be finite");
}

double DGPConfig::pi() const
{
    return f0 / std::sqrt(static_cast<double>(n));
}

std::uint64_t DGPConfig::cell_id() const
{
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(n));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(beta));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(f0));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(rho));
    return h;
}

ModelData draw_dataset(const DGPConfig& config, std::uint64_t rep_index)
{
    config.validate();
    CounterRng rng(derive_key(config.seed, config.cell_id()), rep_index);
    const double pi = config.pi();
    const double s = std::sqrt(1.0 - config.rho * config.rho);

    ModelData d;
    d.y.resize(config.n);
    d.x.resize(config.n);
    d.z.resize(config.n);
    for (Eigen::Index i = 0; i < config.n; ++i) {
        const double z = rng.normal();
        const double e1 = rng.normal();
        const double e2 = rng.normal();
        const double u = e1;
        const double v = config.rho * e1 + s * e2;
        d.z[i] = z;
        d.x[i] = pi * z + v;
        d.y[i] = config.beta * d.x[i] + u;
    }
    return d;
}

std::string_view to_string(Procedure p)
{
    switch (p) {
        case Procedure::AR:
            return "AR";
        case Procedure::TF:
            return "tF";
        case Procedure::ConventionalT:
            return "t";
    }
    return "?";
}

double PowerCurve::rate(Procedure p, std::size_t j) const
{
    return static_cast<double>(rejections[static_cast<std::size_t>(p)][j]) / static_cast<double>(reps);
}

double PowerCurve::mc_se(Procedure p, std::size_t j) const
{
    const double r = rate(p, j);
    return std::sqrt(r * (1.0 - r) / static_cast<double>(reps));
}

std::vector<double> default_deviation_grid()
{
    std::vector<double> g;
    for (int i = -16; i <= 15; ++i)
        g.push_back(i / 10.0);
    return g;
}

PowerCurve run_power_study(const DGPConfig& config, std::span<const double> deviations, std::uint64_t reps,
                           const CVTable& cv_table, unsigned threads)
{
    config.validate();
    if (reps < 1000)
        throw DomainError("run_power_study: reps must be at least 10^3");
    if (deviations.empty())
        throw DomainError("run_power_study: empty deviation grid");

    PowerCurve curve;
    curve.n = config.n;
    curve.beta = config.beta;
    curve.f0 = config.f0;
    curve.rho = config.rho;
    curve.alpha = cv_table.level;
    curve.reps = reps;
    curve.deviations.assign(deviations.begin(), deviations.end());

    const std::size_t m = deviations.size();
    const double ar_cut = chi2_1_critical(cv_table.level);
    const double t_cut = two_sided_z(cv_table.level);

    // Replications are processed in fixed blocks; each block owns its counts
    // and the blocks are summed in index order.
    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t blocks = (reps + kBlock - 1) / kBlock;
    std::vector<std::array<std::vector<std::uint64_t>, 3>> partial(blocks);

    parallel_for(blocks, threads, [&](std::size_t b) {
        auto& counts = partial[b];
        for (auto& c : counts)
            c.assign(m, 0);
        const std::uint64_t first = b * kBlock;
        const std::uint64_t last = std::min(reps, first + kBlock);
        for (std::uint64_t r = first; r < last; ++r) {
            const auto moments = IvMoments::from(draw_dataset(config, r));
            const auto stats = moments.summary();
            const double cv = cv_lookup(cv_table, stats.big_f);
            for (std::size_t j = 0; j < m; ++j) {
                const double beta0 = config.beta - deviations[j];
                const double t = std::abs(stats.t_at(beta0));
                counts[0][j] += moments.ar(beta0) > ar_cut;
                counts[1][j] += t > cv;
                counts[2][j] += t > t_cut;
            }
        }
    });

    for (auto& c : curve.rejections)
        c.assign(m, 0);
    for (const auto& counts : partial)
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t j = 0; j < m; ++j)
                curve.rejections[p][j] += counts[p][j];
    return curve;
}

void write_power_report(std::ostream& out, std::span<const PowerCurve> curves)
{
    out << "f0,rho,deviation,procedure,rate,mc_se,n,beta,alpha,reps,rejections\n";
    for (const auto& c : curves) {
        for (auto p : kProcedures) {
            for (std::size_t j = 0; j < c.deviations.size(); ++j) {
                out << csv::format(c.f0) << ',' << csv::format(c.rho) << ',' << csv::format(c.deviations[j]) << ','
                    << to_string(p) << ',' << csv::format(c.rate(p, j)) << ',' << csv::format(c.mc_se(p, j)) << ','
                    << c.n << ',' << csv::format(c.beta) << ',' << csv::format(c.alpha) << ',' << c.reps << ','
                    << c.rejections[static_cast<std::size_t>(p)][j] << '\n';
            }
        }
    }
}

std::vector<PowerCurve> read_power_report(std::istream& in)
{
    const auto doc = csv::read(in);
    const std::vector<std::string> expected{"f0", "rho", "deviation", "procedure", "rate", "mc_se",
                                            "n", "beta", "alpha", "reps", "rejections"};
    if (doc.header != expected)
        throw ValidationError("power report: unexpected header");

    auto number = [](const csv::Row& row, std::size_t i) {
        const auto v = csv::parse_double(row.fields[i]);
        if (!v)
            throw ValidationError("power report line " + std::to_string(row.line_number) + ": bad number");
        return *v;
    };
    auto procedure = [](const std::string& s) {
        for (auto p : kProcedures)
            if (to_string(p) == s)
                return p;
        throw ValidationError("power report: unknown procedure " + s);
    };

    std::vector<PowerCurve> curves;
    // (f0, rho, n, beta, alpha, reps) -> curve index, in first-seen order
    std::map<std::tuple<double, double, double, double, double, double>, std::size_t> index;
    for (const auto& row : doc.rows) {
        if (row.fields.size() != expected.size())
            throw ValidationError("power report line " + std::to_string(row.line_number) + ": wrong field count");
        const auto key = std::make_tuple(number(row, 0), number(row, 1), number(row, 6), number(row, 7),
                                         number(row, 8), number(row, 9));
        auto [it, inserted] = index.try_emplace(key, curves.size());
        if (inserted) {
            PowerCurve c;
            c.f0 = std::get<0>(key);
            c.rho = std::get<1>(key);
            c.n = static_cast<Eigen::Index>(std::get<2>(key));
            c.beta = std::get<3>(key);
            c.alpha = std::get<4>(key);
            c.reps = static_cast<std::uint64_t>(std::get<5>(key));
            curves.push_back(std::move(c));
        }
        PowerCurve& c = curves[it->second];
        const auto p = static_cast<std::size_t>(procedure(row.fields[3]));
        const double dev = number(row, 2);
        const auto count = static_cast<std::uint64_t>(number(row, 10));
        if (p == 0)
            c.deviations.push_back(dev);
        c.rejections[p].push_back(count);
    }
    for (const auto& c : curves)
        for (const auto& r : c.rejections)
            if (r.size() != c.deviations.size())
                throw ValidationError("power report: procedures have different deviation grids");
    return curves;
}

}  // namespace ivtf
