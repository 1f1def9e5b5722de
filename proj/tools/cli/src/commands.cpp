#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ivtf/ar.hpp"
#include "ivtf/csv.hpp"
#include "ivtf/empirics.hpp"
#include "ivtf/errors.hpp"
#include "ivtf/figures.hpp"
#include "ivtf/iv_core.hpp"
#include "ivtf/mc_sim.hpp"
#include "ivtf/quantiles.hpp"
#include "ivtf/tf.hpp"
#include "ivtf_cli/cli.hpp"
#include "ivtf_cli/digest.hpp"
#include "ivtf_cli/manifest.hpp"

namespace fs = std::filesystem;

namespace ivtf::cli {

namespace {

std::string fmt(double v) { return csv::format(v); }

std::string join_values(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i)
            out += ',';
        out += fmt(values[i]);
    }
    return out;
}

std::string show(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

FileDigest input_digest(const std::string& role, const fs::path& path)
{
    return {role, fs::absolute(path).lexically_normal().string(), sha256_file(path), fs::file_size(path)};
}

class OutputDir
{
  public:
    explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

    void write(const std::string& relative, const std::string& content)
    {
        const fs::path p = root_ / relative;
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw Error("cannot write " + p.string());
        out << content;
        out.close();
        if (!out)
            throw Error("write failed: " + p.string());
        files_.push_back({"", relative, sha256_hex(content), content.size()});
    }

    const fs::path& root() const { return root_; }
    const std::vector<FileDigest>& files() const { return files_; }

  private:
    fs::path root_;
    std::vector<FileDigest> files_;
};

template <class Fn>
std::string render(Fn&& fn)
{
    std::ostringstream s;
    fn(s);
    return s.str();
}

// Runs `body` and writes manifest.json into the output directory whether the
// body succeeds or throws.
template <class Body>
int with_manifest(RunManifest manifest, const fs::path& out_dir, Context& ctx, Body&& body)
{
    const auto start = std::chrono::steady_clock::now();
    manifest.tool_version = IVTF_VERSION;
    manifest.threads = ctx.threads;
    std::optional<OutputDir> dir;
    auto finish = [&](const std::string& status, const std::string& error) {
        manifest.status = status;
        manifest.error = error;
        manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (dir)
        {
            manifest.outputs = dir->files();
            manifest.write(dir->root() / "manifest.json");
        }
    };
    try
    {
        dir.emplace(out_dir);
        const int code = body(*dir, manifest);
        finish(code == kSuccess ? "ok" : "failed", code == kSuccess ? "" : "exit code " + std::to_string(code));
        return code;
    }
    catch (const std::exception& e)
    {
        try
        {
            finish("failed", e.what());
        }
        catch (const std::exception&)
        {
        }
        throw;
    }
}

std::string fig_name(double v)
{
    std::string s = fmt(v);
    std::replace(s.begin(), s.end(), '-', 'm');
    return s;
}

CVTable load_table(const fs::path& path, double alpha)
{
    if (!fs::exists(path))
        throw ValidationError("cv table not found: " + path.string());
    return load_cv_table(path, alpha);
}

}  // namespace

fs::path resolve_cv_table(const std::string& flag, double alpha)
{
    if (!flag.empty())
        return flag;
    std::string env_name;
    std::string file;
    if (alpha == kAlpha5)
    {
        env_name = "IVTF_CV_TABLE_05";
        file = "cv_tf_05.csv";
    }
    else if (alpha == kAlpha1)
    {
        env_name = "IVTF_CV_TABLE_01";
        file = "cv_tf_01.csv";
    }
    else
    {
        throw ValidationError("no bundled cv table for alpha = " + fmt(alpha) + "; pass one explicitly");
    }
    if (const char* env = std::getenv(env_name.c_str()); env && *env)
        return env;
    for (const fs::path& dir : {fs::path(IVTF_SOURCE_DATA_DIR), fs::path(IVTF_INSTALL_DATA_DIR)})
    {
        if (fs::exists(dir / file))
            return dir / file;
    }
    throw Error("no cv table found for alpha = " + fmt(alpha) + "; set " + env_name + " or pass one explicitly");
}

std::vector<double> parse_deviation_grid(const std::string& spec)
{
    if (spec == "default")
        return default_deviation_grid();
    std::vector<double> out;
    if (spec.find(':') != std::string::npos)
    {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() != 3)
            throw ValidationError("--dev-grid: expected lo:step:hi, got '" + spec + "'");
        const auto lo = csv::parse_double(parts[0]);
        const auto step = csv::parse_double(parts[1]);
        const auto hi = csv::parse_double(parts[2]);
        if (!lo || !step || !hi || !std::isfinite(*lo) || !std::isfinite(*hi) || !(*step > 0.0) || *hi < *lo)
            throw ValidationError("--dev-grid: invalid range '" + spec + "'");
        const auto count = static_cast<long long>(std::floor((*hi - *lo) / *step + 1e-9)) + 1;
        if (count > 100000)
            throw ValidationError("--dev-grid: too many points");
        for (long long k = 0; k < count; ++k)
            out.push_back(std::round((*lo + static_cast<double>(k) * *step) * 1e12) / 1e12);
        return out;
    }
    for (const auto& field : csv::split(spec))
    {
        const auto v = csv::parse_double(field);
        if (!v || !std::isfinite(*v))
            throw ValidationError("--dev-grid: not a number: '" + field + "'");
        out.push_back(*v);
    }
    if (out.empty())
        throw ValidationError("--dev-grid: empty grid");
    return out;
}

int cmd_simulate(const SimulateOptions& o, Context& ctx)
{
    if (o.reps < 1000)
        throw ValidationError("--reps must be at least 1000");
    if (o.f0.empty() || o.rho.empty())
        throw ValidationError("--f0 and --rho need at least one value each");
    if (!(o.alpha > 0.0 && o.alpha < 1.0))
        throw ValidationError("--alpha must lie in (0, 1)");
    const std::vector<double> devs = parse_deviation_grid(o.dev_grid);

    std::vector<DGPConfig> configs;
    for (const double f0 : o.f0)
    {
        for (const double rho : o.rho)
        {
            DGPConfig c{o.n, o.beta, f0, rho, o.seed};
            try
            {
                c.validate();
            }
            catch (const DomainError& e)
            {
                throw ValidationError(e.what());
            }
            if (!(f0 >= 0.0) || !std::isfinite(f0))
                throw ValidationError("--f0 values must be finite and non-negative");
            configs.push_back(c);
        }
    }

    const fs::path table_path = resolve_cv_table(o.cv_table, o.alpha);
    const CVTable table = load_table(table_path, o.alpha);

    RunManifest m;
    m.subcommand = "simulate";
    m.seed = o.seed;
    m.command = {"simulate",       "--f0",    join_values(o.f0),        "--rho",  join_values(o.rho),
                 "--dev-grid",     join_values(devs), "--reps", std::to_string(o.reps), "--n",
                 std::to_string(o.n), "--beta", fmt(o.beta),             "--seed", std::to_string(o.seed),
                 "--alpha",        fmt(o.alpha), "--cv-table", fs::absolute(table_path).lexically_normal().string()};
    if (o.figures)
        m.command.push_back("--figures");
    m.parameters = {{"f0", o.f0}, {"rho", o.rho},     {"deviations", devs}, {"reps", o.reps},
                    {"n", o.n},   {"beta", o.beta},   {"seed", o.seed},     {"alpha", o.alpha},
                    {"figures", o.figures}};
    m.inputs.push_back(input_digest("cv_table", table_path));

    return with_manifest(std::move(m), o.out, ctx, [&](OutputDir& dir, RunManifest&) {
        std::vector<PowerCurve> curves;
        curves.reserve(configs.size());
        for (const auto& c : configs)
            curves.push_back(run_power_study(c, devs, o.reps, table, ctx.threads));
        dir.write("power_report.csv", render([&](std::ostream& s) { write_power_report(s, curves); }));
        if (o.figures)
        {
            for (const auto& c : curves)
                dir.write("figures/power_f0_" + fig_name(c.f0) + "_rho_" + fig_name(c.rho) + ".svg",
                          render_power_curve(c));
        }
        ctx.out << "simulate: " << curves.size() << " design(s) x " << devs.size() << " deviation(s), " << o.reps
                << " replications -> " << dir.root().string() << '\n';
        return static_cast<int>(kSuccess);
    });
}

int cmd_analyze(const AnalyzeOptions& o, Context& ctx)
{
    if (!(o.bandwidth > 0.0))
        throw ValidationError("--bandwidth must be positive");
    if (o.grid < 1)
        throw ValidationError("--grid must be at least 1");
    const fs::path p5 = resolve_cv_table(o.cv_table_5, kAlpha5);
    const fs::path p1 = resolve_cv_table(o.cv_table_1, kAlpha1);
    const CVTable cv5 = load_table(p5, kAlpha5);
    const CVTable cv1 = load_table(p1, kAlpha1);

    std::ifstream in(o.input, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open input " + o.input);
    IngestResult ingested = ingest(in);

    std::vector<SpecificationRecord> all = std::move(ingested.records);
    all.insert(all.end(), ingested.rho_unrecoverable.begin(), ingested.rho_unrecoverable.end());
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.source_line < b.source_line; });

    RunManifest m;
    m.subcommand = "analyze";
    m.command = {"analyze",
                 "--input",
                 fs::absolute(o.input).lexically_normal().string(),
                 "--cv-table-5",
                 fs::absolute(p5).lexically_normal().string(),
                 "--cv-table-1",
                 fs::absolute(p1).lexically_normal().string(),
                 "--bandwidth",
                 fmt(o.bandwidth),
                 "--grid",
                 std::to_string(o.grid)};
    if (o.figures)
        m.command.push_back("--figures");
    m.parameters = {{"bandwidth", o.bandwidth}, {"grid", o.grid}, {"figures", o.figures}};
    m.inputs = {input_digest("specifications", o.input), input_digest("cv_table_5", p5),
                input_digest("cv_table_1", p1)};

    return with_manifest(std::move(m), o.out_dir, ctx, [&](OutputDir& dir, RunManifest&) {
        const std::vector<ComparisonRecord> records = classify_all(all, cv5, cv1, ctx.threads);
        const AgreementTable agreement = aggregate_figure1(records);
        const LogLengthReport ll5 = loglength_distribution(records, kAlpha5);
        const LogLengthReport ll1 = loglength_distribution(records, kAlpha1);
        const HeatmapSpec spec{o.grid, o.grid, o.bandwidth, 3.0};
        const HeatmapGrid h5 = heatmap_grid(records, kAlpha5, spec);
        const HeatmapGrid h1 = heatmap_grid(records, kAlpha1, spec);

        dir.write("agreement.csv", render([&](std::ostream& s) { write_agreement(s, agreement); }));
        dir.write("loglength_05.csv", render([&](std::ostream& s) { write_loglength_report(s, ll5); }));
        dir.write("loglength_01.csv", render([&](std::ostream& s) { write_loglength_report(s, ll1); }));
        dir.write("heatmap_05.csv", render([&](std::ostream& s) { write_heatmap(s, h5); }));
        dir.write("heatmap_01.csv", render([&](std::ostream& s) { write_heatmap(s, h1); }));
        dir.write("ledger.csv", render([&](std::ostream& s) { write_ledger(s, records); }));
        if (o.figures)
        {
            dir.write("figures/significance.svg", render_significance_figure(records, cv5, cv1));
            dir.write("figures/loglength_05.svg", render_loglength_histogram(ll5));
            dir.write("figures/loglength_01.svg", render_loglength_histogram(ll1));
            dir.write("figures/heatmap_05.svg", render_heatmap(h5));
            dir.write("figures/heatmap_01.svg", render_heatmap(h1));
        }

        std::size_t excluded = 0;
        for (const auto& r : records)
            excluded += r.excluded() ? 1 : 0;
        ctx.out << "analyze: " << records.size() << " specification(s), " << records.size() - excluded
                << " classified, " << excluded << " excluded";
        for (const auto& [reason, count] : ll5.excluded)
            if (count && (reason == "rho unrecoverable" || reason == "invalid estimated correlation"))
                ctx.out << " [" << reason << ": " << count << "]";
        ctx.out << " -> " << dir.root().string() << '\n';
        if (!agreement.tf_stricter_than_ar.empty())
            ctx.err << "warning: " << agreement.tf_stricter_than_ar.size()
                    << " specification(s) significant under tF at a stricter level than under AR\n";
        return static_cast<int>(kSuccess);
    });
}

namespace {

ModelData read_raw_data(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open data file " + path);
    const csv::Document doc = csv::read(in);
    std::optional<std::size_t> iy, ix, iz;
    std::vector<std::size_t> controls;
    for (std::size_t c = 0; c < doc.header.size(); ++c)
    {
        const auto& h = doc.header[c];
        if (h == "y")
            iy = c;
        else if (h == "x")
            ix = c;
        else if (h == "z")
            iz = c;
        else
            controls.push_back(c);
    }
    if (!iy || !ix || !iz)
        throw ValidationError("data file needs columns y, x and z (other columns are controls)");
    const auto n = static_cast<Eigen::Index>(doc.rows.size());
    Eigen::VectorXd y(n), x(n), z(n);
    Eigen::MatrixXd w(n, static_cast<Eigen::Index>(controls.size()));
    std::string problems;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& row = doc.rows[static_cast<std::size_t>(i)];
        auto get = [&](std::size_t c) {
            const auto v = c < row.fields.size() ? csv::parse_double(row.fields[c]) : std::nullopt;
            if (!v || !std::isfinite(*v))
            {
                problems += "\n  line " + std::to_string(row.line_number) + ": column '" + doc.header[c] +
                            "' is not a finite number";
                return 0.0;
            }
            return *v;
        };
        y[i] = get(*iy);
        x[i] = get(*ix);
        z[i] = get(*iz);
        for (std::size_t k = 0; k < controls.size(); ++k)
            w(i, static_cast<Eigen::Index>(k)) = get(controls[k]);
    }
    if (!problems.empty())
        throw ValidationError("data file " + path + ":" + problems);
    std::optional<Eigen::MatrixXd> wopt;
    if (!controls.empty())
        wopt = std::move(w);
    try
    {
        return ModelData::make(std::move(y), std::move(x), std::move(z), std::move(wopt));
    }
    catch (const DomainError& e)
    {
        throw ValidationError(std::string("data file ") + path + ": " + e.what());
    }
}

std::string describe(const ConfidenceSet& s)
{
    switch (s.kind())
    {
    case ConfidenceSet::Kind::Bounded:
        return "bounded [" + show(s.lo()) + ", " + show(s.hi()) + "]";
    case ConfidenceSet::Kind::TwoRays:
        return "two_rays (-inf, " + show(s.lo()) + "] U [" + show(s.hi()) + ", inf)";
    case ConfidenceSet::Kind::WholeLine:
        break;
    }
    return "whole_line";
}

}  // namespace

int cmd_infer(const InferOptions& o, Context& ctx)
{
    const CVTable cv5 = load_table(resolve_cv_table(o.cv_table_5, kAlpha5), kAlpha5);
    const CVTable cv1 = load_table(resolve_cv_table(o.cv_table_1, kAlpha1), kAlpha1);

    SummaryStats stats;
    double ar = 0.0;
    std::string note;
    if (!o.data.empty())
    {
        if (o.t || o.beta || o.se || o.big_f || o.f_hat || o.rho || o.ar)
            throw ValidationError("--data cannot be combined with summary-statistic flags");
        const ModelData data = partial_out(read_raw_data(o.data));
        stats = estimate_2sls(data);
        ar = ar_statistic_raw(data, o.beta0);
    }
    else
    {
        if (o.big_f && o.f_hat)
            throw ValidationError("pass either --f or --f-hat, not both");
        if (!o.big_f && !o.f_hat)
            throw ValidationError("first-stage strength missing: pass --f (F) or --f-hat");
        if (o.big_f && !(*o.big_f >= 0.0))
            throw ValidationError("--f must be non-negative");
        const double f_hat = o.f_hat ? *o.f_hat : std::sqrt(*o.big_f);

        double beta_hat = 0.0, se = 1.0;
        if (o.beta && o.se)
        {
            if (o.t)
                throw ValidationError("pass either --t or --beta/--se, not both");
            beta_hat = *o.beta;
            se = *o.se;
            if (!(se > 0.0))
                throw ValidationError("--se must be positive");
        }
        else if (o.t && !o.beta && !o.se)
        {
            beta_hat = o.beta0 + *o.t;
            note = "intervals in units of se (beta_hat = beta0 + t, se = 1)";
        }
        else
        {
            throw ValidationError("pass --t, or both --beta and --se");
        }
        const double t = (beta_hat - o.beta0) / se;

        double rho = 0.0;
        if (o.rho && o.ar)
            throw ValidationError("pass either --rho or --ar, not both");
        if (o.rho)
        {
            rho = *o.rho;
        }
        else if (o.ar)
        {
            if (!(*o.ar >= 0.0))
                throw ValidationError("--ar must be non-negative");
            try
            {
                rho = recover_rho(t, f_hat, *o.ar);
            }
            catch (const NotRecoverableError& e)
            {
                ctx.err << "rho cannot be computed: " << e.what()
                        << "; the specification is excluded from interval comparisons\n";
                return kRuntimeFailure;
            }
        }
        else
        {
            throw ValidationError("pass --rho or --ar");
        }
        if (!(std::abs(rho) <= 1.0))
        {
            ctx.err << "invalid estimated correlation: rho_hat = " << show(rho)
                    << " lies outside [-1, 1]; the specification is excluded from interval comparisons\n";
            return kRuntimeFailure;
        }
        stats = SummaryStats::from_reported(beta_hat, se, f_hat, rho);
        ar = o.ar ? *o.ar : ar_statistic_summary(t, f_hat, rho);
    }

    const double t = stats.t_at(o.beta0);
    auto& out = ctx.out;
    out << "beta_hat      " << show(stats.beta_hat) << '\n'
        << "se            " << show(stats.se) << '\n'
        << "F             " << show(stats.big_f) << '\n'
        << "rho_hat       " << show(stats.rho_hat) << '\n'
        << "beta0         " << show(o.beta0) << '\n'
        << "t             " << show(t) << '\n'
        << "AR statistic  " << show(ar) << '\n';
    if (!note.empty())
        out << "note          " << note << '\n';
    for (const CVTable* table : {&cv5, &cv1})
    {
        const double alpha = table->level;
        const double crit = chi2_1_critical(alpha);
        const ConfidenceSet ar_set = ar_confidence_set(stats, 1.0 - alpha);
        const HypothesisTestResult tf = tf_test(t, stats.big_f, *table);
        const ConfidenceSet tf_set = tf_confidence_interval(stats, *table);
        out << show(100 * alpha) << "% level\n"
            << "  AR test     " << (ar > crit ? "reject" : "do not reject") << " (critical value " << show(crit)
            << ")\n"
            << "  AR set      " << describe(ar_set) << '\n'
            << "  tF cv       " << show(tf.critical_value) << '\n'
            << "  tF test     " << (tf.reject ? "reject" : "do not reject") << '\n'
            << "  tF set      " << describe(tf_set) << '\n';
        const auto la = ar_set.length();
        const auto lt = tf_set.length();
        if (la && lt && *la > 0.0 && *lt > 0.0)
            out << "  ln(length tF / length AR)  " << show(std::log(*lt / *la)) << '\n';
        else
            out << "  ln(length tF / length AR)  undefined (unbounded set)\n";
    }
    return kSuccess;
}

int cmd_verify_cv(const VerifyOptions& o, Context& ctx)
{
    if (o.reps < 10000)
        throw ValidationError("--reps must be at least 10000");
    const fs::path path = resolve_cv_table(o.cv_table, o.alpha);
    const CVTable table = load_table(path, o.alpha);
    const auto f0 = default_size_f0_grid();
    const auto rho = default_size_rho_grid();

    auto body = [&]() {
        const SizeReport rep = verify_size(table, f0, rho, o.reps, o.seed, ctx.threads);
        const SizeCell& worst = rep.cells[rep.worst_cell];
        ctx.out << "verify-cv: " << (rep.pass ? "PASS" : "FAIL") << " sup tF rejection " << show(rep.sup_rate)
                << " at f0 = " << show(worst.f0) << ", rho = " << show(worst.rho) << "; threshold "
                << show(rep.threshold) << " (alpha " << show(rep.alpha) << " + 3 x " << show(rep.mc_se) << ")\n";
        return rep;
    };

    if (o.out.empty())
        return body().pass ? kSuccess : kVerificationFailure;

    RunManifest m;
    m.subcommand = "verify-cv";
    m.seed = o.seed;
    m.command = {"verify-cv", "--cv-table", fs::absolute(path).lexically_normal().string(), "--alpha", fmt(o.alpha),
                 "--reps",    std::to_string(o.reps), "--seed", std::to_string(o.seed)};
    m.parameters = {{"alpha", o.alpha}, {"reps", o.reps}, {"seed", o.seed}, {"f0_grid", f0}, {"rho_grid", rho}};
    m.inputs.push_back(input_digest("cv_table", path));
    return with_manifest(std::move(m), o.out, ctx, [&](OutputDir& dir, RunManifest& man) {
        const SizeReport rep = body();
        dir.write("size_report.csv", render([&](std::ostream& s) { write_size_report(s, rep); }));
        man.parameters["pass"] = rep.pass;
        return static_cast<int>(rep.pass ? kSuccess : kVerificationFailure);
    });
}

int cmd_calibrate_cv(const CalibrateOptions& o, Context& ctx)
{
    if (!(o.alpha > 0.0 && o.alpha < 0.5))
        throw ValidationError("--alpha must lie in (0, 0.5)");
    if (o.knots_per_decade < 1 || !(o.max_f > 0.0) || !(o.limit_tolerance > 0.0))
        throw ValidationError("calibration options must be positive");
    CalibrationOptions opts;
    opts.knots_per_decade = o.knots_per_decade;
    opts.max_f = o.max_f;
    opts.limit_tolerance = o.limit_tolerance;
    opts.threads = ctx.threads;
    const CVTable table = calibrate_cv_table(o.alpha, opts);

    const fs::path out_path(o.out);
    if (out_path.has_parent_path())
        fs::create_directories(out_path.parent_path());
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + out_path.string());
    write_cv_table(out, table,
                   {"tF critical values at level " + fmt(o.alpha),
                    "cv(F) = +inf for F <= " + fmt(table.f_threshold) + "; linear in ln F between knots; cv = " +
                        fmt(table.cv_limit) + " beyond the last knot",
                    "generated by: ivtf calibrate-cv --alpha " + fmt(o.alpha) + " --knots-per-decade " +
                        std::to_string(o.knots_per_decade) + " --max-f " + fmt(o.max_f) + " --limit-tolerance " +
                        fmt(o.limit_tolerance)});
    out.close();
    if (!out)
        throw Error("write failed: " + out_path.string());
    ctx.out << "calibrate-cv: " << table.knots.size() << " knots, cv(10) = " << show(cv_lookup(table, 10.0))
            << ", last knot F = " << show(table.knots.back().big_f) << " -> " << out_path.string() << '\n';
    return kSuccess;
}

int cmd_replay(const ReplayOptions& o, Context& ctx)
{
    const RunManifest m = RunManifest::read(o.manifest);
    if (m.status != "ok")
        throw ValidationError("manifest records a failed run; nothing to replay");
    std::size_t input_mismatch = 0;
    for (const auto& in : m.inputs)
    {
        if (!fs::exists(in.path) || sha256_file(in.path) != in.sha256)
        {
            ctx.err << "replay: input changed or missing: " << in.path << " (" << in.role << ")\n";
            ++input_mismatch;
        }
    }
    if (input_mismatch)
        return kVerificationFailure;

    std::vector<std::string> args = {"--threads", std::to_string(ctx.threads)};
    args.insert(args.end(), m.command.begin(), m.command.end());
    args.push_back(m.subcommand == "analyze" ? "--out-dir" : "--out");
    args.push_back(o.out);
    const int code = run(args, ctx.out, ctx.err);
    if (code != kSuccess)
        return code;

    std::size_t mismatches = 0;
    for (const auto& f : m.outputs)
    {
        const fs::path p = fs::path(o.out) / f.path;
        if (!fs::exists(p) || sha256_file(p) != f.sha256)
        {
            ctx.err << "replay: output differs: " << f.path << '\n';
            ++mismatches;
        }
    }
    const RunManifest replayed = RunManifest::read(fs::path(o.out) / "manifest.json");
    if (replayed.outputs.size() != m.outputs.size())
    {
        ctx.err << "replay: output count differs (" << replayed.outputs.size() << " vs " << m.outputs.size() << ")\n";
        ++mismatches;
    }
    ctx.out << "replay: " << (mismatches ? "MISMATCH" : "identical") << " (" << m.outputs.size() << " output(s))\n";
    return mismatches ? kVerificationFailure : kSuccess;
}

}  // namespace ivtf::cli
