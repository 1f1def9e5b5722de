#include "ivtf_cli/cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ivtf/errors.hpp"
#include "ivtf/parallel.hpp"

namespace ivtf::cli {

namespace {

template <class T>
void optional_double(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& help)
{
    app->add_option_function<double>(name, [&target](const double& v) { target = v; }, help);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Weak-instrument robust inference for just-identified IV: AR and tF tests, simulation, and "
                 "replication analysis"};
    app.name("ivtf");
    app.set_version_flag("--version", std::string(IVTF_VERSION));
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it")
        ->check(CLI::NonNegativeNumber);

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Finite-sample power curves of AR, tF and t");
    s->fallthrough();
    s->add_option("--f0", sim.f0, "Instrument strengths (comma-separated)")->required()->delimiter(',');
    s->add_option("--rho", sim.rho, "Endogeneity correlations (comma-separated)")->required()->delimiter(',');
    s->add_option("--dev-grid", sim.dev_grid, "beta - beta0 grid: default, lo:step:hi, or a list")
        ->capture_default_str();
    s->add_option("--reps", sim.reps, "Replications per design (>= 1000)")->capture_default_str();
    s->add_option("--n", sim.n, "Sample size")->capture_default_str();
    s->add_option("--beta", sim.beta, "True coefficient")->capture_default_str();
    s->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    s->add_option("--alpha", sim.alpha, "Test level")->capture_default_str();
    s->add_option("--cv-table", sim.cv_table, "tF critical-value table (default: bundled table for --alpha)");
    s->add_option("--out", sim.out, "Output directory")->required();
    s->add_flag("--figures", sim.figures, "Also render SVG power-curve panels");

    AnalyzeOptions an;
    auto* a = app.add_subcommand("analyze", "Classify reported specifications and compare AR and tF intervals");
    a->fallthrough();
    a->add_option("--input", an.input, "Specification CSV")->required();
    a->add_option("--cv-table-5", an.cv_table_5, "5% tF table (default: bundled)");
    a->add_option("--cv-table-1", an.cv_table_1, "1% tF table (default: bundled)");
    a->add_option("--out-dir", an.out_dir, "Output directory")->required();
    a->add_option("--bandwidth", an.bandwidth, "Heatmap kernel bandwidth")->capture_default_str();
    a->add_option("--grid", an.grid, "Heatmap cells per axis")->capture_default_str();
    a->add_flag("--figures", an.figures, "Also render SVG figures");

    InferOptions inf;
    auto* i = app.add_subcommand("infer", "AR and tF tests and confidence sets for one specification");
    i->fallthrough();
    optional_double(i, "--t", inf.t, "t-ratio at beta0");
    optional_double(i, "--beta", inf.beta, "2SLS estimate");
    optional_double(i, "--se", inf.se, "Standard error");
    optional_double(i, "--f", inf.big_f, "First-stage F (f_hat = +sqrt(F))");
    optional_double(i, "--f-hat", inf.f_hat, "Signed first-stage t-statistic");
    optional_double(i, "--rho", inf.rho, "Estimated residual correlation");
    optional_double(i, "--ar", inf.ar, "Reported AR statistic at beta0 (recovers rho)");
    i->add_option("--data", inf.data, "Raw CSV with columns y, x, z; other columns are controls");
    i->add_option("--beta0", inf.beta0, "Null value")->capture_default_str();
    i->add_option("--cv-table-5", inf.cv_table_5, "5% tF table (default: bundled)");
    i->add_option("--cv-table-1", inf.cv_table_1, "1% tF table (default: bundled)");

    VerifyOptions ver;
    auto* v = app.add_subcommand("verify-cv", "Monte Carlo size check of a tF table");
    v->fallthrough();
    v->add_option("--cv-table", ver.cv_table, "Table to check (default: bundled table for --alpha)");
    v->add_option("--alpha", ver.alpha, "Level")->capture_default_str();
    v->add_option("--reps", ver.reps, "Replications per cell (>= 10000)")->capture_default_str();
    v->add_option("--seed", ver.seed, "Master seed")->capture_default_str();
    v->add_option("--out", ver.out, "Optional output directory for the size report and manifest");

    CalibrateOptions cal;
    auto* c = app.add_subcommand("calibrate-cv", "Build a tF critical-value table");
    c->fallthrough();
    c->add_option("--alpha", cal.alpha, "Level")->capture_default_str();
    c->add_option("--out", cal.out, "Output table path")->required();
    c->add_option("--knots-per-decade", cal.knots_per_decade, "Knot density in F - threshold")->capture_default_str();
    c->add_option("--max-f", cal.max_f, "Largest knot")->capture_default_str();
    c->add_option("--limit-tolerance", cal.limit_tolerance, "Stop once cv is this close to z")->capture_default_str();

    ReplayOptions rep;
    auto* r = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
    r->fallthrough();
    r->add_option("manifest", rep.manifest, "manifest.json of the original run")->required();
    r->add_option("--out", rep.out, "Output directory for the replay")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    Context ctx{out, err, resolve_threads(threads)};
    try
    {
        if (s->parsed())
            return cmd_simulate(sim, ctx);
        if (a->parsed())
            return cmd_analyze(an, ctx);
        if (i->parsed())
            return cmd_infer(inf, ctx);
        if (v->parsed())
            return cmd_verify_cv(ver, ctx);
        if (c->parsed())
            return cmd_calibrate_cv(cal, ctx);
        if (r->parsed())
            return cmd_replay(rep, ctx);
    }
    catch (const ValidationError& e)
    {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    catch (const DomainError& e)
    {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kUsageError;
}

}  // namespace ivtf::cli
