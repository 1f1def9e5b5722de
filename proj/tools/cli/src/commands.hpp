#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ivtf::cli {

struct Context
{
    std::ostream& out;
    std::ostream& err;
    unsigned threads = 0;
};

struct SimulateOptions
{
    std::vector<double> f0;
    std::vector<double> rho;
    std::string dev_grid = "default";
    std::uint64_t reps = 1000;
    long n = 1000;
    double beta = 1.0;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::string cv_table;
    std::string out;
    bool figures = false;
};

struct AnalyzeOptions
{
    std::string input;
    std::string cv_table_5;
    std::string cv_table_1;
    std::string out_dir;
    double bandwidth = 0.08;
    int grid = 50;
    bool figures = false;
};

struct InferOptions
{
    std::optional<double> t;
    std::optional<double> beta;
    std::optional<double> se;
    std::optional<double> big_f;
    std::optional<double> f_hat;
    std::optional<double> rho;
    std::optional<double> ar;
    std::string data;
    double beta0 = 0.0;
    std::string cv_table_5;
    std::string cv_table_1;
};

struct VerifyOptions
{
    std::string cv_table;
    double alpha = 0.05;
    std::uint64_t reps = 100000;
    std::uint64_t seed = 0;
    std::string out;
};

struct CalibrateOptions
{
    double alpha = 0.05;
    std::string out;
    int knots_per_decade = 24;
    double max_f = 1e5;
    double limit_tolerance = 1e-3;
};

struct ReplayOptions
{
    std::string manifest;
    std::string out;
};

int cmd_simulate(const SimulateOptions& o, Context& ctx);
int cmd_analyze(const AnalyzeOptions& o, Context& ctx);
int cmd_infer(const InferOptions& o, Context& ctx);
int cmd_verify_cv(const VerifyOptions& o, Context& ctx);
int cmd_calibrate_cv(const CalibrateOptions& o, Context& ctx);
int cmd_replay(const ReplayOptions& o, Context& ctx);

/// Flag > IVTF_CV_TABLE_05 / IVTF_CV_TABLE_01 > bundled data directory.
std::filesystem::path resolve_cv_table(const std::string& flag, double alpha);

/// "default", "lo:step:hi", or a comma-separated list.
std::vector<double> parse_deviation_grid(const std::string& spec);

}  // namespace ivtf::cli
