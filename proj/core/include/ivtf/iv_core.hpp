#pragma once

#include <optional>

#include <Eigen/Dense>

namespace ivtf {

/// Observations of the just-identified model
///   y = x beta + u,   x = z pi + v,
/// with optional exogenous controls w (including any intercept column).
struct ModelData
{
    Eigen::VectorXd y;
    Eigen::VectorXd x;
    Eigen::VectorXd z;
    std::optional<Eigen::MatrixXd> w;
    // Control columns already removed by partial_out; they still cost
    // degrees of freedom.
    int absorbed_controls = 0;

    /// Validating constructor: equal lengths and n > k_w + 1.
    static ModelData make(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::VectorXd z,
                          std::optional<Eigen::MatrixXd> w = std::nullopt);

    Eigen::Index n() const { return y.size(); }
    int control_count() const { return w ? static_cast<int>(w->cols()) : 0; }
};

/// Variance-scaling convention. SmallSample divides residual sums of squares
/// by n - k (k = estimated coefficients incl. partialled controls);
/// LargeSample divides by n.
enum class DofPolicy
{
    SmallSample,
    LargeSample,
};

/// The single convention used everywhere unless a caller overrides it.
DofPolicy degrees_of_freedom_policy();

double variance_divisor(Eigen::Index n, int k, DofPolicy policy = degrees_of_freedom_policy());

/// A specification reduced to the statistics the procedures need.
struct SummaryStats
{
    double beta_hat = 0.0;
    double se = 1.0;
    double f_hat = 0.0;   // signed first-stage t-statistic
    double big_f = 0.0;   // f_hat^2
    double rho_hat = 0.0;
    // Exact-fit data: zero structural (or first-stage) residuals, rho_hat
    // reported as 0.
    bool degenerate = false;

    /// Build from reported quantities; big_f is derived from f_hat.
    static SummaryStats from_reported(double beta_hat, double se, double f_hat, double rho_hat);

    /// Conventional t-ratio for H0: beta = beta0.
    double t_at(double beta0) const { return (beta_hat - beta0) / se; }
};

struct HypothesisTestResult
{
    double statistic = 0.0;
    double critical_value = 0.0;  // may be +inf
    bool reject = false;
    double level = 0.05;          // significance level alpha

    static HypothesisTestResult make(double statistic, double critical_value, double level)
    {
        return {statistic, critical_value, statistic > critical_value, level};
    }
};

/// Frisch-Waugh residualization of y, x, z on w. Returns the input unchanged
/// when there are no controls.
ModelData partial_out(const ModelData& data);

/// Just-identified 2SLS with homoskedastic standard errors.
/// Expects controls already partialled out (throws if w is still present).
SummaryStats estimate_2sls(const ModelData& data,
                           DofPolicy policy = degrees_of_freedom_policy());

/// Second-moment summary of a (partialled) dataset. Everything the AR and
/// t statistics need is a quadratic form in these, so repeated evaluation at
/// many beta0 is O(1).
struct IvMoments
{
    Eigen::Index n = 0;
    int k = 1;  // estimated coefficients: beta plus absorbed controls
    double zz = 0, zx = 0, zy = 0, xx = 0, xy = 0, yy = 0;

    static IvMoments from(const ModelData& data);

    SummaryStats summary(DofPolicy policy = degrees_of_freedom_policy()) const;
    double ar(double beta0, DofPolicy policy = degrees_of_freedom_policy()) const;
};

}  // namespace ivtf
