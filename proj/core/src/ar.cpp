#include "ivtf/ar.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ivtf/errors.hpp"
#include "ivtf/quantiles.hpp"

namespace ivtf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ConfidenceSet ConfidenceSet::bounded(double lo, double hi, double confidence)
{
    if (!(lo <= hi))
        throw DomainError("ConfidenceSet: bounded set needs lo <= hi");
    return {Kind::Bounded, lo, hi, confidence};
}

ConfidenceSet ConfidenceSet::two_rays(double lo, double hi, double confidence)
{
    if (!(lo < hi))
        throw DomainError("ConfidenceSet: two-ray set needs lo < hi");
    return {Kind::TwoRays, lo, hi, confidence};
}

ConfidenceSet ConfidenceSet::whole_line(double confidence)
{
    return {Kind::WholeLine, -kInf, kInf, confidence};
}

bool ConfidenceSet::contains(double beta0) const
{
    switch (kind_) {
        case Kind::Bounded:
            return lo_ <= beta0 && beta0 <= hi_;
        case Kind::TwoRays:
            return beta0 <= lo_ || beta0 >= hi_;
        case Kind::WholeLine:
            return true;
    }
    return false;
}

std::optional<double> ConfidenceSet::length() const
{
    if (kind_ != Kind::Bounded)
        return std::nullopt;
    return hi_ - lo_;
}

std::string_view to_string(ConfidenceSet::Kind kind)
{
    switch (kind) {
        case ConfidenceSet::Kind::Bounded:
            return "bounded";
        case ConfidenceSet::Kind::TwoRays:
            return "two_rays";
        case ConfidenceSet::Kind::WholeLine:
            return "whole_line";
    }
    return "unknown";
}

double ar_statistic_raw(const ModelData& data, double beta0, DofPolicy policy)
{
    if (data.w)
        throw DomainError("ar_statistic_raw: partial out the controls first");
    if (data.n() <= 2)
        throw DomainError("ar_statistic_raw: need n > 2");
    const double zz = data.z.squaredNorm();
    if (zz == 0.0)
        throw NoIdentificationError("ar_statistic_raw: instrument is identically zero");

    const Eigen::VectorXd e = data.y - data.x * beta0;
    const double ze = data.z.dot(e);
    const Eigen::VectorXd resid = e - data.z * (ze / zz);
    const double rss = resid.squaredNorm();
    if (ze == 0.0)
        return 0.0;
    if (rss == 0.0)
        return kInf;
    const double sigma2 = rss / variance_divisor(data.n(), 1 + data.absorbed_controls, policy);
    return ze * ze / (sigma2 * zz);
}

double ar_statistic_summary(double t, double f_hat, double rho_hat)
{
    const double big_f = f_hat * f_hat;
    const double denom = big_f + 2.0 * rho_hat * std::abs(f_hat) * t + t * t;
    if (t == 0.0 && f_hat != 0.0)
        return 0.0;
    if (!(denom > 0.0))
        throw DegenerateSpecificationError("ar_statistic_summary: F + 2 rho f t + t^2 = " +
                                           std::to_string(denom) + " is not positive");
    return t * t * big_f / denom;
}

double recover_rho(double t, double f_hat, double ar)
{
    if (!(ar > 0.0))
        throw NotRecoverableError("recover_rho: AR statistic is zero, rho cannot be computed");
    if (t == 0.0)
        throw NotRecoverableError("recover_rho: t-ratio is zero, rho cannot be computed");
    if (f_hat == 0.0)
        throw NotRecoverableError("recover_rho: first-stage statistic is zero, rho cannot be computed");
    const double big_f = f_hat * f_hat;
    return (t * t * big_f - ar * (big_f + t * t)) / (2.0 * ar * std::abs(f_hat) * t);
}

ConfidenceSet ar_confidence_set(const SummaryStats& stats, double confidence)
{
    const double rho = stats.rho_hat;
    if (!(std::abs(rho) <= 1.0))
        throw DomainError("ar_confidence_set: |rho_hat| must be <= 1, got " + std::to_string(rho));
    if (!(stats.se > 0.0))
        throw DomainError("ar_confidence_set: se must be positive");

    const double c = chi2_1_critical(1.0 - confidence);
    const double big_f = stats.big_f;
    const double g = std::sqrt(big_f);

    // Acceptance region in t = (beta_hat - beta0)/se:
    //   (F - c) t^2 - 2 c rho g t - c F <= 0.
    const double a = big_f - c;
    const double b = -2.0 * c * rho * g;
    const double d = -c * big_f;

    auto to_beta = [&](double t) { return stats.beta_hat - stats.se * t; };

    if (big_f <= c * (1.0 - rho * rho))
        return ConfidenceSet::whole_line(confidence);

    if (a == 0.0) {
        // Linear limit: one ray survives, the other has escaped to infinity.
        const double t_edge = -d / b;
        if (rho > 0.0)
            return ConfidenceSet::two_rays(to_beta(t_edge), kInf, confidence);
        return ConfidenceSet::two_rays(-kInf, to_beta(t_edge), confidence);
    }

    // discriminant = 4 c F (F - c (1 - rho^2)) > 0 here
    const double disc = 4.0 * c * big_f * (big_f - c * (1.0 - rho * rho));
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b == 0.0 ? 1.0 : b));
    double t1 = q / a;
    double t2 = d / q;
    if (t1 > t2)
        std::swap(t1, t2);

    if (a > 0.0)
        return ConfidenceSet::bounded(to_beta(t2), to_beta(t1), confidence);
    return ConfidenceSet::two_rays(to_beta(t2), to_beta(t1), confidence);
}

}  // namespace ivtf
