#include "ivtf/iv_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ivtf/errors.hpp"

namespace ivtf {

namespace {

// Residual sums of squares below this fraction of the raw sum of squares are
// treated as exact zeros.
constexpr double kExactFitTol = 1e-26;

void require_same_length(const ModelData& d)
{
    const auto n = d.y.size();
    if (d.x.size() != n || d.z.size() != n)
        throw DomainError("ModelData: y, x, z must have the same length");
    if (d.w && d.w->rows() != n)
        throw DomainError("ModelData: w must have n rows");
    if (n <= d.control_count() + d.absorbed_controls + 1)
        throw DomainError("ModelData: need n > k_w + 1 observations, got n = " + std::to_string(n));
}

}  // namespace

ModelData ModelData::make(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::VectorXd z,
                          std::optional<Eigen::MatrixXd> w)
{
    ModelData d{std::move(y), std::move(x), std::move(z), std::move(w), 0};
    if (d.w && d.w->cols() == 0)
        d.w.reset();
    require_same_length(d);
    return d;
}

DofPolicy degrees_of_freedom_policy()
{
    return DofPolicy::SmallSample;
}

double variance_divisor(Eigen::Index n, int k, DofPolicy policy)
{
    if (policy == DofPolicy::LargeSample)
        return static_cast<double>(n);
    const auto d = n - static_cast<Eigen::Index>(k);
    if (d <= 0)
        throw DomainError("variance_divisor: n - k must be positive");
    return static_cast<double>(d);
}

SummaryStats SummaryStats::from_reported(double beta_hat, double se, double f_hat, double rho_hat)
{
    if (!(se > 0.0))
        throw DomainError("SummaryStats: se must be positive");
    SummaryStats s;
    s.beta_hat = beta_hat;
    s.se = se;
    s.f_hat = f_hat;
    s.big_f = f_hat * f_hat;
    s.rho_hat = rho_hat;
    return s;
}

ModelData partial_out(const ModelData& data)
{
    require_same_length(data);
    if (!data.w)
        return data;

    const Eigen::MatrixXd& w = *data.w;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w);
    if (qr.rank() < w.cols())
        throw SingularDesignError("partial_out: control matrix has rank " + std::to_string(qr.rank()) +
                                  " < " + std::to_string(w.cols()) + " columns");

    auto resid = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return v - w * qr.solve(v);
    };

    ModelData out;
    out.y = resid(data.y);
    out.x = resid(data.x);
    out.z = resid(data.z);
    out.absorbed_controls = data.absorbed_controls + static_cast<int>(w.cols());

    if (out.z.squaredNorm() <= kExactFitTol * data.z.squaredNorm() || out.z.squaredNorm() == 0.0)
        throw NoIdentificationError("partial_out: instrument is identically zero after removing controls");
    return out;
}

SummaryStats estimate_2sls(const ModelData& data, DofPolicy policy)
{
    if (data.w)
        throw DomainError("estimate_2sls: partial out the controls first");
    require_same_length(data);

    const double zz = data.z.squaredNorm();
    const double zx = data.z.dot(data.x);
    if (zz == 0.0)
        throw NoIdentificationError("estimate_2sls: instrument is identically zero");
    if (zx == 0.0)
        throw NoIdentificationError("estimate_2sls: z'x = 0, beta is not identified");

    const int k = 1 + data.absorbed_controls;
    const double divisor = variance_divisor(data.n(), k, policy);

    SummaryStats s;
    s.beta_hat = data.z.dot(data.y) / zx;
    const Eigen::VectorXd u = data.y - data.x * s.beta_hat;
    const double pi_hat = zx / zz;
    const Eigen::VectorXd v = data.x - data.z * pi_hat;

    const double uu = u.squaredNorm();
    const double vv = v.squaredNorm();

    s.se = std::sqrt(uu / divisor * zz) / std::abs(zx);

    if (vv <= kExactFitTol * data.x.squaredNorm()) {
        s.f_hat = std::copysign(std::numeric_limits<double>::infinity(), zx);
        s.degenerate = true;
    } else {
        s.f_hat = pi_hat / std::sqrt(vv / divisor / zz);
    }
    s.big_f = s.f_hat * s.f_hat;

    if (uu <= kExactFitTol * data.y.squaredNorm() || s.degenerate) {
        s.rho_hat = 0.0;
        s.degenerate = true;
    } else {
        s.rho_hat = v.dot(u) / std::sqrt(vv * uu);
    }
    return s;
}

IvMoments IvMoments::from(const ModelData& data)
{
    if (data.w)
        throw DomainError("IvMoments: partial out the controls first");
    require_same_length(data);
    IvMoments m;
    m.n = data.n();
    m.k = 1 + data.absorbed_controls;
    m.zz = data.z.squaredNorm();
    m.zx = data.z.dot(data.x);
    m.zy = data.z.dot(data.y);
    m.xx = data.x.squaredNorm();
    m.xy = data.x.dot(data.y);
    m.yy = data.y.squaredNorm();
    return m;
}

SummaryStats IvMoments::summary(DofPolicy policy) const
{
    if (zz == 0.0 || zx == 0.0)
        throw NoIdentificationError("IvMoments: beta is not identified");
    const double divisor = variance_divisor(n, k, policy);
    SummaryStats s;
    s.beta_hat = zy / zx;
    const double b = s.beta_hat;
    const double uu = std::max(0.0, yy - 2.0 * b * xy + b * b * xx);
    const double vv = std::max(0.0, xx - zx * zx / zz);
    const double vu = xy - b * xx - zx * zy / zz + b * zx * zx / zz;
    s.se = std::sqrt(uu / divisor * zz) / std::abs(zx);
    const double pi_hat = zx / zz;
    s.f_hat = vv > 0.0 ? pi_hat / std::sqrt(vv / divisor / zz)
                       : std::copysign(std::numeric_limits<double>::infinity(), zx);
    s.big_f = s.f_hat * s.f_hat;
    if (uu > 0.0 && vv > 0.0) {
        s.rho_hat = vu / std::sqrt(uu * vv);
    } else {
        s.degenerate = true;
    }
    return s;
}

double IvMoments::ar(double beta0, DofPolicy policy) const
{
    if (zz == 0.0)
        throw NoIdentificationError("IvMoments: instrument is identically zero");
    const double ze = zy - beta0 * zx;
    const double ee = yy - 2.0 * beta0 * xy + beta0 * beta0 * xx;
    const double rss = std::max(0.0, ee - ze * ze / zz);
    if (ze == 0.0)
        return 0.0;
    if (rss == 0.0)
        return std::numeric_limits<double>::infinity();
    const double sigma2 = rss / variance_divisor(n, k, policy);
    return ze * ze / (sigma2 * zz);
}

}  // namespace ivtf
