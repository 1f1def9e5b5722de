#include "ivtf/quantiles.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "ivtf/errors.hpp"

namespace ivtf {

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double two_sided_z(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("significance level must lie in (0, 1), got " + std::to_string(alpha));
    return normal_quantile(1.0 - alpha / 2.0);
}

double chi2_1_critical(double alpha)
{
    const double z = two_sided_z(alpha);
    return z * z;
}

}  // namespace ivtf
