#pragma once

#include <optional>
#include <string_view>

#include "ivtf/iv_core.hpp"

namespace ivtf {

/// A confidence set for beta: a bounded interval [lo, hi], the union of two
/// rays (-inf, lo] U [hi, inf), or the whole real line. At the F = c knife
/// edge one ray may be empty, represented by an infinite endpoint.
class ConfidenceSet
{
  public:
    enum class Kind
    {
        Bounded,
        TwoRays,
        WholeLine,
    };

    static ConfidenceSet bounded(double lo, double hi, double confidence);
    static ConfidenceSet two_rays(double lo, double hi, double confidence);
    static ConfidenceSet whole_line(double confidence);

    Kind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double confidence() const { return confidence_; }
    bool is_bounded() const { return kind_ == Kind::Bounded; }

    bool contains(double beta0) const;

    /// hi - lo for bounded sets; nullopt (unbounded) otherwise.
    std::optional<double> length() const;

  private:
    ConfidenceSet(Kind kind, double lo, double hi, double confidence)
        : kind_(kind), lo_(lo), hi_(hi), confidence_(confidence)
    {
    }

    Kind kind_;
    double lo_;
    double hi_;
    double confidence_;
};

std::string_view to_string(ConfidenceSet::Kind kind);

/// AR(beta0) = (z'e)^2 / (sigma_e^2 z'z), e = y - x beta0, with sigma_e^2 the
/// residual variance of e after projection on z. Data must be partialled out.
double ar_statistic_raw(const ModelData& data, double beta0,
                        DofPolicy policy = degrees_of_freedom_policy());

/// AR implied by reported statistics:
///   AR = t^2 F / (F + 2 rho |f| t + t^2),  F = f^2.
/// The absolute value makes the map invariant to the sign normalization of
/// the instrument.
double ar_statistic_summary(double t, double f_hat, double rho_hat);

/// Inverse of ar_statistic_summary in rho. The result is not range-checked;
/// callers decide what to do with |rho| > 1.
double recover_rho(double t, double f_hat, double ar);

/// Inversion of AR(beta0) <= chi2_1(1 - confidence) in closed form.
ConfidenceSet ar_confidence_set(const SummaryStats& stats, double confidence);

}  // namespace ivtf
