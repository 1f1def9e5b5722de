#pragma once

#include <span>
#include <string>

#include "ivtf/empirics.hpp"
#include "ivtf/mc_sim.hpp"
#include "ivtf/tf.hpp"

namespace ivtf {

/// Three scatter panels (t, AR, tF) on standardized (F, t^2) axes; black =
/// insignificant, blue = 5% only, red = 1%. The tF panel overlays both
/// critical-value curves.
std::string render_significance_figure(std::span<const ComparisonRecord> records, const CVTable& cv5,
                                       const CVTable& cv1);

std::string render_loglength_histogram(const LogLengthReport& report);

std::string render_heatmap(const HeatmapGrid& grid);

std::string render_power_curve(const PowerCurve& curve);

}  // namespace ivtf
