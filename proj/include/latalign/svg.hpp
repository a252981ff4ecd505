#pragma once

// Static SVG figures: per-dimension misalignment scatter with the diagonal,
// and per-patient trajectory panels.

#include <string>
#include <vector>

#include "latalign/eval_report.hpp"

namespace latalign {

/// delta_rs on x, delta_ode on y, for latent dimension `dim` (0-based).
std::string scatter_svg(const std::vector<AlignmentMetrics>& metrics, std::size_t dim, const std::string& title);

/// Grid of panels, one per patient: R encodings as squares, S encodings as
/// circles, the fitted trajectory as lines; x axis in months.
std::string trajectory_svg(const std::vector<TrajectoryExport>& exports, const std::string& title);

}  // namespace latalign
