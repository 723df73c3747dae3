#pragma once

#include <map>
#include <string>
#include <vector>

#include "csbm/sweep.hpp"

namespace csbm {

/// File name -> contents. For each algorithm: <alg>_rejection_rate.svg,
/// <alg>_mean_overlap.svg, <alg>_mean_cov_overlap.svg; plus summary.md.
using ReportFiles = std::map<std::string, std::string>;

/// Pure function of the rows. Throws std::runtime_error("no cells") on an
/// empty table and on rows with mixed gamma or a ragged grid.
ReportFiles make_report(const std::vector<SweepRow>& rows);

/// Heatmap of one metric for one algorithm, with the curve
/// lambda = sqrt(1 - mu^2/gamma) overlaid.
std::string heatmap_svg(const std::vector<SweepRow>& rows, const std::string& algorithm,
                        const std::string& metric);

/// Fraction of cells where two algorithms make the same majority decision
/// (rejection rate > 1/2).
double partition_agreement(const std::vector<SweepRow>& rows, const std::string& alg_a,
                           const std::string& alg_b);

}  // namespace csbm
