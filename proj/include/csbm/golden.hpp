#pragma once

#include <functional>
#include <vector>

namespace csbm {

struct GoldenProbe {
  double x = 0.0;
  double value = 0.0;
};

struct GoldenResult {
  double x_min = 0.0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<GoldenProbe> probes;  // every evaluation, in call order
};

/// Golden-section search for a minimum of a unimodal f on [lo, hi], stopping
/// once hi - lo <= tol. Returns the best probe; ties go to the smaller x.
GoldenResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol);

}  // namespace csbm
