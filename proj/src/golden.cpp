#include "csbm/golden.hpp"

#include <cmath>
#include <stdexcept>

namespace csbm {

GoldenResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section: empty interval");
  if (!(tol > 0.0)) throw std::invalid_argument("golden_section: tol must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenResult out;
  auto eval = [&](double x) {
    const double value = f(x);
    out.probes.push_back({x, value});
    return value;
  };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval(x2);
    }
  }
  out.lo = lo;
  out.hi = hi;
  const GoldenProbe* best = &out.probes.front();
  for (const auto& probe : out.probes) {
    if (probe.value < best->value || (probe.value == best->value && probe.x < best->x)) {
      best = &probe;
    }
  }
  out.x_min = best->x;
  out.value = best->value;
  return out;
}

}  // namespace csbm
