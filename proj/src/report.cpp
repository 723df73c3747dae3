#include "csbm/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "csbm/version.hpp"

namespace csbm {

namespace {

constexpr double kLeft = 60.0;
constexpr double kTop = 30.0;
constexpr double kPlotW = 300.0;
constexpr double kPlotH = 300.0;
constexpr double kBarX = kLeft + kPlotW + 20.0;
constexpr double kWidth = kBarX + 70.0;
constexpr double kHeight = kTop + kPlotH + 50.0;

std::string num(double x, const char* format = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

// Viridis anchor colors, linearly interpolated.
std::string color(double value) {
  if (std::isnan(value)) return "#bbbbbb";
  static constexpr std::array<std::array<double, 3>, 5> kAnchors = {{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  const double t = std::clamp(value, 0.0, 1.0) * (kAnchors.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), kAnchors.size() - 2);
  const double w = t - static_cast<double>(k);
  char buf[8];
  const auto channel = [&](int c) {
    return static_cast<int>(std::lround((1.0 - w) * kAnchors[k][c] + w * kAnchors[k + 1][c]));
  };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(0), channel(1), channel(2));
  return buf;
}

double metric_of(const SweepRow& r, const std::string& metric) {
  if (metric == "rejection_rate") return r.rejection_rate;
  if (metric == "mean_overlap") return r.mean_overlap;
  if (metric == "mean_cov_overlap") return r.mean_cov_overlap;
  throw std::invalid_argument("unknown metric " + metric);
}

struct Axis {
  std::vector<double> values;
  double lo = 0.0;  // outer cell edges
  double hi = 1.0;

  explicit Axis(std::vector<double> v) : values(std::move(v)) {
    const double half = values.size() > 1 ? 0.5 * (values.back() - values.front()) / (values.size() - 1) : 0.5;
    lo = values.front() - half;
    hi = values.back() + half;
  }
  double frac(double x) const { return (x - lo) / (hi - lo); }
  std::size_t index(double x) const {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), x) - values.begin());
  }
};

std::vector<double> unique_sorted(const std::vector<SweepRow>& rows, double SweepRow::*field) {
  std::set<double> s;
  for (const auto& r : rows) s.insert(r.*field);
  return {s.begin(), s.end()};
}

void check_rows(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::runtime_error("no cells");
  for (const auto& r : rows) {
    if (r.gamma != rows.front().gamma) throw std::runtime_error("sweep csv: mixed gamma values");
  }
}

}  // namespace

std::string heatmap_svg(const std::vector<SweepRow>& all_rows, const std::string& algorithm,
                        const std::string& metric) {
  check_rows(all_rows);
  std::vector<SweepRow> rows;
  for (const auto& r : all_rows) {
    if (r.algorithm == algorithm) rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("no cells for algorithm " + algorithm);
  const Axis xs(unique_sorted(rows, &SweepRow::lambda));
  const Axis ys(unique_sorted(rows, &SweepRow::mu));
  if (rows.size() != xs.values.size() * ys.values.size()) {
    throw std::runtime_error("sweep csv: grid for " + algorithm + " is not rectangular");
  }
  const double gamma = rows.front().gamma;
  const double cell_w = kPlotW / static_cast<double>(xs.values.size());
  const double cell_h = kPlotH / static_cast<double>(ys.values.size());

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, "%.0f") + "\" height=\"" +
         num(kHeight, "%.0f") + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<!-- csbm " + std::string(kVersion) + " -->\n";
  svg += "<text x=\"" + num(kLeft) + "\" y=\"18\">" + algorithm + ": " + metric + " (gamma = " +
         num(gamma, "%.4g") + ")</text>\n";
  svg += "<clipPath id=\"plot\"><rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(kPlotW) + "\" height=\"" + num(kPlotH) + "\"/></clipPath>\n";
  for (const auto& r : rows) {
    const double x = kLeft + static_cast<double>(xs.index(r.lambda)) * cell_w;
    const double y = kTop + kPlotH - static_cast<double>(ys.index(r.mu) + 1) * cell_h;
    svg += "<rect class=\"cell\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell_w) + "\" height=\"" +
           num(cell_h) + "\" fill=\"" + color(metric_of(r, metric)) + "\"/>\n";
  }
  // lambda^2 + mu^2/gamma = 1, parametrized by mu in [0, sqrt(gamma)].
  svg += "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
  constexpr int kCurvePoints = 101;
  for (int k = 0; k < kCurvePoints; ++k) {
    const double mu = std::sqrt(gamma) * k / (kCurvePoints - 1);
    const double lambda = std::sqrt(std::max(0.0, 1.0 - mu * mu / gamma));
    const double x = kLeft + xs.frac(lambda) * kPlotW;
    const double y = kTop + kPlotH - ys.frac(mu) * kPlotH;
    svg += (k ? " " : "") + num(x) + "," + num(y);
  }
  svg += "\"/>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotW) + "\" height=\"" +
         num(kPlotH) + "\" fill=\"none\" stroke=\"black\"/>\n";
  // Axis labels at the extreme grid values.
  const double base = kTop + kPlotH;
  svg += "<text x=\"" + num(kLeft + 0.5 * cell_w) + "\" y=\"" + num(base + 15) + "\" text-anchor=\"middle\">" +
         num(xs.values.front(), "%.3g") + "</text>\n";
  svg += "<text x=\"" + num(kLeft + kPlotW - 0.5 * cell_w) + "\" y=\"" + num(base + 15) +
         "\" text-anchor=\"middle\">" + num(xs.values.back(), "%.3g") + "</text>\n";
  svg += "<text x=\"" + num(kLeft + 0.5 * kPlotW) + "\" y=\"" + num(base + 35) +
         "\" text-anchor=\"middle\">lambda</text>\n";
  svg += "<text x=\"" + num(kLeft - 5) + "\" y=\"" + num(base - 0.5 * cell_h) + "\" text-anchor=\"end\">" +
         num(ys.values.front(), "%.3g") + "</text>\n";
  svg += "<text x=\"" + num(kLeft - 5) + "\" y=\"" + num(kTop + 0.5 * cell_h) + "\" text-anchor=\"end\">" +
         num(ys.values.back(), "%.3g") + "</text>\n";
  svg += "<text x=\"15\" y=\"" + num(kTop + 0.5 * kPlotH) + "\" transform=\"rotate(-90 15 " +
         num(kTop + 0.5 * kPlotH) + ")\" text-anchor=\"middle\">mu</text>\n";
  // Color bar over [0, 1].
  constexpr int kBarSteps = 20;
  for (int k = 0; k < kBarSteps; ++k) {
    const double h = kPlotH / kBarSteps;
    svg += "<rect x=\"" + num(kBarX) + "\" y=\"" + num(kTop + kPlotH - (k + 1) * h) + "\" width=\"15\" height=\"" +
           num(h) + "\" fill=\"" + color((k + 0.5) / kBarSteps) + "\"/>\n";
  }
  svg += "<text x=\"" + num(kBarX + 20) + "\" y=\"" + num(kTop + 8) + "\">1</text>\n";
  svg += "<text x=\"" + num(kBarX + 20) + "\" y=\"" + num(kTop + kPlotH) + "\">0</text>\n";
  svg += "</svg>\n";
  return svg;
}

double partition_agreement(const std::vector<SweepRow>& rows, const std::string& alg_a,
                           const std::string& alg_b) {
  std::map<std::pair<double, double>, bool> a;
  for (const auto& r : rows) {
    if (r.algorithm == alg_a) a[{r.lambda, r.mu}] = r.rejection_rate > 0.5;
  }
  int matched = 0;
  int agree = 0;
  for (const auto& r : rows) {
    if (r.algorithm != alg_b) continue;
    const auto it = a.find({r.lambda, r.mu});
    if (it == a.end()) continue;
    ++matched;
    agree += it->second == (r.rejection_rate > 0.5);
  }
  if (matched == 0) throw std::runtime_error("no common cells for " + alg_a + " and " + alg_b);
  return static_cast<double>(agree) / matched;
}

ReportFiles make_report(const std::vector<SweepRow>& rows) {
  check_rows(rows);
  std::vector<std::string> algorithms;
  for (const auto& r : rows) {
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end()) {
      algorithms.push_back(r.algorithm);
    }
  }
  ReportFiles files;
  std::string md = "# Sweep summary\n\n<!-- csbm " + std::string(kVersion) + " -->\n\n";
  md += "gamma = " + num(rows.front().gamma, "%.6g") + ". S = lambda^2 + mu^2/gamma; the predicted ";
  md += "transition is S = 1.\n";
  for (const auto& alg : algorithms) {
    for (const char* metric : {"rejection_rate", "mean_overlap", "mean_cov_overlap"}) {
      files[alg + "_" + metric + ".svg"] = heatmap_svg(rows, alg, metric);
    }
    md += "\n## " + alg + "\n\n";
    md += "| lambda | mu | S | rejection rate | mean overlap | mean cov overlap | runs | failed |\n";
    md += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
      if (r.algorithm != alg) continue;
      const double s = r.lambda * r.lambda + r.mu * r.mu / r.gamma;
      md += "| " + num(r.lambda, "%.4g") + " | " + num(r.mu, "%.4g") + " | " + num(s, "%.4g") + " | " +
            num(r.rejection_rate, "%.3f") + " | " + num(r.mean_overlap, "%.3f") + " | " +
            num(r.mean_cov_overlap, "%.3f") + " | " + std::to_string(r.n_runs) + " | " +
            std::to_string(r.n_failed) + " |\n";
    }
  }
  if (algorithms.size() > 1) {
    md += "\n## Accept/reject agreement\n\n";
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
      for (std::size_t j = i + 1; j < algorithms.size(); ++j) {
        md += "- " + algorithms[i] + " vs " + algorithms[j] + ": " +
              num(partition_agreement(rows, algorithms[i], algorithms[j]), "%.3f") + "\n";
      }
    }
  }
  files["summary.md"] = md;
  return files;
}

}  // namespace csbm
