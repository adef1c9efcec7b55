#include "qwkt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qwkt/errors.hpp"

namespace qwkt {

PeakReport extract_delays(const SpectralPattern& spectrum, const BiphotonSource& source,
                          const PeakOptions& options) {
  if (!(spectrum.total() > 0.0)) throw MalformedSpectrumError("spectrum carries no intensity");

  const auto r = inverse_qwkt(spectrum, options.inverse);
  const auto mag = r.magnitude();
  const auto& grid = r.grid();
  const std::size_t n = grid.size();
  const double dt = grid.step();

  const auto peak_it = std::max_element(mag.begin(), mag.end());
  const auto peak_index = static_cast<std::size_t>(peak_it - mag.begin());
  if (std::abs(grid[peak_index]) > 2.0 * dt) {
    throw MalformedSpectrumError("largest correlation peak is not at zero delay");
  }

  // R(0) = ∫F dω exactly; zero delay sits between two grid samples.
  double main_height = 0.0;
  {
    const double dw = spectrum.grid().step();
    const auto values = spectrum.intensity();
    for (std::size_t j = 0; j < n; ++j) {
      double w = 1.0;
      if (options.inverse.hann_window) {
        w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) /
                                  static_cast<double>(n)));
      }
      main_height += values[j] * w * dw;
    }
    main_height = std::max(main_height, *peak_it);
  }

  struct Candidate {
    std::size_t index;
    double tau;
    double height;
  };
  std::vector<Candidate> candidates;
  const double floor = options.threshold * main_height;
  for (std::size_t k = n / 2 + 1; k + 1 < n; ++k) {
    const double y0 = mag[k];
    const double ym = mag[k - 1];
    const double yp = mag[k + 1];
    if (!(y0 >= ym && y0 > yp && y0 >= floor)) continue;
    const double curvature = ym - 2.0 * y0 + yp;
    double offset = 0.0;
    double height = y0;
    if (curvature < 0.0) {
      offset = std::clamp(0.5 * (ym - yp) / curvature, -0.5, 0.5);
      height = y0 - 0.25 * (ym - yp) * offset;
    }
    candidates.push_back({k, grid[k] + offset * dt, height});
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.height > b.height; });
  std::vector<Candidate> accepted;
  for (const auto& c : candidates) {
    const bool clear = std::none_of(accepted.begin(), accepted.end(), [&](const Candidate& a) {
      const auto gap = a.index > c.index ? a.index - c.index : c.index - a.index;
      return gap < options.min_separation;
    });
    if (clear) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Candidate& a, const Candidate& b) { return a.tau < b.tau; });

  PeakReport report;
  report.grid_resolution = dt;
  double weight_sum = 0.0;
  for (const auto& c : accepted) {
    const double rel = c.height / main_height;
    report.delays.push_back({c.tau, 2.0 * rel, rel});
    weight_sum += 2.0 * rel;
  }
  for (auto& d : report.delays) d.weight /= weight_sum;

  const double overlap = options.overlap_widths / source.delta_temporal();
  for (std::size_t i = 0; i < report.delays.size(); ++i) {
    if (report.delays[i].tau < overlap) report.ambiguity_flag = true;
    if (i > 0 && report.delays[i].tau - report.delays[i - 1].tau < 2.0 * dt) {
      report.ambiguity_flag = true;
    }
  }
  return report;
}

}  // namespace qwkt
