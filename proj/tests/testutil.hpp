#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hurstscan/track.hpp"

namespace testutil {

using Eigen::Index;

// Random windows with mixed character: gaussian walks, iid noise, and
// noisy ramps, all strictly positive.
inline Eigen::VectorXd random_window(std::mt19937& rng, Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 2);
  Eigen::VectorXd w(n);
  switch (kind(rng)) {
    case 0: {  // random walk
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) w[i] = acc += normal(rng);
      break;
    }
    case 1:  // iid noise
      for (Index i = 0; i < n; ++i) w[i] = normal(rng);
      break;
    default:  // ramp plus noise
      for (Index i = 0; i < n; ++i)
        w[i] = 0.3 * static_cast<double>(i) + 0.5 * normal(rng);
  }
  w.array() += 10.0 - w.minCoeff();
  return w;
}

inline hurstscan::PriceSeries random_walk_series(std::mt19937& rng, Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  hurstscan::PriceSeries series;
  series.closes.resize(n);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) series.closes[i] = acc += normal(rng);
  series.closes.array() += 10.0 - series.closes.minCoeff();
  return series;
}

// Synthetic H_loc tracks in the plausible (0.2, 0.8) band.
inline hurstscan::HurstTrack random_track(std::mt19937& rng, Index n,
                                          double gap_probability = 0.0) {
  std::normal_distribution<double> normal(0.0, 0.05);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd h(n);
  double level = 0.5;
  for (Index i = 0; i < n; ++i) {
    level = std::clamp(level + 0.2 * normal(rng), 0.2, 0.8);
    h[i] = level + normal(rng);
    if (unit(rng) < gap_probability) h[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return hurstscan::HurstTrack::from_hloc(h);
}

inline std::vector<double> ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank for ties
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = rank;
    i = j + 1;
  }
  return out;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const std::size_t n = ra.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
    sab += (ra[i] - ma) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Scratch directory fresh per test binary run.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hurstscan_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
