#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "hurstscan/track.hpp"

namespace hurstscan {

// Standard normal deviates from a fixed, portable algorithm: mt19937_64
// uniforms (53-bit mantissa) fed through Box-Muller. The algorithm is part
// of the fixture contract; outputs are reproducible for a given seed up to
// the platform's libm rounding.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double unit();  // uniform in [0, 1)

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct FbmSpec {
  double hurst = 0.5;
  Index length = 0;
  std::uint64_t seed = 0;
  double scale = 1.0;  // standard deviation of one increment

  void validate() const;
};

// Exact autocovariance of fractional Gaussian noise at the given lag:
// (scale^2 / 2) (|k+1|^2H - 2 |k|^2H + |k-1|^2H).
double fgn_autocovariance(double hurst, double scale, Index lag);

// Fractional Gaussian noise by circulant embedding of the autocovariance
// (Davies-Harte). Throws Generation when the embedding is not positive
// semi-definite at this (hurst, length).
Eigen::VectorXd generate_fgn_circulant(const FbmSpec& spec);

// Fractional Gaussian noise by the recursive-conditioning (Durbin-Levinson)
// construction; O(length^2) but free of embedding failures.
Eigen::VectorXd generate_fgn_hosking(const FbmSpec& spec);

// Fractional Brownian motion sample path: cumulative sum of exact-covariance
// fGn increments. Uses circulant embedding and falls back to recursive
// conditioning when the embedding fails; when `algorithm` is non-null it
// receives the name of the construction actually used.
Eigen::VectorXd generate_fbm(const FbmSpec& spec, std::string* algorithm = nullptr);

// Relative-drop schedule appended after a constant base segment. With
// initial_3session_drop > 0 the path passes through
// base * (1 - initial_3session_drop) three sessions after the rupture.
struct CrashProfile {
  double initial_3session_drop = 0.0;
  double total_drop = 0.0;  // 0 -> no crash, flat tail
  Index duration = 1;       // sessions from rupture to the minimum
  Index recovery_len = 20;  // rising sessions after the minimum

  void validate() const;
};

// Positive price series whose measured correction reproduces the profile
// exactly: pre_len base sessions (rupture at session pre_len - 1) followed
// by the prescribed drop and a half-retracement recovery.
PriceSeries generate_crash_series(Index pre_len, double base,
                                  const CrashProfile& profile);

}  // namespace hurstscan
