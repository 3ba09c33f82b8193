#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hurstscan/errors.hpp"
#include "hurstscan/linfit.hpp"

namespace hurstscan {

// Half-open index range [begin, end) into an observation window.
struct BoxSpan {
  Index begin;
  Index end;

  Index size() const { return end - begin; }
  friend bool operator==(const BoxSpan&, const BoxSpan&) = default;
};

// What to do with the remainder when the box size does not divide the
// window length: cover the oldest tau sessions with one extra box that
// overlaps its predecessor, or drop the remainder.
enum class TailCoverage { WithOverlapTail, TruncateTail };

// Geometric integer grid from tau_min to tau_max with ratio 2^(1/4),
// rounded to the nearest integer and deduplicated.
inline std::vector<Index> default_tau_grid(Index tau_min, Index tau_max) {
  if (tau_min < 2) raise(ErrorKind::InvalidScale, "tau_min must be at least 2");
  std::vector<Index> grid;
  for (int k = 0;; ++k) {
    const double v = static_cast<double>(tau_min) * std::pow(2.0, 0.25 * k);
    const Index tau = static_cast<Index>(std::llround(v));
    if (tau > tau_max) break;
    if (grid.empty() || grid.back() != tau) grid.push_back(tau);
  }
  return grid;
}

struct DfaConfig {
  Index window_len = 215;
  std::vector<Index> tau_grid;  // empty -> default_tau_grid(4, window_len / 4)
  Index scale_lo = 0;           // 0 -> no lower bound on the fit range
  Index scale_hi = 0;           // 0 -> no upper bound
  int detrend_order = 1;
  TailCoverage coverage = TailCoverage::WithOverlapTail;
  bool integrate_profile = false;

  std::vector<Index> effective_grid() const {
    if (!tau_grid.empty()) return tau_grid;
    return default_tau_grid(4, window_len / 4);
  }

  // Effective grid restricted to [scale_lo, scale_hi]; this is the support
  // of the log-log fit.
  std::vector<Index> fit_grid() const {
    std::vector<Index> out;
    for (Index tau : effective_grid()) {
      if (scale_lo > 0 && tau < scale_lo) continue;
      if (scale_hi > 0 && tau > scale_hi) continue;
      out.push_back(tau);
    }
    return out;
  }

  // Full invariant check for pipeline use. Raw fluctuation_function calls
  // on explicit grids only need the per-scale partition preconditions.
  void validate() const {
    if (window_len < 8)
      raise(ErrorKind::InvalidParameter, "window length must be at least 8 sessions");
    if (detrend_order < 0 || detrend_order > 5)
      raise(ErrorKind::InvalidParameter, "detrend order must be in [0, 5]");
    const auto grid = effective_grid();
    if (grid.empty()) raise(ErrorKind::InvalidScale, "tau grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (grid[i] <= grid[i - 1])
        raise(ErrorKind::InvalidScale, "tau grid must be strictly ascending");
    const Index tau_min = grid.front();
    const Index tau_max = grid.back();
    if (tau_min < std::max<Index>(2, detrend_order + 2))
      raise(ErrorKind::InvalidScale,
            "smallest tau leaves no residual degree of freedom after detrending");
    if (tau_max > window_len / 4)
      raise(ErrorKind::InvalidScale,
            "largest tau exceeds window_len/4 (need at least 4 boxes)");
    if (scale_lo > 0 && scale_hi > 0 && scale_lo > scale_hi)
      raise(ErrorKind::InvalidParameter, "scale_lo exceeds scale_hi");
    if (fit_grid().size() < 4)
      raise(ErrorKind::InsufficientScales,
            "scaling range must contain at least 4 grid points");
  }
};

template <class Scalar>
struct FluctuationCurve {
  std::vector<Index> tau;
  VectorX<Scalar> f2;  // mean detrended variance per scale, one entry per tau
};

template <class Scalar>
struct HurstEstimate {
  Scalar h_loc{};
  Scalar r_squared{};
  Scalar stderr_slope{};  // standard error of the log-log slope (= 2 h_loc)
  int n_scales{};

  Scalar fractal_dimension() const { return Scalar(2) - h_loc; }
};

// Boxes of exactly tau sessions laid from the most recent session
// backwards; box k covers [n - (k+1) tau, n - k tau). Under
// WithOverlapTail a remainder adds one box over the oldest tau sessions,
// overlapping its predecessor, so the union covers the whole window.
inline std::vector<BoxSpan> partition_boxes(Index window_len, Index tau,
                                            TailCoverage coverage) {
  if (tau < 2)
    raise(ErrorKind::InvalidScale, "box size " + std::to_string(tau) + " is below 2");
  if (tau > window_len)
    raise(ErrorKind::InvalidScale, "box size " + std::to_string(tau) +
                                       " exceeds window length " +
                                       std::to_string(window_len));
  const Index count = window_len / tau;
  std::vector<BoxSpan> boxes;
  boxes.reserve(static_cast<std::size_t>(count) + 1);
  for (Index k = 0; k < count; ++k)
    boxes.push_back({window_len - (k + 1) * tau, window_len - k * tau});
  if (window_len % tau != 0 && coverage == TailCoverage::WithOverlapTail)
    boxes.push_back({0, tau});
  return boxes;
}

namespace detail {

// Orthonormal basis Q of the degree-`order` polynomial design on
// abscissae 0..len-1 (mapped onto [-1, 1] for conditioning). The
// residual of an OLS polynomial fit is then y - Q (Q^T y).
template <class Scalar>
MatrixX<Scalar> polynomial_basis_q(Index len, int order) {
  MatrixX<Scalar> design(len, order + 1);
  design.col(0).setOnes();
  if (order >= 1) {
    VectorX<Scalar> t(len);
    for (Index i = 0; i < len; ++i)
      t[i] = len > 1 ? Scalar(2) * Scalar(i) / Scalar(len - 1) - Scalar(1) : Scalar(0);
    design.col(1) = t;
    for (int j = 2; j <= order; ++j)
      design.col(j) = design.col(j - 1).cwiseProduct(t);
  }
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(design);
  return qr.householderQ() * MatrixX<Scalar>::Identity(len, order + 1);
}

}  // namespace detail

// Mean squared residual after an OLS polynomial fit of the given degree
// against offsets 0..len-1. Pure function of the segment.
template <class Derived>
typename Derived::Scalar detrended_variance(const Eigen::MatrixBase<Derived>& segment,
                                            int order = 1) {
  using Scalar = typename Derived::Scalar;
  const Index len = segment.size();
  if (order < 0) raise(ErrorKind::InvalidParameter, "detrend order must be >= 0");
  if (len < order + 2)
    raise(ErrorKind::InvalidParameter,
          "segment of length " + std::to_string(len) +
              " leaves no residual degree of freedom at order " + std::to_string(order));
  if (!segment.derived().allFinite())
    raise(ErrorKind::InvalidData, "non-finite value in segment");

  const MatrixX<Scalar> q = detail::polynomial_basis_q<Scalar>(len, order);
  const VectorX<Scalar> y = segment;
  const VectorX<Scalar> resid = y - q * (q.transpose() * y);
  return resid.squaredNorm() / Scalar(len);
}

// Mean detrended variance <F^2(tau)> over the window's boxes, one value
// per grid scale. With integrate_profile the profile is the cumulative
// sum of mean-subtracted values, otherwise the raw values.
template <class Derived>
FluctuationCurve<typename Derived::Scalar> fluctuation_function(
    const Eigen::MatrixBase<Derived>& window, const DfaConfig& config) {
  using Scalar = typename Derived::Scalar;
  const Index n = window.size();
  if (config.window_len > 0 && n != config.window_len)
    raise(ErrorKind::InvalidData, "window length " + std::to_string(n) +
                                      " does not match configured " +
                                      std::to_string(config.window_len));
  if (!window.derived().allFinite())
    raise(ErrorKind::InvalidData, "non-finite value in window");

  const std::vector<Index> grid = config.effective_grid();
  if (grid.empty()) raise(ErrorKind::InvalidScale, "tau grid is empty");

  VectorX<Scalar> profile;
  if (config.integrate_profile) {
    profile.resize(n);
    const Scalar mean = window.mean();
    Scalar acc = Scalar(0);
    for (Index i = 0; i < n; ++i) {
      acc += window[i] - mean;
      profile[i] = acc;
    }
  } else {
    profile = window;
  }

  FluctuationCurve<Scalar> curve;
  curve.tau = grid;
  curve.f2.resize(static_cast<Index>(grid.size()));

  VectorX<Scalar> proj;
  VectorX<Scalar> resid;
  for (std::size_t si = 0; si < grid.size(); ++si) {
    const Index tau = grid[si];
    if (tau < config.detrend_order + 2)
      raise(ErrorKind::InvalidScale, "box size " + std::to_string(tau) +
                                         " too small for detrend order " +
                                         std::to_string(config.detrend_order));
    const auto boxes = partition_boxes(n, tau, config.coverage);
    const MatrixX<Scalar> q =
        detail::polynomial_basis_q<Scalar>(tau, config.detrend_order);
    Scalar acc = Scalar(0);
    for (const BoxSpan& box : boxes) {
      const auto seg = profile.segment(box.begin, box.size());
      proj.noalias() = q.transpose() * seg;
      resid = seg;
      resid.noalias() -= q * proj;
      acc += resid.squaredNorm() / Scalar(tau);
    }
    curve.f2[static_cast<Index>(si)] = acc / Scalar(boxes.size());
  }
  return curve;
}

// Log-log regression of F^2 on tau over the scaling range; the slope is
// 2 h_loc. scale_lo/scale_hi of 0 mean unbounded.
template <class Scalar>
HurstEstimate<Scalar> estimate_hurst(const FluctuationCurve<Scalar>& curve,
                                     Index scale_lo = 0, Index scale_hi = 0) {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < curve.tau.size(); ++i) {
    if (scale_lo > 0 && curve.tau[i] < scale_lo) continue;
    if (scale_hi > 0 && curve.tau[i] > scale_hi) continue;
    idx.push_back(static_cast<Index>(i));
  }
  if (idx.size() < 4)
    raise(ErrorKind::InsufficientScales,
          "scaling range has " + std::to_string(idx.size()) + " scales; need 4");

  VectorX<Scalar> ln_tau(static_cast<Index>(idx.size()));
  VectorX<Scalar> ln_f2(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Scalar f2 = curve.f2[idx[k]];
    if (!(f2 > Scalar(0)) || !std::isfinite(static_cast<double>(f2)))
      raise(ErrorKind::DegenerateWindow,
            "non-positive fluctuation at tau = " +
                std::to_string(curve.tau[static_cast<std::size_t>(idx[k])]) +
                "; no log-log slope exists");
    ln_tau[static_cast<Index>(k)] = std::log(Scalar(curve.tau[static_cast<std::size_t>(idx[k])]));
    ln_f2[static_cast<Index>(k)] = std::log(f2);
  }

  const LineFit<Scalar> fit = fit_line(ln_tau, ln_f2);
  HurstEstimate<Scalar> est;
  est.h_loc = fit.slope / Scalar(2);
  est.r_squared = fit.r_squared;
  est.stderr_slope = fit.stderr_slope;
  est.n_scales = static_cast<int>(idx.size());
  return est;
}

// Fluctuation function plus log-log fit in one call.
template <class Derived>
HurstEstimate<typename Derived::Scalar> estimate_window(
    const Eigen::MatrixBase<Derived>& window, const DfaConfig& config) {
  const auto curve = fluctuation_function(window, config);
  return estimate_hurst(curve, config.scale_lo, config.scale_hi);
}

}  // namespace hurstscan
