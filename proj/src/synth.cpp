#include "hurstscan/synth.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace hurstscan {

double GaussianSource::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - unit();  // (0, 1], keeps log() finite
  const double u2 = unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void FbmSpec::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0))
    raise(ErrorKind::InvalidParameter, "hurst must lie in (0, 1)");
  if (length < 16)
    raise(ErrorKind::InvalidParameter, "length must be at least 16 points");
  if (!(scale > 0.0)) raise(ErrorKind::InvalidParameter, "scale must be positive");
}

double fgn_autocovariance(double hurst, double scale, Index lag) {
  const double k = std::abs(static_cast<double>(lag));
  const double two_h = 2.0 * hurst;
  return 0.5 * scale * scale *
         (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) +
          std::pow(std::abs(k - 1.0), two_h));
}

Eigen::VectorXd generate_fgn_circulant(const FbmSpec& spec) {
  spec.validate();
  const Index n = spec.length;
  const Index m = 2 * n;

  // First row of the circulant embedding of the Toeplitz autocovariance.
  std::vector<std::complex<double>> row(static_cast<std::size_t>(m));
  for (Index k = 0; k <= n; ++k)
    row[static_cast<std::size_t>(k)] = fgn_autocovariance(spec.hurst, spec.scale, k);
  for (Index k = 1; k < n; ++k)
    row[static_cast<std::size_t>(m - k)] = row[static_cast<std::size_t>(k)];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> eig;
  fft.fwd(eig, row);

  double max_eig = 0.0;
  for (const auto& v : eig) max_eig = std::max(max_eig, v.real());
  for (const auto& v : eig)
    if (v.real() < -1e-10 * max_eig)
      raise(ErrorKind::Generation,
            "circulant embedding is not positive semi-definite");

  // Hermitian-symmetric Gaussian weights; draw order is fixed so the output
  // is fully determined by the seed.
  GaussianSource gauss(spec.seed);
  std::vector<std::complex<double>> weights(static_cast<std::size_t>(m));
  const auto lambda = [&](Index k) {
    return std::max(0.0, eig[static_cast<std::size_t>(k)].real());
  };
  weights[0] = std::sqrt(lambda(0) / static_cast<double>(m)) * gauss.next();
  for (Index k = 1; k < n; ++k) {
    const double amp = std::sqrt(lambda(k) / (2.0 * static_cast<double>(m)));
    const double re = gauss.next();
    const double im = gauss.next();
    weights[static_cast<std::size_t>(k)] = {amp * re, amp * im};
    weights[static_cast<std::size_t>(m - k)] = {amp * re, -amp * im};
  }
  weights[static_cast<std::size_t>(n)] =
      std::sqrt(lambda(n) / static_cast<double>(m)) * gauss.next();

  std::vector<std::complex<double>> mixed;
  fft.fwd(mixed, weights);

  Eigen::VectorXd fgn(n);
  for (Index i = 0; i < n; ++i) {
    const double v = mixed[static_cast<std::size_t>(i)].real();
    if (!std::isfinite(v)) raise(ErrorKind::Generation, "non-finite sample generated");
    fgn[i] = v;
  }
  return fgn;
}

Eigen::VectorXd generate_fgn_hosking(const FbmSpec& spec) {
  spec.validate();
  const Index n = spec.length;
  Eigen::VectorXd gamma(n);
  for (Index k = 0; k < n; ++k)
    gamma[k] = fgn_autocovariance(spec.hurst, spec.scale, k);

  GaussianSource gauss(spec.seed);
  Eigen::VectorXd sample(n);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd phi_prev = Eigen::VectorXd::Zero(n);

  double variance = gamma[0];
  sample[0] = std::sqrt(variance) * gauss.next();

  for (Index t = 1; t < n; ++t) {
    double kappa = gamma[t];
    for (Index j = 1; j < t; ++j) kappa -= phi_prev[j - 1] * gamma[t - j];
    kappa /= variance;

    phi[t - 1] = kappa;
    for (Index j = 1; j < t; ++j)
      phi[j - 1] = phi_prev[j - 1] - kappa * phi_prev[t - 1 - j];

    variance *= 1.0 - kappa * kappa;
    if (!(variance > 0.0) || !std::isfinite(variance))
      raise(ErrorKind::Generation,
            "conditional variance collapsed in the recursive construction");

    double mean = 0.0;
    for (Index j = 1; j <= t; ++j) mean += phi[j - 1] * sample[t - j];
    sample[t] = mean + std::sqrt(variance) * gauss.next();

    std::swap(phi, phi_prev);
  }
  return sample;
}

Eigen::VectorXd generate_fbm(const FbmSpec& spec, std::string* algorithm) {
  spec.validate();
  Eigen::VectorXd fgn;
  try {
    fgn = generate_fgn_circulant(spec);
    if (algorithm) *algorithm = "circulant_embedding";
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Generation) throw;
    fgn = generate_fgn_hosking(spec);
    if (algorithm) *algorithm = "recursive_conditioning";
  }
  Eigen::VectorXd path(fgn.size());
  double acc = 0.0;
  for (Index i = 0; i < fgn.size(); ++i) {
    acc += fgn[i];
    path[i] = acc;
  }
  return path;
}

void CrashProfile::validate() const {
  if (!(total_drop >= 0.0 && total_drop < 1.0))
    raise(ErrorKind::InvalidProfile, "total_drop must lie in [0, 1)");
  if (initial_3session_drop < 0.0 || initial_3session_drop > total_drop)
    raise(ErrorKind::InvalidProfile,
          "initial_3session_drop must lie in [0, total_drop]");
  if (duration < 1) raise(ErrorKind::InvalidProfile, "duration must be >= 1 session");
  if (recovery_len < 0)
    raise(ErrorKind::InvalidProfile, "recovery_len must be >= 0");
  if (initial_3session_drop > 0.0 && duration < 3)
    raise(ErrorKind::InvalidProfile,
          "a 3-session drop needs a duration of at least 3");
  if (initial_3session_drop > 0.0 && duration == 3 &&
      initial_3session_drop != total_drop)
    raise(ErrorKind::InvalidProfile,
          "with duration 3 the 3-session drop is the total drop");
  if (initial_3session_drop == total_drop && total_drop > 0.0 && duration > 3)
    raise(ErrorKind::InvalidProfile,
          "initial drop equal to the total drop would move the minimum to session 3");
}

PriceSeries generate_crash_series(Index pre_len, double base,
                                  const CrashProfile& profile) {
  if (pre_len < 1) raise(ErrorKind::InvalidProfile, "pre_len must be >= 1");
  if (!(base > 0.0)) raise(ErrorKind::InvalidProfile, "base price must be positive");
  profile.validate();

  const Index tail = profile.duration + profile.recovery_len;
  PriceSeries series;
  series.closes.resize(pre_len + tail);
  series.closes.head(pre_len).setConstant(base);

  const Index rupture = pre_len - 1;
  if (profile.total_drop == 0.0) {
    series.closes.tail(tail).setConstant(base);
    return series;
  }

  const double bottom = base - base * profile.total_drop;
  const auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };

  for (Index off = 1; off <= profile.duration; ++off) {
    double value;
    if (profile.initial_3session_drop > 0.0 && profile.duration > 3) {
      // two knots: base -> base*(1-initial) at +3 -> bottom at +duration
      const double knee = base - base * profile.initial_3session_drop;
      value = off <= 3 ? lerp(base, knee, static_cast<double>(off) / 3.0)
                       : lerp(knee, bottom,
                              static_cast<double>(off - 3) /
                                  static_cast<double>(profile.duration - 3));
    } else {
      value = lerp(base, bottom,
                   static_cast<double>(off) / static_cast<double>(profile.duration));
    }
    if (off == 3 && profile.initial_3session_drop > 0.0)
      value = base - base * profile.initial_3session_drop;
    if (off == profile.duration) value = bottom;
    series.closes[rupture + off] = value;
  }

  // Half retracement; strictly above the minimum so the argmin stays put.
  const double target = bottom + (base - bottom) / 2.0;
  for (Index off = 1; off <= profile.recovery_len; ++off)
    series.closes[rupture + profile.duration + off] =
        lerp(bottom, target,
             static_cast<double>(off) / static_cast<double>(profile.recovery_len));

  series.validate();
  return series;
}

}  // namespace hurstscan
