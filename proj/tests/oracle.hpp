#pragma once

// Brute-force DFA reference used to cross-check the library: per-box
// polynomial OLS through explicit normal equations (raw powers of the
// offsets, Gaussian elimination with partial pivoting). Deliberately free
// of Eigen and of the library's own numerics.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

inline std::vector<double> solve_normal_equations(
    std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular normal equations");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

inline double detrended_variance(const std::vector<double>& segment, int order) {
  const std::size_t len = segment.size();
  const std::size_t terms = static_cast<std::size_t>(order) + 1;
  std::vector<std::vector<double>> a(terms, std::vector<double>(terms, 0.0));
  std::vector<double> b(terms, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const double x = static_cast<double>(i);
    double xj = 1.0;
    std::vector<double> powers(2 * terms - 1, 0.0);
    for (std::size_t j = 0; j < 2 * terms - 1; ++j) {
      powers[j] = xj;
      xj *= x;
    }
    for (std::size_t r = 0; r < terms; ++r) {
      for (std::size_t c = 0; c < terms; ++c) a[r][c] += powers[r + c];
      b[r] += segment[i] * powers[r];
    }
  }
  const std::vector<double> coef = solve_normal_equations(a, b);
  double ssr = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    double fitted = 0.0;
    double xj = 1.0;
    for (std::size_t j = 0; j < terms; ++j) {
      fitted += coef[j] * xj;
      xj *= static_cast<double>(i);
    }
    const double r = segment[i] - fitted;
    ssr += r * r;
  }
  return ssr / static_cast<double>(len);
}

struct Curve {
  std::vector<long> tau;
  std::vector<double> f2;
};

inline Curve fluctuation(const std::vector<double>& window,
                         const std::vector<long>& taus, bool overlap_tail,
                         int order, bool integrate) {
  std::vector<double> profile = window;
  if (integrate) {
    double mean = 0.0;
    for (double v : window) mean += v;
    mean /= static_cast<double>(window.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i) {
      acc += window[i] - mean;
      profile[i] = acc;
    }
  }

  const long n = static_cast<long>(profile.size());
  Curve curve;
  for (const long tau : taus) {
    std::vector<std::pair<long, long>> boxes;
    const long count = n / tau;
    for (long k = 0; k < count; ++k)
      boxes.emplace_back(n - (k + 1) * tau, n - k * tau);
    if (n % tau != 0 && overlap_tail) boxes.emplace_back(0, tau);

    double acc = 0.0;
    for (const auto& [begin, end] : boxes) {
      const std::vector<double> seg(profile.begin() + begin, profile.begin() + end);
      acc += detrended_variance(seg, order);
    }
    curve.tau.push_back(tau);
    curve.f2.push_back(acc / static_cast<double>(boxes.size()));
  }
  return curve;
}

// Closed-form log-log OLS slope over the whole curve; returns slope / 2.
inline double estimate_h(const Curve& curve) {
  const std::size_t n = curve.tau.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(static_cast<double>(curve.tau[i]));
    ys[i] = std::log(curve.f2[i]);
    sx += xs[i];
    sy += ys[i];
  }
  const double xm = sx / static_cast<double>(n);
  const double ym = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  return sxy / sxx / 2.0;
}

}  // namespace oracle
