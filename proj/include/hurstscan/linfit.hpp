#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "hurstscan/errors.hpp"

namespace hurstscan {

using Index = Eigen::Index;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct LineFit {
  Scalar slope{};
  Scalar intercept{};
  Scalar r_squared{};
  Scalar stderr_slope{};
  Index n{};
};

// Ordinary least squares line y = intercept + slope * x.
// Throws DegenerateRegression when all abscissae coincide.
template <class DerivedX, class DerivedY>
LineFit<typename DerivedX::Scalar> fit_line(const Eigen::MatrixBase<DerivedX>& x,
                                            const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Index n = x.size();
  if (n != y.size()) raise(ErrorKind::InvalidParameter, "fit_line: x/y size mismatch");
  if (n < 2) raise(ErrorKind::InsufficientData, "fit_line: need at least 2 points");

  const Scalar x_mean = x.mean();
  const Scalar y_mean = y.mean();
  const auto dx = (x.array() - x_mean).eval();
  const auto dy = (y.array() - y_mean).eval();
  const Scalar sxx = dx.square().sum();
  if (!(sxx > Scalar(0)))
    raise(ErrorKind::DegenerateRegression, "fit_line: identical abscissae");

  LineFit<Scalar> fit;
  fit.n = n;
  fit.slope = (dx * dy).sum() / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;

  const Scalar ssr = (dy - fit.slope * dx).square().sum();
  const Scalar sst = dy.square().sum();
  fit.r_squared = sst > Scalar(0)
                      ? std::max(Scalar(0), Scalar(1) - ssr / sst)
                      : Scalar(1);
  fit.stderr_slope =
      n > 2 ? std::sqrt(std::max(Scalar(0), ssr) / (Scalar(n - 2) * sxx)) : Scalar(0);
  return fit;
}

}  // namespace hurstscan
