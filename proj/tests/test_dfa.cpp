#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "hurstscan/dfa.hpp"
#include "hurstscan/synth.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace hurstscan;

namespace {

DfaConfig grid_config(Index window_len, std::vector<Index> grid) {
  DfaConfig cfg;
  cfg.window_len = window_len;
  cfg.tau_grid = std::move(grid);
  return cfg;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidData;
}

}  // namespace

TEST_CASE("partition_boxes lays boxes from the newest session backwards") {
  const auto exact = partition_boxes(10, 5, TailCoverage::WithOverlapTail);
  CHECK(exact == std::vector<BoxSpan>{{5, 10}, {0, 5}});

  const auto paper = partition_boxes(215, 50, TailCoverage::WithOverlapTail);
  CHECK(paper == std::vector<BoxSpan>{{165, 215}, {115, 165}, {65, 115}, {15, 65}, {0, 50}});

  const auto truncated = partition_boxes(7, 3, TailCoverage::TruncateTail);
  CHECK(truncated == std::vector<BoxSpan>{{4, 7}, {1, 4}});

  const auto tail = partition_boxes(7, 3, TailCoverage::WithOverlapTail);
  CHECK(tail == std::vector<BoxSpan>{{4, 7}, {1, 4}, {0, 3}});
}

TEST_CASE("partition_boxes rejects out-of-range scales") {
  CHECK(kind_of([] { partition_boxes(10, 11, TailCoverage::WithOverlapTail); }) ==
        ErrorKind::InvalidScale);
  CHECK(kind_of([] { partition_boxes(10, 1, TailCoverage::WithOverlapTail); }) ==
        ErrorKind::InvalidScale);
}

TEST_CASE("partition_boxes box count and coverage") {
  for (Index n = 4; n <= 64; ++n) {
    for (Index tau = 2; tau <= n; ++tau) {
      const auto overlap = partition_boxes(n, tau, TailCoverage::WithOverlapTail);
      const auto truncate = partition_boxes(n, tau, TailCoverage::TruncateTail);
      const Index full = n / tau;
      CHECK(static_cast<Index>(truncate.size()) == full);
      CHECK(static_cast<Index>(overlap.size()) == full + (n % tau != 0 ? 1 : 0));

      std::vector<bool> covered(static_cast<std::size_t>(n), false);
      for (const auto& box : overlap) {
        CHECK(box.size() == tau);
        for (Index i = box.begin; i < box.end; ++i)
          covered[static_cast<std::size_t>(i)] = true;
      }
      CHECK(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }));
    }
  }
}

TEST_CASE("detrended_variance on exactly linear data is zero") {
  Eigen::Vector4d seg(1.0, 3.0, 5.0, 7.0);
  CHECK(detrended_variance(seg, 1) <= 1e-24);
}

TEST_CASE("detrended_variance on a constant segment is zero") {
  for (const double c : {0.0, -3.5, 1e6}) {
    const Eigen::VectorXd seg = Eigen::VectorXd::Constant(9, c);
    CHECK(detrended_variance(seg, 1) <= 1e-16);
  }
}

TEST_CASE("detrended_variance matches the closed-form OLS residual") {
  // (0,0),(1,1),(2,0),(3,1): line 0.2 + 0.2 x, residuals (-.2,.6,-.6,.2),
  // mean squared residual 0.8 / 4 = 0.2
  Eigen::Vector4d seg(0.0, 1.0, 0.0, 1.0);
  CHECK(detrended_variance(seg, 1) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("detrended_variance handles higher orders and rejects bad input") {
  Eigen::VectorXd quad(6);
  for (Index i = 0; i < 6; ++i) quad[i] = 2.0 + 0.5 * i - 0.25 * i * i;
  CHECK(detrended_variance(quad, 2) <= 1e-20);

  Eigen::Vector3d short_seg(1.0, 2.0, 3.0);
  CHECK(kind_of([&] { detrended_variance(short_seg, 2); }) == ErrorKind::InvalidParameter);

  Eigen::Vector4d bad(1.0, std::nan(""), 3.0, 4.0);
  CHECK(kind_of([&] { detrended_variance(bad, 1); }) == ErrorKind::InvalidData);
}

TEST_CASE("fluctuation_function vanishes on a linear ramp and estimation fails") {
  Eigen::VectorXd ramp(32);
  for (Index i = 0; i < 32; ++i) ramp[i] = 5.0 + 0.3 * i;
  const auto cfg = grid_config(32, {4, 5, 6, 7, 8});
  const auto curve = fluctuation_function(ramp, cfg);
  for (Index i = 0; i < curve.f2.size(); ++i) CHECK(curve.f2[i] <= 1e-20);
  CHECK(kind_of([&] { estimate_hurst(curve); }) == ErrorKind::DegenerateWindow);
}

TEST_CASE("fluctuation_function matches the brute-force oracle on a small window") {
  GaussianSource gauss(2024);
  Eigen::VectorXd window(16);
  for (Index i = 0; i < 16; ++i) window[i] = gauss.next();
  const auto cfg = grid_config(16, {4, 8});
  const auto curve = fluctuation_function(window, cfg);

  const std::vector<double> raw(window.data(), window.data() + 16);
  const auto ref = oracle::fluctuation(raw, {4, 8}, true, 1, false);
  for (std::size_t i = 0; i < ref.f2.size(); ++i) {
    CHECK(curve.f2[static_cast<Index>(i)] ==
          doctest::Approx(ref.f2[i]).epsilon(1e-10));
  }
}

TEST_CASE("Brownian window has log-log slope near one") {
  GaussianSource gauss(1);
  Eigen::VectorXd window(512);
  double acc = 0.0;
  for (Index i = 0; i < 512; ++i) window[i] = acc += gauss.next();
  DfaConfig cfg;
  cfg.window_len = 512;
  const auto est = estimate_window(window, cfg);
  CHECK(2.0 * est.h_loc > 0.9);
  CHECK(2.0 * est.h_loc < 1.1);
}

TEST_CASE("integrated profile of iid noise behaves like a random walk") {
  GaussianSource gauss(5);
  Eigen::VectorXd noise(512);
  for (Index i = 0; i < 512; ++i) noise[i] = gauss.next();
  DfaConfig cfg;
  cfg.window_len = 512;
  cfg.integrate_profile = true;
  const auto est = estimate_window(noise, cfg);
  CHECK(est.h_loc > 0.4);
  CHECK(est.h_loc < 0.6);
}

TEST_CASE("fluctuation_function rejects a window that disagrees with the config") {
  Eigen::VectorXd w = Eigen::VectorXd::Random(20);
  const auto cfg = grid_config(16, {4});
  CHECK(kind_of([&] { fluctuation_function(w, cfg); }) == ErrorKind::InvalidData);
}

TEST_CASE("coverage policies agree when tau divides the window") {
  std::mt19937 rng(7);
  const Eigen::VectorXd w = testutil::random_window(rng, 64);
  auto cfg = grid_config(64, {4, 8, 16});
  const auto with_tail = fluctuation_function(w, cfg);
  cfg.coverage = TailCoverage::TruncateTail;
  const auto without = fluctuation_function(w, cfg);
  for (Index i = 0; i < with_tail.f2.size(); ++i)
    CHECK(with_tail.f2[i] == without.f2[i]);
}

TEST_CASE("estimate_hurst recovers exact power laws") {
  FluctuationCurve<double> curve;
  curve.tau = {4, 8, 16, 32, 64};
  curve.f2.resize(5);
  for (Index i = 0; i < 5; ++i)
    curve.f2[i] = 3.0 * std::pow(static_cast<double>(curve.tau[static_cast<std::size_t>(i)]), 1.4);
  auto est = estimate_hurst(curve);
  CHECK(est.h_loc == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(est.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.fractal_dimension() == 2.0 - est.h_loc);

  for (Index i = 0; i < 5; ++i)
    curve.f2[i] = 0.25 * static_cast<double>(curve.tau[static_cast<std::size_t>(i)]);
  est = estimate_hurst(curve);
  CHECK(est.h_loc == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.fractal_dimension() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("estimate_hurst honours the scaling range") {
  FluctuationCurve<double> curve;
  curve.tau = {4, 5, 6, 8, 11, 16, 32, 64};
  curve.f2.resize(8);
  for (std::size_t i = 0; i < 8; ++i) {
    const double tau = static_cast<double>(curve.tau[i]);
    // power law only up to tau = 16; garbage beyond
    curve.f2[static_cast<Index>(i)] =
        curve.tau[i] <= 16 ? 2.0 * std::pow(tau, 1.4) : 1234.5;
  }
  const auto est = estimate_hurst(curve, 0, 16);
  CHECK(est.h_loc == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(est.n_scales == 6);
}

TEST_CASE("estimate_hurst error paths") {
  FluctuationCurve<double> curve;
  curve.tau = {4, 8, 16};
  curve.f2 = Eigen::Vector3d(1.0, 2.0, 3.0);
  CHECK(kind_of([&] { estimate_hurst(curve); }) == ErrorKind::InsufficientScales);

  curve.tau = {4, 8, 16, 32};
  curve.f2 = Eigen::Vector4d(1.0, 0.0, 3.0, 4.0);
  CHECK(kind_of([&] { estimate_hurst(curve); }) == ErrorKind::DegenerateWindow);
}

TEST_CASE("scale invariance: h_loc is unchanged under positive rescaling") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<Index> len(32, 64);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = len(rng);
    const Eigen::VectorXd w = testutil::random_window(rng, n);
    DfaConfig cfg;
    cfg.window_len = n;
    const double h = estimate_window(w, cfg).h_loc;
    for (const double c : {1e-3, 2.5, 1e4}) {
      const double hc = estimate_window((c * w).eval(), cfg).h_loc;
      CHECK(std::abs(hc - h) <= 1e-12);
    }
  }
}

TEST_CASE("offset invariance: F^2 is unchanged under a constant shift") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd w = testutil::random_window(rng, 48);
    DfaConfig cfg;
    cfg.window_len = 48;
    const auto base = fluctuation_function(w, cfg);
    for (const double c : {-50.0, 1000.0}) {
      const auto shifted = fluctuation_function((w.array() + c).matrix().eval(), cfg);
      for (Index i = 0; i < base.f2.size(); ++i)
        CHECK(shifted.f2[i] ==
              doctest::Approx(base.f2[i]).epsilon(1e-9).scale(base.f2[i]));
    }
    cfg.integrate_profile = true;
    const auto base_int = fluctuation_function(w, cfg);
    const auto shifted_int =
        fluctuation_function((w.array() + 100.0).matrix().eval(), cfg);
    for (Index i = 0; i < base_int.f2.size(); ++i)
      CHECK(shifted_int.f2[i] == doctest::Approx(base_int.f2[i]).epsilon(1e-9));
  }
}

TEST_CASE("oracle equivalence on random windows") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<Index> len(16, 64);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = len(rng);
    const Eigen::VectorXd w = testutil::random_window(rng, n);
    const auto grid = default_tau_grid(4, std::max<Index>(4, n / 4));
    DfaConfig cfg;
    cfg.window_len = n;
    cfg.tau_grid = grid;
    const bool integrate = trial % 2 == 0;
    cfg.integrate_profile = integrate;
    const auto curve = fluctuation_function(w, cfg);

    const std::vector<double> raw(w.data(), w.data() + n);
    std::vector<long> taus(grid.begin(), grid.end());
    const auto ref = oracle::fluctuation(raw, taus, true, 1, integrate);
    for (std::size_t i = 0; i < ref.f2.size(); ++i)
      CHECK(curve.f2[static_cast<Index>(i)] ==
            doctest::Approx(ref.f2[i]).epsilon(1e-10));
  }
}

TEST_CASE("fractal dimension identity holds for every estimate") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd w = testutil::random_window(rng, 64);
    DfaConfig cfg;
    cfg.window_len = 64;
    const auto est = estimate_window(w, cfg);
    CHECK(est.fractal_dimension() == 2.0 - est.h_loc);
    CHECK(est.fractal_dimension() + est.h_loc == 2.0);
  }
}

TEST_CASE("seeded fBm(0.7) window estimates inside the recorded band") {
  FbmSpec spec;
  spec.hurst = 0.7;
  spec.length = 256;
  spec.seed = 1;
  const Eigen::VectorXd path = generate_fbm(spec);
  DfaConfig cfg;
  cfg.window_len = 256;
  const auto est = estimate_window(path, cfg);
  CHECK(est.h_loc > 0.6);
  CHECK(est.h_loc < 0.8);
}

TEST_CASE("default grid is geometric, deduplicated, and validated") {
  const auto grid = default_tau_grid(4, 53);
  CHECK(grid.front() == 4);
  CHECK(grid.back() <= 53);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK(grid == std::vector<Index>{4, 5, 6, 7, 8, 10, 11, 13, 16, 19, 23, 27, 32, 38, 45});

  DfaConfig cfg;  // defaults: N=215, derived grid
  CHECK_NOTHROW(cfg.validate());

  cfg.tau_grid = {4, 8, 16, 128};  // above N/4
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InvalidScale);

  cfg.tau_grid = {2, 4, 8, 16};  // smallest scale below order+2
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InvalidScale);

  cfg.tau_grid = {4, 8, 16, 32};
  cfg.scale_lo = 8;
  cfg.scale_hi = 16;  // only 2 scales left in range
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::InsufficientScales);
}
