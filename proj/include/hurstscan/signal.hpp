#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hurstscan/track.hpp"

namespace hurstscan {

struct SignalThresholds {
  double ma21_ceiling = 0.5;
  double ma5_ceiling = 0.45;
  double minima_ceiling = 0.4;
  Index trend_lookback = 21;   // sessions for the decreasing-trend slope
  Index cross_lookback = 10;   // sessions over which ma5 < ma21 is counted
  double cross_fraction = 0.8; // required fraction of crossed sessions
  int minima_count = 2;

  void validate() const;
};

enum class Verdict { Sell, Buy, Neutral };

std::string to_string(Verdict v);

// The four conditions evaluated at one session. Sell requires all of them
// simultaneously; Buy requires all of them to fail; anything else is
// Neutral.
//   cond1: H_loc in decreasing trend and ma5 < ma21 except for small
//          fluctuations (negative OLS slope over trend_lookback, plus the
//          cross_fraction rule over cross_lookback)
//   cond2: ma21 <= ma21_ceiling
//   cond3: ma5 <= ma5_ceiling
//   cond4: at least minima_count local minima of H_loc within
//          trend_lookback with value <= minima_ceiling
struct SignalVerdict {
  Index session{};
  bool cond1{};
  bool cond2{};
  bool cond3{};
  bool cond4{};
  Verdict verdict = Verdict::Neutral;
};

SignalVerdict evaluate_signal(const HurstTrack& track, Index session,
                              const SignalThresholds& thresholds = {});

// All sessions of the track where evaluate_signal's preconditions hold.
std::vector<SignalVerdict> evaluate_all(const HurstTrack& track,
                                        const SignalThresholds& thresholds = {});

// Local minima of H_loc in [start_session, end_session] with value at or
// below `ceiling`: ok entries strictly below their neighbours, plateaus
// counted once at their first session. Window endpoints are excluded.
int count_hloc_minima(const HurstTrack& track, Index start_session,
                      Index end_session, double ceiling);

struct TrendFit {
  double slope{};      // per-session change of H_loc
  double intercept{};  // value of the fitted line at session 0
  double r_squared{};
  Index window_start{};
  Index window_end{};
  Index n_points{};

  double value_at(Index session) const {
    return intercept + slope * static_cast<double>(session);
  }
};

// OLS line of ok H_loc entries against absolute session index over
// [start_session, end_session]; gaps excluded. Needs >= 5 ok entries.
TrendFit fit_hloc_trend(const HurstTrack& track, Index start_session,
                        Index end_session);

struct CrashEvent {
  Index rupture_session{};
  std::string rupture_date;        // empty when the series has no dates
  double initial_3session_drop{};  // relative drop over the first 3 sessions
  double total_drop{};             // relative drop to the post-rupture minimum
  Index duration{};                // sessions from rupture to that minimum
  bool is_crash = true;            // false when no drop occurred (clamped to 0)
};

// Relative drop from the rupture close to the minimum close within
// `horizon` sessions after it, plus the initial 3-session drop. Negative
// drops are clamped to 0 and the event flagged as not a crash.
CrashEvent measure_correction(const PriceSeries& series, Index rupture_session,
                              Index horizon);

struct SlopeDropModel {
  double slope_coeff{};  // drop per unit |trend slope|
  double intercept{};
  double r_squared{};
  bool low_confidence = false;  // set when fitted on 3 or fewer points
};

// OLS of the total relative drop against the absolute H_loc trend slope,
// one point per crash event.
SlopeDropModel slope_correction_regression(
    const std::vector<std::pair<double, double>>& slope_drop_points);

// Session (possibly fractional) at which the fitted trend line reaches
// target_h. Requires a falling trend that has not yet reached the target.
double extrapolate_trend(const TrendFit& fit, double target_h);

}  // namespace hurstscan
