#include "hurstscan/signal.hpp"

#include <algorithm>
#include <cmath>

#include "hurstscan/linfit.hpp"

namespace hurstscan {

void SignalThresholds::validate() const {
  if (!(minima_ceiling < ma5_ceiling && ma5_ceiling < ma21_ceiling))
    raise(ErrorKind::InvalidParameter,
          "thresholds must satisfy minima_ceiling < ma5_ceiling < ma21_ceiling");
  if (trend_lookback < 2 || cross_lookback < 2)
    raise(ErrorKind::InvalidParameter, "lookbacks must be at least 2 sessions");
  if (!(cross_fraction > 0.0 && cross_fraction <= 1.0))
    raise(ErrorKind::InvalidParameter, "cross_fraction must be in (0, 1]");
  if (minima_count < 1)
    raise(ErrorKind::InvalidParameter, "minima_count must be at least 1");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Sell: return "sell";
    case Verdict::Buy: return "buy";
    case Verdict::Neutral: return "neutral";
  }
  return "neutral";
}

int count_hloc_minima(const HurstTrack& track, Index start_session,
                      Index end_session, double ceiling) {
  std::vector<double> values;
  for (Index s = std::max(start_session, track.first_session);
       s <= std::min(end_session, track.last_session()); ++s) {
    const Index e = s - track.first_session;
    if (track.status[static_cast<std::size_t>(e)] == EntryStatus::Ok)
      values.push_back(track.h_loc[e]);
  }
  const std::size_t m = values.size();
  int count = 0;
  for (std::size_t p = 1; p + 1 < m; ++p) {
    if (!(values[p] < values[p - 1])) continue;  // also skips plateau followers
    std::size_t q = p + 1;
    while (q < m && values[q] == values[p]) ++q;  // plateau counted at first entry
    if (q == m || !(values[q] > values[p])) continue;
    if (values[p] <= ceiling) ++count;
  }
  return count;
}

namespace {

bool falling_trend(const HurstTrack& track, Index session, Index lookback) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (Index s = session - lookback + 1; s <= session; ++s) {
    const Index e = s - track.first_session;
    if (track.status[static_cast<std::size_t>(e)] != EntryStatus::Ok) continue;
    xs.push_back(static_cast<double>(s));
    ys.push_back(track.h_loc[e]);
  }
  if (xs.size() < 2) return false;  // no trend can be established
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Index>(ys.size()));
  return fit_line(x, y).slope < 0.0;
}

bool crossed_below(const HurstTrack& track, Index session,
                   const SignalThresholds& thr) {
  Index crossed = 0;
  for (Index s = session - thr.cross_lookback + 1; s <= session; ++s) {
    if (!track.contains(s)) continue;
    const Index e = s - track.first_session;
    const double m5 = track.ma5[e];
    const double m21 = track.ma21[e];
    if (std::isnan(m5) || std::isnan(m21)) continue;
    if (m5 < m21) ++crossed;
  }
  const double fraction =
      static_cast<double>(crossed) / static_cast<double>(thr.cross_lookback);
  return fraction + 1e-12 >= thr.cross_fraction;
}

}  // namespace

SignalVerdict evaluate_signal(const HurstTrack& track, Index session,
                              const SignalThresholds& thresholds) {
  thresholds.validate();
  if (!track.contains(session))
    raise(ErrorKind::InsufficientHistory,
          "session " + std::to_string(session) + " is outside the track");
  const Index e = track.entry_of(session);
  // Both lookback windows must lie inside the track, so the verdict is a
  // pure function of the last max(trend_lookback, cross_lookback) entries.
  const Index need = std::max(thresholds.trend_lookback, thresholds.cross_lookback);
  if (e < need - 1)
    raise(ErrorKind::InsufficientHistory,
          "need " + std::to_string(need) + " track entries ending at session " +
              std::to_string(session));
  if (track.status[static_cast<std::size_t>(e)] != EntryStatus::Ok)
    raise(ErrorKind::InsufficientHistory,
          "no H_loc estimate at session " + std::to_string(session));
  if (std::isnan(track.ma5[e]) || std::isnan(track.ma21[e]))
    raise(ErrorKind::InsufficientHistory,
          "moving averages undefined at session " + std::to_string(session));

  SignalVerdict out;
  out.session = session;
  out.cond1 = falling_trend(track, session, thresholds.trend_lookback) &&
              crossed_below(track, session, thresholds);
  out.cond2 = track.ma21[e] <= thresholds.ma21_ceiling;
  out.cond3 = track.ma5[e] <= thresholds.ma5_ceiling;
  out.cond4 = count_hloc_minima(track, session - thresholds.trend_lookback + 1,
                                session, thresholds.minima_ceiling) >=
              thresholds.minima_count;

  if (out.cond1 && out.cond2 && out.cond3 && out.cond4)
    out.verdict = Verdict::Sell;
  else if (!out.cond1 && !out.cond2 && !out.cond3 && !out.cond4)
    out.verdict = Verdict::Buy;
  else
    out.verdict = Verdict::Neutral;
  return out;
}

std::vector<SignalVerdict> evaluate_all(const HurstTrack& track,
                                        const SignalThresholds& thresholds) {
  thresholds.validate();
  std::vector<SignalVerdict> out;
  for (Index s = track.first_session; s <= track.last_session(); ++s) {
    try {
      out.push_back(evaluate_signal(track, s, thresholds));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::InsufficientHistory) throw;
    }
  }
  return out;
}

TrendFit fit_hloc_trend(const HurstTrack& track, Index start_session,
                        Index end_session) {
  if (start_session > end_session)
    raise(ErrorKind::InvalidParameter, "trend window is empty");
  if (end_session - start_session + 1 < 5)
    raise(ErrorKind::InsufficientData, "trend window shorter than 5 sessions");
  std::vector<double> xs;
  std::vector<double> ys;
  for (Index s = std::max(start_session, track.first_session);
       s <= std::min(end_session, track.last_session()); ++s) {
    const Index e = s - track.first_session;
    if (track.status[static_cast<std::size_t>(e)] != EntryStatus::Ok) continue;
    xs.push_back(static_cast<double>(s));
    ys.push_back(track.h_loc[e]);
  }
  if (xs.size() < 5)
    raise(ErrorKind::InsufficientData,
          "trend window holds " + std::to_string(xs.size()) + " ok entries; need 5");
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Index>(ys.size()));
  const LineFit<double> fit = fit_line(x, y);

  TrendFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  out.window_start = start_session;
  out.window_end = end_session;
  out.n_points = fit.n;
  return out;
}

CrashEvent measure_correction(const PriceSeries& series, Index rupture_session,
                              Index horizon) {
  series.validate();
  if (horizon < 3) raise(ErrorKind::InvalidParameter, "horizon must be >= 3 sessions");
  if (rupture_session < 0 || rupture_session + 3 > series.sessions() - 1)
    raise(ErrorKind::InsufficientData,
          "rupture session " + std::to_string(rupture_session) +
              " too close to the series end");

  const double base = series.closes[rupture_session];
  const Index last = std::min(rupture_session + horizon, series.sessions() - 1);
  Index argmin = rupture_session + 1;
  double lowest = series.closes[argmin];
  for (Index s = rupture_session + 1; s <= last; ++s) {
    if (series.closes[s] < lowest) {
      lowest = series.closes[s];
      argmin = s;
    }
  }

  CrashEvent event;
  event.rupture_session = rupture_session;
  if (!series.dates.empty())
    event.rupture_date = series.dates[static_cast<std::size_t>(rupture_session)];
  event.initial_3session_drop =
      std::max(0.0, (base - series.closes[rupture_session + 3]) / base);
  event.total_drop = (base - lowest) / base;
  event.duration = argmin - rupture_session;
  if (event.total_drop <= 0.0) {
    event.total_drop = 0.0;
    event.is_crash = false;
  }
  return event;
}

SlopeDropModel slope_correction_regression(
    const std::vector<std::pair<double, double>>& slope_drop_points) {
  const Index n = static_cast<Index>(slope_drop_points.size());
  if (n < 2)
    raise(ErrorKind::InsufficientData,
          "regression needs at least 2 events, got " + std::to_string(n));
  Eigen::VectorXd x(n);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    x[i] = std::abs(slope_drop_points[static_cast<std::size_t>(i)].first);
    y[i] = slope_drop_points[static_cast<std::size_t>(i)].second;
  }
  LineFit<double> fit;
  try {
    fit = fit_line(x, y);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::DegenerateRegression)
      raise(ErrorKind::DegenerateRegression,
            "all events share the same trend slope");
    throw;
  }

  SlopeDropModel model;
  model.slope_coeff = fit.slope;
  model.intercept = fit.intercept;
  model.r_squared = fit.r_squared;
  model.low_confidence = n <= 3;
  return model;
}

double extrapolate_trend(const TrendFit& fit, double target_h) {
  if (!(fit.slope < 0.0))
    raise(ErrorKind::NoCrossing, "trend is not decreasing; the line never falls to the target");
  const double at_end = fit.value_at(fit.window_end);
  if (!(target_h < at_end))
    raise(ErrorKind::NoCrossing, "target already reached at the window end");
  return (target_h - fit.intercept) / fit.slope;
}

}  // namespace hurstscan
