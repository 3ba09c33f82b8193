#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "hurstscan/dfa.hpp"
#include "hurstscan/io.hpp"
#include "hurstscan/signal.hpp"
#include "hurstscan/synth.hpp"
#include "hurstscan/track.hpp"

namespace hs = hurstscan;

namespace {

// Exit code taxonomy; every library error class maps to exactly one code.
//   0 success
//   2 usage error (bad flags or arguments)
//   3 parse error (malformed input file)
//   4 validation error (well-formed input violating a data invariant)
//   5 insufficient data / history / scales
//   6 degenerate data (no slope or regression exists)
//   7 I/O error
//   8 invalid parameter, scale, or profile; no trend crossing
//   9 generation failure
int exit_code_for(hs::ErrorKind kind) {
  switch (kind) {
    case hs::ErrorKind::Parse:
      return 3;
    case hs::ErrorKind::Validation:
    case hs::ErrorKind::EmptyInput:
      return 4;
    case hs::ErrorKind::InsufficientData:
    case hs::ErrorKind::InsufficientHistory:
    case hs::ErrorKind::InsufficientScales:
      return 5;
    case hs::ErrorKind::DegenerateWindow:
    case hs::ErrorKind::DegenerateRegression:
      return 6;
    case hs::ErrorKind::Io:
      return 7;
    case hs::ErrorKind::InvalidScale:
    case hs::ErrorKind::InvalidData:
    case hs::ErrorKind::InvalidParameter:
    case hs::ErrorKind::InvalidProfile:
    case hs::ErrorKind::NoCrossing:
      return 8;
    case hs::ErrorKind::Generation:
      return 9;
  }
  return 1;
}

struct TrackArgs {
  std::string input;
  std::string output;
  std::string dump_curves;
  hs::Index window_len = 215;
  hs::Index tau_min = 4;
  hs::Index tau_max = 0;  // 0 -> window_len / 4
  hs::Index scale_lo = 0;
  hs::Index scale_hi = 0;
  int detrend_order = 1;
  bool integrate = false;
  bool truncate_tail = false;
  int threads = 1;

  hs::DfaConfig config() const {
    hs::DfaConfig cfg;
    cfg.window_len = window_len;
    cfg.tau_grid = hs::default_tau_grid(
        tau_min, tau_max > 0 ? tau_max : window_len / 4);
    cfg.scale_lo = scale_lo;
    cfg.scale_hi = scale_hi;
    cfg.detrend_order = detrend_order;
    cfg.coverage = truncate_tail ? hs::TailCoverage::TruncateTail
                                 : hs::TailCoverage::WithOverlapTail;
    cfg.integrate_profile = integrate;
    return cfg;
  }
};

void dump_fluctuation_curves(const hs::PriceSeries& series,
                             const hs::HurstTrack& track,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) hs::raise(hs::ErrorKind::Io, "cannot open " + path + " for writing");
  out << "session,tau,f2,ln_tau,ln_f2\n";
  const hs::Index n = track.config.window_len;
  for (hs::Index e = 0; e < track.entries(); ++e) {
    if (track.status[static_cast<std::size_t>(e)] != hs::EntryStatus::Ok) continue;
    const auto window = series.closes.segment(e, n);
    const auto curve = fluctuation_function(window, track.config);
    const hs::Index session = track.first_session + e;
    for (std::size_t i = 0; i < curve.tau.size(); ++i) {
      const double tau = static_cast<double>(curve.tau[i]);
      const double f2 = curve.f2[static_cast<hs::Index>(i)];
      out << session << ',' << curve.tau[i] << ',' << hs::format_value(f2) << ','
          << hs::format_value(std::log(tau)) << ',' << hs::format_value(std::log(f2))
          << "\n";
    }
  }
  out.flush();
  if (!out) hs::raise(hs::ErrorKind::Io, "error while writing " + path);
}

int cmd_track(const TrackArgs& args) {
  const hs::PriceSeries series = hs::read_series_file(args.input);
  const hs::HurstTrack track = hs::sliding_hurst(series, args.config(), args.threads);
  hs::write_track_file(track, args.output);
  if (!args.dump_curves.empty())
    dump_fluctuation_curves(series, track, args.dump_curves);
  std::cout << "wrote " << track.entries() << " track entries (sessions "
            << track.first_session << ".." << track.last_session() << ") to "
            << args.output << "\n";
  return 0;
}

struct SignalArgs {
  std::string track_path;
  std::string output;
  hs::SignalThresholds thresholds;
};

int cmd_signal(const SignalArgs& args) {
  const hs::HurstTrack track = hs::read_track_file(args.track_path);
  const auto verdicts = hs::evaluate_all(track, args.thresholds);
  if (verdicts.empty())
    hs::raise(hs::ErrorKind::InsufficientHistory,
              "track has no session with enough history to evaluate");
  hs::write_signals_file(verdicts, args.output);

  bool found = false;
  for (const auto& v : verdicts) {
    if (v.verdict == hs::Verdict::Sell) {
      std::cout << "first sell signal at session " << v.session << "\n";
      found = true;
      break;
    }
  }
  if (!found) std::cout << "no sell signal\n";
  return 0;
}

struct CrashReportArgs {
  std::string input;
  std::string track_path;
  std::string output;
  hs::Index horizon = 60;
  std::vector<std::string> events;  // rupture:fit_start:fit_end
};

std::array<hs::Index, 3> parse_event_spec(const std::string& spec) {
  std::array<hs::Index, 3> out{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t next = spec.find(':', pos);
    const std::string part = next == std::string::npos
                                 ? spec.substr(pos)
                                 : spec.substr(pos, next - pos);
    try {
      out[static_cast<std::size_t>(i)] = std::stoll(part);
    } catch (const std::exception&) {
      hs::raise(hs::ErrorKind::InvalidParameter,
                "bad event spec '" + spec + "': expected RUPTURE:FIT_START:FIT_END");
    }
    if (i < 2) {
      if (next == std::string::npos)
        hs::raise(hs::ErrorKind::InvalidParameter,
                  "bad event spec '" + spec + "': expected RUPTURE:FIT_START:FIT_END");
      pos = next + 1;
    } else if (next != std::string::npos) {
      hs::raise(hs::ErrorKind::InvalidParameter,
                "bad event spec '" + spec + "': expected RUPTURE:FIT_START:FIT_END");
    }
  }
  return out;
}

int cmd_crash_report(const CrashReportArgs& args) {
  if (args.events.empty())
    hs::raise(hs::ErrorKind::InvalidParameter, "at least one --event is required");
  const hs::PriceSeries series = hs::read_series_file(args.input);
  const hs::HurstTrack track = hs::read_track_file(args.track_path);

  // All events are measured before anything is written: a report is
  // all-or-nothing.
  struct Row {
    hs::CrashEvent event;
    hs::TrendFit fit;
  };
  std::vector<Row> rows;
  std::vector<std::pair<double, double>> points;
  for (const auto& spec : args.events) {
    const auto [rupture, fit_start, fit_end] = parse_event_spec(spec);
    Row row;
    row.event = hs::measure_correction(series, rupture, args.horizon);
    row.fit = hs::fit_hloc_trend(track, fit_start, fit_end);
    points.emplace_back(row.fit.slope, row.event.total_drop);
    rows.push_back(std::move(row));
  }

  bool have_model = false;
  hs::SlopeDropModel model;
  if (points.size() >= 2) {
    model = hs::slope_correction_regression(points);
    have_model = true;
  } else {
    std::cerr << "warning: slope-correction regression needs at least 2 events; "
                 "skipped\n";
  }

  std::ofstream out(args.output);
  if (!out) hs::raise(hs::ErrorKind::Io, "cannot open " + args.output + " for writing");
  out << "rupture_session,rupture_date,initial_3session_drop,total_drop,duration,"
         "is_crash,trend_slope,trend_r_squared\n";
  for (const auto& row : rows) {
    out << row.event.rupture_session << ',' << row.event.rupture_date << ','
        << hs::format_value(row.event.initial_3session_drop) << ','
        << hs::format_value(row.event.total_drop) << ',' << row.event.duration << ','
        << (row.event.is_crash ? 1 : 0) << ',' << hs::format_value(row.fit.slope)
        << ',' << hs::format_value(row.fit.r_squared) << "\n";
  }
  if (have_model) {
    out << "# regression: total_drop = coeff * |trend_slope| + intercept\n";
    out << "# regression_coeff=" << hs::format_value(model.slope_coeff) << "\n";
    out << "# regression_intercept=" << hs::format_value(model.intercept) << "\n";
    out << "# regression_r_squared=" << hs::format_value(model.r_squared) << "\n";
    out << "# regression_low_confidence=" << (model.low_confidence ? 1 : 0) << "\n";
  }
  out.flush();
  if (!out) hs::raise(hs::ErrorKind::Io, "error while writing " + args.output);
  std::cout << "wrote crash report for " << rows.size() << " event(s) to "
            << args.output << "\n";
  return 0;
}

struct SynthArgs {
  std::string output;
  bool crash = false;
  double hurst = 0.5;
  hs::Index length = 1024;
  std::uint64_t seed = 0;
  double scale = 1.0;
  double base = 100.0;
  hs::Index pre_len = 100;
  double initial_drop = 0.0;
  double total_drop = 0.0;
  hs::Index duration = 1;
  hs::Index recovery_len = 20;
};

int cmd_synth(const SynthArgs& args) {
  if (args.crash) {
    hs::CrashProfile profile;
    profile.initial_3session_drop = args.initial_drop;
    profile.total_drop = args.total_drop;
    profile.duration = args.duration;
    profile.recovery_len = args.recovery_len;
    const hs::PriceSeries series =
        hs::generate_crash_series(args.pre_len, args.base, profile);
    hs::write_series_file(
        series, args.output,
        {"generator=crash", "base=" + hs::format_value(args.base),
         "pre_len=" + std::to_string(args.pre_len),
         "initial_3session_drop=" + hs::format_value(args.initial_drop),
         "total_drop=" + hs::format_value(args.total_drop),
         "duration=" + std::to_string(args.duration),
         "recovery_len=" + std::to_string(args.recovery_len),
         "rupture_session=" + std::to_string(args.pre_len - 1)});
    std::cout << "wrote crash fixture (" << series.sessions() << " sessions) to "
              << args.output << "\n";
    return 0;
  }

  hs::FbmSpec spec;
  spec.hurst = args.hurst;
  spec.length = args.length;
  spec.seed = args.seed;
  spec.scale = args.scale;
  std::string algorithm;
  const Eigen::VectorXd path = hs::generate_fbm(spec, &algorithm);

  // Closes must be positive; an additive shift leaves the detrended
  // fluctuations untouched.
  const double offset = 1.0 - path.minCoeff();
  hs::PriceSeries series;
  series.closes = path.array() + offset;

  hs::write_series_file(
      series, args.output,
      {"generator=fbm", "algorithm=" + algorithm, "rng=mt19937_64_box_muller",
       "hurst=" + hs::format_value(args.hurst),
       "length=" + std::to_string(args.length), "seed=" + std::to_string(args.seed),
       "scale=" + hs::format_value(args.scale), "offset=" + hs::format_value(offset)});
  std::cout << "wrote fBm fixture (" << series.sessions() << " sessions, H="
            << hs::format_value(args.hurst) << ", " << algorithm << ") to "
            << args.output << "\n";
  return 0;
}

struct TrendArgs {
  std::string track_path;
  hs::Index start = 0;
  hs::Index end = 0;
  double target = 0.4;
};

int cmd_fit_trend(const TrendArgs& args) {
  const hs::HurstTrack track = hs::read_track_file(args.track_path);
  const hs::TrendFit fit = hs::fit_hloc_trend(track, args.start, args.end);
  std::cout << "slope=" << hs::format_value(fit.slope)
            << " intercept=" << hs::format_value(fit.intercept)
            << " r_squared=" << hs::format_value(fit.r_squared)
            << " n=" << fit.n_points << " window=" << fit.window_start << ".."
            << fit.window_end << "\n";
  return 0;
}

int cmd_extrapolate(const TrendArgs& args) {
  const hs::HurstTrack track = hs::read_track_file(args.track_path);
  const hs::TrendFit fit = hs::fit_hloc_trend(track, args.start, args.end);
  const double crossing = hs::extrapolate_trend(fit, args.target);
  std::cout << "crossing_session=" << hs::format_value(crossing)
            << " sessions_ahead="
            << hs::format_value(crossing - static_cast<double>(fit.window_end))
            << " slope=" << hs::format_value(fit.slope)
            << " target=" << hs::format_value(args.target) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local Hurst exponent tracking and crash-warning signals for "
               "price series"};
  app.require_subcommand(1);

  const auto open_unit_interval = CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const double v = std::stod(s);
          if (v <= 0.0 || v >= 1.0) return "value must lie strictly in (0, 1)";
        } catch (const std::exception&) {
          return "not a number";
        }
        return {};
      },
      "(0,1)");

  TrackArgs track_args;
  auto* track = app.add_subcommand(
      "track", "Estimate the sliding-window H_loc track of a price series");
  track->add_option("--input", track_args.input, "input series CSV")->required();
  track->add_option("--output", track_args.output, "output track CSV")->required();
  track->add_option("--window-len", track_args.window_len,
                    "observation window length N in sessions");
  track->add_option("--tau-min", track_args.tau_min, "smallest box size");
  track->add_option("--tau-max", track_args.tau_max,
                    "largest box size (default window-len/4)");
  track->add_option("--scale-lo", track_args.scale_lo,
                    "lower bound of the log-log fit range");
  track->add_option("--scale-hi", track_args.scale_hi,
                    "upper bound of the log-log fit range");
  track->add_option("--detrend-order", track_args.detrend_order,
                    "polynomial detrend degree");
  track->add_flag("--integrate", track_args.integrate,
                  "integrate the mean-subtracted profile before detrending");
  track->add_flag("--truncate-tail", track_args.truncate_tail,
                  "drop the remainder instead of adding an overlapping tail box");
  track->add_option("--threads", track_args.threads, "worker threads");
  track->add_option("--dump-curves", track_args.dump_curves,
                    "also write per-session (ln tau, ln F^2) pairs to this CSV");

  SignalArgs signal_args;
  auto* signal = app.add_subcommand(
      "signal", "Evaluate the four sell/buy conditions along a track");
  signal->add_option("--track", signal_args.track_path, "input track CSV")->required();
  signal->add_option("--output", signal_args.output, "output timeline CSV")->required();
  signal->add_option("--ma21-ceiling", signal_args.thresholds.ma21_ceiling,
                     "condition 2 ceiling for ma21");
  signal->add_option("--ma5-ceiling", signal_args.thresholds.ma5_ceiling,
                     "condition 3 ceiling for ma5");
  signal->add_option("--minima-ceiling", signal_args.thresholds.minima_ceiling,
                     "condition 4 ceiling for H_loc minima");
  signal->add_option("--trend-lookback", signal_args.thresholds.trend_lookback,
                     "sessions for the decreasing-trend slope");
  signal->add_option("--cross-lookback", signal_args.thresholds.cross_lookback,
                     "sessions over which ma5 < ma21 is counted");
  signal->add_option("--cross-fraction", signal_args.thresholds.cross_fraction,
                     "required fraction of crossed sessions");
  signal->add_option("--minima-count", signal_args.thresholds.minima_count,
                     "required number of qualifying minima");

  CrashReportArgs crash_args;
  auto* crash_report = app.add_subcommand(
      "crash-report",
      "Measure corrections after rupture points and regress them on trend slopes");
  crash_report->add_option("--input", crash_args.input, "input series CSV")->required();
  crash_report->add_option("--track", crash_args.track_path, "input track CSV")
      ->required();
  crash_report->add_option("--output", crash_args.output, "output report CSV")
      ->required();
  crash_report->add_option("--horizon", crash_args.horizon,
                           "post-rupture search horizon in sessions");
  crash_report
      ->add_option("--event", crash_args.events,
                   "event spec RUPTURE:FIT_START:FIT_END (repeatable)")
      ->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "Generate synthetic fixture series (fBm or crash profile)");
  synth->add_option("--output", synth_args.output, "output series CSV")->required();
  synth->add_option("--hurst", synth_args.hurst, "target Hurst exponent")
      ->check(open_unit_interval);
  synth->add_option("--length", synth_args.length, "number of sessions");
  synth->add_option("--seed", synth_args.seed, "random seed");
  synth->add_option("--scale", synth_args.scale, "increment standard deviation");
  synth->add_flag("--crash", synth_args.crash, "generate a crash profile instead");
  synth->add_option("--base", synth_args.base, "base price before the rupture");
  synth->add_option("--pre-len", synth_args.pre_len, "sessions before the rupture");
  synth->add_option("--initial-drop", synth_args.initial_drop,
                    "relative drop over the first 3 sessions");
  synth->add_option("--total-drop", synth_args.total_drop,
                    "total relative drop at the minimum");
  synth->add_option("--duration", synth_args.duration,
                    "sessions from rupture to the minimum");
  synth->add_option("--recovery-len", synth_args.recovery_len,
                    "rising sessions after the minimum");

  TrendArgs trend_args;
  auto* fit_trend = app.add_subcommand(
      "fit-trend", "Fit a straight line to H_loc over a session window");
  fit_trend->add_option("--track", trend_args.track_path, "input track CSV")
      ->required();
  fit_trend->add_option("--start", trend_args.start, "window start session")
      ->required();
  fit_trend->add_option("--end", trend_args.end, "window end session")->required();

  TrendArgs extrap_args;
  auto* extrapolate = app.add_subcommand(
      "extrapolate", "Extrapolate a fitted H_loc trend to a target level");
  extrapolate->add_option("--track", extrap_args.track_path, "input track CSV")
      ->required();
  extrapolate->add_option("--start", extrap_args.start, "window start session")
      ->required();
  extrapolate->add_option("--end", extrap_args.end, "window end session")->required();
  extrapolate->add_option("--target", extrap_args.target, "target H_loc level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (track->parsed()) return cmd_track(track_args);
    if (signal->parsed()) return cmd_signal(signal_args);
    if (crash_report->parsed()) return cmd_crash_report(crash_args);
    if (synth->parsed()) return cmd_synth(synth_args);
    if (fit_trend->parsed()) return cmd_fit_trend(trend_args);
    if (extrapolate->parsed()) return cmd_extrapolate(extrap_args);
  } catch (const hs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
