#include "hurstscan/track.hpp"

#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <thread>
#include <utility>

namespace hurstscan {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void PriceSeries::validate() const {
  for (Index i = 0; i < closes.size(); ++i) {
    if (!std::isfinite(closes[i]))
      raise(ErrorKind::Validation, "non-finite close at session " + std::to_string(i));
    if (closes[i] <= 0.0)
      raise(ErrorKind::Validation, "non-positive close at session " + std::to_string(i));
  }
  if (!dates.empty() && static_cast<Index>(dates.size()) != closes.size())
    raise(ErrorKind::Validation, "dates/closes length mismatch");
}

Index HurstTrack::entry_of(Index session) const {
  if (!contains(session))
    raise(ErrorKind::InvalidParameter,
          "session " + std::to_string(session) + " is outside the track");
  return session - first_session;
}

HurstTrack HurstTrack::tail(Index count) const {
  if (count < 0 || count > entries())
    raise(ErrorKind::InvalidParameter, "tail count out of range");
  HurstTrack out;
  const Index start = entries() - count;
  out.first_session = first_session + start;
  out.h_loc = h_loc.tail(count);
  out.r_squared = r_squared.tail(count);
  out.ma5 = ma5.tail(count);
  out.ma21 = ma21.tail(count);
  out.status.assign(status.begin() + start, status.end());
  out.config = config;
  return out;
}

HurstTrack HurstTrack::from_hloc(const Eigen::VectorXd& h, Index first_session,
                                 DfaConfig config) {
  HurstTrack track;
  track.first_session = first_session;
  track.h_loc = h;
  track.r_squared = Eigen::VectorXd::Constant(h.size(), kNaN);
  track.status.resize(static_cast<std::size_t>(h.size()));
  for (Index i = 0; i < h.size(); ++i)
    track.status[static_cast<std::size_t>(i)] =
        std::isnan(h[i]) ? EntryStatus::Gap : EntryStatus::Ok;
  track.ma5 = moving_average(track.h_loc, 5);
  track.ma21 = moving_average(track.h_loc, 21);
  track.config = std::move(config);
  return track;
}

Eigen::VectorXd moving_average(const Eigen::Ref<const Eigen::VectorXd>& values,
                               Index k) {
  if (k < 1) raise(ErrorKind::InvalidParameter, "moving average window must be >= 1");
  Eigen::VectorXd out = Eigen::VectorXd::Constant(values.size(), kNaN);
  std::deque<double> recent;  // the k most recent non-gap values
  double sum = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    if (!std::isnan(values[i])) {
      recent.push_back(values[i]);
      sum += values[i];
      if (static_cast<Index>(recent.size()) > k) {
        sum -= recent.front();
        recent.pop_front();
      }
    }
    if (static_cast<Index>(recent.size()) == k) out[i] = sum / static_cast<double>(k);
  }
  return out;
}

HurstTrack sliding_hurst(const PriceSeries& series, const DfaConfig& config,
                         int threads) {
  series.validate();
  config.validate();
  if (threads < 1) raise(ErrorKind::InvalidParameter, "thread count must be >= 1");

  const Index n = config.window_len;
  const Index len = series.sessions();
  if (len < n)
    raise(ErrorKind::InsufficientData, "series has " + std::to_string(len) +
                                           " sessions; window needs " +
                                           std::to_string(n));

  HurstTrack track;
  track.first_session = n - 1;
  track.config = config;
  track.config.tau_grid = config.effective_grid();  // snapshot the grid actually used

  const Index count = len - n + 1;
  track.h_loc = Eigen::VectorXd::Constant(count, kNaN);
  track.r_squared = Eigen::VectorXd::Constant(count, kNaN);
  track.status.assign(static_cast<std::size_t>(count), EntryStatus::Gap);

  const auto run = [&](Index begin, Index end) {
    for (Index e = begin; e < end; ++e) {
      const auto window = series.closes.segment(e, n);
      try {
        const HurstEstimate<double> est = estimate_window(window, track.config);
        track.h_loc[e] = est.h_loc;
        track.r_squared[e] = est.r_squared;
        track.status[static_cast<std::size_t>(e)] = EntryStatus::Ok;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::DegenerateWindow) throw;
        // degenerate window: leave the entry as a gap
      }
    }
  };

  if (threads == 1 || count < 2) {
    run(0, count);
  } else {
    const int workers = static_cast<int>(std::min<Index>(threads, count));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const Index chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const Index begin = static_cast<Index>(w) * chunk;
      const Index end = std::min(count, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          run(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  track.ma5 = moving_average(track.h_loc, 5);
  track.ma21 = moving_average(track.h_loc, 21);
  return track;
}

}  // namespace hurstscan
