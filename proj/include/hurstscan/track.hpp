#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "hurstscan/dfa.hpp"

namespace hurstscan {

// Closure values in session time: session i is closes[i]. Dates are
// metadata only; no computation is calendar-aware.
struct PriceSeries {
  Eigen::VectorXd closes;
  std::vector<std::string> dates;  // empty, or one entry per session

  Index sessions() const { return closes.size(); }
  void validate() const;
};

enum class EntryStatus : std::uint8_t { Ok, Gap };

// Per-session H_loc estimates for a whole series, aligned so that entry e
// describes session first_session + e. Gap entries mark windows where no
// slope exists; moving averages skip gaps and may still be defined there.
struct HurstTrack {
  Index first_session = 0;
  Eigen::VectorXd h_loc;      // NaN on gap entries
  Eigen::VectorXd r_squared;  // NaN on gap entries
  Eigen::VectorXd ma5;        // NaN until 5 ok values exist
  Eigen::VectorXd ma21;       // NaN until 21 ok values exist
  std::vector<EntryStatus> status;
  DfaConfig config;

  Index entries() const { return h_loc.size(); }
  Index last_session() const { return first_session + entries() - 1; }
  bool contains(Index session) const {
    return session >= first_session && session <= last_session();
  }
  Index entry_of(Index session) const;  // throws when session is outside

  // Suffix of the last `count` entries, stored averages preserved.
  HurstTrack tail(Index count) const;

  // Builds a track from raw H_loc values (NaN = gap), recomputing the
  // moving averages. Intended for synthetic tracks and tests.
  static HurstTrack from_hloc(const Eigen::VectorXd& h, Index first_session = 0,
                              DfaConfig config = {});
};

// Mean of the k most recent non-gap values ending at each position; NaN
// (gap) until k non-gap values exist. NaN marks gaps on input and output.
Eigen::VectorXd moving_average(const Eigen::Ref<const Eigen::VectorXd>& values,
                               Index k);

// Slides the observation window session after session and estimates H_loc
// for every window; degenerate windows become gap entries. Entries are
// independent, so `threads` > 1 splits them across worker threads with a
// result identical to the serial run.
HurstTrack sliding_hurst(const PriceSeries& series, const DfaConfig& config,
                         int threads = 1);

}  // namespace hurstscan
