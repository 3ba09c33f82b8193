#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hurstscan/signal.hpp"
#include "hurstscan/track.hpp"

namespace hurstscan {

// File formats (all CSV, UTF-8, '.' decimal separator, 10 significant
// digits, '#'-prefixed comment lines ignored):
//   series:  header `date,close`; date ISO-8601 or empty; session ids are
//            positional, so row order is meaningful
//   track:   header `session,h_loc,d_loc,ma5,ma21,r_squared,status`;
//            gaps and undefined averages serialize as empty fields;
//            d_loc is always 2 - h_loc
//   signals: header `session,cond1,cond2,cond3,cond4,verdict`

std::string format_value(double v);  // 10 significant digits

PriceSeries read_series(std::istream& in);
PriceSeries read_series_file(const std::string& path);

void write_series(const PriceSeries& series, std::ostream& out,
                  const std::vector<std::string>& comments = {});
void write_series_file(const PriceSeries& series, const std::string& path,
                       const std::vector<std::string>& comments = {});

void write_track(const HurstTrack& track, std::ostream& out);
void write_track_file(const HurstTrack& track, const std::string& path);

HurstTrack read_track(std::istream& in);
HurstTrack read_track_file(const std::string& path);

void write_signals(const std::vector<SignalVerdict>& verdicts, std::ostream& out);
void write_signals_file(const std::vector<SignalVerdict>& verdicts,
                        const std::string& path);

}  // namespace hurstscan
