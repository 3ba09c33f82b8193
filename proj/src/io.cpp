#include "hurstscan/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace hurstscan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  double value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  long long value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

// Reads the next significant line; comments and blank lines are skipped,
// comment bodies are collected for callers that parse metadata.
struct LineReader {
  explicit LineReader(std::istream& stream) : in(stream) {}

  std::istream& in;
  long line_no = 0;
  std::vector<std::string> comments;

  std::optional<std::string> next() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '#') {
        comments.push_back(trim(t.substr(1)));
        continue;
      }
      return line;
    }
    return std::nullopt;
  }
};

[[noreturn]] void parse_fail(long line_no, const std::string& what) {
  raise(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + what);
}

[[noreturn]] void validation_fail(long line_no, const std::string& what) {
  raise(ErrorKind::Validation, "line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::Io, "cannot open " + path + " for writing");
  return out;
}

void finish_output(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) raise(ErrorKind::Io, "error while writing " + path);
}

}  // namespace

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

PriceSeries read_series(std::istream& in) {
  LineReader reader(in);

  const auto header = reader.next();
  if (!header) raise(ErrorKind::EmptyInput, "empty input: no header row");
  if (lower(trim(*header)) != "date,close")
    parse_fail(reader.line_no, "expected header 'date,close'");

  PriceSeries series;
  std::vector<double> closes;
  bool any_date = false;
  while (const auto line = reader.next()) {
    const auto fields = split_fields(*line);
    if (fields.size() != 2)
      parse_fail(reader.line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    const auto close = parse_double(fields[1]);
    if (!close) parse_fail(reader.line_no, "cannot parse close '" + trim(fields[1]) + "'");
    if (!std::isfinite(*close))
      validation_fail(reader.line_no, "close is not finite");
    if (*close <= 0.0)
      validation_fail(reader.line_no, "close must be positive, got " + trim(fields[1]));
    closes.push_back(*close);
    const std::string date = trim(fields[0]);
    if (!date.empty()) any_date = true;
    series.dates.push_back(date);
  }
  if (closes.empty()) raise(ErrorKind::EmptyInput, "no data rows");

  series.closes = Eigen::Map<const Eigen::VectorXd>(closes.data(),
                                                    static_cast<Index>(closes.size()));
  if (!any_date) series.dates.clear();
  series.validate();
  return series;
}

PriceSeries read_series_file(const std::string& path) {
  auto in = open_input(path);
  return read_series(in);
}

void write_series(const PriceSeries& series, std::ostream& out,
                  const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
  out << "date,close\n";
  for (Index i = 0; i < series.sessions(); ++i) {
    if (!series.dates.empty()) out << series.dates[static_cast<std::size_t>(i)];
    out << ',' << format_value(series.closes[i]) << "\n";
  }
}

void write_series_file(const PriceSeries& series, const std::string& path,
                       const std::vector<std::string>& comments) {
  auto out = open_output(path);
  write_series(series, out, comments);
  finish_output(out, path);
}

namespace {

const char* coverage_name(TailCoverage c) {
  return c == TailCoverage::WithOverlapTail ? "overlap_tail" : "truncate_tail";
}

std::string grid_to_string(const std::vector<Index>& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(grid[i]);
  }
  return out;
}

void apply_track_comment(DfaConfig& config, const std::string& comment) {
  const std::size_t eq = comment.find('=');
  if (eq == std::string::npos) return;
  const std::string key = trim(comment.substr(0, eq));
  const std::string value = trim(comment.substr(eq + 1));
  if (key == "window_len") {
    if (const auto v = parse_int(value)) config.window_len = *v;
  } else if (key == "tau_grid") {
    std::vector<Index> grid;
    for (const auto& f : split_fields(value))
      if (const auto v = parse_int(f)) grid.push_back(*v);
    if (!grid.empty()) config.tau_grid = grid;
  } else if (key == "scale_lo") {
    if (const auto v = parse_int(value)) config.scale_lo = *v;
  } else if (key == "scale_hi") {
    if (const auto v = parse_int(value)) config.scale_hi = *v;
  } else if (key == "detrend_order") {
    if (const auto v = parse_int(value)) config.detrend_order = static_cast<int>(*v);
  } else if (key == "coverage") {
    config.coverage = value == "truncate_tail" ? TailCoverage::TruncateTail
                                               : TailCoverage::WithOverlapTail;
  } else if (key == "integrate_profile") {
    config.integrate_profile = value == "1" || value == "true";
  }
}

}  // namespace

void write_track(const HurstTrack& track, std::ostream& out) {
  out << "# window_len=" << track.config.window_len << "\n";
  out << "# tau_grid=" << grid_to_string(track.config.effective_grid()) << "\n";
  out << "# scale_lo=" << track.config.scale_lo << "\n";
  out << "# scale_hi=" << track.config.scale_hi << "\n";
  out << "# detrend_order=" << track.config.detrend_order << "\n";
  out << "# coverage=" << coverage_name(track.config.coverage) << "\n";
  out << "# integrate_profile=" << (track.config.integrate_profile ? 1 : 0) << "\n";
  out << "session,h_loc,d_loc,ma5,ma21,r_squared,status\n";
  for (Index e = 0; e < track.entries(); ++e) {
    const bool ok = track.status[static_cast<std::size_t>(e)] == EntryStatus::Ok;
    out << track.first_session + e << ',';
    if (ok) out << format_value(track.h_loc[e]);
    out << ',';
    if (ok) out << format_value(2.0 - track.h_loc[e]);
    out << ',';
    if (!std::isnan(track.ma5[e])) out << format_value(track.ma5[e]);
    out << ',';
    if (!std::isnan(track.ma21[e])) out << format_value(track.ma21[e]);
    out << ',';
    if (ok && !std::isnan(track.r_squared[e])) out << format_value(track.r_squared[e]);
    out << ',' << (ok ? "ok" : "gap") << "\n";
  }
}

void write_track_file(const HurstTrack& track, const std::string& path) {
  auto out = open_output(path);
  write_track(track, out);
  finish_output(out, path);
}

HurstTrack read_track(std::istream& in) {
  LineReader reader(in);

  const auto header = reader.next();
  if (!header) raise(ErrorKind::EmptyInput, "empty input: no header row");
  if (lower(trim(*header)) != "session,h_loc,d_loc,ma5,ma21,r_squared,status")
    parse_fail(reader.line_no,
               "expected header 'session,h_loc,d_loc,ma5,ma21,r_squared,status'");

  std::vector<double> h;
  std::vector<double> r2;
  std::vector<double> ma5;
  std::vector<double> ma21;
  std::vector<EntryStatus> status;
  Index first_session = 0;

  while (const auto line = reader.next()) {
    const auto fields = split_fields(*line);
    if (fields.size() != 7)
      parse_fail(reader.line_no, "expected 7 fields, got " + std::to_string(fields.size()));

    const auto session = parse_int(fields[0]);
    if (!session) parse_fail(reader.line_no, "cannot parse session index");
    if (h.empty()) {
      first_session = *session;
    } else if (*session != first_session + static_cast<Index>(h.size())) {
      validation_fail(reader.line_no, "sessions must be contiguous and ascending");
    }

    const std::string status_str = lower(trim(fields[6]));
    if (status_str != "ok" && status_str != "gap")
      parse_fail(reader.line_no, "status must be 'ok' or 'gap'");
    const bool ok = status_str == "ok";

    const auto h_val = parse_double(fields[1]);
    const auto d_val = parse_double(fields[2]);
    if (ok != h_val.has_value())
      validation_fail(reader.line_no, "h_loc must be present exactly on ok rows");
    if (h_val.has_value()) {
      if (!d_val.has_value() || std::abs(*d_val - (2.0 - *h_val)) > 1e-6)
        validation_fail(reader.line_no, "d_loc must equal 2 - h_loc");
    }

    const auto ma5_val = parse_double(fields[3]);
    const auto ma21_val = parse_double(fields[4]);
    const auto r2_val = parse_double(fields[5]);

    h.push_back(h_val.value_or(kNaN));
    ma5.push_back(ma5_val.value_or(kNaN));
    ma21.push_back(ma21_val.value_or(kNaN));
    r2.push_back(r2_val.value_or(kNaN));
    status.push_back(ok ? EntryStatus::Ok : EntryStatus::Gap);
  }
  if (h.empty()) raise(ErrorKind::EmptyInput, "no data rows");

  HurstTrack track;
  track.first_session = first_session;
  const Index n = static_cast<Index>(h.size());
  track.h_loc = Eigen::Map<const Eigen::VectorXd>(h.data(), n);
  track.r_squared = Eigen::Map<const Eigen::VectorXd>(r2.data(), n);
  track.ma5 = Eigen::Map<const Eigen::VectorXd>(ma5.data(), n);
  track.ma21 = Eigen::Map<const Eigen::VectorXd>(ma21.data(), n);
  track.status = std::move(status);
  for (const auto& comment : reader.comments) apply_track_comment(track.config, comment);
  return track;
}

HurstTrack read_track_file(const std::string& path) {
  auto in = open_input(path);
  return read_track(in);
}

void write_signals(const std::vector<SignalVerdict>& verdicts, std::ostream& out) {
  out << "session,cond1,cond2,cond3,cond4,verdict\n";
  for (const auto& v : verdicts) {
    out << v.session << ',' << (v.cond1 ? 1 : 0) << ',' << (v.cond2 ? 1 : 0) << ','
        << (v.cond3 ? 1 : 0) << ',' << (v.cond4 ? 1 : 0) << ','
        << to_string(v.verdict) << "\n";
  }
}

void write_signals_file(const std::vector<SignalVerdict>& verdicts,
                        const std::string& path) {
  auto out = open_output(path);
  write_signals(verdicts, out);
  finish_output(out, path);
}

}  // namespace hurstscan
