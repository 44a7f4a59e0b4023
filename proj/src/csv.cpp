#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace cksd {

namespace {

std::string trim(std::string s) {
  auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no,
                    const std::string& column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorCode::parse, "line " + std::to_string(line_no) +
                               ": cannot parse " + column + " value '" + s + "'");
  }
  return v;
}

}  // namespace

CsvResult read_censored_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  // Header
  if (!std::getline(in, line)) {
    fail(ErrorCode::empty_input, "empty-input: CSV has no header row");
  }
  ++line_no;
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);  // UTF-8 BOM
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_fields(line);
  long time_col = -1, status_col = -1;
  std::vector<std::string> warnings;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name = lower(header[c]);
    if (name == "time") {
      time_col = static_cast<long>(c);
    } else if (name == "status") {
      status_col = static_cast<long>(c);
    } else {
      warnings.push_back("ignoring extra column '" + header[c] + "'");
    }
  }
  if (time_col < 0 || status_col < 0) {
    fail(ErrorCode::parse,
         "header must contain 'time' and 'status' columns, got '" + line + "'");
  }

  std::vector<double> times;
  std::vector<std::uint8_t> events;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() < header.size()) {
      fail(ErrorCode::parse, "line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(header.size()) +
                                 " fields, got " + std::to_string(fields.size()));
    }
    double t = parse_double(fields[static_cast<std::size_t>(time_col)], line_no,
                            "time");
    if (!(t >= 0.0) || !std::isfinite(t)) {
      fail(ErrorCode::parse,
           "line " + std::to_string(line_no) + ": time must be nonnegative");
    }
    const std::string& st = fields[static_cast<std::size_t>(status_col)];
    if (st != "0" && st != "1") {
      fail(ErrorCode::parse, "line " + std::to_string(line_no) +
                                 ": status must be 0 or 1, got '" + st + "'");
    }
    times.push_back(t);
    events.push_back(st == "1" ? 1 : 0);
  }

  if (times.empty()) {
    fail(ErrorCode::empty_input, "empty-input: CSV has no data rows");
  }
  return CsvResult{CensoredSample(std::move(times), std::move(events)),
                   std::move(warnings)};
}

CsvResult read_censored_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "' for reading");
  return read_censored_csv(in);
}

}  // namespace cksd
