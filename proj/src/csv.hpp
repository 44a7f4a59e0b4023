#pragma once

#include <istream>
#include <string>
#include <vector>

#include "censored_sample.hpp"

namespace cksd {

struct CsvResult {
  CensoredSample sample;
  std::vector<std::string> warnings;
};

// Reads a censored dataset from CSV text. A header row is required and must
// contain `time` (nonnegative decimal) and `status` (1 = event, 0 = censored)
// columns; extra columns are ignored with a warning. Malformed rows report
// their 1-based line number.
CsvResult read_censored_csv(std::istream& in);
CsvResult read_censored_csv_file(const std::string& path);

}  // namespace cksd
