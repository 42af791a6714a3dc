#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qfg/errors.hpp"

namespace qfg::cli {

// Refusing to clobber an existing file is a usage problem, not a numeric one.
class OutputExistsError : public qfg::Error {
 public:
  using qfg::Error::Error;
};

// 17 significant digits: enough to round-trip any double exactly.
inline std::string csv_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string csv_int(long long x) { return std::to_string(x); }

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, bool force, const std::string& header) {
    if (!force && std::filesystem::exists(path)) {
      throw OutputExistsError("output file \"" + path.string() +
                              "\" already exists (use --force to overwrite)");
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) {
      throw qfg::Error("cannot write to \"" + path.string() + "\"");
    }
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

}  // namespace qfg::cli
