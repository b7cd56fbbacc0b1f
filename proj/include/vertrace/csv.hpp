#ifndef VERTRACE_CSV_HPP
#define VERTRACE_CSV_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertrace {

/// UTF-8 comma-separated writer with a header row and full-precision
/// scientific notation; deterministic byte output for identical data.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
    columns_ = header.size();
  }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("CsvWriter: wrong column count");
    char buf[40];
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      std::snprintf(buf, sizeof(buf), "%.17e", values[i]);
      out_ << buf;
    }
    out_ << '\n';
  }

  void row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_) throw std::logic_error("CsvWriter: wrong column count");
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << values[i];
    }
    out_ << '\n';
  }

  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17e", v);
    return buf;
  }

 private:
  std::ofstream out_;
  size_t columns_ = 0;
};

}  // namespace vertrace

#endif
