#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pilinv {

/// Quotes a field when it contains a comma, quote, CR or LF; inner quotes are doubled.
std::string csv_quote(const std::string& field);

/// Fixed-format number text so identical inputs give identical bytes.
std::string csv_number(double value, int digits = 6);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::vector<std::string>& header() const { return header_; }
  std::string str() const;
  void write(std::ostream& os) const;
  /// Writes to `path`, creating parent directories.
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace pilinv
