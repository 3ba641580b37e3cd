#include "pilinv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pilinv/errors.hpp"

namespace pilinv {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != header_.size())
    throw ContractViolation("csv row has " + std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header_.size()));
  rows_.push_back(fields);
}

void CsvWriter::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << csv_quote(f[i]);
    os << "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

void CsvWriter::save(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ResourceError("cannot write " + path);
  write(f);
}

}  // namespace pilinv
