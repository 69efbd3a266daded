#include "cdv/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cdv/error.hpp"

namespace cdv {

CsvReport::CsvReport(std::string tool, std::uint64_t seed) : tool_(std::move(tool)), seed_(seed) {}

void CsvReport::config(const std::string& key, const std::string& value) {
  config_.emplace_back(key, value);
}

void CsvReport::columns(std::vector<std::string> names) { columns_ = std::move(names); }

void CsvReport::row(std::vector<std::string> cells) {
  if (!columns_.empty() && cells.size() != columns_.size())
    throw Error("cli", "report row width does not match the header");
  rows_.push_back(std::move(cells));
}

void CsvReport::note(const std::string& line) { notes_.push_back(line); }

std::string CsvReport::str() const {
  std::ostringstream os;
  os << "# tool: cdv " << tool_ << "\n";
  os << "# version: " << CDV_VERSION << "\n";
  os << "# seed: " << seed_ << "\n";
  for (const auto& [k, v] : config_) os << "# config." << k << ": " << v << "\n";
  for (const auto& n : notes_) os << "# " << n << "\n";
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  };
  if (!columns_.empty()) line(columns_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void CsvReport::write(const std::string& path) const {
  if (path == "-" || path.empty()) {
    std::cout << str();
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cli", "cannot write report: " + path);
  out << str();
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(std::size_t v) { return std::to_string(v); }

}  // namespace cdv
