#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cdv {

// CSV with a '#'-prefixed provenance block. No timestamps: identical inputs
// produce identical bytes.
class CsvReport {
 public:
  CsvReport(std::string tool, std::uint64_t seed);

  void config(const std::string& key, const std::string& value);
  void columns(std::vector<std::string> names);
  void row(std::vector<std::string> cells);
  void note(const std::string& line);  // extra '#' line after the header block

  std::string str() const;
  // "-" writes to stdout.
  void write(const std::string& path) const;

 private:
  std::string tool_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<std::string> notes_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt(double v);
std::string fmt(std::size_t v);

}  // namespace cdv
