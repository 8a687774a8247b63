#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mixtherm::cli {

/// Shortest text that round-trips: 17 significant digits.
std::string format_double(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row();
  CsvTable& add(double value);
  CsvTable& add(int value);
  CsvTable& add(std::size_t value);
  CsvTable& add(bool value);
  CsvTable& add(const std::string& text);
  CsvTable& add(const char* text) { return add(std::string(text)); }
  /// Empty cell, for undefined values.
  CsvTable& blank();

  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes through a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& file, const std::string& contents);

}  // namespace mixtherm::cli
