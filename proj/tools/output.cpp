#include "output.hpp"

#include <fstream>
#include <system_error>

#include <fmt/format.h>
#include <unistd.h>

#include "mixtherm/error.hpp"

namespace mixtherm::cli {
namespace {

std::string quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double value) {
  rows_.back().push_back(format_double(value));
  return *this;
}

CsvTable& CsvTable::add(int value) {
  rows_.back().push_back(std::to_string(value));
  return *this;
}

CsvTable& CsvTable::add(std::size_t value) {
  rows_.back().push_back(std::to_string(value));
  return *this;
}

CsvTable& CsvTable::add(bool value) {
  rows_.back().push_back(value ? "true" : "false");
  return *this;
}

CsvTable& CsvTable::add(const std::string& text) {
  rows_.back().push_back(quote(text));
  return *this;
}

CsvTable& CsvTable::blank() {
  rows_.back().emplace_back();
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  std::vector<std::string> header;
  for (const auto& h : header_) header.push_back(quote(h));
  line(header);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_atomically(const std::filesystem::path& file, const std::string& contents) {
  const auto temp = file.parent_path() / fmt::format(".{}.{}.tmp", file.filename().string(), ::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + temp.string());
  }
  std::error_code ec;
  std::filesystem::rename(temp, file, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw Error(ErrorKind::ConfigError, "cannot move output into place: " + file.string());
  }
}

}  // namespace mixtherm::cli
