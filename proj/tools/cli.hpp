#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mixtherm::cli {

struct Invocation {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = ".";
  int threads = 0;  // 0: MIXTHERM_THREADS, else 1
  std::optional<unsigned long long> seed;
  bool allow_experimental = false;
};

struct RunReport {
  std::string command;
  std::string inputs_digest;  // FNV-1a of the config and every file it pulls in
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
  bool checks_failed = false;  // validate: some suite row missed its threshold
};

const std::vector<std::string>& commands();

/// Runs one command and writes its CSV files and <command>.report.json into `out`.
/// Throws mixtherm::Error; ConfigError and ExperimentalRefused are the
/// invocation-level kinds.
RunReport run(const Invocation& invocation);

/// Exit status for an error kind: 2 config, 4 experimental refusal, 3 otherwise.
int exit_code(const std::exception& error);

/// Whole program: parses argv, runs, prints the error record on failure.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mixtherm::cli
