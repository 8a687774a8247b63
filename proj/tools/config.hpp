#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixtherm/core_types.hpp"

namespace mixtherm::cli {

using Json = nlohmann::json;

/// A JSON value together with its JSON-pointer location, for error messages.
class Node {
 public:
  Node(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const Json& json() const { return *value_; }
  const std::string& path() const { return path_; }

  Node at(const std::string& key) const;
  Node at(std::size_t index) const;
  std::optional<Node> find(const std::string& key) const;
  std::size_t size() const;

  double number() const;
  double positive() const;
  int integer() const;
  bool boolean() const;
  std::string string() const;
  std::vector<double> numbers() const;

  /// Rejects keys outside `allowed`; the node must be an object.
  void only(std::initializer_list<const char*> allowed) const;
  [[noreturn]] void fail(const std::string& message) const;

 private:
  void expect_object() const;
  void expect_array() const;

  const Json* value_;
  std::string path_;
};

double number_or(const Node& parent, const std::string& key, double fallback);
int integer_or(const Node& parent, const std::string& key, int fallback);

/// Explicit list, or {"min", "max", "points", "spacing": "linear" | "log"}.
std::vector<double> parse_grid(const Node& node);

struct RunConfig {
  std::filesystem::path path;
  std::filesystem::path base_dir;
  Json document;
  std::vector<SpeciesSpec> species;
  UnitSystem units;
  Tolerances tolerances;
  std::vector<PairPotential> potentials;
  std::vector<CorrelationModel> correlations;
  std::uint64_t digest = 0;

  Node root() const { return Node(document, ""); }
  std::optional<Node> section(const std::string& key) const { return root().find(key); }
  std::size_t species_index(const Node& label) const;
};

RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace mixtherm::cli
