#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace mixtherm::cli {
namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

std::string read_file(const std::filesystem::path& file, const std::string& where) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + file.string(), where);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void parse_two_columns(const std::string& text, const Node& where, const std::string& file,
                       std::vector<double>& x, std::vector<double>& y) {
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  bool header_allowed = true;
  while (std::getline(lines, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
      continue;
    const auto comma = line.find(',');
    double a = 0.0, b = 0.0;
    bool ok = comma != std::string::npos;
    if (ok) {
      try {
        std::size_t used = 0;
        a = std::stod(line.substr(0, comma), &used);
        b = std::stod(line.substr(comma + 1), &used);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      where.fail(fmt::format("{}:{}: expected two numeric columns", file, number));
    }
    header_allowed = false;
    x.push_back(a);
    y.push_back(b);
  }
  if (x.size() < 2) where.fail(file + ": table needs at least two rows");
}

PairPotential parse_potential(const RunConfig& config, const Node& node, std::uint64_t& digest) {
  const auto pair = node.at("species");
  if (pair.size() != 2) pair.fail("expected two species labels");
  const std::size_t a = config.species_index(pair.at(std::size_t{0}));
  const std::size_t b = config.species_index(pair.at(std::size_t{1}));
  const std::string type = node.at("type").string();
  try {
    if (type == "zero") {
      node.only({"species", "type"});
      return PairPotential::zero(a, b);
    }
    if (type == "step") {
      node.only({"species", "type", "height", "radius"});
      return PairPotential::step(a, b, node.at("height").number(), node.at("radius").positive());
    }
    if (type == "exponential" || type == "yukawa") {
      node.only({"species", "type", "amplitude", "length"});
      const double amplitude = node.at("amplitude").number();
      const double length = node.at("length").positive();
      return type == "yukawa" ? PairPotential::yukawa(a, b, amplitude, length)
                              : PairPotential::exponential(a, b, amplitude, length);
    }
    if (type == "gaussian") {
      node.only({"species", "type", "amplitude", "width"});
      return PairPotential::gaussian(a, b, node.at("amplitude").number(), node.at("width").positive());
    }
    if (type == "lennard-jones") {
      node.only({"species", "type", "epsilon", "sigma"});
      return PairPotential::lennard_jones(a, b, node.at("epsilon").number(), node.at("sigma").positive());
    }
    if (type == "tabulated") {
      node.only({"species", "type", "file", "tail"});
      const auto file_node = node.at("file");
      const auto file = config.base_dir / file_node.string();
      const auto text = read_file(file, file_node.path());
      digest = fnv1a(text, digest);
      std::vector<double> r, k;
      parse_two_columns(text, file_node, file.string(), r, k);
      std::optional<PairPotential::PowerTail> tail;
      if (auto t = node.find("tail")) {
        t->only({"coefficient", "exponent"});
        tail = PairPotential::PowerTail{t->at("coefficient").number(), t->at("exponent").positive()};
      }
      return PairPotential::tabulated(a, b, std::move(r), std::move(k), tail);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    node.fail(e.what());
  }
  node.at("type").fail("unknown potential type '" + type + "'");
}

CorrelationModel parse_correlation(const RunConfig& config, const Node& node, std::uint64_t& digest) {
  const auto pair = node.at("species");
  if (pair.size() != 2) pair.fail("expected two species labels");
  const std::size_t a = config.species_index(pair.at(std::size_t{0}));
  const std::size_t b = config.species_index(pair.at(std::size_t{1}));
  const std::string model = node.at("model").string();
  if (model == "unity") {
    node.only({"species", "model"});
    return CorrelationModel::unity(a, b);
  }
  if (model == "classical-boltzmann") {
    node.only({"species", "model"});
    const auto* k = find_potential(config.potentials, a, b);
    if (!k) node.fail("classical-boltzmann needs a potential for this pair");
    return CorrelationModel::classical_boltzmann(*k);
  }
  if (model == "tabulated") {
    node.only({"species", "model", "file"});
    const auto file_node = node.at("file");
    const auto file = config.base_dir / file_node.string();
    const auto text = read_file(file, file_node.path());
    digest = fnv1a(text, digest);
    std::vector<double> r, g;
    parse_two_columns(text, file_node, file.string(), r, g);
    try {
      return CorrelationModel::tabulated(a, b, std::move(r), std::move(g));
    } catch (const Error& e) {
      file_node.fail(e.what());
    }
  }
  node.at("model").fail("unknown correlation model '" + model + "'");
}

void parse_tolerances(const Node& node, Tolerances& t) {
  node.only({"kernel_relative", "radial_relative", "fd_relative_step", "characteristics_relative", "anchor_alpha",
             "enumeration_limit", "z_grid_points", "z_grid_extent", "oracle_max_points", "resolvent_residual"});
  t.kernel_relative = number_or(node, "kernel_relative", t.kernel_relative);
  t.radial_relative = number_or(node, "radial_relative", t.radial_relative);
  t.fd_relative_step = number_or(node, "fd_relative_step", t.fd_relative_step);
  t.characteristics_relative = number_or(node, "characteristics_relative", t.characteristics_relative);
  t.anchor_alpha = number_or(node, "anchor_alpha", t.anchor_alpha);
  t.enumeration_limit = number_or(node, "enumeration_limit", t.enumeration_limit);
  t.z_grid_points = integer_or(node, "z_grid_points", t.z_grid_points);
  t.z_grid_extent = number_or(node, "z_grid_extent", t.z_grid_extent);
  t.oracle_max_points = integer_or(node, "oracle_max_points", t.oracle_max_points);
  t.resolvent_residual = number_or(node, "resolvent_residual", t.resolvent_residual);
  for (const char* key : {"kernel_relative", "radial_relative", "fd_relative_step", "characteristics_relative",
                          "enumeration_limit", "z_grid_extent", "resolvent_residual"})
    if (auto v = node.find(key)) v->positive();
  if (t.anchor_alpha >= 0.0) node.at("anchor_alpha").fail("must be negative");
  if (t.z_grid_points < 2) node.at("z_grid_points").fail("must be at least 2");
  if (t.oracle_max_points < 16) node.at("oracle_max_points").fail("must be at least 16");
}

}  // namespace

Node Node::at(const std::string& key) const {
  expect_object();
  auto it = value_->find(key);
  if (it == value_->end()) fail("missing required key '" + key + "'");
  return Node(*it, path_ + "/" + escape_token(key));
}

Node Node::at(std::size_t index) const {
  expect_array();
  if (index >= value_->size()) fail(fmt::format("index {} out of range", index));
  return Node((*value_)[index], fmt::format("{}/{}", path_, index));
}

std::optional<Node> Node::find(const std::string& key) const {
  expect_object();
  auto it = value_->find(key);
  if (it == value_->end()) return std::nullopt;
  return Node(*it, path_ + "/" + escape_token(key));
}

std::size_t Node::size() const {
  expect_array();
  return value_->size();
}

double Node::number() const {
  if (!value_->is_number()) fail("expected a number");
  const double v = value_->get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

double Node::positive() const {
  const double v = number();
  if (!(v > 0.0)) fail("expected a positive number");
  return v;
}

int Node::integer() const {
  const double v = number();
  if (v != std::floor(v) || std::abs(v) > 1e9) fail("expected an integer");
  return static_cast<int>(v);
}

bool Node::boolean() const {
  if (!value_->is_boolean()) fail("expected true or false");
  return value_->get<bool>();
}

std::string Node::string() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

std::vector<double> Node::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
  return out;
}

void Node::only(std::initializer_list<const char*> allowed) const {
  expect_object();
  for (const auto& [key, value] : value_->items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) Node(value, path_ + "/" + escape_token(key)).fail("unknown key '" + key + "'");
  }
}

void Node::fail(const std::string& message) const {
  throw Error(ErrorKind::ConfigError, message, path_.empty() ? "/" : path_);
}

void Node::expect_object() const {
  if (!value_->is_object()) fail("expected an object");
}

void Node::expect_array() const {
  if (!value_->is_array()) fail("expected an array");
}

double number_or(const Node& parent, const std::string& key, double fallback) {
  auto v = parent.find(key);
  return v ? v->number() : fallback;
}

int integer_or(const Node& parent, const std::string& key, int fallback) {
  auto v = parent.find(key);
  return v ? v->integer() : fallback;
}

std::vector<double> parse_grid(const Node& node) {
  if (node.json().is_array()) {
    auto values = node.numbers();
    if (values.empty()) node.fail("grid is empty");
    return values;
  }
  node.only({"min", "max", "points", "spacing"});
  const double lo = node.at("min").number();
  const double hi = node.at("max").number();
  const int n = node.at("points").integer();
  std::string spacing = "linear";
  if (auto s = node.find("spacing")) spacing = s->string();
  if (n < 1) node.at("points").fail("must be at least 1");
  if (n > 1 && !(hi > lo)) node.at("max").fail("must exceed min");
  std::vector<double> out;
  if (spacing == "linear") {
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  } else if (spacing == "log") {
    if (!(lo > 0.0)) node.at("min").fail("log spacing needs min > 0");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  } else {
    node.at("spacing").fail("expected 'linear' or 'log'");
  }
  return out;
}

std::size_t RunConfig::species_index(const Node& label) const {
  const auto name = label.string();
  for (std::size_t a = 0; a < species.size(); ++a)
    if (species[a].label == name) return a;
  label.fail("unknown species '" + name + "'");
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig config;
  config.path = path;
  config.base_dir = std::filesystem::absolute(path).parent_path();
  const auto text = read_file(path, "");
  config.digest = fnv1a(text);
  try {
    config.document = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, fmt::format("malformed JSON at byte {}: {}", e.byte, e.what()), "/");
  }
  const auto root = config.root();
  root.only({"species", "units", "potentials", "correlations", "tolerances", "ideal_tau", "thermo",
             "tau_field", "condensate_scan", "ns_check", "gk", "validate"});

  if (auto u = root.find("units")) {
    u->only({"hbar"});
    config.units.hbar = number_or(*u, "hbar", 1.0);
    if (auto h = u->find("hbar")) h->positive();
  }

  const auto species = root.at("species");
  if (species.size() == 0) species.fail("at least one species is required");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < species.size(); ++i) {
    const auto s = species.at(i);
    s.only({"label", "mass", "spin_degeneracy", "statistics", "density"});
    SpeciesSpec spec;
    spec.label = s.at("label").string();
    if (spec.label.empty()) s.at("label").fail("label must not be empty");
    if (!labels.insert(spec.label).second) s.at("label").fail("duplicate label '" + spec.label + "'");
    spec.mass = s.at("mass").positive();
    spec.spin_degeneracy = s.at("spin_degeneracy").integer();
    if (spec.spin_degeneracy < 1) s.at("spin_degeneracy").fail("must be at least 1");
    try {
      spec.statistics = parse_statistics(s.at("statistics").string());
    } catch (const Error&) {
      s.at("statistics").fail("expected 'fermi' or 'bose'");
    }
    spec.density = s.at("density").positive();
    config.species.push_back(spec);
  }

  if (auto t = root.find("tolerances")) parse_tolerances(*t, config.tolerances);

  std::uint64_t digest = config.digest;
  if (auto pots = root.find("potentials"))
    for (std::size_t i = 0; i < pots->size(); ++i) {
      auto k = parse_potential(config, pots->at(i), digest);
      for (const auto& other : config.potentials)
        if (other.couples(k.first(), k.second())) pots->at(i).fail("pair already has a potential");
      config.potentials.push_back(std::move(k));
    }
  if (auto corr = root.find("correlations"))
    for (std::size_t i = 0; i < corr->size(); ++i) {
      auto g = parse_correlation(config, corr->at(i), digest);
      for (const auto& other : config.correlations)
        if (other.couples(g.first(), g.second())) corr->at(i).fail("pair already has a correlation model");
      config.correlations.push_back(std::move(g));
    }
  config.digest = digest;
  return config;
}

}  // namespace mixtherm::cli
