#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "config.hpp"
#include "mixtherm/exchange.hpp"
#include "mixtherm/hierarchy_validator.hpp"
#include "mixtherm/ns_coefficients.hpp"
#include "mixtherm/statistics_kernels.hpp"
#include "mixtherm/thermo_uniform.hpp"
#include "output.hpp"

namespace mixtherm::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

struct Context {
  const Invocation& invocation;
  const RunConfig& config;
  int threads = 1;
  RunReport& report;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents

  void emit(const std::string& name, const CsvTable& table) { files.emplace_back(name, table.str()); }
  void warn(std::string text) { report.warnings.push_back(std::move(text)); }
};

Node require_section(const RunConfig& config, const std::string& key) {
  auto node = config.section(key);
  if (!node) config.root().fail("missing section '" + key + "' for this command");
  return *node;
}

MixtureState composition(const RunConfig& config) { return build_mixture(config.species, 1.0); }

RadialOptions radial(const Tolerances& t) { return {t.radial_relative, 1.0}; }

void require_correlations(const RunConfig& config) {
  const std::size_t n = config.species.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      const auto* k = find_potential(config.potentials, a, b);
      if (k && !k->is_zero() && !find_correlation(config.correlations, a, b))
        throw Error(ErrorKind::ConfigError,
                    fmt::format("potential between '{}' and '{}' has no correlation model", config.species[a].label,
                                config.species[b].label),
                    "/correlations");
    }
}

std::vector<std::string> alpha_columns(const RunConfig& config) {
  std::vector<std::string> out;
  for (const auto& s : config.species) out.push_back("alpha_" + s.label);
  return out;
}

std::vector<double> grid_or(const Node& section, const std::string& key, std::vector<double> fallback) {
  auto node = section.find(key);
  auto values = node ? parse_grid(*node) : std::move(fallback);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0.0)) (node ? node->at(std::size_t{0}) : section).fail("grid values must be positive");
  return values;
}

double total_density(const RunConfig& config) {
  double rho = 0.0;
  for (const auto& s : config.species) rho += s.density;
  return rho;
}

TauDomain parse_domain(const Node& node) {
  node.only({"theta_min", "theta_max", "rho_min", "rho_max", "n_theta", "n_rho", "characteristics"});
  TauDomain d;
  d.theta_min = node.at("theta_min").positive();
  d.theta_max = node.at("theta_max").positive();
  d.rho_min = node.at("rho_min").positive();
  d.rho_max = node.at("rho_max").positive();
  d.n_theta = node.at("n_theta").integer();
  d.n_rho = node.at("n_rho").integer();
  d.characteristics = integer_or(node, "characteristics", 0);
  try {
    d.validate();
  } catch (const Error& e) {
    node.fail(e.what());
  }
  return d;
}

CharacteristicsOptions characteristics_options(const Context& ctx) {
  const auto& t = ctx.config.tolerances;
  CharacteristicsOptions opt;
  opt.relative = t.characteristics_relative;
  opt.anchor_alpha = t.anchor_alpha;
  opt.threads = ctx.threads;
  opt.radial = radial(t);
  return opt;
}

void ideal_tau(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto section = require_section(cfg, "ideal_tau");
  section.only({"theta", "rho"});
  const auto thetas = grid_or(section, "theta", {});
  const auto rhos = grid_or(section, "rho", {total_density(cfg)});
  if (thetas.empty()) section.at("theta");
  auto header = std::vector<std::string>{"theta", "rho", "tau", "tau_over_theta"};
  for (auto& c : alpha_columns(cfg)) header.push_back(c);
  CsvTable table(header);
  const auto base = composition(cfg);
  for (double theta : thetas)
    for (double rho : rhos) {
      const auto sol = solve_ideal(base.at(theta, rho), cfg.species, cfg.units, cfg.tolerances.kernel_relative);
      table.row().add(theta).add(rho).add(sol.tau).add(sol.tau / theta);
      for (double a : sol.alphas) table.add(a);
    }
  ctx.emit("ideal_tau.csv", table);
}

void thermo(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto section = require_section(cfg, "thermo");
  section.only({"tau", "theta", "rho", "domain"});
  std::string source = "ideal";
  if (auto s = section.find("tau")) source = s->string();
  require_correlations(cfg);
  const auto base = composition(cfg);
  CsvTable table({"theta", "rho", "tau", "energy", "kinetic_energy", "pressure", "kinetic_pressure"});
  auto add = [&](double theta, double rho, double tau) {
    const auto pt = evaluate_thermo(base.at(theta, rho), tau, cfg.potentials, cfg.correlations, radial(cfg.tolerances));
    table.row().add(theta).add(rho).add(tau).add(pt.energy).add(pt.kinetic_energy).add(pt.pressure).add(
        pt.kinetic_pressure);
  };
  if (source == "ideal") {
    if (section.find("domain")) section.at("domain").fail("domain is only used with \"tau\": \"field\"");
    const auto thetas = grid_or(section, "theta", {});
    if (thetas.empty()) section.at("theta");
    const auto rhos = grid_or(section, "rho", {total_density(cfg)});
    if (!cfg.potentials.empty())
      ctx.warn("thermo uses the ideal-gas tau; interactions enter E and p but not tau");
    for (double theta : thetas)
      for (double rho : rhos)
        add(theta, rho, solve_ideal(base.at(theta, rho), cfg.species, cfg.units, cfg.tolerances.kernel_relative).tau);
  } else if (source == "field") {
    for (const char* key : {"theta", "rho"})
      if (section.find(key)) section.at(key).fail("grids come from the domain when \"tau\": \"field\"");
    const auto domain = parse_domain(section.at("domain"));
    const auto field = solve_tau_field(domain, cfg.species, cfg.potentials, cfg.correlations, cfg.units,
                                       characteristics_options(ctx));
    for (int i = 0; i < domain.n_theta; ++i)
      for (int j = 0; j < domain.n_rho; ++j)
        add(field.theta[static_cast<std::size_t>(i)], field.rho[static_cast<std::size_t>(j)], field.at(i, j));
  } else {
    section.at("tau").fail("expected \"ideal\" or \"field\"");
  }
  ctx.emit("thermo.csv", table);
}

void tau_field(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto domain = parse_domain(require_section(cfg, "tau_field"));
  require_correlations(cfg);
  const auto field = solve_tau_field(domain, cfg.species, cfg.potentials, cfg.correlations, cfg.units,
                                     characteristics_options(ctx));
  CsvTable table({"theta", "rho", "tau", "tau_over_theta"});
  for (int i = 0; i < domain.n_theta; ++i)
    for (int j = 0; j < domain.n_rho; ++j) {
      const double theta = field.theta[static_cast<std::size_t>(i)];
      table.row().add(theta).add(field.rho[static_cast<std::size_t>(j)]).add(field.at(i, j)).add(field.at(i, j) / theta);
    }
  CsvTable traces({"trace", "label", "anchor_theta", "anchor_rho", "anchor_tau", "anchor_correction",
                   "accepted_steps", "rejected_steps", "theta", "tau"});
  for (std::size_t t = 0; t < field.traces.size(); ++t) {
    const auto& tr = field.traces[t];
    for (std::size_t k = 0; k < tr.theta.size(); ++k)
      traces.row()
          .add(t)
          .add(tr.label)
          .add(tr.anchor_theta)
          .add(tr.anchor_rho)
          .add(tr.anchor_tau)
          .add(tr.anchor_correction)
          .add(tr.accepted_steps)
          .add(tr.rejected_steps)
          .add(tr.theta[k])
          .add(tr.tau[k]);
  }
  ctx.emit("tau_field.csv", table);
  ctx.emit("tau_field_traces.csv", traces);
  ctx.warn(fmt::format("largest anchor correction |tau/theta - 1| = {:.3g}", field.max_anchor_correction));
}

void condensate(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto section = require_section(cfg, "condensate_scan");
  section.only({"theta", "rho"});
  if (!ctx.invocation.allow_experimental)
    throw Error(ErrorKind::ExperimentalRefused,
                "condensate-scan relies on the stand-in Bose kernel; rerun with --allow-experimental");
  auto thetas = grid_or(section, "theta", {});
  if (thetas.empty()) section.at("theta");
  std::sort(thetas.begin(), thetas.end(), std::greater<>());
  const double rho = number_or(section, "rho", total_density(cfg));
  if (!(rho > 0.0)) section.at("rho").fail("must be positive");
  const auto scan = condensate_scan(composition(cfg).at(thetas.front(), rho), cfg.species, thetas, cfg.units);
  auto header = std::vector<std::string>{"theta", "saturated", "saturated_species", "tau", "tau_over_theta"};
  for (auto& c : alpha_columns(cfg)) header.push_back(c);
  CsvTable table(header);
  for (const auto& row : scan.rows) {
    table.row().add(row.theta).add(row.saturated).add(row.saturated_species);
    if (row.tau)
      table.add(*row.tau).add(*row.tau / row.theta);
    else
      table.blank().blank();
    for (std::size_t a = 0; a < cfg.species.size(); ++a) {
      if (a < row.alphas.size())
        table.add(row.alphas[a]);
      else
        table.blank();
    }
  }
  CsvTable onset({"rho", "onset_grid", "onset_refined"});
  onset.row().add(rho);
  if (scan.onset_grid) onset.add(*scan.onset_grid); else onset.blank();
  if (scan.onset_refined) onset.add(*scan.onset_refined); else onset.blank();
  ctx.emit("condensate_scan.csv", table);
  ctx.emit("condensate_onset.csv", onset);
  ctx.warn("EXPERIMENTAL: the Bose branch uses a stand-in kernel; onset values are qualitative");
}

std::string order_text(const MultiIndex& s) {
  std::string out;
  for (std::size_t a = 0; a < s.species_count(); ++a) out += (a ? " " : "") + std::to_string(s[a]);
  return out;
}

std::vector<MultiIndex> default_orders(std::size_t n) {
  std::vector<MultiIndex> out;
  for (std::size_t a = 0; a < n; ++a) out.push_back(MultiIndex::one(a, n));
  for (std::size_t a = 0; a < n; ++a) out.push_back(MultiIndex::two(a, n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) out.push_back(MultiIndex::pair(a, b, n));
  return out;
}

void ns_check(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto& tol = cfg.tolerances;
  const auto section = require_section(cfg, "ns_check");
  section.only({"tau", "theta", "orders", "dimension", "incompatibility"});
  const std::size_t n = cfg.species.size();

  double tau = 0.0;
  if (auto t = section.find("tau")) {
    if (section.find("theta")) t->fail("give either tau or theta, not both");
    tau = t->positive();
  } else {
    const double theta = section.at("theta").positive();
    tau = solve_ideal(composition(cfg).at(theta, total_density(cfg)), cfg.species, cfg.units, tol.kernel_relative).tau;
  }
  const int dimension = integer_or(section, "dimension", 3);
  if (dimension != 1 && dimension != 3) section.at("dimension").fail("expected 1 or 3");

  std::vector<MultiIndex> orders;
  if (auto o = section.find("orders")) {
    for (std::size_t i = 0; i < o->size(); ++i) {
      const auto entry = o->at(i);
      std::vector<int> counts;
      for (std::size_t a = 0; a < entry.size(); ++a) {
        counts.push_back(entry.at(a).integer());
        if (counts.back() < 0) entry.at(a).fail("counts must be non-negative");
      }
      if (counts.size() != n) entry.fail(fmt::format("expected {} counts, one per species", n));
      MultiIndex s(counts);
      if (s.order() == 0) entry.fail("order must be at least 1");
      if (static_cast<double>(group_order(s)) > tol.enumeration_limit)
        entry.fail("prod s_a! exceeds the enumeration limit");
      orders.push_back(s);
    }
  } else {
    orders = default_orders(n);
  }

  const NsFamily family(cfg.species, tau, cfg.units.hbar, dimension);
  const auto z = default_z_grid(tau, tol.z_grid_points, tol.z_grid_extent);
  CsvTable detail({"order", "species", "z", "lower", "reduced", "closed_form"});
  CsvTable summary({"order", "species", "tau", "max_residual", "max_closed_form_residual", "max_quadrature_vs_closed"});
  for (const auto& s : orders)
    for (std::size_t a = 0; a < n; ++a) {
      if (s[a] == 0) continue;
      const auto rep = check_reduction(family, s, a, z);
      for (std::size_t i = 0; i < rep.z.size(); ++i) {
        detail.row().add(order_text(s)).add(cfg.species[a].label).add(rep.z[i]).add(rep.lower[i]).add(rep.reduced[i]);
        if (i < rep.closed_form.size()) detail.add(rep.closed_form[i]); else detail.blank();
      }
      summary.row()
          .add(order_text(s))
          .add(cfg.species[a].label)
          .add(tau)
          .add(rep.max_residual)
          .add(rep.max_closed_form_residual)
          .add(rep.max_quadrature_vs_closed);
    }
  ctx.emit("ns_reduction.csv", detail);
  ctx.emit("ns_summary.csv", summary);

  if (auto inc = section.find("incompatibility")) {
    inc->only({"distributions", "kappas", "density", "mass", "temperature"});
    std::vector<Candidate> kinds = {Candidate::Exponential, Candidate::Fermi, Candidate::Bose};
    if (auto d = inc->find("distributions")) {
      kinds.clear();
      for (std::size_t i = 0; i < d->size(); ++i) {
        try {
          kinds.push_back(parse_candidate(d->at(i).string()));
        } catch (const Error&) {
          d->at(i).fail("expected exponential, fermi or bose");
        }
      }
    }
    std::vector<int> kappas = {1, 2, 3, 4};
    if (auto k = inc->find("kappas")) {
      kappas.clear();
      for (std::size_t i = 0; i < k->size(); ++i) {
        kappas.push_back(k->at(i).integer());
        if (kappas.back() < 1) k->at(i).fail("kappa must be at least 1");
      }
    }
    const double density = number_or(*inc, "density", 0.05);
    const double mass = number_or(*inc, "mass", 1.0);
    const double temperature = number_or(*inc, "temperature", 1.0);
    for (const char* key : {"density", "mass", "temperature"})
      if (auto v = inc->find(key)) v->positive();
    const auto zc = default_z_grid(temperature, tol.z_grid_points, tol.z_grid_extent);
    CsvTable table({"distribution", "kappa_first", "kappa_second", "chemical_potential_first",
                    "chemical_potential_second", "variation", "proportional"});
    for (auto kind : kinds)
      for (int k1 : kappas)
        for (int k2 : kappas) {
          if (k2 <= k1) continue;
          const auto rep = incompatibility_demo({kind, k1, density}, {kind, k2, density}, mass, temperature, zc,
                                                cfg.units.hbar);
          table.row()
              .add(std::string(to_string(kind)))
              .add(k1)
              .add(k2)
              .add(rep.chemical_potential_first)
              .add(rep.chemical_potential_second)
              .add(rep.variation)
              .add(rep.proportional);
        }
    ctx.emit("ns_incompatibility.csv", table);
  }
}

void gk(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto section = require_section(cfg, "gk");
  section.only({"alpha", "orders", "statistics"});
  const auto alphas = parse_grid(section.at("alpha"));
  std::vector<int> orders = {0, 1};
  if (auto o = section.find("orders")) {
    orders.clear();
    for (std::size_t i = 0; i < o->size(); ++i) {
      orders.push_back(o->at(i).integer());
      if (orders.back() != 0 && orders.back() != 1) o->at(i).fail("only k = 0 and k = 1 are supported");
    }
  }
  std::vector<Statistics> stats = {Statistics::Fermi, Statistics::Bose};
  if (auto s = section.find("statistics")) {
    stats.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      try {
        stats.push_back(parse_statistics(s->at(i).string()));
      } catch (const Error&) {
        s->at(i).fail("expected 'fermi' or 'bose'");
      }
    }
  }
  CsvTable table({"statistics", "k", "alpha", "value", "log_value", "kinetic_ratio"});
  int skipped = 0;
  for (auto st : stats)
    for (int k : orders)
      for (double alpha : alphas) {
        if (st == Statistics::Bose && alpha > 0.0) {
          ++skipped;
          continue;
        }
        const KernelParams p{k, alpha, st};
        table.row()
            .add(std::string(to_string(st)))
            .add(k)
            .add(alpha)
            .add(g_integral(p, cfg.tolerances.kernel_relative))
            .add(log_g_integral(p, cfg.tolerances.kernel_relative))
            .add(kinetic_ratio(alpha, st, cfg.tolerances.kernel_relative));
      }
  if (skipped) ctx.warn(fmt::format("skipped {} Bose rows with alpha > 0", skipped));
  ctx.emit("gk.csv", table);
}

void validate(Context& ctx) {
  const auto& cfg = ctx.config;
  ValidationOptions opt;
  if (auto section = cfg.section("validate")) {
    section->only({"random_potentials", "grid_points"});
    opt.random_potentials = integer_or(*section, "random_potentials", opt.random_potentials);
    opt.grid_points = integer_or(*section, "grid_points", opt.grid_points);
    if (opt.random_potentials < 1) section->at("random_potentials").fail("must be at least 1");
    if (opt.grid_points < 16) section->at("grid_points").fail("must be at least 16");
  }
  if (ctx.invocation.seed) opt.seed = *ctx.invocation.seed;
  opt.threads = ctx.threads;
  opt.resolvent_residual = cfg.tolerances.resolvent_residual;
  opt.oracle_max_points = cfg.tolerances.oracle_max_points;
  CsvTable table({"name", "residual", "threshold", "must_exceed", "passed"});
  int failed = 0;
  for (const auto& row : run_validation_suite(opt)) {
    table.row().add(row.name).add(row.residual).add(row.threshold).add(row.must_exceed).add(row.passed);
    if (!row.passed) {
      ++failed;
      ctx.warn("validation row failed: " + row.name);
    }
  }
  ctx.emit("validation.csv", table);
  if (failed) {
    ctx.warn(fmt::format("{} validation rows failed", failed));
    ctx.report.checks_failed = true;
  }
}

const std::map<std::string, std::function<void(Context&)>>& dispatch() {
  static const std::map<std::string, std::function<void(Context&)>> table = {
      {"ideal-tau", ideal_tau}, {"thermo", thermo}, {"tau-field", tau_field}, {"condensate-scan", condensate},
      {"ns-check", ns_check},   {"gk", gk},         {"validate", validate}};
  return table;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MIXTHERM_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024)
      throw Error(ErrorKind::ConfigError, "MIXTHERM_THREADS must be a positive integer", "MIXTHERM_THREADS");
    return static_cast<int>(v);
  }
  return 1;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"ideal-tau", "thermo", "tau-field", "condensate-scan",
                                                 "ns-check",  "gk",     "validate"};
  return names;
}

RunReport run(const Invocation& invocation) {
  const auto start = std::chrono::steady_clock::now();
  const auto& table = dispatch();
  const auto it = table.find(invocation.command);
  if (it == table.end()) throw Error(ErrorKind::ConfigError, "unknown command '" + invocation.command + "'");

  const int threads = resolve_threads(invocation.threads);
  const auto config = load_config(invocation.config);
  RunReport report;
  report.command = invocation.command;
  report.inputs_digest = fmt::format("{:016x}", fnv1a(invocation.command, config.digest));
  Context ctx{invocation, config, threads, report, {}};
  try {
    it->second(ctx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::ExperimentalRefused) throw;
    throw Error(e.kind(), invocation.command + ": " + e.what(), e.path());
  }

  std::error_code ec;
  std::filesystem::create_directories(invocation.out, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "cannot create output directory " + invocation.out.string());
  for (const auto& [name, contents] : ctx.files) {
    write_atomically(invocation.out / name, contents);
    report.outputs.push_back(name);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json record = {{"command", report.command},
                 {"version", kVersion},
                 {"inputs_digest", report.inputs_digest},
                 {"config", std::filesystem::absolute(invocation.config).lexically_normal().string()},
                 {"outputs", report.outputs},
                 {"threads", threads},
                 {"generated_at", utc_now()},
                 {"wall_seconds", report.wall_seconds},
                 {"warnings", report.warnings}};
  if (invocation.seed) record["seed"] = *invocation.seed;
  if (report.checks_failed) record["checks_failed"] = true;
  const auto report_name = invocation.command + ".report.json";
  write_atomically(invocation.out / report_name, record.dump(2) + "\n");
  report.outputs.push_back(report_name);
  return report;
}

int exit_code(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    if (e->kind() == ErrorKind::ConfigError) return 2;
    if (e->kind() == ErrorKind::ExperimentalRefused) return 4;
  }
  return 3;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium thermodynamics of quantum mixtures", "mixtherm"};
  app.set_version_flag("--version", kVersion);
  Invocation inv;
  app.add_option("command", inv.command, "Command to run")->required()->check(CLI::IsMember(commands()));
  app.add_option("--config", inv.config, "JSON run configuration")->required();
  app.add_option("--out", inv.out, "Output directory")->capture_default_str();
  app.add_option("--threads", inv.threads, "Worker threads (default: MIXTHERM_THREADS, else 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", inv.seed, "Seed for randomized validation corpora");
  app.add_flag("--allow-experimental", inv.allow_experimental, "Permit the experimental Bose branch");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto report = run(inv);
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    out << fmt::format("{}: wrote {} files to {} in {:.3f} s\n", report.command, report.outputs.size(),
                       inv.out.string(), report.wall_seconds);
    return report.checks_failed ? 3 : 0;
  } catch (const std::exception& e) {
    Json record = {{"status", "error"}, {"command", inv.command}, {"message", e.what()}};
    if (const auto* me = dynamic_cast<const Error*>(&e)) {
      record["kind"] = std::string(to_string(me->kind()));
      if (!me->path().empty()) record["path"] = me->path();
    } else {
      record["kind"] = "Internal";
    }
    err << record.dump() << "\n";
    return exit_code(e);
  }
}

}  // namespace mixtherm::cli
