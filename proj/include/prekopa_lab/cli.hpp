#pragma once

// Command-line front end. Values are resolved as flag > config file >
// PREKOPA_LAB_THREADS (threads only) > built-in default, and the resolved
// set is embedded in every JSON report.
//
// Exit status: 0 all checks pass, 2 violation found (0 under
// --expect-violation), 1 execution error or an expected violation missing.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "marginal.hpp"
#include "mep.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "smoothing.hpp"
#include "weights.hpp"

namespace prekopa::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitViolation = 2 };

inline std::string default_centers_text() {
  std::string s;
  for (const auto& c : default_sweep_centers()) {
    if (!s.empty()) s += ", ";
    s += fmt_double(c.real()) + (c.imag() < 0 ? "-" : "+") + fmt_double(std::abs(c.imag())) + "i";
  }
  return s;
}

inline const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d{
      {"grid.t0", "-3"},
      {"grid.h", "0.05"},
      {"grid.N", "121"},
      {"tol.convexity", "1e-8"},
      {"disk.centers", default_centers_text()},
      {"disk.radii", "0.25, 0.5, 1"},
      {"disk.degree", "16"},
      {"disk.center", "0"},
      {"disk.radius", "1"},
      {"suite.catalog", "convex"},
      {"smoothing.R", "100"},
      {"smoothing.n", "1"},
      {"quad.m", "48"},
      {"quad.kind", "gl"},
      {"output.dir", "."},
      {"run.threads", "1"},
      {"run.expect_violation", "false"},
  };
  return d;
}

inline bool known_key(const std::string& key) {
  static const std::set<std::string> weight_keys{"weight.select",     "weight.id",          "weight.kind",
                                                 "weight.params",     "weight.fiber.shape", "weight.fiber.bounds",
                                                 "weight.fiber.dim",  "weight.fiber.radius", "weight.flag"};
  return defaults().count(key) || weight_keys.count(key);
}

struct RunConfig {
  std::string command;
  KeyValueDocument values;
};

inline const char* kHelpFooter = R"(CSV columns by command:
  marginal         t,phi,second_diff,violation_flag
  prekopa-suite    weight,t,phi,second_diff,violation_flag
  mep-sweep        a_re,a_im,r,minimal_norm,bound,verdict
  tube-check       a_re,a_im,r,minimal_norm,bound,verdict
  mean-value       a_re,a_im,r,area_mean,value_at_center,jensen_lhs,log_modulus_mean,
                   bound_slack,jensen_slack,submean_slack,mean_value_slack
  smoothing-audit  R,n,a_R,lower,upper,ratio,cap,grad_sup,bound
  quad-rule        index,x,weight (gl) or index,re,im,weight (disk)
Every command also writes <command>.json (schema 1) into --out.
Config files hold 'key = value' lines with dotted keys (grid.h, disk.radii,
weight.kind, ...). PREKOPA_LAB_THREADS is used when --threads is not given.)";

namespace detail {

inline WeightSpec resolve_weight(const KeyValueDocument& doc) {
  if (doc.has("weight.kind")) return weight_from_document(doc);
  if (!doc.has("weight.select")) doc.fail("weight.select", "no weight given (use --weight or weight.* keys)");
  auto w = find_in_catalog(doc.find("weight.select")->value);
  if (!w) doc.fail("weight.select", "no catalog weight named '" + doc.find("weight.select")->value + "'");
  return *w;
}

inline PlanarWeight resolve_planar(const WeightSpec& w) { return w.is_planar() ? planar_weight(w) : marginal_lift(w); }

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
  if (!f) throw Error("write failed for " + p.string());
}

inline std::filesystem::path prepare_output(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
  const auto probe = p / ".prekopa_lab_probe";
  {
    std::ofstream f(probe);
    if (!f) throw Error("output directory " + dir + " is not writable");
  }
  std::filesystem::remove(probe, ec);
  return p;
}

struct Outcome {
  json results;
  std::string csv;
  bool violation = false;
  bool failed = false;
  std::string message;
};

inline Outcome run_marginal(const ConfigReader& rd) {
  const auto w = resolve_weight(rd.document());
  const auto grid = marginal_grid(w, rd.real("grid.t0"), rd.positive("grid.h"), rd.integer("grid.N"));
  const auto rep = convexity_check(grid, rd.real("tol.convexity"));
  Outcome o;
  o.results = {{"grid", to_json(grid)}, {"report", to_json(rep)}};
  o.csv = marginal_csv_header() + marginal_csv_rows(grid, rep);
  o.violation = rep.verdict == ConvexityVerdict::violated;
  return o;
}

inline Outcome run_suite(const ConfigReader& rd) {
  const auto which = rd.string("suite.catalog");
  if (which != "convex" && which != "nonconvex" && which != "all")
    rd.document().fail("suite.catalog", "expected convex, nonconvex or all");
  std::vector<WeightSpec> specs;
  for (const auto& w : catalog()) {
    if (w.is_planar()) continue;
    if (which == "all" || (which == "convex" && w.convex_flag() == ConvexFlag::convex) ||
        (which == "nonconvex" && w.convex_flag() == ConvexFlag::nonconvex))
      specs.push_back(w);
  }
  const GridParams params{rd.real("grid.t0"), rd.positive("grid.h"), rd.integer("grid.N")};
  const auto entries = prekopa_suite(specs, params, rd.real("tol.convexity"));
  Outcome o;
  o.results = json::array();
  o.csv = "weight," + marginal_csv_header();
  for (const auto& e : entries) {
    json j{{"weight", e.id}, {"flag", std::string(to_string(e.flag))}};
    if (e.report) {
      j["report"] = to_json(*e.report);
      o.csv += marginal_csv_rows(*e.grid, *e.report, e.id + ",");
      if (e.report->verdict == ConvexityVerdict::violated) o.violation = true;
    } else {
      j["error"] = e.error;
      o.failed = true;
      o.message = e.id + ": " + e.error;
    }
    o.results.push_back(j);
  }
  o.results = {{"entries", o.results}};
  return o;
}

inline Outcome run_sweep(const ConfigReader& rd) {
  const auto w = resolve_planar(resolve_weight(rd.document()));
  const auto sweep = mep_sweep(w, rd.complexes("disk.centers"), rd.reals("disk.radii"), rd.integer("disk.degree"));
  Outcome o;
  o.results = to_json(sweep);
  o.csv = sweep_csv(sweep);
  for (const auto& cell : sweep.cells) {
    if (!cell.certificate) {
      o.failed = true;
      o.message = cell.error;
    } else if (cell.certificate->verdict != ExtensionVerdict::pass) {
      o.violation = true;
    }
  }
  return o;
}

inline Outcome run_tube(const ConfigReader& rd) {
  const auto w = resolve_weight(rd.document());
  if (w.is_planar()) rd.document().fail("weight.select", "tube-check needs a tube weight");
  const auto cert = tube_certificate(w, rd.complex("disk.center"), rd.positive("disk.radius"), rd.integer("disk.degree"));
  Outcome o;
  o.results = {{"certificate", to_json(cert)}};
  o.csv = certificate_csv_header() + certificate_csv_row(cert);
  o.violation = cert.verdict != ExtensionVerdict::pass;
  return o;
}

inline Outcome run_mean_value(const ConfigReader& rd) {
  const auto w = resolve_planar(resolve_weight(rd.document()));
  const auto cert = mep_check(w, rd.complex("disk.center"), rd.positive("disk.radius"), rd.integer("disk.degree"));
  Outcome o;
  o.results = {{"certificate", to_json(cert)}};
  if (cert.verdict != ExtensionVerdict::pass) {
    o.violation = true;
    o.csv = certificate_csv_header() + certificate_csv_row(cert);
    return o;
  }
  const auto rep = mean_value_check(w, cert);
  o.results["mean_value"] = to_json(rep);
  o.csv = mean_value_csv(rep);
  return o;
}

inline Outcome run_audit(const ConfigReader& rd) {
  Outcome o;
  try {
    const auto a = constants_audit(rd.real("smoothing.R"), rd.integer("smoothing.n"));
    o.results = {{"audit", to_json(a)}};
    o.csv = audit_csv_header() + audit_csv_row(a);
  } catch (const AuditError& e) {
    o.results = {{"audit_error", e.what()}};
    o.csv = audit_csv_header();
    o.violation = true;
  }
  return o;
}

inline Outcome run_quad_rule(const ConfigReader& rd) {
  const auto kind = rd.string("quad.kind");
  const int m = rd.integer("quad.m");
  Outcome o;
  if (kind == "gl") {
    const auto& rule = gauss_legendre(m);
    o.csv = "index,x,weight\n";
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      o.csv += std::to_string(i) + ',' + fmt_double(rule.nodes[i]) + ',' + fmt_double(rule.weights[i]) + '\n';
    o.results = {{"kind", "gl"}, {"order", m}, {"weight_sum", pairwise_sum(rule.weights)}};
  } else if (kind == "disk") {
    const DiskRule rule(rd.complex("disk.center"), rd.positive("disk.radius"), m, 2 * m);
    o.csv = "index,re,im,weight\n";
    for (std::size_t i = 0; i < rule.size(); ++i)
      o.csv += std::to_string(i) + ',' + fmt_double(rule.nodes()[i].real()) + ',' + fmt_double(rule.nodes()[i].imag()) +
               ',' + fmt_double(rule.weights()[i]) + '\n';
    o.results = {{"kind", "disk"}, {"radial_order", m}, {"angular_count", 2 * m},
                 {"weight_sum", pairwise_sum(rule.weights())}};
  } else {
    rd.document().fail("quad.kind", "expected gl or disk");
  }
  return o;
}

inline const std::map<std::string, std::function<Outcome(const ConfigReader&)>>& commands() {
  static const std::map<std::string, std::function<Outcome(const ConfigReader&)>> c{
      {"marginal", run_marginal},     {"prekopa-suite", run_suite},   {"mep-sweep", run_sweep},
      {"tube-check", run_tube},       {"mean-value", run_mean_value}, {"smoothing-audit", run_audit},
      {"quad-rule", run_quad_rule},
  };
  return c;
}

}  // namespace detail

/// Merges defaults, an optional config document, the environment and flag
/// overrides, then validates keys and tolerances.
inline RunConfig resolve_config(const std::string& command, const std::optional<KeyValueDocument>& file,
                                const std::map<std::string, std::string>& flags) {
  RunConfig cfg{command, KeyValueDocument(file ? file->source() : "config")};
  for (const auto& [k, v] : defaults()) cfg.values.set(k, v);
  if (const char* env = std::getenv("PREKOPA_LAB_THREADS"); env && *env) cfg.values.set("run.threads", env);
  if (file) {
    for (const auto& [k, e] : file->entries()) {
      if (!known_key(k)) file->fail(k, "unknown key");
      cfg.values.set(k, e.value, e.line);
    }
  }
  for (const auto& [k, v] : flags) cfg.values.set(k, v);
  ConfigReader rd(cfg.values);
  if (!(rd.real("tol.convexity") > 0)) cfg.values.fail("tol.convexity", "tolerance must be positive");
  if (rd.integer("run.threads") < 1) cfg.values.fail("run.threads", "thread count must be at least 1");
  rd.boolean("run.expect_violation");
  return cfg;
}

/// Runs one resolved configuration. Reports go to <output.dir>/<command>.{json,csv}.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto it = detail::commands().find(cfg.command);
  if (it == detail::commands().end()) {
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitError;
  }
  try {
    ConfigReader rd(cfg.values);
    const bool expect_violation = rd.boolean("run.expect_violation");
    set_thread_count(rd.integer("run.threads"));
    const auto dir = detail::prepare_output(rd.string("output.dir"));

    auto outcome = it->second(rd);

    json config = json::object();
    for (const auto& [k, e] : cfg.values.entries()) config[k] = e.value;
    std::string status = outcome.failed ? "error" : outcome.violation ? "violation" : "pass";
    json summary{{"schema", kSchemaVersion}, {"command", cfg.command}, {"config", config},
                 {"status", status},          {"violation_found", outcome.violation},
                 {"results", outcome.results}};
    detail::write_file(dir / (cfg.command + ".json"), summary.dump(2) + "\n");
    detail::write_file(dir / (cfg.command + ".csv"), outcome.csv);

    out << cfg.command << ": " << status << " (" << (dir / (cfg.command + ".json")).string() << ")\n";
    if (outcome.failed) {
      err << "error: " << outcome.message << "\n";
      return kExitError;
    }
    if (expect_violation) {
      if (outcome.violation) return kExitOk;
      err << "error: a violation was expected but none was found\n";
      return kExitError;
    }
    return outcome.violation ? kExitViolation : kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

/// Parses argv and runs. `prekopa-lab <command> [options]`.
inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical certificates for optimal L2 extensions, the minimal extension property and marginal "
               "convexity"};
  app.footer(kHelpFooter);
  app.set_help_flag("--help", "print this help and exit");  // -h is taken by the grid step --h
  app.require_subcommand(1);

  std::map<std::string, std::string> flags;
  std::string config_path;

  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key/value config file");
    bind(sub, "--out", "output.dir", "output directory");
    bind(sub, "--threads", "run.threads", "worker threads");
    sub->add_flag_callback("--expect-violation", [&flags] { flags["run.expect_violation"] = "true"; },
                           "treat a certified violation as success");
  };
  auto grid = [&](CLI::App* sub) {
    bind(sub, "--t0", "grid.t0", "first grid point");
    bind(sub, "--h", "grid.h", "grid step");
    bind(sub, "--N", "grid.N", "number of grid points");
    bind(sub, "--tol", "tol.convexity", "tolerance on second differences");
  };
  auto disk = [&](CLI::App* sub) {
    bind(sub, "--center", "disk.center", "disk center, e.g. 0.5-1i");
    bind(sub, "--radius", "disk.radius", "disk radius");
    bind(sub, "--degree", "disk.degree", "polynomial degree N");
  };
  auto weight = [&](CLI::App* sub) { bind(sub, "--weight", "weight.select", "catalog weight id"); };

  auto* marginal = app.add_subcommand("marginal", "tabulate Phi(t) and certify convexity on the grid");
  common(marginal);
  grid(marginal);
  weight(marginal);

  auto* suite = app.add_subcommand("prekopa-suite", "convexity certificates for catalog weights");
  common(suite);
  grid(suite);
  bind(suite, "--catalog", "suite.catalog", "convex, nonconvex or all");

  auto* sweep = app.add_subcommand("mep-sweep", "minimal extension checks over centers x radii");
  common(sweep);
  weight(sweep);
  bind(sweep, "--centers", "disk.centers", "comma separated complex centers");
  bind(sweep, "--radii", "disk.radii", "comma separated radii");
  bind(sweep, "--degree", "disk.degree", "polynomial degree N");

  auto* tube = app.add_subcommand("tube-check", "extension bound on Delta(a;r) x V for a tube weight");
  common(tube);
  weight(tube);
  disk(tube);

  auto* mean = app.add_subcommand("mean-value", "Jensen / mean-value chain from a pass certificate");
  common(mean);
  weight(mean);
  disk(mean);

  auto* audit = app.add_subcommand("smoothing-audit", "bump mass, gradient and ratio constants");
  common(audit);
  bind(audit, "--R", "smoothing.R", "bump radius R");
  bind(audit, "--n", "smoothing.n", "dimension n");

  auto* quad = app.add_subcommand("quad-rule", "dump a quadrature rule");
  common(quad);
  bind(quad, "--m", "quad.m", "order");
  bind(quad, "--kind", "quad.kind", "gl or disk");
  disk(quad);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  const auto* chosen = app.get_subcommands().front();
  try {
    std::optional<KeyValueDocument> file;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file " + config_path, 0);
      std::stringstream ss;
      ss << in.rdbuf();
      file = parse_key_values(ss.str(), config_path);
    }
    return run(resolve_config(chosen->get_name(), file, flags), out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace prekopa::cli
