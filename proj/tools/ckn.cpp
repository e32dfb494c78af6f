// ckn-symbreak command line: experiment runner and report emitter.
//
// Subcommands: constants, check, minimize-radial, minimize-sector, sweep,
// sector-compare. Options may come from a flat `key = value` config file
// (--config); explicit flags override file entries. Outputs are JSON and
// CSV files written atomically under the --out prefix. Exit codes:
// 0 success, 1 usage or parameter error, 2 a conformance inequality
// failed beyond tolerance.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ckn/checks.hpp"

namespace {

using ckn::Json;
using ckn::RunConfig;

struct FlagSpec {
  std::string key;
  std::string description;
};

// All recognized keys, shared by flags and config files.
const std::vector<FlagSpec> kKeys = {
    {"n", "spatial dimension"},
    {"s", "fractional order in (0,1)"},
    {"q", "nonlinearity exponent"},
    {"lambda", "Hardy-potential coefficient"},
    {"m", "number of factor spaces"},
    {"k", "factor dimension"},
    {"c-hat", "slice Hardy constant"},
    {"mu", "Laplace-Beltrami eigenvalue"},
    {"mode", "angular mode (degree ell)"},
    {"t", "sector order"},
    {"h", "sector multiple (T = h t)"},
    {"lambda-min", "sweep range start"},
    {"lambda-max", "sweep range end"},
    {"lambda-steps", "sweep grid points"},
    {"bisect-tol", "sweep bisection bracket width"},
    {"suite", "check suite: constants|spectral|extension|perturb|gj"},
    {"seed", "random seed"},
    {"starts", "multi-start count"},
    {"max-iter", "descent iteration budget"},
    {"tol", "EL residual tolerance"},
    {"mode-multiple", "sector mode cap multiplier"},
    {"grid-nodes", "radial grid nodes"},
    {"grid-rmin", "radial window start"},
    {"grid-rmax", "radial window end"},
    {"out", "output path prefix"},
};

int default_grid_nodes() {
  if (const char* env = std::getenv("CKN_GRID_NODES")) {
    const int v = std::atoi(env);
    if (v >= 16) return v;
  }
  return 4096;
}

ckn::ProblemParams params_from(const RunConfig& cfg) {
  ckn::RawParams raw;
  raw.n = cfg.get_int("n", 4);
  raw.s = cfg.get_double("s", 0.5);
  raw.q = cfg.get_double("q", 2.5);
  raw.lambda = cfg.get_double("lambda", 0.0);
  raw.m = cfg.get_int("m", 1);
  raw.k = cfg.get_int("k", 0);
  if (cfg.has("c-hat")) raw.c_hat = cfg.get_double("c-hat", 1.0);
  return ckn::validate_params(raw);
}

ckn::MinimizeConfig minimize_config_from(const RunConfig& cfg) {
  ckn::MinimizeConfig mc;
  mc.nodes = cfg.get_int("grid-nodes", default_grid_nodes());
  mc.r_min = cfg.get_double("grid-rmin", 1e-5);
  mc.r_max = cfg.get_double("grid-rmax", 1e3);
  mc.seed = static_cast<unsigned>(cfg.get_int("seed", 1));
  mc.starts = cfg.get_int("starts", 1);
  mc.max_iterations = cfg.get_int("max-iter", 300);
  mc.el_tolerance = cfg.get_double("tol", 1e-4);
  mc.mode_multiple = cfg.get_int("mode-multiple", 8);
  return mc;
}

Json config_echo(const RunConfig& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : cfg.entries)
    if (k != "out") j[k] = v;  // the output path is not part of the experiment
  return j;
}

int run_constants(const RunConfig& cfg) {
  const auto p = params_from(cfg);
  const double mu = cfg.get_double("mu", p.n - 1.0);
  const auto table = ckn::constants_table(p, mu);
  Json j;
  j["config"] = config_echo(cfg);
  j["params"] = ckn::to_json(p);
  j["mu"] = mu;
  j["constants"] = ckn::to_json(table);
  j["threshold"] = ckn::to_json(ckn::threshold(p, ckn::eigenpair_degree(p.k, 1)));
  ckn::write_file_atomic(cfg.get("out", "ckn-constants") + ".json", j.dump(2) + "\n");
  return 0;
}

int run_check(const RunConfig& cfg) {
  const std::string suite = cfg.get("suite", "extension");
  const int nodes = cfg.get_int("grid-nodes", 1024);
  std::vector<ckn::CheckRow> rows;
  if (suite == "constants") {
    rows = ckn::checks::constants();
    auto hl = ckn::checks::halfline();
    rows.insert(rows.end(), hl.begin(), hl.end());
  } else if (suite == "spectral") {
    rows = ckn::checks::spectral(nodes);
  } else if (suite == "extension") {
    rows = ckn::checks::quad_d(nodes);
    auto sh = ckn::checks::slice_hardy(std::min(nodes, 768));
    rows.insert(rows.end(), sh.begin(), sh.end());
  } else if (suite == "perturb") {
    rows = ckn::checks::lbs_gap(std::min(nodes, 768));
  } else if (suite == "gj") {
    rows = ckn::checks::gj_algebra();
  } else {
    std::cerr << "unknown suite '" << suite
              << "'; expected constants|spectral|extension|perturb|gj\n";
    return 1;
  }
  ckn::write_file_atomic(cfg.get("out", "ckn-check") + ".csv",
                         ckn::check_csv(suite, rows));
  int failures = 0;
  for (const auto& row : rows)
    if (!row.pass) {
      ++failures;
      std::cerr << "FAIL " << row.name << ": lhs=" << row.lhs << " rhs=" << row.rhs
                << " tol=" << row.tolerance << "\n";
    }
  std::cout << suite << ": " << (rows.size() - failures) << "/" << rows.size()
            << " checks passed\n";
  return failures == 0 ? 0 : 2;
}

int run_minimize_radial(const RunConfig& cfg) {
  const auto p = params_from(cfg);
  const auto mc = minimize_config_from(cfg);
  const auto res = ckn::minimize_radial(p, mc);
  Json j;
  j["config"] = config_echo(cfg);
  j["result"] = ckn::to_json(res, p);
  const auto cert = ckn::evaluate_certificate(res.field, p,
                                              ckn::eigenpair_degree(p.n, cfg.get_int("mode", 1)));
  j["certificate"] = ckn::to_json(cert);
  const std::string prefix = cfg.get("out", "ckn-minimize-radial");
  ckn::write_file_atomic(prefix + ".json", j.dump(2) + "\n");
  std::ostringstream two_col;
  ckn::write_two_column(two_col, res.field);
  ckn::write_file_atomic(prefix + ".dat", two_col.str());
  std::cout << "J_lambda = " << res.report.j_lambda << ", residual = " << res.residual
            << (res.converged ? " (converged)" : " (not converged)") << "\n";
  return 0;
}

int run_minimize_sector(const RunConfig& cfg) {
  const auto p = params_from(cfg);
  const auto mc = minimize_config_from(cfg);
  const int t = cfg.get_int("t", 2);
  const auto res = ckn::minimize_sector(p, t, mc);
  Json j;
  j["config"] = config_echo(cfg);
  j["result"] = ckn::to_json(res, p);
  ckn::write_file_atomic(cfg.get("out", "ckn-minimize-sector") + ".json", j.dump(2) + "\n");
  std::cout << "J_lambda = " << res.report.j_lambda << ", residual = " << res.residual
            << (res.converged ? " (converged)" : " (not converged)") << "\n";
  return 0;
}

int run_sweep(const RunConfig& cfg) {
  auto p = params_from(cfg);
  const auto mc = minimize_config_from(cfg);
  const int ell = cfg.get_int("mode", 1);
  const auto eig = ckn::eigenpair_degree(p.n, ell);
  const double lo = cfg.get_double("lambda-min", 0.0);
  const double hi = cfg.get_double("lambda-max", ckn::breaking_threshold(p, eig.mu) * 1.1);
  const int steps = cfg.get_int("lambda-steps", 7);
  const double btol = cfg.get_double("bisect-tol", 0.05);
  const auto sw = ckn::lambda_sweep(p, lo, hi, steps, eig, mc, btol);
  const std::string prefix = cfg.get("out", "ckn-sweep");
  ckn::write_file_atomic(prefix + ".csv", ckn::sweep_csv(sw));
  Json j;
  j["config"] = config_echo(cfg);
  j["mode"] = ell;
  j["sweep"] = ckn::to_json(sw);
  ckn::write_file_atomic(prefix + ".json", j.dump(2) + "\n");
  if (sw.found)
    std::cout << "symmetry-breaking onset bracket: [" << sw.lambda_lo << ", " << sw.lambda_hi
              << "] (threshold bound " << sw.threshold_bound << ")\n";
  else
    std::cout << "no unstable certificate found in range\n";
  // with a justified default c_hat the onset must respect the threshold bound
  if (sw.found && ckn::c_hat_default_justified(p.n, p.s) &&
      sw.lambda_hi > sw.threshold_bound * (1.0 + 1e-9)) {
    std::cerr << "FAIL: onset exceeds the threshold bound\n";
    return 2;
  }
  return 0;
}

int run_sector_compare(const RunConfig& cfg) {
  const auto p = params_from(cfg);
  auto mc = minimize_config_from(cfg);
  const int t = cfg.get_int("t", 1);
  const int h = cfg.get_int("h", 2);
  const auto cmp = ckn::sector_compare(p, t, h, mc);
  Json j;
  j["config"] = config_echo(cfg);
  j["comparison"] = ckn::to_json(cmp);
  ckn::write_file_atomic(cfg.get("out", "ckn-sector-compare") + ".json", j.dump(2) + "\n");
  std::cout << "J(u_" << cmp.t << ") = " << cmp.j_t << " <= J(v_" << cmp.t
            << ") = " << cmp.j_vt << " < J(u_" << cmp.T << ") = " << cmp.j_T << "\n";
  if (!(cmp.t_le_vt && cmp.strict_vt_lt_T)) {
    std::cerr << "FAIL: comparison chain violated beyond the discretization estimate\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ckn-symbreak: fractional CKN symmetry-breaking laboratory"};
  app.require_subcommand(1);

  std::map<std::string, std::string> flag_values;
  std::string config_path;

  app.set_help_flag("--help", "print help");
  std::vector<CLI::App*> subs;
  for (const char* name : {"constants", "check", "minimize-radial", "minimize-sector",
                           "sweep", "sector-compare"}) {
    CLI::App* sub = app.add_subcommand(name, name);
    sub->set_help_flag("--help", "print help");  // keep -h free for the sector multiple
    sub->add_option("--config", config_path, "flat key = value config file");
    for (const auto& spec : kKeys)
      sub->add_option("--" + spec.key, flag_values[spec.key], spec.description);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) {
        std::cerr << "cannot open config file " << config_path << "\n";
        return 1;
      }
      cfg = RunConfig::parse(is);
    }
    for (const auto& [key, value] : flag_values)
      if (!value.empty()) cfg.set(key, value);  // flags override the file

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "constants") return run_constants(cfg);
    if (sub == "check") return run_check(cfg);
    if (sub == "minimize-radial") return run_minimize_radial(cfg);
    if (sub == "minimize-sector") return run_minimize_sector(cfg);
    if (sub == "sweep") return run_sweep(cfg);
    if (sub == "sector-compare") return run_sector_compare(cfg);
    std::cerr << "unknown subcommand\n";
    return 1;
  } catch (const ckn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
