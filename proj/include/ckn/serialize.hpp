// JSON/CSV serialization, profile I/O, and the flat key=value run
// configuration. Field names here are the wire contract of the CLI.
#ifndef CKN_SERIALIZE_HPP
#define CKN_SERIALIZE_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ckn/minimize.hpp"

namespace ckn {

inline constexpr const char* version_string = "0.1.0";

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

inline Json to_json(const RadialProfile& u) {
  Json j;
  j["format"] = "ckn-profile";
  j["version"] = 1;
  j["dimension"] = u.dimension;
  j["grid"] = {{"spacing", "log"},
               {"r_min", u.grid->r_min()},
               {"r_max", u.grid->r_max()},
               {"nodes", u.grid->size()}};
  j["values"] = u.values;
  return j;
}

inline RadialProfile radial_profile_from_json(const Json& j) {
  if (j.value("format", "") != std::string("ckn-profile"))
    raise("BadFormat", "expected a ckn-profile JSON container");
  const auto& g = j.at("grid");
  auto grid = RadialGrid::log_spaced(g.at("r_min").get<double>(), g.at("r_max").get<double>(),
                                     g.at("nodes").get<int>());
  return RadialProfile(grid, j.at("values").get<std::vector<double>>(),
                       j.at("dimension").get<int>());
}

inline Json to_json(const PolarField& f) {
  Json j;
  j["format"] = "ckn-polar";
  j["version"] = 1;
  j["dimension"] = 2;
  j["sector"] = f.sector;
  j["grid"] = {{"spacing", "log"},
               {"r_min", f.grid->r_min()},
               {"r_max", f.grid->r_max()},
               {"nodes", f.grid->size()}};
  Json modes = Json::array();
  for (const auto& m : f.modes) {
    Json mj;
    mj["ell"] = m.ell;
    mj["cos"] = m.c;
    mj["sin"] = m.s;
    modes.push_back(std::move(mj));
  }
  j["modes"] = std::move(modes);
  return j;
}

// Two-column text (r, value); '#' lines are comments.
inline void write_two_column(std::ostream& os, const RadialProfile& u) {
  os << "# ckn-symbreak v" << version_string << " profile n=" << u.dimension << "\n";
  char line[64];
  for (std::size_t i = 0; i < u.grid->size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g %.17g\n", u.grid->nodes()[i], u.values[i]);
    os << line;
  }
}

inline std::vector<std::pair<double, double>> read_two_column(std::istream& is) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double r = 0.0, v = 0.0;
    if (ls >> r >> v) rows.emplace_back(r, v);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json grid_json(const GridPtr& grid) {
  return Json{{"spacing", "log"},
              {"r_min", grid->r_min()},
              {"r_max", grid->r_max()},
              {"nodes", grid->size()}};
}

inline Json to_json(const EnergyReport& r) {
  return Json{{"seminorm", r.seminorm},
              {"hardy", r.hardy},
              {"lq", r.lq},
              {"q_lambda", r.q_lambda},
              {"j_lambda", r.j_lambda}};
}

inline Json to_json(const EnergyReport& r, const GridPtr& grid) {
  Json j = to_json(r);
  j["grid"] = grid_json(grid);
  return j;
}

inline Json to_json(const ExtensionEnergyReport& r) {
  Json slices = Json::array();
  for (const auto& sp : r.slice_checks)
    slices.push_back(Json{{"y", sp.y}, {"lhs", sp.lhs}, {"rhs", sp.rhs}});
  return Json{{"dirichlet", r.dirichlet},
              {"halfplane_hardy", r.halfplane_hardy},
              {"y_truncation", r.y_truncation},
              {"slice_checks", std::move(slices)}};
}

inline Json to_json(const BreakingCertificate& c) {
  return Json{{"lambda", c.lambda},       {"q_u", c.q_u},
              {"q_tilde", c.q_tilde},     {"margin", c.margin},
              {"verdict", to_string(c.verdict)}, {"tolerance", c.tolerance}};
}

inline Json to_json(const ThresholdBound& t) {
  return Json{{"mu", t.mu},
              {"c_mu", t.cmu},
              {"lambda_bound", t.lambda_bound},
              {"regime", t.regime}};
}

inline Json to_json(const ConstantsTable& t) {
  return Json{{"hardy", t.hardy},     {"cs", t.cs},
              {"gamma", t.gamma},     {"sobolev", t.sobolev},
              {"c_mu", t.cmu},        {"threshold", t.threshold}};
}

inline Json to_json(const ProblemParams& p) {
  return Json{{"n", p.n}, {"s", p.s},           {"q", p.q},     {"b", p.b},
              {"lambda", p.lambda}, {"m", p.m}, {"k", p.k},     {"c_hat", p.c_hat}};
}

inline Json to_json(const RadialMinimizeResult& r, const ProblemParams& p) {
  Json j;
  j["params"] = to_json(p);
  j["seed"] = r.seed;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["residual"] = r.residual;
  j["kappa"] = r.kappa;
  j["report"] = to_json(r.report, r.field.grid);
  j["field"] = to_json(r.field);
  return j;
}

inline Json to_json(const SectorMinimizeResult& r, const ProblemParams& p) {
  Json j;
  j["params"] = to_json(p);
  j["t"] = r.t;
  j["seed"] = r.seed;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["residual"] = r.residual;
  j["mode_tail_fraction"] = r.mode_tail_fraction;
  j["report"] = to_json(r.report);
  j["field"] = to_json(r.field);
  return j;
}

inline Json to_json(const SectorComparison& c) {
  return Json{{"t", c.t},
              {"h", c.h},
              {"T", c.T},
              {"lambda", c.lambda},
              {"j_t", c.j_t},
              {"j_vt", c.j_vt},
              {"j_T", c.j_T},
              {"margin_t_vt", c.margin_t_vt},
              {"margin_vt_T", c.margin_vt_T},
              {"disc_estimate", c.disc_estimate},
              {"strict_vt_lt_T", c.strict_vt_lt_T},
              {"t_le_vt", c.t_le_vt},
              {"l2_preservation", c.l2_preservation},
              {"lq_preservation", c.lq_preservation},
              {"nonradial_fraction_T", c.mode_fraction_T}};
}

inline Json to_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const auto& row : s.rows)
    rows.push_back(Json{{"lambda", row.lambda},
                        {"q_u", row.q_u},
                        {"q_tilde", row.q_tilde},
                        {"margin", row.margin},
                        {"verdict", to_string(row.verdict)},
                        {"residual", row.residual},
                        {"j_lambda", row.j_lambda}});
  return Json{{"rows", std::move(rows)},
              {"found", s.found},
              {"lambda_lo", s.lambda_lo},
              {"lambda_hi", s.lambda_hi},
              {"threshold_bound", s.threshold_bound}};
}

// ---------------------------------------------------------------------------
// CSV (RFC-4180-style, '.' decimal separator, versioned header comment)
// ---------------------------------------------------------------------------

inline std::string csv_header(const std::string& subcommand) {
  return "# ckn-symbreak v" + std::string(version_string) + " " + subcommand + "\n";
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string sweep_csv(const SweepResult& s) {
  std::string out = csv_header("sweep");
  out += "lambda,q_u,q_tilde,margin,verdict\n";
  for (const auto& row : s.rows)
    out += format_double(row.lambda) + "," + format_double(row.q_u) + "," +
           format_double(row.q_tilde) + "," + format_double(row.margin) + "," +
           to_string(row.verdict) + std::string("\n");
  if (s.found)
    out += "# onset bracket " + format_double(s.lambda_lo) + " " +
           format_double(s.lambda_hi) + " (threshold bound " +
           format_double(s.threshold_bound) + ")\n";
  return out;
}

struct CheckRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline std::string check_csv(const std::string& suite, const std::vector<CheckRow>& rows) {
  std::string out = csv_header("check " + suite);
  out += "check,lhs,rhs,margin,tolerance,pass\n";
  for (const auto& row : rows)
    out += row.name + "," + format_double(row.lhs) + "," + format_double(row.rhs) + "," +
           format_double(row.rhs - row.lhs) + "," + format_double(row.tolerance) + "," +
           (row.pass ? "true" : "false") + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Flat key = value run configuration (flags override file entries)
// ---------------------------------------------------------------------------

struct RunConfig {
  std::map<std::string, std::string> entries;

  void set(const std::string& key, const std::string& value) { entries[key] = value; }
  bool has(const std::string& key) const { return entries.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
  }
  double get_double(const std::string& key, double fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : std::stod(it->second);
  }
  int get_int(const std::string& key, int fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : std::stoi(it->second);
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
    return out;
  }

  static RunConfig parse(std::istream& is) {
    RunConfig cfg;
    std::string line;
    while (std::getline(is, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (!key.empty()) cfg.set(key, value);
    }
    return cfg;
  }
};

// Atomic write: temp file in place, then rename.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) raise("IoError", "cannot open " + tmp + " for writing");
    os << contents;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    raise("IoError", "cannot rename " + tmp + " to " + path);
}

}  // namespace ckn

#endif
