#pragma once

// Command-line configuration, dispatch and file output for the soliton tool.

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "soliton/limits.hpp"

namespace soliton {

inline std::vector<std::string> const& command_names() {
  static std::vector<std::string> const names{"solve-nls",        "solve-nsp",     "solve-nmkg",
                                              "limit-study",      "two-branch-study", "regime-report",
                                              "nonexistence-sweep"};
  return names;
}

struct RunConfig {
  std::string command;
  Params params;
  int n = 4000;
  double r_max = 0.0;  // 0 selects the decay-based default
  SolverConfig solver;
  std::vector<double> c_list;
  std::vector<double> q_list;
  std::string out;  // output directory
  std::string format = "csv";
  int jobs = 1;
};

/// Default radius with e^{-sqrt(m mu) r_max} below 1e-10.
inline double default_r_max(Params const& prm) {
  return std::max(24.0, std::ceil(std::log(1e10) / std::sqrt(prm.m * prm.mu)));
}

inline RadialGrid grid_of(RunConfig const& cfg) {
  return RadialGrid(cfg.n, cfg.r_max > 0.0 ? cfg.r_max : default_r_max(cfg.params));
}

namespace detail {

inline std::string trim(std::string s) {
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto const e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(std::string const& key, std::string const& text) {
  std::string const t = trim(text);
  if (t == "inf" || t == "infinity") return infinity;
  double v = 0.0;
  auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw Error(ErrorKind::configuration, "parse_config",
                "type mismatch for '" + key + "': expected a real number, got '" + text + "'");
  return v;
}

inline int parse_int(std::string const& key, std::string const& text) {
  std::string const t = trim(text);
  int v = 0;
  auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw Error(ErrorKind::configuration, "parse_config",
                "type mismatch for '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

inline std::vector<double> parse_list(std::string const& key, std::string const& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(parse_real(key, item));
  return out;
}

inline std::vector<std::string> const& config_keys() {
  static std::vector<std::string> const keys{"m",       "mu",     "q",      "c",   "p",      "n",    "r_max",
                                             "tol_grad", "max_iter", "c_list", "q_list", "out", "format", "jobs"};
  return keys;
}

/// Flat "key = value" text; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "parse_config", "cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto const hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto const eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::configuration, "parse_config",
                  path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string const key = trim(line.substr(0, eq));
    auto const& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw Error(ErrorKind::configuration, "parse_config", "unknown key '" + key + "' in " + path);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline void apply_key(RunConfig& cfg, std::string const& key, std::string const& value) {
  if (key == "m") cfg.params.m = parse_real(key, value);
  else if (key == "mu") cfg.params.mu = parse_real(key, value);
  else if (key == "q") cfg.params.q = parse_real(key, value);
  else if (key == "c") cfg.params.c = parse_real(key, value);
  else if (key == "p") cfg.params.p = parse_real(key, value);
  else if (key == "n") cfg.n = parse_int(key, value);
  else if (key == "r_max") cfg.r_max = parse_real(key, value);
  else if (key == "tol_grad") cfg.solver.tol_grad = parse_real(key, value);
  else if (key == "max_iter") cfg.solver.max_iter = parse_int(key, value);
  else if (key == "c_list") cfg.c_list = parse_list(key, value);
  else if (key == "q_list") cfg.q_list = parse_list(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "format") cfg.format = value;
  else if (key == "jobs") cfg.jobs = parse_int(key, value);
  else throw Error(ErrorKind::configuration, "parse_config", "unknown key '" + key + "'");
}

inline std::vector<std::string> required_keys(std::string const& command) {
  if (command == "nonexistence-sweep") return {};
  if (command == "solve-nmkg" || command == "regime-report") return {"p", "c"};
  if (command == "limit-study") return {"p", "c_list"};
  if (command == "two-branch-study") return {"p", "q_list", "c_list"};
  return {"p"};
}

inline void validate(RunConfig const& cfg) {
  char const* op = "parse_config";
  RadialGrid const g = grid_of(cfg);  // throws on bad n / r_max
  (void)g;
  if (!(cfg.solver.tol_grad > 0.0)) throw Error(ErrorKind::configuration, op, "tol_grad must be > 0");
  if (cfg.solver.max_iter < 1) throw Error(ErrorKind::configuration, op, "max_iter must be >= 1");
  if (cfg.jobs < 1) throw Error(ErrorKind::configuration, op, "jobs must be >= 1");
  if (cfg.format != "csv" && cfg.format != "json")
    throw Error(ErrorKind::configuration, op, "format must be 'csv' or 'json', got '" + cfg.format + "'");
  auto const& cmd = cfg.command;
  Params const& prm = cfg.params;
  if (cmd == "nonexistence-sweep") return;
  if (cmd == "solve-nls") {
    // q and c play no role in the NLS seed equation.
    require_admissible(prm.with_q(1.0).with_c(infinity), op);
  } else if (cmd == "solve-nsp") {
    require_admissible(prm.with_c(infinity), op);
  } else if (cmd == "solve-nmkg" || cmd == "regime-report") {
    if (prm.nonrelativistic()) throw Error(ErrorKind::configuration, op, cmd + " requires a finite c");
    require_admissible(prm, op);
  } else if (cmd == "limit-study") {
    require_admissible(prm.with_c(infinity), op);
    for (double c : cfg.c_list) require_admissible(prm.with_c(c), op);
  } else if (cmd == "two-branch-study") {
    for (double q : cfg.q_list) {
      require_admissible(prm.with_c(infinity).with_q(q), op);
      for (double c : cfg.c_list) require_admissible(prm.with_q(q).with_c(c), op);
    }
  }
}

}  // namespace detail

/// Parses `command [flags]`. Flags override keys read from --config. Throws a configuration
/// Error on unknown keys, malformed values, missing required keys or inadmissible parameters.
inline RunConfig parse_config(std::vector<std::string> const& args) {
  char const* op = "parse_config";
  if (args.empty()) throw Error(ErrorKind::configuration, op, "missing command");
  RunConfig cfg;
  cfg.command = args.front();
  auto const& names = command_names();
  if (std::find(names.begin(), names.end(), cfg.command) == names.end())
    throw Error(ErrorKind::configuration, op, "unknown command '" + cfg.command + "'");

  CLI::App app{"soliton " + cfg.command};
  std::map<std::string, std::string> flags;
  for (auto const& key : detail::config_keys()) app.add_option("--" + key, flags[key]);
  std::string config_path;
  app.add_option("--config", config_path);
  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (CLI::ParseError const& e) {
    throw Error(ErrorKind::configuration, op, e.what());
  }

  std::map<std::string, std::string> merged;
  if (!config_path.empty()) merged = detail::read_config_file(config_path);
  for (auto const& key : detail::config_keys())
    if (app.count("--" + key) > 0) merged[key] = flags[key];
  for (auto const& key : detail::required_keys(cfg.command))
    if (!merged.count(key)) throw Error(ErrorKind::configuration, op, "missing required flag --" + key);
  for (auto const& [key, value] : merged) detail::apply_key(cfg, key, value);
  if (cfg.command == "solve-nsp" || cfg.command == "solve-nls") cfg.params.c = infinity;
  if (cfg.out.empty()) {
    char const* env = std::getenv("SOLITON_OUT_DIR");
    cfg.out = env && *env ? env : ".";
  }
  detail::validate(cfg);
  return cfg;
}

inline std::string usage() {
  std::string s =
      "usage: soliton_cli <command> [--key value ...] [--config file]\n"
      "commands: solve-nls | solve-nsp | solve-nmkg | limit-study | two-branch-study | regime-report |\n"
      "          nonexistence-sweep\n"
      "keys: --m --mu --q --c (number or inf) --p --n --r_max --tol_grad --max_iter\n"
      "      --c_list a,b,... --q_list a,b,... --out dir --format csv|json --jobs k\n"
      "required: --p (all but nonexistence-sweep); --c for solve-nmkg and regime-report;\n"
      "          --c_list for limit-study; --q_list and --c_list for two-branch-study\n"
      "exit status: 0 success, 2 branch truncated, 1 error\n";
  return s;
}

// ---------------------------------------------------------------------------------------------
// Output.

inline std::string number_text(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Writes next to the destination and renames into place.
inline void write_atomically(std::filesystem::path const& path, std::string const& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "write", "cannot open '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write", "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::io, "write", "cannot rename to '" + path.string() + "': " + ec.message());
  }
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : cols_(header.size()) { add(header); }

  void row(std::vector<std::string> cells) {
    if (cells.size() != cols_) throw Error(ErrorKind::invalid_argument, "CsvTable", "column count mismatch");
    add(cells);
  }
  std::string const& text() const { return text_; }

 private:
  void add(std::vector<std::string> const& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      bool const quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (quote) {
        text_ += '"';
        for (char ch : cells[i]) text_ += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        text_ += '"';
      } else {
        text_ += cells[i];
      }
    }
    text_ += '\n';
  }
  std::size_t cols_;
  std::string text_;
};

inline nlohmann::json params_json(Params const& prm) {
  nlohmann::json j;
  j["m"] = prm.m;
  j["mu"] = prm.mu;
  j["q"] = prm.q;
  if (prm.nonrelativistic())
    j["c"] = "inf";
  else
    j["c"] = prm.c;
  j["p"] = prm.p;
  return j;
}

inline nlohmann::json energy_json(EnergyReport const& e) {
  return {{"action", e.action},
          {"nehari", e.nehari},
          {"pohozaev", e.pohozaev},
          {"scaling_derivative", e.has_scaling_derivative ? nlohmann::json(e.scaling_derivative) : nlohmann::json()},
          {"gradient_norm", e.gradient_norm}};
}

inline nlohmann::json solution_json(SolveReport const& rep) {
  nlohmann::json j;
  j["params"] = params_json(rep.params);
  j["grid"] = {{"n", rep.u.grid().n()}, {"r_max", rep.u.grid().r_max()}};
  j["u"] = rep.u.data();
  j["phi"] = rep.phi.data();
  j["energy"] = energy_json(rep.energy);
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["positivity"] = rep.positivity;
  return j;
}

struct LoadedSolution {
  Params params;
  RadialField u;
  RadialField phi;
  nlohmann::json energy;
};

inline LoadedSolution load_solution(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "load_solution", "cannot open '" + path.string() + "'");
  try {
    nlohmann::json const j = nlohmann::json::parse(in);
    Params prm;
    auto const& jp = j.at("params");
    prm.m = jp.at("m").get<double>();
    prm.mu = jp.at("mu").get<double>();
    prm.q = jp.at("q").get<double>();
    prm.c = jp.at("c").is_string() ? infinity : jp.at("c").get<double>();
    prm.p = jp.at("p").get<double>();
    RadialGrid const g(j.at("grid").at("n").get<int>(), j.at("grid").at("r_max").get<double>());
    return {prm, RadialField(g, j.at("u").get<std::vector<double>>()),
            RadialField(g, j.at("phi").get<std::vector<double>>()), j.at("energy")};
  } catch (nlohmann::json::exception const& e) {
    throw Error(ErrorKind::io, "load_solution", std::string("malformed solution file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------------------------
// Dispatch.

namespace detail {

inline std::filesystem::path out_path(RunConfig const& cfg, std::string const& name) {
  return std::filesystem::path(cfg.out) / name;
}

inline void write_table(RunConfig const& cfg, std::string const& stem, CsvTable const& table,
                        nlohmann::json const& doc) {
  if (cfg.format == "json")
    write_atomically(out_path(cfg, stem + ".json"), doc.dump(2) + "\n");
  else
    write_atomically(out_path(cfg, stem + ".csv"), table.text());
}

inline void write_solution(RunConfig const& cfg, std::string const& stem, SolveReport const& rep, std::ostream& log) {
  write_atomically(out_path(cfg, stem + ".json"), solution_json(rep).dump() + "\n");
  if (cfg.format == "csv") {
    CsvTable t({"r", "u", "phi"});
    for (std::size_t j = 0; j < rep.u.size(); ++j)
      t.row({number_text(rep.u.grid().r(j)), number_text(rep.u[j]), number_text(rep.phi[j])});
    write_atomically(out_path(cfg, stem + ".csv"), t.text());
  }
  auto const& e = rep.energy;
  log << stem << ": converged=" << rep.converged << " iterations=" << rep.iterations
      << " positivity=" << rep.positivity << "\n  action=" << number_text(e.action)
      << " nehari=" << number_text(e.nehari) << " pohozaev=" << number_text(e.pohozaev)
      << " gradient_norm=" << number_text(e.gradient_norm) << " u(0)=" << number_text(rep.u[0]) << "\n";
}

inline int run_limit_study(RunConfig const& cfg, std::ostream& log) {
  auto const res = nonrelativistic_limit_study(cfg.params, cfg.c_list, grid_of(cfg), cfg.solver);
  CsvTable t({"c", "E_c", "energy_gap", "h1_gap", "h2_proxy_gap"});
  nlohmann::json doc;
  doc["params"] = params_json(res.params);
  doc["E_inf"] = res.e_inf;
  doc["fitted_order"] = std::isnan(res.fitted_order) ? nlohmann::json() : nlohmann::json(res.fitted_order);
  doc["truncated"] = res.truncated;
  doc["rows"] = nlohmann::json::array();
  for (auto const& r : res.rows) {
    t.row({number_text(r.c), number_text(r.energy), number_text(r.energy_gap), number_text(r.h1_gap),
           number_text(r.h2_gap)});
    doc["rows"].push_back({{"c", r.c}, {"E_c", r.energy}, {"energy_gap", r.energy_gap}, {"h1_gap", r.h1_gap},
                           {"h2_proxy_gap", r.h2_gap}});
  }
  write_table(cfg, "limit-study", t, doc);
  CsvTable fit({"E_inf", "fitted_order", "truncated"});
  fit.row({number_text(res.e_inf), number_text(res.fitted_order), res.truncated ? "true" : "false"});
  if (cfg.format == "csv") write_atomically(out_path(cfg, "limit-study-fit.csv"), fit.text());
  log << "E_inf=" << number_text(res.e_inf) << " fitted_order=" << number_text(res.fitted_order) << "\n"
      << t.text();
  if (res.truncated) {
    log << "branch truncated: " << res.message << "\n";
    return 2;
  }
  return 0;
}

inline int run_two_branch(RunConfig const& cfg, std::ostream& log) {
  auto const res = two_branch_study(cfg.params, cfg.q_list, cfg.c_list, grid_of(cfg), cfg.solver, cfg.jobs);
  CsvTable rows({"q", "c", "u_converged", "v_converged", "u_gap", "v_gap", "distinctness", "u_norm", "v_norm"});
  CsvTable cells({"q", "u_found", "v_found", "v_collapsed", "u_inf_h1", "v_inf_h1", "u_inf_action",
                  "v_inf_action", "message"});
  nlohmann::json doc;
  doc["params"] = params_json(res.params);
  doc["cells"] = nlohmann::json::array();
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  for (auto const& cell : res.cells) {
    std::string msg = cell.u_message;
    if (!cell.v_message.empty()) msg += (msg.empty() ? "" : " | ") + cell.v_message;
    double const un = cell.u_inf ? h1_norm(cell.u_inf->u) : nan_value;
    double const vn = cell.v_inf ? h1_norm(cell.v_inf->u) : nan_value;
    double const ua = cell.u_inf ? cell.u_inf->energy.action : nan_value;
    double const va = cell.v_inf ? cell.v_inf->energy.action : nan_value;
    cells.row({number_text(cell.q), b(cell.u_inf.has_value()), b(cell.v_inf.has_value()), b(cell.v_collapsed),
               number_text(un), number_text(vn), number_text(ua), number_text(va), msg});
    nlohmann::json jc{{"q", cell.q},
                      {"u_found", cell.u_inf.has_value()},
                      {"v_found", cell.v_inf.has_value()},
                      {"v_collapsed", cell.v_collapsed},
                      {"message", msg},
                      {"rows", nlohmann::json::array()}};
    for (auto const& r : cell.rows) {
      rows.row({number_text(cell.q), number_text(r.c), b(r.u_converged), b(r.v_converged), number_text(r.u_gap),
                number_text(r.v_gap), number_text(r.distinctness), number_text(r.u_norm), number_text(r.v_norm)});
      auto num = [](double x) { return std::isnan(x) ? nlohmann::json() : nlohmann::json(x); };
      jc["rows"].push_back({{"c", r.c},
                            {"u_converged", r.u_converged},
                            {"v_converged", r.v_converged},
                            {"u_gap", num(r.u_gap)},
                            {"v_gap", num(r.v_gap)},
                            {"distinctness", num(r.distinctness)}});
    }
    doc["cells"].push_back(jc);
  }
  write_table(cfg, "two-branch", rows, doc);
  if (cfg.format == "csv") write_atomically(out_path(cfg, "two-branch-cells.csv"), cells.text());
  log << cells.text() << rows.text();
  return res.truncated ? 2 : 0;
}

inline int run_regime(RunConfig const& cfg, std::ostream& log) {
  auto const rep = regime_report(cfg.params);
  CsvTable t({"kind", "name", "statement", "applicable", "holds"});
  nlohmann::json doc{{"params", params_json(cfg.params)},
                     {"m_bar", rep.m_bar},
                     {"e", rep.e},
                     {"omega", rep.omega},
                     {"conditions", nlohmann::json::array()}};
  auto add = [&](char const* kind, RegimeCondition const& c) {
    t.row({kind, c.name, c.statement, c.applicable ? "true" : "false", c.holds ? "true" : "false"});
    doc["conditions"].push_back(
        {{"kind", kind}, {"name", c.name}, {"statement", c.statement}, {"applicable", c.applicable}, {"holds", c.holds}});
  };
  for (auto const& c : rep.existence) add("existence", c);
  for (auto const& c : rep.nonexistence) add("nonexistence", c);
  write_table(cfg, "regime-report", t, doc);
  log << "m_bar=" << number_text(rep.m_bar) << " e=" << number_text(rep.e) << " omega=" << number_text(rep.omega)
      << " g(p)=" << number_text(rep.g) << " h(p)=" << number_text(rep.h) << "\n";
  for (auto const& c : rep.existence)
    log << "  " << (c.holds ? "[satisfied] " : "[violated]  ") << c.name << ": " << c.statement << "\n";
  for (auto const& c : rep.nonexistence)
    log << "  " << (c.holds ? "[satisfied] " : "[violated]  ") << c.name << ": " << c.statement << "\n";
  return 0;
}

inline int run_nonexistence(RunConfig const& cfg, std::ostream& log) {
  auto const rep = nonexistence_sweep(cfg.params, grid_of(cfg));
  CsvTable t({"p", "rejected", "message"});
  CsvTable f({"p", "outcome", "iterations", "u0", "relative_gradient", "action"});
  nlohmann::json doc{{"validation", nlohmann::json::array()}, {"flows", nlohmann::json::array()}};
  for (auto const& v : rep.validation) {
    t.row({number_text(v.p), v.rejected ? "true" : "false", v.message});
    doc["validation"].push_back({{"p", v.p}, {"rejected", v.rejected}, {"message", v.message}});
    log << "p=" << number_text(v.p) << (v.rejected ? " rejected: " + v.message : std::string(" accepted")) << "\n";
  }
  for (auto const& fl : rep.flows) {
    f.row({number_text(fl.p), fl.outcome, std::to_string(fl.iterations), number_text(fl.u0),
           number_text(fl.relative_gradient), number_text(fl.action)});
    doc["flows"].push_back({{"p", fl.p}, {"outcome", fl.outcome}, {"iterations", fl.iterations}, {"u0", fl.u0}});
    log << "flow p=" << number_text(fl.p) << ": " << fl.outcome << " after " << fl.iterations
        << " steps, u(0)=" << number_text(fl.u0) << "\n";
  }
  write_table(cfg, "nonexistence-sweep", t, doc);
  if (cfg.format == "csv") write_atomically(out_path(cfg, "nonexistence-flows.csv"), f.text());
  return 0;
}

}  // namespace detail

/// Runs a parsed configuration; returns the process exit status.
inline int run(RunConfig const& cfg, std::ostream& log = std::cout) {
  auto const grid = grid_of(cfg);
  if (cfg.command == "solve-nls") {
    detail::write_solution(cfg, "solve-nls", solve_nls_ground(cfg.params, grid, cfg.solver), log);
    return 0;
  }
  if (cfg.command == "solve-nsp") {
    Params const& prm = cfg.params;
    SolveReport const rep =
        prm.p > 3.0 ? minimize_nsp_ground(prm, grid, cfg.solver) : minimize_nsp_global(prm, grid, cfg.solver);
    detail::write_solution(cfg, "solve-nsp", rep, log);
    return 0;
  }
  if (cfg.command == "solve-nmkg") {
    // Ground state at c = infinity continued to the requested c.
    Params const inf = cfg.params.with_c(infinity);
    SolveReport const seed =
        inf.p > 3.0 ? minimize_nsp_ground(inf, grid, cfg.solver) : minimize_nsp_global(inf, grid, cfg.solver);
    Branch const br = continuation({"c", {cfg.params.c}}, inf, seed, cfg.solver);
    if (br.truncated) {
      log << "branch truncated near c = " << number_text(br.failed_value) << ": " << br.message << "\n";
      return 2;
    }
    detail::write_solution(cfg, "solve-nmkg", br.points.back().report, log);
    return 0;
  }
  if (cfg.command == "limit-study") return detail::run_limit_study(cfg, log);
  if (cfg.command == "two-branch-study") return detail::run_two_branch(cfg, log);
  if (cfg.command == "regime-report") return detail::run_regime(cfg, log);
  if (cfg.command == "nonexistence-sweep") return detail::run_nonexistence(cfg, log);
  throw Error(ErrorKind::configuration, "run", "unknown command '" + cfg.command + "'");
}

/// Full entry point: parse, run, map errors to exit 1 with the failing operation in the message.
inline int main_entry(std::vector<std::string> const& args, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  if (args.empty() || args.front() == "-h" || args.front() == "--help") {
    (args.empty() ? err : out) << usage();
    return args.empty() ? 1 : 0;
  }
  try {
    return run(parse_config(args), out);
  } catch (Error const& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::configuration) err << usage();
    return 1;
  } catch (std::exception const& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace soliton
