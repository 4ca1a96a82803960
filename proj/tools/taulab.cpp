/// @file taulab.cpp
/// @brief Command-line driver for the verification laboratory.
///
/// Subcommands:
///   verify    run the verification suite and emit the JSON report
///   hurwitz   print the branched-cover coefficient table with its
///             independent enumeration column
///   tau-eval  evaluate the truncated tau function and its certified tail
///             bound at the sample points
///   opcheck   run a focused selection of operator checks (defaults to the
///             exact ones)
///
/// Exit codes: 0 every executed check passed; 1 at least one check failed;
/// 2 no failures but at least one inconclusive result; 3 configuration
/// error (bad flag, bad file, unknown check id).
#include <taulab/config.hpp>
#include <taulab/report.hpp>
#include <taulab/suite.hpp>
#include <taulab/tau.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace taulab;

constexpr int kExitConfig = 3;

struct FlagValues {
  std::string config_path;
  std::string beta, Q, tbar1;
  std::vector<std::string> c, t, s_grid, z;
  int D = 0, order = 0, N = 0, N_exp = 0, precision = 0, workers = 0;
  std::string checks;
  std::string out, cache_dir;
  bool reproducible = false;
};

/// Register the shared option set on a subcommand. Every flag is optional;
/// only flags the user actually passed are applied over the config file.
void add_common_flags(CLI::App* cmd, FlagValues& fv) {
  cmd->add_option("--config", fv.config_path,
                  "configuration file (same JSON schema as the report's "
                  "config block); flags override file values");
  cmd->add_option("--beta", fv.beta, "lattice spacing parameter, rational p/q");
  cmd->add_option("--Q", fv.Q, "base-point weight, positive rational");
  cmd->add_option("--tbar1", fv.tbar1, "conjugate first flow value, rational");
  cmd->add_option("--c", fv.c, "initial-data constants c_1,c_2,...")
      ->delimiter(',');
  cmd->add_option("--t", fv.t, "flow sample point t_1,t_2,...")->delimiter(',');
  cmd->add_option("--s", fv.s_grid, "lattice sample points")->delimiter(',');
  cmd->add_option("--z", fv.z, "spectral parameters, positive rationals")
      ->delimiter(',');
  cmd->add_option("--Dmax", fv.D, "tau-series degree cut");
  cmd->add_option("--order", fv.order,
                  "dressed-operator order (0 = as deep as the cuts allow)");
  cmd->add_option("--N", fv.N, "operator shift-window depth");
  cmd->add_option("--N-exp", fv.N_exp, "exponential series depth");
  cmd->add_option("--precision", fv.precision, "working decimal digits");
  cmd->add_option("--checks", fv.checks,
                  "comma-separated check ids (default: all)");
  cmd->add_option("--out", fv.out, "write the JSON document here");
  cmd->add_option("--cache-dir", fv.cache_dir,
                  "content-addressed cache directory for exact computations");
  cmd->add_flag("--reproducible", fv.reproducible,
                "omit wall times; byte-identical documents across runs");
  cmd->add_option("--workers", fv.workers, "concurrent check executors");
}

std::vector<Rat> parse_rat_list(const std::vector<std::string>& in,
                                const char* what) {
  std::vector<Rat> out;
  for (const std::string& s : in) {
    try {
      out.push_back(parse_rat(s));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + what + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// defaults < config file < explicit flags.
RunConfig build_config(const CLI::App* cmd, const FlagValues& fv) {
  RunConfig cfg;
  if (cmd->count("--config")) cfg.merge_file(fv.config_path);
  auto seen = [&](const char* name) { return cmd->count(name) > 0; };
  try {
    if (seen("--beta")) cfg.beta = parse_rat(fv.beta);
    if (seen("--Q")) cfg.Q = parse_rat(fv.Q);
    if (seen("--tbar1")) cfg.tbar1 = parse_rat(fv.tbar1);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (seen("--c")) cfg.c = parse_rat_list(fv.c, "c");
  if (seen("--t")) cfg.t = parse_rat_list(fv.t, "t");
  if (seen("--s")) cfg.s_grid = parse_rat_list(fv.s_grid, "s_grid");
  if (seen("--z")) cfg.z = parse_rat_list(fv.z, "z");
  if (seen("--Dmax")) cfg.D = fv.D;
  if (seen("--order")) cfg.J = fv.order;
  if (seen("--N")) cfg.N = fv.N;
  if (seen("--N-exp")) cfg.N_exp = fv.N_exp;
  if (seen("--precision")) cfg.precision = fv.precision;
  if (seen("--checks")) cfg.checks = split_commas(fv.checks);
  if (seen("--out")) cfg.out = fv.out;
  if (seen("--cache-dir")) cfg.cache_dir = fv.cache_dir;
  if (fv.reproducible) cfg.reproducible = true;
  if (seen("--workers")) cfg.workers = fv.workers;
  cfg.validate();
  return cfg;
}

void write_or_print(const std::string& doc, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << doc;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw ConfigError("config: out: cannot write '" + out_path + "'");
  out << doc;
}

int cmd_verify(const CLI::App* cmd, const FlagValues& fv) {
  RunConfig cfg = build_config(cmd, fv);
  Report rep = run_suite(cfg);
  std::cerr << rep.text_summary();
  if (cfg.out.empty())
    std::cout << rep.dump();
  else
    write_or_print(rep.dump(), cfg.out);
  return rep.exit_code();
}

int cmd_opcheck(const CLI::App* cmd, const FlagValues& fv) {
  RunConfig cfg = build_config(cmd, fv);
  if (cfg.checks.empty())
    cfg.checks = {"commutation", "initial-route", "log-string", "string-action"};
  Report rep = run_suite(cfg);
  std::cout << rep.text_summary();
  if (!cfg.out.empty()) write_or_print(rep.dump(), cfg.out);
  return rep.exit_code();
}

int cmd_hurwitz(const CLI::App* cmd, const FlagValues& fv, int r_max) {
  // only the cuts, the cache and the output path matter here
  if (cmd->count("--cache-dir"))
    install_disk_cache(fv.cache_dir);
  else
    clear_disk_cache_handle();
  const int d_max = cmd->count("--Dmax") ? fv.D : 4;
  HurwitzTable tab = hurwitz_table(d_max, r_max);
  std::cout << tab.text();
  if (cmd->count("--out")) write_or_print(tab.to_json().dump(2) + "\n", fv.out);
  return tab.all_match ? 0 : 1;
}

int cmd_tau_eval(const CLI::App* cmd, const FlagValues& fv) {
  RunConfig cfg = build_config(cmd, fv);
  set_precision((unsigned)cfg.precision);
  TauSpec sp = spec_from(cfg);
  TauFunction tau(sp);

  Json j;
  j["schema_version"] = 1;
  j["tool"] = "taulab";
  j["real_digits"] = kReportRealDigits;
  j["parameters"] = cfg.to_json()["parameters"];
  j["parameters"]["t"] = rat_list_json(sp.t);  // effective flow point
  j["truncations"] = cfg.to_json()["truncations"];
  Json rows = Json::array();

  std::cout << "tau-function values (degree cut D=" << sp.D << ", precision "
            << cfg.precision << " digits)\n";
  for (const Rat& s : cfg.s_grid) {
    SFunc zt = tau.Ztilde();
    Real v = zt.eval(s, 0);
    Real dv = zt.eval(s, 1);
    TailInfo ti = tau.tail(s);
    Json row;
    row["s"] = rat_json(s);
    row["Ztilde"] = real_str(v);
    row["dZtilde_ds"] = real_str(dv);
    row["Z"] = real_str(tau.Z().eval(s, 0));
    row["tail_bound"] = real_str(ti.bound);
    rows.push_back(row);
    std::cout << "  s = " << s.str() << ":  Ztilde = " << real_str(v)
              << ",  d/ds = " << real_str(dv)
              << ",  tail bound = " << real_str(ti.bound) << "\n";
  }
  j["values"] = rows;
  if (!cfg.out.empty()) write_or_print(j.dump(2) + "\n", cfg.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "taulab: mechanical verification of lattice tau-function identities"};
  app.require_subcommand(1);

  FlagValues fv_verify, fv_hurwitz, fv_tau, fv_op;
  int r_max = 3;

  CLI::App* verify = app.add_subcommand(
      "verify", "run the verification suite and emit the JSON report");
  add_common_flags(verify, fv_verify);

  CLI::App* hurwitz = app.add_subcommand(
      "hurwitz",
      "branched-cover coefficient table with independent enumeration column");
  add_common_flags(hurwitz, fv_hurwitz);
  hurwitz->add_option("--rmax", r_max, "extra simple branch points (<= 4)");

  CLI::App* taueval = app.add_subcommand(
      "tau-eval", "evaluate the truncated tau function with tail bounds");
  add_common_flags(taueval, fv_tau);

  CLI::App* opcheck = app.add_subcommand(
      "opcheck", "run a focused selection of operator checks");
  add_common_flags(opcheck, fv_op);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;  // bad flags are configuration errors
  }

  try {
    if (verify->parsed()) return cmd_verify(verify, fv_verify);
    if (hurwitz->parsed()) return cmd_hurwitz(hurwitz, fv_hurwitz, r_max);
    if (taueval->parsed()) return cmd_tau_eval(taueval, fv_tau);
    if (opcheck->parsed()) return cmd_opcheck(opcheck, fv_op);
  } catch (const taulab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
