/// @file config.hpp
/// @brief Run configuration for the verification suite: parameters,
///        truncations, precision, check selection and I/O options.
///
/// The on-disk form is the same interchange format as the report (JSON).
/// Command-line flags override file values, which override the built-in
/// defaults. Invalid configurations are rejected with a message naming the
/// offending field and, when the value came from a file, the line it
/// appears on.
#pragma once

#include <taulab/numbers.hpp>
#include <taulab/report.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace taulab {

/// A configuration problem. Callers map this to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Best-effort line lookup: the 1-based line of the first occurrence of the
/// JSON key `"key":` in `text`, or 0 when absent. Used to make semantic
/// error messages line-precise for file-sourced values (syntax errors
/// already carry line/column from the parser).
inline int line_of_key(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    size_t after = pos + needle.size();
    while (after < text.size() && (text[after] == ' ' || text[after] == '\t'))
      ++after;
    if (after < text.size() && text[after] == ':')
      return 1 + (int)std::count(text.begin(), text.begin() + (long)pos, '\n');
    pos = after;
  }
  return 0;
}

struct RunConfig {
  // -- model parameters -------------------------------------------------
  Rat beta{1, 5};
  Rat Q{1, 10};
  Rat tbar1{1, 2};
  std::vector<Rat> c{Rat(1, 3), Rat(1, 7)};  // constants of the exact initial data
  std::vector<Rat> t;                        // flow point; empty = library default
  std::vector<Rat> s_grid{Rat(-2), Rat(-1), Rat(0), Rat(1), Rat(2)};
  std::vector<Rat> z{Rat(2), Rat(4)};        // spectral parameters

  // -- truncations -------------------------------------------------------
  int D = 8;       // tau-series degree cut
  int N = 12;      // operator shift window depth
  int N_exp = 20;  // exponential series depth
  int J = 0;       // dressed-operator order; 0 = auto

  // -- numerics / selection / I/O ----------------------------------------
  int precision = 50;               // working decimal digits
  std::vector<std::string> checks;  // empty = every registered check
  std::string cache_dir;            // empty = no on-disk cache
  std::string out;                  // report path; empty = stdout only
  bool reproducible = false;        // omit wall times; byte-stable output
  int workers = 1;                  // concurrent check executors

  /// Field-by-field sanity. `source_text` (the raw config file, when there
  /// is one) upgrades messages with line numbers.
  void validate(const std::string& source_text = "") const {
    auto fail = [&](const std::string& key, const std::string& why) {
      std::string msg = "config: " + key + ": " + why;
      if (int line = line_of_key(source_text, key))
        msg += " (line " + std::to_string(line) + ")";
      throw ConfigError(msg);
    };
    if (!(Q > 0)) fail("Q", "must be positive (its logarithm is taken)");
    if (c.empty() || c.size() > 4)
      fail("c", "need between 1 and 4 constants");
    if (s_grid.empty()) fail("s_grid", "need at least one sample point");
    if (z.empty()) fail("z", "need at least one spectral parameter");
    for (const Rat& zv : z)
      if (!(zv > 0)) fail("z", "spectral parameters must be positive");
    if (D < 0 || D > 16) fail("D", "degree cut must be in [0, 16]");
    if (N < 3 || N > 24) fail("N", "shift window depth must be in [3, 24]");
    if ((int)c.size() + 2 > N)
      fail("N", "shift window too small for " + std::to_string(c.size()) +
                    " initial constants");
    if (N_exp < 1 || N_exp > 25)
      fail("N_exp", "exponential series depth must be in [1, 25]");
    if (J < 0 || (J > 0 && (J > D - 1 || J > N - 1)))
      fail("J", "operator order must be 0 (auto) or in [1, min(D-1, N-1)]");
    if (precision < 5 || precision > 1000)
      fail("precision", "working digits must be in [5, 1000]");
    if ((int)t.size() > std::max(D, 2))
      fail("t", "more flow components than the degree cut can see");
    if (workers < 1 || workers > 64)
      fail("workers", "must be in [1, 64]");
  }

  /// Canonical JSON echo (also the file format).
  Json to_json() const {
    Json p;
    p["beta"] = rat_json(beta);
    p["Q"] = rat_json(Q);
    p["tbar1"] = rat_json(tbar1);
    p["c"] = rat_list_json(c);
    p["t"] = rat_list_json(t);
    p["s_grid"] = rat_list_json(s_grid);
    p["z"] = rat_list_json(z);
    Json tr;
    tr["D"] = D;
    tr["N"] = N;
    tr["N_exp"] = N_exp;
    tr["J"] = J;
    Json j;
    j["schema_version"] = 1;
    j["parameters"] = p;
    j["truncations"] = tr;
    j["precision"] = precision;
    j["checks"] = checks;
    j["cache_dir"] = cache_dir;
    j["out"] = out;
    j["reproducible"] = reproducible;
    j["workers"] = workers;
    return j;
  }

  /// Merge fields present in `j` over the current values. `source_text` is
  /// the raw document for line-precise complaints.
  void merge_json(const Json& j, const std::string& source_text = "") {
    auto fail = [&](const std::string& key, const std::string& why) {
      std::string msg = "config: " + key + ": " + why;
      if (int line = line_of_key(source_text, key))
        msg += " (line " + std::to_string(line) + ")";
      throw ConfigError(msg);
    };
    auto rat_field = [&](const Json& node, const std::string& key, Rat& into) {
      if (!node.contains(key)) return;
      try {
        into = parse_rat(node.at(key).get<std::string>());
      } catch (const std::exception& e) {
        fail(key, e.what());
      }
    };
    auto rat_list = [&](const Json& node, const std::string& key,
                        std::vector<Rat>& into) {
      if (!node.contains(key)) return;
      try {
        std::vector<Rat> v;
        for (const auto& item : node.at(key))
          v.push_back(parse_rat(item.get<std::string>()));
        into = std::move(v);
      } catch (const std::exception& e) {
        fail(key, e.what());
      }
    };
    auto int_field = [&](const Json& node, const std::string& key, int& into) {
      if (!node.contains(key)) return;
      if (!node.at(key).is_number_integer()) fail(key, "expected an integer");
      into = node.at(key).get<int>();
    };

    if (j.contains("schema_version") &&
        (!j.at("schema_version").is_number_integer() ||
         j.at("schema_version").get<int>() != 1))
      fail("schema_version", "unsupported document version");
    if (j.contains("parameters")) {
      const Json& p = j.at("parameters");
      if (!p.is_object()) fail("parameters", "expected an object");
      rat_field(p, "beta", beta);
      rat_field(p, "Q", Q);
      rat_field(p, "tbar1", tbar1);
      rat_list(p, "c", c);
      rat_list(p, "t", t);
      rat_list(p, "s_grid", s_grid);
      rat_list(p, "z", z);
    }
    if (j.contains("truncations")) {
      const Json& tr = j.at("truncations");
      if (!tr.is_object()) fail("truncations", "expected an object");
      int_field(tr, "D", D);
      int_field(tr, "N", N);
      int_field(tr, "N_exp", N_exp);
      int_field(tr, "J", J);
    }
    int_field(j, "precision", precision);
    if (j.contains("checks")) {
      if (!j.at("checks").is_array()) fail("checks", "expected an array of ids");
      std::vector<std::string> v;
      for (const auto& item : j.at("checks")) {
        if (!item.is_string()) fail("checks", "expected an array of ids");
        v.push_back(item.get<std::string>());
      }
      checks = std::move(v);
    }
    if (j.contains("cache_dir")) {
      if (!j.at("cache_dir").is_string()) fail("cache_dir", "expected a path");
      cache_dir = j.at("cache_dir").get<std::string>();
    }
    if (j.contains("out")) {
      if (!j.at("out").is_string()) fail("out", "expected a path");
      out = j.at("out").get<std::string>();
    }
    if (j.contains("reproducible")) {
      if (!j.at("reproducible").is_boolean()) fail("reproducible", "expected a bool");
      reproducible = j.at("reproducible").get<bool>();
    }
    int_field(j, "workers", workers);
  }

  /// Load and merge a config file. Syntax errors surface with the parser's
  /// line/column; semantic errors name the field and its line.
  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config: " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: " + path + ": expected a JSON object");
    merge_json(j, text);
    validate(text);
  }
};

}  // namespace taulab
