/// @file report.hpp
/// @brief Structured verification report: one record per executed check plus
///        a suite summary, serialized as a single JSON document.
///
/// Number policy: values that are exact rationals are written as exact
/// rational strings ("p/q" or "p"); inexact values are written as decimal
/// strings rendered at an explicit digit count recorded in the document
/// (`real_digits`). Wall-clock fields are omitted entirely when the
/// reproducible flag is set, so two runs with the same configuration produce
/// byte-identical documents.
#pragma once

#include <taulab/checkresult.hpp>
#include <taulab/numbers.hpp>

#include <json.hpp>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace taulab {

using Json = nlohmann::ordered_json;

/// Digits used for decimal strings in reports.
inline constexpr int kReportRealDigits = 20;

/// Deterministic decimal rendering. An exact zero is written as the exact
/// rational string "0"; anything else as scientific notation at `digits`
/// significant digits.
inline std::string real_str(const Real& r, int digits = kReportRealDigits) {
  if (r == 0) return "0";
  return r.str(digits, std::ios_base::scientific);
}

inline std::string rat_json(const Rat& q) { return q.str(); }

inline Json rat_list_json(const std::vector<Rat>& v) {
  Json a = Json::array();
  for (const Rat& q : v) a.push_back(q.str());
  return a;
}

/// One executed check: the verification outcome, the parameters the check
/// actually consumed, and (unless suppressed) its wall time.
struct CheckRecord {
  CheckResult result;
  Json parameters = Json::object();
  double wall_ms = 0;
  bool timed = true;  // false => wall time omitted from the document

  Json to_json() const {
    Json j;
    j["id"] = result.id;
    j["identity"] = result.identity;
    j["parameters"] = parameters;
    j["residual"] = real_str(result.max_err);
    j["tolerance"] = real_str(result.tol);
    j["verdict"] = result.inconclusive ? "inconclusive"
                                       : (result.pass ? "pass" : "fail");
    j["flags"] = result.flags;
    j["detail"] = result.detail;
    if (timed) j["wall_ms"] = wall_ms;
    return j;
  }
};

/// The whole suite outcome. Records are kept sorted by check id regardless
/// of execution order, so concurrent scheduling cannot reorder the document.
struct Report {
  int schema_version = 1;
  int real_digits = kReportRealDigits;
  Json config_echo = Json::object();
  bool reproducible = false;
  std::vector<CheckRecord> records;

  void add(CheckRecord rec) {
    if (reproducible) rec.timed = false;
    records.push_back(std::move(rec));
    std::sort(records.begin(), records.end(),
              [](const CheckRecord& a, const CheckRecord& b) {
                return a.result.id < b.result.id;
              });
  }

  int passed() const { return count([](const CheckResult& r) { return r.pass; }); }
  int failed() const {
    return count([](const CheckResult& r) { return !r.pass && !r.inconclusive; });
  }
  int inconclusive() const {
    return count([](const CheckResult& r) { return r.inconclusive; });
  }

  /// 0: all pass. 1: at least one fail. 2: no fails but at least one
  /// inconclusive. (3 is reserved for configuration errors and never appears
  /// in a report, which presupposes a valid configuration.)
  int exit_code() const {
    if (failed() > 0) return 1;
    if (inconclusive() > 0) return 2;
    return 0;
  }

  Json to_json() const {
    Json j;
    j["schema_version"] = schema_version;
    j["tool"] = "taulab";
    j["real_digits"] = real_digits;
    j["reproducible"] = reproducible;
    j["config"] = config_echo;
    Json checks = Json::array();
    for (const CheckRecord& r : records) checks.push_back(r.to_json());
    j["checks"] = checks;
    Json s;
    s["total"] = (int)records.size();
    s["pass"] = passed();
    s["fail"] = failed();
    s["inconclusive"] = inconclusive();
    s["verdict"] = failed() > 0 ? "fail"
                   : inconclusive() > 0 ? "inconclusive"
                   : records.empty() ? "empty"
                                     : "pass";
    s["exit_code"] = exit_code();
    j["summary"] = s;
    return j;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }

  /// One human-readable line per record: "verdict  id  residual/tolerance".
  std::string text_summary() const {
    std::string out;
    for (const CheckRecord& r : records) {
      const CheckResult& c = r.result;
      std::string v = c.inconclusive ? "INCONCLUSIVE" : (c.pass ? "PASS" : "FAIL");
      out += v;
      out.append(v.size() < 12 ? 12 - v.size() + 2 : 2, ' ');
      out += c.id;
      out.append(c.id.size() < 18 ? 18 - c.id.size() + 2 : 2, ' ');
      if (c.inconclusive)
        out += c.detail;
      else
        out += "residual " + real_str(c.max_err) + "  tolerance " + real_str(c.tol);
      out += "\n";
    }
    return out;
  }

 private:
  template <class F>
  int count(F f) const {
    int n = 0;
    for (const CheckRecord& r : records)
      if (f(r.result)) ++n;
    return n;
  }
};

}  // namespace taulab
