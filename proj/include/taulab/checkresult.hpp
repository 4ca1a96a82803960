/// @file checkresult.hpp
/// @brief Common result record produced by every verification check.
#pragma once

#include <taulab/numbers.hpp>

#include <string>
#include <vector>

namespace taulab {

/// One verification outcome. `pass` and `inconclusive` are mutually
/// exclusive; a check is inconclusive when its own error estimate cannot
/// certify anything (e.g. a divergent tail majorant), as opposed to failing.
struct CheckResult {
  std::string id;        // stable machine-readable slug
  std::string identity;  // what was verified, in words
  bool pass = false;
  bool inconclusive = false;
  Real max_err{0};  // largest observed residual
  Real tol{0};      // tolerance it was compared against
  std::string detail;
  std::vector<std::string> flags;  // clipping/termination markers, e.g. "window-clipped"

  static CheckResult passed(std::string id, std::string identity, Real err, Real tol,
                            std::string detail = "") {
    return {std::move(id), std::move(identity), true, false, std::move(err),
            std::move(tol), std::move(detail), {}};
  }
  static CheckResult failed(std::string id, std::string identity, Real err, Real tol,
                            std::string detail = "") {
    return {std::move(id), std::move(identity), false, false, std::move(err),
            std::move(tol), std::move(detail), {}};
  }
  static CheckResult undecided(std::string id, std::string identity, std::string why) {
    return {std::move(id), std::move(identity), false, true, Real(0), Real(0),
            std::move(why), {}};
  }
};

}  // namespace taulab
