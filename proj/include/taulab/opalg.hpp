/// @file opalg.hpp
/// @brief Coefficient backends for DiffOp and a faithful numeric action of
///        operators on the test family s^m e^{gamma s}.
///
/// Two backends:
///   - ExpPolyFunc: exact symbolic coefficients (see expfunc.hpp); zero
///     testing is decidable, so operator identities can be verified with no
///     floating-point arithmetic at all.
///   - SFunc: numeric function graphs with analytic derivatives; operators
///     built from tau-function data use this backend and are compared by
///     evaluation at sample points.
///
/// The action engine represents f(s) = sum_j P_j(s) e^{(gamma0 + j beta) s}
/// as a map from the integer slope index j to a polynomial P_j with real
/// coefficients. D acts as d/ds, E as s -> s+1, and coefficient functions
/// multiply in — the family is closed under all of these, so operator
/// applications are exact and only exponential *series* are truncated
/// (with the tail monitored).
#pragma once

#include "taulab/diffop.hpp"
#include "taulab/expfunc.hpp"
#include "taulab/numbers.hpp"
#include "taulab/sfunc.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace taulab {

template <>
struct CoeffOps<ExpPolyFunc> {
  static ExpPolyFunc zero() { return {}; }
  static ExpPolyFunc one() { return ExpPolyFunc(Rat(1)); }
  static bool is_zero(const ExpPolyFunc& a) { return a.is_zero(); }
  static ExpPolyFunc add(const ExpPolyFunc& a, const ExpPolyFunc& b) {
    return a + b;
  }
  static ExpPolyFunc neg(const ExpPolyFunc& a) { return -a; }
  static ExpPolyFunc mul(const ExpPolyFunc& a, const ExpPolyFunc& b) {
    return a * b;
  }
  static ExpPolyFunc scale(const ExpPolyFunc& a, const Rat& r) {
    return ExpPolyFunc(r) * a;
  }
  static ExpPolyFunc shift(const ExpPolyFunc& a, int j) { return a.shift(j); }
  static ExpPolyFunc deriv(const ExpPolyFunc& a) { return a.deriv(); }
};

/// SFunc backend: an invalid (default) handle is the zero element. Zero
/// detection is structural only — numeric cancellation is not detected, so
/// comparisons of SFunc-backed operators are made by evaluation.
template <>
struct CoeffOps<SFunc> {
  static SFunc zero() { return {}; }
  static SFunc one() { return SFunc::constant(Rat(1)); }
  static bool is_zero(const SFunc& a) { return !a.valid(); }
  static SFunc add(const SFunc& a, const SFunc& b) {
    if (!a.valid()) return b;
    if (!b.valid()) return a;
    return a + b;
  }
  static SFunc neg(const SFunc& a) { return a.valid() ? -a : a; }
  static SFunc mul(const SFunc& a, const SFunc& b) {
    if (!a.valid() || !b.valid()) return {};
    return a * b;
  }
  static SFunc scale(const SFunc& a, const Rat& r) {
    if (!a.valid() || r == 0) return (r == 0) ? SFunc{} : a;
    return a.scale(r);
  }
  static SFunc shift(const SFunc& a, int j) {
    return a.valid() ? a.shift(j) : a;
  }
  static SFunc deriv(const SFunc& a) { return a.valid() ? a.deriv(1) : a; }
};

/// (A f)(s) as a function graph: sum over terms a(s) f^{(j)}(s + k).
inline SFunc apply_op(const DiffOp<SFunc>& a, const SFunc& f) {
  SFunc acc;
  for (auto& [key, c] : a.terms()) {
    SFunc piece = f;
    if (key.j) piece = piece.deriv(key.j);
    if (key.k) piece = piece.shift(key.k);
    piece = c * piece;
    acc = acc.valid() ? acc + piece : piece;
  }
  return acc.valid() ? acc : SFunc::constant(Rat(0));
}

/// Numeric value of the (k, j) coefficient of an exact operator.
inline Real eval_coeff(const DiffOp<ExpPolyFunc>& a, int k, int j, const Rat& s,
                       const NumericParams& p) {
  return a.coeff_at(k, j).eval(s, p);
}

// ---------------------------------------------------------------------------
// Action on the closed family  f(s) = sum_j P_j(s) e^{(gamma0 + j beta) s}.
// ---------------------------------------------------------------------------

namespace polyr {  // small dense real-coefficient polynomial helpers

inline void trim(std::vector<Real>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline std::vector<Real> add(const std::vector<Real>& a,
                             const std::vector<Real>& b) {
  std::vector<Real> r(std::max(a.size(), b.size()), Real(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

inline std::vector<Real> mul(const std::vector<Real>& a,
                             const std::vector<Real>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Real> r(a.size() + b.size() - 1, Real(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

inline std::vector<Real> scale(std::vector<Real> p, const Real& c) {
  for (auto& x : p) x *= c;
  trim(p);
  return p;
}

inline std::vector<Real> deriv(const std::vector<Real>& p) {
  if (p.size() <= 1) return {};
  std::vector<Real> r(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) r[i - 1] = i * p[i];
  return r;
}

inline std::vector<Real> shift(const std::vector<Real>& p, int j) {
  // p(s + j)
  std::vector<Real> r(p.size(), Real(0));
  for (size_t n = 0; n < p.size(); ++n) {
    Real jp = 1;
    for (size_t i = n + 1; i-- > 0;) {
      r[i] += to_real(Int(binomial((long)n, (long)i))) * jp * p[n];
      jp *= j;
    }
  }
  trim(r);
  return r;
}

inline Real eval(const std::vector<Real>& p, const Real& s) {
  Real v = 0;
  for (size_t i = p.size(); i-- > 0;) v = v * s + p[i];
  return v;
}

}  // namespace polyr

class ActionState {
 public:
  ActionState(Real gamma0, Real beta)
      : gamma0_(std::move(gamma0)), beta_(std::move(beta)) {}

  /// s^m e^{gamma0 s}
  static ActionState test_function(int m, Real gamma0, Real beta) {
    ActionState f(std::move(gamma0), std::move(beta));
    std::vector<Real> p(m + 1, Real(0));
    p[m] = 1;
    f.comps_[0] = std::move(p);
    return f;
  }

  const Real& gamma0() const { return gamma0_; }
  const Real& beta() const { return beta_; }
  const std::map<int, std::vector<Real>>& comps() const { return comps_; }

  Real slope(int j) const { return gamma0_ + beta_ * j; }

  void add_comp(int j, const std::vector<Real>& p) {
    auto& dst = comps_[j];
    dst = polyr::add(dst, p);
    if (dst.empty()) comps_.erase(j);
  }

  ActionState operator+(const ActionState& o) const {
    require_compatible(o);
    ActionState r = *this;
    for (auto& [j, p] : o.comps_) r.add_comp(j, p);
    return r;
  }

  ActionState scaled(const Real& c) const {
    ActionState r(gamma0_, beta_);
    for (auto& [j, p] : comps_) {
      auto q = polyr::scale(p, c);
      if (!q.empty()) r.comps_[j] = std::move(q);
    }
    return r;
  }

  Real eval(const Real& s) const {
    Real v = 0;
    for (auto& [j, p] : comps_) v += polyr::eval(p, s) * exp(slope(j) * s);
    return v;
  }

  Real max_abs_on(const std::vector<Rat>& grid) const {
    Real m = 0;
    for (const Rat& s : grid) {
      Real v = abs(eval(to_real(s)));
      if (v > m) m = v;
    }
    return m;
  }

 private:
  void require_compatible(const ActionState& o) const {
    if (gamma0_ != o.gamma0_ || beta_ != o.beta_)
      throw std::logic_error("ActionState: incompatible exponent lattices");
  }

  Real gamma0_, beta_;
  std::map<int, std::vector<Real>> comps_;
};

/// One exact application of an exact-backend operator to a state, with the
/// formal parameters substituted numerically. Exact within the family — no
/// truncation happens here.
inline ActionState act(const DiffOp<ExpPolyFunc>& op, const NumericParams& p,
                       const ActionState& f) {
  ActionState out(f.gamma0(), f.beta());
  for (auto& [key, coeff] : op.terms()) {
    for (auto& [j, poly] : f.comps()) {
      // E^k then D^{key.j} on  poly(s) e^{slope s}
      std::vector<Real> q = polyr::shift(poly, key.k);
      Real slope = f.slope(j);
      Real expfac = exp(slope * key.k);
      q = polyr::scale(q, expfac);
      for (int d = 0; d < key.j; ++d)
        q = polyr::add(polyr::deriv(q), polyr::scale(q, slope));
      if (q.empty()) continue;
      // multiply by the coefficient function: atoms q_m(s) e^{m beta s}
      for (auto& [m, sc] : coeff.atoms()) {
        std::vector<Real> a(sc.size());
        for (size_t i = 0; i < sc.size(); ++i) a[i] = sc[i].eval(p);
        auto prod = polyr::mul(a, q);
        if (!prod.empty()) out.add_comp(j + m, prod);
      }
    }
  }
  return out;
}

struct ExpActionResult {
  ActionState value;
  Real tail_estimate;
  bool converged;
  int terms_used;
};

/// e^{op} f = sum_n op^n f / n!, truncated at n_max, with the tail size
/// monitored on a sample grid. converged = false means the factorial series
/// had not settled below tol by n_max (report as inconclusive, not failure).
inline ExpActionResult exp_act(const DiffOp<ExpPolyFunc>& op,
                               const NumericParams& p, const ActionState& f,
                               int n_max, const Real& tol,
                               const std::vector<Rat>& grid) {
  ActionState acc = f, term = f;
  Real prev_norm = term.max_abs_on(grid), last_norm = prev_norm;
  int used = 0;
  for (int n = 1; n <= n_max; ++n) {
    term = act(op, p, term).scaled(Real(1) / n);
    prev_norm = last_norm;
    last_norm = term.max_abs_on(grid);
    acc = acc + term;
    used = n;
    if (last_norm == 0) break;
  }
  Real tail = last_norm;
  if (prev_norm > 0 && last_norm < prev_norm) {
    Real rho = last_norm / prev_norm;
    tail = last_norm * rho / (1 - rho);
  }
  return {acc, tail, tail <= tol, used};
}

}  // namespace taulab
