/// @file diffop.hpp
/// @brief Truncated skew algebra of difference-differential operators in s.
///
/// An operator is a finite sum of normal-ordered terms
///   a(s) * D^j * E^k,     D = d/ds,  E = (shift s -> s+1),
/// stored sparsely by (k, j) with coefficients from a pluggable backend C
/// (exact ExpPolyFunc or numeric function graphs). Normal ordering uses
///   E^k a(s) = a(s+k) E^k,    D a(s) = a(s) D + a'(s),    D E = E D.
/// Shift degree of a term is k alone: D counts as degree 0, so projections
/// to non-negative / negative parts act on the E-grading only.
///
/// Every operator carries a truncation window [k_min, k_max] for the shift
/// degree and a bound j_max on D-powers. Products drop out-of-window terms
/// but always record that clipping happened — a clipped result is never
/// silently presented as exact.
#pragma once

#include "taulab/numbers.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace taulab {

/// Backend adapter. Specializations exist for ExpPolyFunc (exact) and for
/// numeric function graphs; a coefficient type only needs the operations
/// listed here.
template <class C>
struct CoeffOps {
  static C zero();
  static C one();
  static bool is_zero(const C& a);
  static C add(const C& a, const C& b);
  static C neg(const C& a);
  static C mul(const C& a, const C& b);
  static C scale(const C& a, const Rat& r);
  static C shift(const C& a, int j);   // a(s) -> a(s+j)
  static C deriv(const C& a);          // a(s) -> a'(s)
};

template <class C>
class DiffOp {
 public:
  /// Term key: coefficient * D^j * E^k.
  struct Key {
    int k;
    int j;
    auto operator<=>(const Key&) const = default;
  };
  using Ops = CoeffOps<C>;

  DiffOp(int k_min, int k_max, int j_max)
      : k_min_(k_min), k_max_(k_max), j_max_(j_max) {
    if (k_min > k_max || j_max < 0)
      throw std::invalid_argument("DiffOp: bad truncation window");
  }

  static DiffOp zero(int k_min, int k_max, int j_max) {
    return DiffOp(k_min, k_max, j_max);
  }
  static DiffOp identity(int k_min, int k_max, int j_max) {
    DiffOp r(k_min, k_max, j_max);
    r.add(0, 0, Ops::one());
    return r;
  }
  /// E^k
  static DiffOp shift_op(int k, int k_min, int k_max, int j_max) {
    DiffOp r(k_min, k_max, j_max);
    r.add(k, 0, Ops::one());
    return r;
  }
  /// D
  static DiffOp d_op(int k_min, int k_max, int j_max) {
    DiffOp r(k_min, k_max, j_max);
    r.add(0, 1, Ops::one());
    return r;
  }
  /// multiplication operator by a(s)
  static DiffOp coeff_op(const C& a, int k_min, int k_max, int j_max) {
    DiffOp r(k_min, k_max, j_max);
    r.add(0, 0, a);
    return r;
  }

  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  int j_max() const { return j_max_; }
  bool clipped() const { return clipped_; }
  bool empty() const { return terms_.empty(); }
  const std::map<Key, C>& terms() const { return terms_; }

  /// Adds a(s) D^j E^k, clipping (and recording) if outside the window.
  void add(int k, int j, const C& a) {
    if (Ops::is_zero(a)) return;
    if (k < k_min_ || k > k_max_ || j > j_max_) {
      clipped_ = true;
      return;
    }
    if (j < 0) throw std::invalid_argument("DiffOp::add: negative D-power");
    auto it = terms_.find(Key{k, j});
    if (it == terms_.end()) {
      terms_.emplace(Key{k, j}, a);
    } else {
      it->second = Ops::add(it->second, a);
      if (Ops::is_zero(it->second)) terms_.erase(it);
    }
  }

  C coeff_at(int k, int j) const {
    auto it = terms_.find(Key{k, j});
    return it == terms_.end() ? Ops::zero() : it->second;
  }

  DiffOp operator+(const DiffOp& o) const {
    require_same_window(o);
    DiffOp r = *this;
    r.clipped_ = clipped_ || o.clipped_;
    for (auto& [key, a] : o.terms_) r.add(key.k, key.j, a);
    return r;
  }
  DiffOp operator-() const {
    DiffOp r = *this;
    for (auto& [key, a] : r.terms_) a = Ops::neg(a);
    return r;
  }
  DiffOp operator-(const DiffOp& o) const { return *this + (-o); }

  /// Normal-ordered product. For each pair of terms,
  ///   (a D^j1 E^k1)(b D^j2 E^k2)
  ///     = sum_i binom(j1,i) a * d^i/ds^i[b(s+k1)] D^{j1-i+j2} E^{k1+k2}.
  DiffOp operator*(const DiffOp& o) const {
    require_same_window(o);
    DiffOp r(k_min_, k_max_, j_max_);
    r.clipped_ = clipped_ || o.clipped_;
    for (auto& [ka, a] : terms_)
      for (auto& [kb, b] : o.terms_) {
        C moved = Ops::shift(b, ka.k);
        for (int i = 0; i <= ka.j; ++i) {
          if (i > 0) moved = Ops::deriv(moved);
          C coef = Ops::mul(a, Ops::scale(moved, Rat(binomial(ka.j, i))));
          r.add(ka.k + kb.k, ka.j - i + kb.j, coef);
        }
      }
    return r;
  }

  DiffOp& operator+=(const DiffOp& o) { return *this = *this + o; }
  DiffOp& operator-=(const DiffOp& o) { return *this = *this - o; }
  DiffOp& operator*=(const DiffOp& o) { return *this = *this * o; }

  DiffOp scaled(const Rat& r) const {
    DiffOp out = *this;
    if (r == 0) {
      out.terms_.clear();
      return out;
    }
    for (auto& [key, a] : out.terms_) a = Ops::scale(a, r);
    return out;
  }
  DiffOp scaled(const C& c) const {
    DiffOp out = *this;
    for (auto it = out.terms_.begin(); it != out.terms_.end();) {
      it->second = Ops::mul(c, it->second);
      if (Ops::is_zero(it->second)) it = out.terms_.erase(it);
      else ++it;
    }
    return out;
  }

  /// Terms with shift degree k >= 0 (D counts as degree 0).
  DiffOp project_nonneg() const {
    DiffOp r(k_min_, k_max_, j_max_);
    r.clipped_ = clipped_;
    for (auto& [key, a] : terms_)
      if (key.k >= 0) r.add(key.k, key.j, a);
    return r;
  }
  /// Terms with shift degree k < 0.
  DiffOp project_neg() const {
    DiffOp r(k_min_, k_max_, j_max_);
    r.clipped_ = clipped_;
    for (auto& [key, a] : terms_)
      if (key.k < 0) r.add(key.k, key.j, a);
    return r;
  }

  /// True when every term's shift degree is strictly negative (lowering) /
  /// strictly positive (raising).
  bool strictly_lowering() const {
    for (auto& [key, a] : terms_)
      if (key.k >= 0) return false;
    return true;
  }
  bool strictly_raising() const {
    for (auto& [key, a] : terms_)
      if (key.k <= 0) return false;
    return true;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (auto& [key, a] : terms_) {
      if (!first) os << ", ";
      first = false;
      os << "(k=" << key.k << ",j=" << key.j << ")";
    }
    os << "}";
    if (clipped_) os << " [clipped]";
    return os.str();
  }

 private:
  void require_same_window(const DiffOp& o) const {
    if (k_min_ != o.k_min_ || k_max_ != o.k_max_ || j_max_ != o.j_max_)
      throw std::logic_error("DiffOp: mixed truncation windows");
  }

  int k_min_, k_max_, j_max_;
  bool clipped_ = false;
  std::map<Key, C> terms_;
};

template <class C>
DiffOp<C> commutator(const DiffOp<C>& a, const DiffOp<C>& b) {
  return a * b - b * a;
}

/// Result of a truncated operator series together with whether the series
/// terminated (became identically zero within the window) before the cap.
template <class C>
struct SeriesResult {
  DiffOp<C> op;
  bool terminated;
};

/// e^C X e^{-C} = sum_n ad_C^n(X) / n!. Requires C strictly shift-lowering
/// or strictly shift-raising so that the series leaves the window after
/// finitely many steps; `terminated` reports whether it did within n_max.
template <class C>
SeriesResult<C> conjugate_by_exp(const DiffOp<C>& x, const DiffOp<C>& c,
                                 int n_max) {
  if (!c.strictly_lowering() && !c.strictly_raising())
    throw std::invalid_argument(
        "conjugate_by_exp: conjugator must be strictly shift-lowering or "
        "strictly shift-raising");
  DiffOp<C> acc = x, term = x;
  bool terminated = false;
  for (int n = 1; n <= n_max; ++n) {
    term = commutator(c, term).scaled(Rat(1, n));
    if (term.empty()) {
      terminated = true;
      break;
    }
    acc += term;
  }
  return {acc, terminated};
}

/// e^C = 1 + C + C^2/2! + ... for strictly lowering/raising C.
template <class C>
SeriesResult<C> exp_strict(const DiffOp<C>& c, int n_max) {
  if (!c.empty() && !c.strictly_lowering() && !c.strictly_raising())
    throw std::invalid_argument(
        "exp_strict: argument must be strictly shift-lowering or raising");
  DiffOp<C> acc =
      DiffOp<C>::identity(c.k_min(), c.k_max(), c.j_max());
  DiffOp<C> term = acc;
  bool terminated = c.empty();
  for (int n = 1; n <= n_max && !terminated; ++n) {
    term = (term * c).scaled(Rat(1, n));
    if (term.empty()) {
      terminated = true;
      break;
    }
    acc += term;
  }
  return {acc, terminated};
}

/// log(1 + B) = sum_n (-1)^{n+1} B^n / n for A = 1 + B with B strictly
/// lowering/raising.
template <class C>
SeriesResult<C> log_unitriangular(const DiffOp<C>& a, int n_max) {
  DiffOp<C> b = a;
  b.add(0, 0, CoeffOps<C>::neg(CoeffOps<C>::one()));
  if (!b.empty() && !b.strictly_lowering() && !b.strictly_raising())
    throw std::invalid_argument(
        "log_unitriangular: operator must be 1 + strictly lowering/raising");
  DiffOp<C> acc = DiffOp<C>::zero(a.k_min(), a.k_max(), a.j_max());
  DiffOp<C> power = DiffOp<C>::identity(a.k_min(), a.k_max(), a.j_max());
  bool terminated = b.empty();
  for (int n = 1; n <= n_max && !terminated; ++n) {
    power *= b;
    if (power.empty()) {
      terminated = true;
      break;
    }
    acc += power.scaled(Rat((n % 2) ? 1 : -1, n));
  }
  return {acc, terminated};
}

/// (1 + B)^{-1} = sum_n (-B)^n for B strictly lowering/raising; exact within
/// the window (the series leaves the window after finitely many steps).
template <class C>
DiffOp<C> inverse_unitriangular(const DiffOp<C>& a, int n_max) {
  DiffOp<C> b = a;
  b.add(0, 0, CoeffOps<C>::neg(CoeffOps<C>::one()));
  if (!b.empty() && !b.strictly_lowering() && !b.strictly_raising())
    throw std::invalid_argument(
        "inverse_unitriangular: operator must be 1 + strictly lowering/raising");
  DiffOp<C> acc = DiffOp<C>::identity(a.k_min(), a.k_max(), a.j_max());
  DiffOp<C> power = acc;
  for (int n = 1; n <= n_max; ++n) {
    power *= -b;
    if (power.empty()) break;
    acc += power;
  }
  return acc;
}

}  // namespace taulab
