/// @file tau.hpp
/// @brief Truncated-but-exact evaluation of the lattice tau function
///
///   Z(s,t,tbar) = sum_lambda e^{beta(kappa(lambda) + 2s|lambda| + (4s^3-s)/12)/2}
///                 * Q^{|lambda| + s(s+1)/2} * S_lambda(t) * S_lambda(-tbar)
///
/// truncated to |lambda| <= D, together with analytic partial derivatives of
/// any order in s, t_k and tbar_1, and a computable tail majorant for the
/// truncation error. The factor Z~ with the lambda-independent prefactor
/// stripped is an exponential sum  sum_d A_d e^{beta d s}  whose s-derivatives
/// are exact; t/tbar derivatives act exactly on the per-term polynomials.
#pragma once

#include <taulab/checkresult.hpp>
#include <taulab/multipoly.hpp>
#include <taulab/numbers.hpp>
#include <taulab/partition.hpp>
#include <taulab/schur.hpp>
#include <taulab/sfunc.hpp>

#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace taulab {

// ---------------------------------------------------------------------------
// Specification of a truncated tau evaluation
// ---------------------------------------------------------------------------

/// Raised when the tail majorant's term ratio is >= 1: parameters are outside
/// the region where the truncation certifies anything.
class DivergentTailError : public std::runtime_error {
 public:
  explicit DivergentTailError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a caller-requested tolerance is tighter than the tail bound.
class PrecisionExhaustedError : public std::runtime_error {
 public:
  explicit PrecisionExhaustedError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TauSpec {
  Rat beta{1, 5};
  Rat Q{1, 10};
  Rat tbar1{1, 2};
  std::vector<Rat> t;     // sample values of t_1..t_m
  std::vector<Rat> tbar;  // empty => single sector: tbar = (tbar1, 0, 0, ...)
  int D = 8;              // keep |lambda| <= D
  unsigned P = 50;        // working precision, decimal digits
  Rat s_min{-2}, s_max{2};

  int m() const { return (int)t.size(); }
  bool single_sector() const { return tbar.empty(); }

  /// Default sample point: beta=1/5, Q=1/10, tbar1=1/2, t=(1/10,1/20,0,...).
  static TauSpec defaults(int D = 8) {
    TauSpec s;
    s.D = D;
    s.t.assign(std::max(D, 2), Rat(0));
    s.t[0] = Rat(1, 10);
    s.t[1] = Rat(1, 20);
    return s;
  }

  void validate() const {
    if (D < 0) throw std::invalid_argument("TauSpec: D must be >= 0");
    if (P < 30) throw std::invalid_argument("TauSpec: precision must be >= 30 digits");
    if (m() < D)
      throw std::invalid_argument("TauSpec: need at least D active t-variables");
    if (Q <= 0) throw std::invalid_argument("TauSpec: Q must be positive");
    if (s_min > s_max) throw std::invalid_argument("TauSpec: empty s-range");
    // the geometric majorant is meaningful only when its base is < 1 over
    // the declared s-range
    Real y = peak_base();
    if (!(y < 1))
      throw std::invalid_argument(
          "TauSpec: |Q e^{beta s} tbar1| must stay below 1 on [s_min, s_max]");
  }

  /// max over the declared s-range of the majorant base (see tail()).
  Real peak_base() const {
    Real b = to_real(beta);
    Real e1 = exp(b * to_real(s_min)), e2 = exp(b * to_real(s_max));
    Real base = to_real(Q) * ((e1 > e2) ? e1 : e2);
    if (single_sector()) base *= abs(to_real(tbar1));
    return abs(base);
  }
};

struct DerivIndex {
  int ds = 0;              // order in s
  std::vector<int> dt;     // orders in t_1..t_k (may be shorter than m)
  int dtbar1 = 0;          // order in tbar_1
};

struct TauValue {
  Real value{0};
  Real tail_bound{0};  // majorant for the truncation error of the value
  long terms_used = 0; // number of shapes summed
};

struct TailInfo {
  Real a_next{0};  // majorant of the first omitted degree block
  Real rho{0};     // ratio of consecutive majorant blocks at the cut
  Real bound{0};   // a_next / (1 - rho)
};

// ---------------------------------------------------------------------------
// Per-shape factors
// ---------------------------------------------------------------------------

using PartitionFactor = std::function<Real(const Partition&)>;

namespace tau_detail {

inline std::vector<int> padded_orders(const std::vector<int>& dt, int m) {
  std::vector<int> o = dt;
  for (size_t k = m; k < o.size(); ++k)
    if (o[k] != 0)
      throw std::invalid_argument("derivative requested in an inactive t-variable");
  o.resize(m, 0);
  return o;
}

}  // namespace tau_detail

/// lambda -> (prod_k d^{dt_k}/dt_k^{dt_k}) S_lambda evaluated at spec.t.
inline PartitionFactor t_factor(const TauSpec& spec, std::vector<int> dt = {}) {
  auto tv = std::make_shared<std::vector<Real>>();
  for (const Rat& x : spec.t) tv->push_back(to_real(x));
  const int m = spec.m();
  auto orders = tau_detail::padded_orders(dt, m);
  const bool plain = dt.empty();
  return [m, tv, orders, plain](const Partition& la) {
    MultiPoly p = schur_poly(la, m);
    if (!plain) p = p.deriv_multi(orders);
    return p.eval<Real>(*tv);
  };
}

/// lambda -> d^r/dtbar1^r [ S_lambda(-tbar) ] at the spec's tbar point.
/// Single sector: S_lambda(-(tbar1,0,...)) = (dim/|la|!) (-tbar1)^{|la|}.
inline PartitionFactor tbar_factor(const TauSpec& spec, int r = 0) {
  if (r < 0) throw std::invalid_argument("tbar_factor: negative order");
  if (spec.single_sector()) {
    const Rat u = spec.tbar1;
    return [u, r](const Partition& la) {
      const int d = la.size();
      if (r > d) return Real(0);
      // f(u) = c (-u)^d  =>  f^(r)(u) = c d!/(d-r)! (-1)^r (-u)^{d-r}
      Rat c = Rat(la.dim()) / Rat(factorial(d));
      Rat fall(factorial(d) / factorial(d - r));
      Rat val = c * fall * rat_pow(Rat(-1), r) * rat_pow(-u, d - r);
      return to_real(val);
    };
  }
  auto tv = std::make_shared<std::vector<Real>>();
  for (const Rat& x : spec.tbar) tv->push_back(to_real(-x));
  tv->resize(spec.m(), Real(0));
  const int m = spec.m();
  return [m, tv, r](const Partition& la) {
    MultiPoly p = schur_poly(la, m);
    for (int i = 0; i < r; ++i) p = p.deriv(1);
    Real v = p.eval<Real>(*tv);
    return (r % 2 == 0) ? v : -v;  // chain rule through the sign flip
  };
}

// ---------------------------------------------------------------------------
// Tau function with cached evaluation graphs
// ---------------------------------------------------------------------------

class TauFunction {
 public:
  explicit TauFunction(TauSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  const TauSpec& spec() const { return spec_; }

  /// Degree coefficients A_d = sum_{|la|=d} e^{beta kappa/2} Q^d Ft(la) Fbar(la),
  /// summed in enumeration order (bit-reproducible).
  std::vector<Real> degree_coeffs(const PartitionFactor& Ft,
                                  const PartitionFactor& Fbar) const {
    std::vector<Real> A(spec_.D + 1, Real(0));
    const Real br = to_real(spec_.beta);
    for (int d = 0; d <= spec_.D; ++d) {
      const Real Qd = to_real(rat_pow(spec_.Q, d));
      for (const Partition& la : enumerate_partitions(d))
        A[d] += exp(br * Real(la.kappa()) / 2) * Qd * Ft(la) * Fbar(la);
    }
    return A;
  }

  /// Exponent of the shape-independent prefactor:
  /// g(s) = beta (4s^3 - s)/24 + (log Q) s(s+1)/2.
  std::array<Real, 4> prefactor_exponent() const {
    const Real br = to_real(spec_.beta), lq = log(to_real(spec_.Q));
    return {Real(0), lq / 2 - br / 24, lq / 2, br / 6};
  }

  /// The prefactor e^{g(s)} itself.
  SFunc prefactor() const {
    return cached("prefactor", [&] {
      return SFunc::exp_poly_sum("prefactor", {{Real(1), prefactor_exponent()}});
    });
  }

  /// g(s) as an exact polynomial graph (for logarithms of Z).
  SFunc log_prefactor() const {
    return cached("log_prefactor", [&] {
      auto g = prefactor_exponent();
      return SFunc::polynomial("log_prefactor", {g[0], g[1], g[2], g[3]});
    });
  }

  /// Z~(s) = sum_d A_d e^{beta d s}; optional exact t/tbar1 derivatives.
  SFunc Ztilde(const std::vector<int>& dt = {}, int dtbar1 = 0) const {
    return cached("zt|" + key(dt, dtbar1), [&] {
      return exp_sum_from(t_factor(spec_, dt), tbar_factor(spec_, dtbar1),
                          "Ztilde" + key(dt, dtbar1));
    });
  }

  /// Z(s) assembled as prefactor * Z~ (product graph).
  SFunc Z(const std::vector<int>& dt = {}, int dtbar1 = 0) const {
    return cached("z|" + key(dt, dtbar1),
                  [&] { return prefactor() * Ztilde(dt, dtbar1); });
  }

  /// Z(s) assembled in one piece: per-degree cubic exponents, no factoring.
  /// Independent of Z() at the graph level; used to cross-check assembly.
  SFunc Z_onepiece(const std::vector<int>& dt = {}, int dtbar1 = 0) const {
    return cached("z1|" + key(dt, dtbar1), [&] {
      auto A = degree_coeffs(t_factor(spec_, dt), tbar_factor(spec_, dtbar1));
      auto g = prefactor_exponent();
      const Real br = to_real(spec_.beta);
      std::vector<std::pair<Real, std::array<Real, 4>>> terms;
      for (int d = 0; d <= spec_.D; ++d)
        terms.push_back({A[d], {g[0], g[1] + br * d, g[2], g[3]}});
      return SFunc::exp_poly_sum("Z_onepiece" + key(dt, dtbar1), std::move(terms));
    });
  }

  /// Coefficient of z^{-n} in Z~(s, t - [z^{-1}]) where [z^{-1}]_k = z^{-k}/k,
  /// optionally with exact t-derivatives applied after the shift.
  SFunc shifted_tower(int n, const std::vector<int>& dt = {}) const {
    if (n < 0) throw std::invalid_argument("shifted_tower: negative index");
    std::string k = "tower|" + std::to_string(n) + "|" + key(dt, 0);
    return cached(k, [&] {
      auto tv = std::make_shared<std::vector<Real>>();
      for (const Rat& x : spec_.t) tv->push_back(to_real(x));
      const int m = spec_.m();
      auto orders = tau_detail::padded_orders(dt, m);
      const bool plain = dt.empty();
      auto towers = towers_;  // shared cache of per-shape shift expansions
      PartitionFactor Ft = [m, tv, orders, plain, n, towers](const Partition& la) {
        auto it = towers->find(la.parts());
        if (it == towers->end())
          it = towers->emplace(la.parts(),
                               schur_poly(la, m).shift_by_inverse_powers()).first;
        const auto& tw = it->second;
        if (n >= (int)tw.size()) return Real(0);
        MultiPoly p = tw[n];
        if (!plain) p = p.deriv_multi(orders);
        return p.eval<Real>(*tv);
      };
      return exp_sum_from(Ft, tbar_factor(spec_, 0), "tower" + std::to_string(n));
    });
  }

  long terms_used() const {
    long n = 0;
    for (int d = 0; d <= spec_.D; ++d) n += partition_count(d);
    return n;
  }

  // ---- tail majorant ------------------------------------------------------

  /// Majorant of the degree-d block of Z~. Both forms use |chi| <= dim,
  /// kappa <= d^2 and sum_{|la|=d} dim^2 = d!.
  ///
  /// Single sector, y = |Q e^{beta s} tbar1|:
  ///   a_d = e^{beta d^2/2} y^d M(t),          M(t) = exp(sum_k |t_k|).
  /// Double sector, y = |Q e^{beta s}|: the d! from sum dim^2 is offset by
  /// the degree-d slices M_d(v) = [u^d] exp(sum_k |v_k| u^k), which satisfy
  /// |S_la(v)| <= dim(la) M_d(v):
  ///   a_d = e^{beta d^2/2} y^d d! M_d(t) M_d(tbar).
  Real block_majorant(int d, const Real& y) const {
    const Real br = to_real(spec_.beta);
    Real a = exp(br * Real(d) * Real(d) / 2) * real_pow(y, d);
    if (spec_.single_sector()) {
      Real e = 0;
      for (const Rat& x : spec_.t) e += abs(to_real(x));
      a *= exp(e);
    } else {
      a *= to_real(factorial(d)) * degree_slice(spec_.t, d) *
           degree_slice(spec_.tbar, d);
    }
    return a;
  }

  /// M_d(v) = [u^d] exp(sum_k |v_k| u^k) via n h_n = sum_k k |v_k| h_{n-k}.
  static Real degree_slice(const std::vector<Rat>& v, int d) {
    std::vector<Real> h(d + 1, Real(0));
    h[0] = 1;
    for (int n = 1; n <= d; ++n) {
      Real acc = 0;
      for (int k = 1; k <= n && k <= (int)v.size(); ++k)
        acc += k * abs(to_real(v[k - 1])) * h[n - k];
      h[n] = acc / n;
    }
    return h[d];
  }

  /// Tail info at base y: first omitted block, block ratio, geometric bound.
  /// Throws DivergentTailError if the ratio certifies nothing.
  TailInfo tail_at_base(const Real& y) const {
    const int D = spec_.D;
    TailInfo info;
    info.a_next = block_majorant(D + 1, y);
    if (info.a_next == 0) return info;  // e.g. tbar1 = 0
    Real a2 = block_majorant(D + 2, y);
    info.rho = a2 / info.a_next;
    if (!(info.rho < 1)) {
      std::ostringstream os;
      os << "tail majorant diverges at D=" << D << ": block ratio " << info.rho
         << " >= 1";
      throw DivergentTailError(os.str());
    }
    info.bound = info.a_next / (1 - info.rho);
    return info;
  }

  TailInfo tail(const Rat& s) const { return tail_at_base(base_at(s)); }
  /// Tail bound valid uniformly over [s_min, s_max].
  TailInfo tail_range() const { return tail_at_base(spec_.peak_base()); }

  // ---- point evaluation ----------------------------------------------------

  TauValue eval_Ztilde(const Rat& s, const DerivIndex& di = {},
                       std::optional<Real> tol = std::nullopt) const {
    TauValue v;
    v.value = Ztilde(di.dt, di.dtbar1).eval(s, di.ds);
    v.tail_bound = tail(s).bound;
    v.terms_used = terms_used();
    enforce(tol, v.tail_bound);
    return v;
  }

  TauValue eval_Z(const Rat& s, const DerivIndex& di = {},
                  std::optional<Real> tol = std::nullopt) const {
    TauValue v;
    v.value = Z(di.dt, di.dtbar1).eval(s, di.ds);
    v.tail_bound = tail(s).bound * prefactor().eval(s, 0);
    v.terms_used = terms_used();
    enforce(tol, v.tail_bound);
    return v;
  }

 private:
  Real base_at(const Rat& s) const {
    Real y = to_real(spec_.Q) * exp(to_real(spec_.beta) * to_real(s));
    if (spec_.single_sector()) y *= to_real(spec_.tbar1);
    return abs(y);
  }

  static void enforce(const std::optional<Real>& tol, const Real& bound) {
    if (tol && bound > *tol) {
      std::ostringstream os;
      os << "tail bound " << bound << " exceeds requested tolerance " << *tol;
      throw PrecisionExhaustedError(os.str());
    }
  }

  SFunc exp_sum_from(const PartitionFactor& Ft, const PartitionFactor& Fbar,
                     const std::string& name) const {
    auto A = degree_coeffs(Ft, Fbar);
    const Real br = to_real(spec_.beta);
    std::vector<std::pair<Real, std::array<Real, 4>>> terms;
    for (int d = 0; d <= spec_.D; ++d)
      terms.push_back({A[d], {Real(0), br * d, Real(0), Real(0)}});
    return SFunc::exp_poly_sum(name, std::move(terms));
  }

  static std::string key(const std::vector<int>& dt, int dtbar1) {
    std::string k = "[";
    for (size_t i = 0; i < dt.size(); ++i) k += (i ? "," : "") + std::to_string(dt[i]);
    k += "];" + std::to_string(dtbar1);
    return k;
  }

  template <class F>
  SFunc cached(const std::string& k, F&& build) const {
    auto it = graphs_.find(k);
    if (it != graphs_.end()) return it->second;
    SFunc f = build();
    graphs_.emplace(k, f);
    return f;
  }

  TauSpec spec_;
  mutable std::map<std::string, SFunc> graphs_;
  std::shared_ptr<std::map<std::vector<int>, std::vector<MultiPoly>>> towers_ =
      std::make_shared<std::map<std::vector<int>, std::vector<MultiPoly>>>();
};

// ---------------------------------------------------------------------------
// Exact integer-s route: Z~(s0) as a Laurent polynomial in w = e^beta
// ---------------------------------------------------------------------------

/// At integer s0 every term of Z~ is (exact rational) * w^{kappa/2 + d s0}.
/// Returns exponent -> coefficient. Only meaningful in the single sector or
/// with rational tbar; both t-factors are evaluated in exact arithmetic.
inline std::map<long, Rat> ztilde_exact_wseries(const TauSpec& spec, long s0) {
  std::map<long, Rat> out;
  for (int d = 0; d <= spec.D; ++d) {
    const Rat Qd = rat_pow(spec.Q, d);
    for (const Partition& la : enumerate_partitions(d)) {
      // exact t-factor
      std::vector<Rat> tv = spec.t;
      Rat st = schur_poly(la, spec.m()).eval<Rat>(tv);
      // exact tbar-factor
      Rat sb;
      if (spec.single_sector()) {
        sb = eval_special_c(la, -spec.tbar1);
      } else {
        std::vector<Rat> bv;
        for (const Rat& x : spec.tbar) bv.push_back(-x);
        bv.resize(spec.m(), Rat(0));
        sb = schur_poly(la, spec.m()).eval<Rat>(bv);
      }
      Rat coeff = Qd * st * sb;
      if (coeff == 0) continue;
      long expo = la.kappa() / 2 + (long)d * s0;
      out[expo] += coeff;
    }
  }
  return out;
}

/// Evaluate the Laurent polynomial at w = e^beta.
inline Real eval_wseries(const std::map<long, Rat>& series, const Rat& beta) {
  const Real w = exp(to_real(beta));
  Real sum = 0;
  for (const auto& [e, c] : series) sum += to_real(c) * real_pow(w, e);
  return sum;
}

// ---------------------------------------------------------------------------
// Check: the single-sector tau satisfies  dZ~/ds = beta tbar1 dZ~/dtbar1
// ---------------------------------------------------------------------------

/// Verifies the linear flow identity two ways.
///  (a) symbolically, shape by shape: the s-side multiplier beta*|la| is read
///      off the exponential structure, while the tbar1-side multiplier is
///      computed by differentiating the shape's tbar1-polynomial with the
///      generic polynomial engine; they must agree as exact rationals.
///  (b) numerically at sample points through two independent evaluation
///      graphs, with residual below 10^{-(P-10)} relative.
inline CheckResult check_linear_flow(const TauSpec& spec,
                                     const std::vector<Rat>& s_samples) {
  const std::string id = "linear-flow";
  const std::string identity =
      "d/ds Ztilde = beta * tbar1 * d/dtbar1 Ztilde (single sector)";
  if (!spec.single_sector())
    return CheckResult::undecided(id, identity, "predicate needs the single sector");

  // (a) exact, shape by shape
  for (int d = 0; d <= spec.D; ++d) {
    for (const Partition& la : enumerate_partitions(d)) {
      Rat m_s = spec.beta * d;  // from d/ds e^{beta d s}
      if (spec.tbar1 == 0) {
        if (d != 0) continue;  // every tbar1-dependent term vanishes
      } else {
        // tbar1-side via the polynomial engine on f(u) = (dim/d!) (-u)^d
        MultiPoly f = MultiPoly::constant(1, Rat(la.dim()) / Rat(factorial(d)));
        MultiPoly mu = MultiPoly::var(1, 1).scaled(Rat(-1));
        for (int i = 0; i < d; ++i) f *= mu;
        Rat fval = f.eval<Rat>({spec.tbar1});
        Rat fder = f.deriv(1).eval<Rat>({spec.tbar1});
        if (fval == 0)
          return CheckResult::failed(id, identity, Real(1), Real(0),
                                     "unexpected zero shape factor at " + la.str());
        Rat m_t = spec.beta * spec.tbar1 * fder / fval;
        if (m_s != m_t) {
          std::ostringstream os;
          os << "multiplier mismatch at shape " << la.str() << ": " << rat_str(m_s)
             << " vs " << rat_str(m_t);
          return CheckResult::failed(id, identity, Real(1), Real(0), os.str());
        }
      }
    }
  }

  // (b) numeric, via two graphs
  TauFunction tau(spec);
  try {
    tau.tail_range();  // outside the certifiable region => inconclusive
  } catch (const DivergentTailError& e) {
    return CheckResult::undecided(id, identity, e.what());
  }
  SFunc lhs = tau.Ztilde().deriv(1);
  SFunc rhs = tau.Ztilde({}, 1).scale(to_real(spec.beta * spec.tbar1));
  Real tol = pow(Real(10), -(int)spec.P + 10);
  Real max_err = 0, max_rel_tol = tol;
  for (const Rat& s : s_samples) {
    Real a = lhs.eval(s, 0), b = rhs.eval(s, 0);
    Real err = abs(a - b);
    Real scale = abs(a) > 1 ? abs(a) : Real(1);
    if (err > max_err) max_err = err;
    if (tol * scale > max_rel_tol) max_rel_tol = tol * scale;
  }
  std::ostringstream os;
  os << "exact multipliers agree for all " << tau.terms_used()
     << " shapes; numeric residual " << max_err << " at " << s_samples.size()
     << " sample points";
  if (max_err <= max_rel_tol)
    return CheckResult::passed(id, identity, max_err, max_rel_tol, os.str());
  return CheckResult::failed(id, identity, max_err, max_rel_tol, os.str());
}

}  // namespace taulab
