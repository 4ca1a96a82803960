/// @file sfunc.hpp
/// @brief Lazily evaluated functions of one rational variable s with exact
///        derivative tracking to arbitrary order and per-node memoization.
///
/// A SFunc is a shared immutable expression DAG. eval(s, n) returns the n-th
/// derivative at s as a high-precision float; derivatives propagate through
/// sums, products (Leibniz), integer shifts f(s+j), reciprocals and
/// logarithms analytically — no finite differences anywhere.
///
/// Graphs are not thread-safe; build one graph per thread of work.
#pragma once

#include <taulab/numbers.hpp>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace taulab {

namespace detail {

struct SNode {
  virtual ~SNode() = default;
  virtual Real compute(const Rat& s, int order) const = 0;

  Real eval(const Rat& s, int order) const {
    const auto key = std::make_pair(s, order);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Real v = compute(s, order);
    memo_.emplace(key, v);
    return v;
  }

 private:
  mutable std::map<std::pair<Rat, int>, Real> memo_;
};

using SNodePtr = std::shared_ptr<const SNode>;

struct ConstNode final : SNode {
  explicit ConstNode(Real c) : c_(std::move(c)) {}
  Real compute(const Rat&, int order) const override { return order == 0 ? c_ : Real(0); }
  Real c_;
};

struct LeafNode final : SNode {
  LeafNode(std::string name, std::function<Real(const Rat&, int)> f)
      : name_(std::move(name)), f_(std::move(f)) {}
  Real compute(const Rat& s, int order) const override { return f_(s, order); }
  std::string name_;
  std::function<Real(const Rat&, int)> f_;
};

/// sum_i c_i * exp(g_i(s)) with cubic g_i; all derivatives in closed form
/// through the polynomial recurrence h_0 = 1, h_{n+1} = h_n' + h_n g'.
struct ExpPolySumNode final : SNode {
  struct Term {
    Real coeff;
    std::array<Real, 4> g;  // g(s) = g[3] s^3 + g[2] s^2 + g[1] s + g[0]
  };
  ExpPolySumNode(std::string name, std::vector<Term> terms)
      : name_(std::move(name)), terms_(std::move(terms)) {
    h_.resize(terms_.size());
  }

  static Real poly_eval(const std::vector<Real>& p, const Real& x) {
    Real v = 0;
    for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
  }

  const std::vector<Real>& h_poly(size_t ti, int order) const {
    auto& tower = h_[ti];
    if (tower.empty()) tower.push_back({Real(1)});  // h_0 = 1
    const auto& g = terms_[ti].g;
    // g'(s) = 3 g3 s^2 + 2 g2 s + g1
    const std::vector<Real> gp{g[1], 2 * g[2], 3 * g[3]};
    while ((int)tower.size() <= order) {
      const std::vector<Real>& h = tower.back();
      std::vector<Real> next(h.size() + 2, Real(0));
      for (size_t i = 1; i < h.size(); ++i) next[i - 1] += i * h[i];  // h'
      for (size_t i = 0; i < h.size(); ++i)                           // h * g'
        for (size_t j = 0; j < gp.size(); ++j) next[i + j] += h[i] * gp[j];
      while (next.size() > 1 && next.back() == 0) next.pop_back();
      tower.push_back(std::move(next));
    }
    return tower[order];
  }

  Real compute(const Rat& s, int order) const override {
    const Real sr = to_real(s);
    Real sum = 0;
    for (size_t i = 0; i < terms_.size(); ++i) {
      const auto& g = terms_[i].g;
      Real gval = ((g[3] * sr + g[2]) * sr + g[1]) * sr + g[0];
      Real factor = order == 0 ? Real(1) : poly_eval(h_poly(i, order), sr);
      sum += terms_[i].coeff * factor * exp(gval);
    }
    return sum;
  }

  std::string name_;
  std::vector<Term> terms_;
  mutable std::vector<std::vector<std::vector<Real>>> h_;  // [term][order] -> poly
};

/// Plain polynomial in s with float coefficients (index = power).
struct PolyNode final : SNode {
  PolyNode(std::string name, std::vector<Real> coeffs)
      : name_(std::move(name)), c_(std::move(coeffs)) {}
  Real compute(const Rat& s, int order) const override {
    const Real sr = to_real(s);
    Real sum = 0;
    for (size_t i = order; i < c_.size(); ++i) {
      Real f = 1;  // falling factorial i(i-1)...(i-order+1)
      for (int j = 0; j < order; ++j) f *= Real((long)(i - j));
      sum += c_[i] * f * real_pow(sr, (long)(i - order));
    }
    return sum;
  }
  std::string name_;
  std::vector<Real> c_;
};

struct AddNode final : SNode {
  AddNode(SNodePtr a, SNodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Real compute(const Rat& s, int n) const override { return a_->eval(s, n) + b_->eval(s, n); }
  SNodePtr a_, b_;
};

struct SubNode final : SNode {
  SubNode(SNodePtr a, SNodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Real compute(const Rat& s, int n) const override { return a_->eval(s, n) - b_->eval(s, n); }
  SNodePtr a_, b_;
};

struct MulNode final : SNode {
  MulNode(SNodePtr a, SNodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Real compute(const Rat& s, int n) const override {
    Real sum = 0;  // Leibniz
    for (int i = 0; i <= n; ++i)
      sum += to_real(binomial(n, i)) * a_->eval(s, i) * b_->eval(s, n - i);
    return sum;
  }
  SNodePtr a_, b_;
};

struct ScaleNode final : SNode {
  ScaleNode(Real c, SNodePtr a) : c_(std::move(c)), a_(std::move(a)) {}
  Real compute(const Rat& s, int n) const override { return c_ * a_->eval(s, n); }
  Real c_;
  SNodePtr a_;
};

struct ShiftNode final : SNode {  // f(s + j)
  ShiftNode(int j, SNodePtr a) : j_(j), a_(std::move(a)) {}
  Real compute(const Rat& s, int n) const override { return a_->eval(s + j_, n); }
  int j_;
  SNodePtr a_;
};

struct DerivNode final : SNode {
  explicit DerivNode(SNodePtr a) : a_(std::move(a)) {}
  Real compute(const Rat& s, int n) const override { return a_->eval(s, n + 1); }
  SNodePtr a_;
};

/// r = 1/h via the Leibniz recurrence: sum_i C(n,i) h^(i) r^(n-i) = [n=0].
struct RecipNode final : SNode {
  explicit RecipNode(SNodePtr h) : h_(std::move(h)) {}
  Real compute(const Rat& s, int n) const override {
    if (n == 0) return 1 / h_->eval(s, 0);
    Real acc = 0;
    for (int i = 1; i <= n; ++i)
      acc += to_real(binomial(n, i)) * h_->eval(s, i) * eval(s, n - i);
    return -eval(s, 0) * acc;
  }
  SNodePtr h_;
};

/// log h; derivatives delegate to (h'/h) at one order lower.
struct LogNode final : SNode {
  explicit LogNode(SNodePtr h)
      : h_(h),
        dlog_(std::make_shared<MulNode>(std::make_shared<DerivNode>(h),
                                        std::make_shared<RecipNode>(h))) {}
  Real compute(const Rat& s, int n) const override {
    if (n == 0) {
      Real v = h_->eval(s, 0);
      if (v <= 0) throw std::domain_error("SFunc: log of a non-positive value");
      return log(v);
    }
    return dlog_->eval(s, n - 1);
  }
  SNodePtr h_, dlog_;
};

}  // namespace detail

class SFunc {
 public:
  SFunc() = default;
  explicit SFunc(detail::SNodePtr n) : node_(std::move(n)) {}

  bool valid() const { return node_ != nullptr; }

  static SFunc constant(Real c) {
    return SFunc(std::make_shared<detail::ConstNode>(std::move(c)));
  }
  static SFunc constant(const Rat& c) { return constant(to_real(c)); }
  static SFunc leaf(std::string name, std::function<Real(const Rat&, int)> f) {
    return SFunc(std::make_shared<detail::LeafNode>(std::move(name), std::move(f)));
  }
  /// Polynomial in s; coeffs[i] multiplies s^i.
  static SFunc polynomial(std::string name, std::vector<Real> coeffs) {
    return SFunc(std::make_shared<detail::PolyNode>(std::move(name), std::move(coeffs)));
  }
  /// sum_i coeff_i * exp(g_i(s)), g_i cubic with coefficients {g0,g1,g2,g3}.
  static SFunc exp_poly_sum(std::string name,
                            std::vector<std::pair<Real, std::array<Real, 4>>> terms) {
    std::vector<detail::ExpPolySumNode::Term> ts;
    ts.reserve(terms.size());
    for (auto& [c, g] : terms) ts.push_back({std::move(c), std::move(g)});
    return SFunc(std::make_shared<detail::ExpPolySumNode>(std::move(name), std::move(ts)));
  }

  Real eval(const Rat& s, int order = 0) const {
    require();
    if (order < 0) throw std::invalid_argument("SFunc::eval: negative order");
    return node_->eval(s, order);
  }
  Real operator()(const Rat& s) const { return eval(s, 0); }

  SFunc deriv(int times = 1) const {
    require();
    detail::SNodePtr n = node_;
    for (int i = 0; i < times; ++i) n = std::make_shared<detail::DerivNode>(n);
    return SFunc(n);
  }
  SFunc shift(int j) const {  // s -> s + j
    require();
    if (j == 0) return *this;
    return SFunc(std::make_shared<detail::ShiftNode>(j, node_));
  }
  SFunc recip() const {
    require();
    return SFunc(std::make_shared<detail::RecipNode>(node_));
  }
  SFunc log_of() const {
    require();
    return SFunc(std::make_shared<detail::LogNode>(node_));
  }
  SFunc scale(const Real& c) const {
    require();
    return SFunc(std::make_shared<detail::ScaleNode>(c, node_));
  }
  SFunc scale(const Rat& c) const { return scale(to_real(c)); }

  friend SFunc operator+(const SFunc& a, const SFunc& b) {
    a.require(), b.require();
    return SFunc(std::make_shared<detail::AddNode>(a.node_, b.node_));
  }
  friend SFunc operator-(const SFunc& a, const SFunc& b) {
    a.require(), b.require();
    return SFunc(std::make_shared<detail::SubNode>(a.node_, b.node_));
  }
  friend SFunc operator*(const SFunc& a, const SFunc& b) {
    a.require(), b.require();
    return SFunc(std::make_shared<detail::MulNode>(a.node_, b.node_));
  }
  SFunc operator-() const { return scale(Real(-1)); }

 private:
  void require() const {
    if (!node_) throw std::logic_error("SFunc: empty handle");
  }
  detail::SNodePtr node_;
};

}  // namespace taulab
