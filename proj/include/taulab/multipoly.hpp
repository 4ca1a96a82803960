/// @file multipoly.hpp
/// @brief Sparse exact multivariate polynomials over the rationals in
///        variables t_1..t_m, with the substitutions needed for shifted
///        time arguments.
#pragma once

#include <taulab/numbers.hpp>

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace taulab {

class MultiPoly {
 public:
  using Terms = std::map<std::vector<int>, Rat>;

  explicit MultiPoly(int m = 0) : m_(m) {}

  static MultiPoly zero(int m) { return MultiPoly(m); }

  static MultiPoly constant(int m, const Rat& c) {
    MultiPoly p(m);
    if (c != 0) p.terms_[std::vector<int>(m, 0)] = c;
    return p;
  }

  static MultiPoly one(int m) { return constant(m, 1); }

  /// t_k (1-based), k <= m.
  static MultiPoly var(int m, int k) {
    if (k < 1 || k > m) throw std::out_of_range("MultiPoly::var: k out of range");
    MultiPoly p(m);
    std::vector<int> e(m, 0);
    e[k - 1] = 1;
    p.terms_[std::move(e)] = 1;
    return p;
  }

  int vars() const { return m_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  Rat coeff(const std::vector<int>& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rat(0) : it->second;
  }

  /// Total degree weighted by the variable index: deg(t_k) = k.
  long weighted_degree() const {
    long d = 0;
    for (auto& [e, c] : terms_) {
      long w = 0;
      for (int k = 0; k < m_; ++k) w += (long)(k + 1) * e[k];
      d = std::max(d, w);
    }
    return d;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_same(o);
    for (auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check_same(o);
    for (auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }

  MultiPoly operator-() const {
    MultiPoly r(m_);
    for (auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_same(b);
    MultiPoly r(a.m_);
    for (auto& [ea, ca] : a.terms_)
      for (auto& [eb, cb] : b.terms_) {
        std::vector<int> e(a.m_);
        for (int k = 0; k < a.m_; ++k) e[k] = ea[k] + eb[k];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

  MultiPoly scaled(const Rat& c) const {
    MultiPoly r(m_);
    if (c == 0) return r;
    for (auto& [e, k] : terms_) r.terms_[e] = k * c;
    return r;
  }

  /// d/dt_k (1-based k).
  MultiPoly deriv(int k) const {
    if (k < 1 || k > m_) throw std::out_of_range("MultiPoly::deriv: k out of range");
    MultiPoly r(m_);
    for (auto& [e, c] : terms_) {
      if (e[k - 1] == 0) continue;
      std::vector<int> e2 = e;
      e2[k - 1] -= 1;
      r.add_term(e2, c * e[k - 1]);
    }
    return r;
  }

  /// Mixed partial with one order per variable.
  MultiPoly deriv_multi(const std::vector<int>& orders) const {
    MultiPoly r = *this;
    for (int k = 1; k <= m_ && k <= (int)orders.size(); ++k)
      for (int i = 0; i < orders[k - 1]; ++i) r = r.deriv(k);
    return r;
  }

  /// Evaluate at a point; T is Rat or Real.
  template <class T>
  T eval(const std::vector<T>& x) const {
    if ((int)x.size() != m_) throw std::invalid_argument("MultiPoly::eval: wrong point size");
    // power table per variable
    std::vector<int> maxe(m_, 0);
    for (auto& [e, c] : terms_)
      for (int k = 0; k < m_; ++k) maxe[k] = std::max(maxe[k], e[k]);
    std::vector<std::vector<T>> pw(m_);
    for (int k = 0; k < m_; ++k) {
      pw[k].resize(maxe[k] + 1);
      pw[k][0] = T(1);
      for (int i = 1; i <= maxe[k]; ++i) pw[k][i] = pw[k][i - 1] * x[k];
    }
    T total(0);
    for (auto& [e, c] : terms_) {
      T t(c);
      for (int k = 0; k < m_; ++k)
        if (e[k]) t *= pw[k][e[k]];
      total += t;
    }
    return total;
  }

  /// t_k -> a^k t_k. Weighted-homogeneous polynomials scale by a^{weighted degree}.
  MultiPoly weighted_scale(const Rat& a) const {
    MultiPoly r(m_);
    for (auto& [e, c] : terms_) {
      long w = 0;
      for (int k = 0; k < m_; ++k) w += (long)(k + 1) * e[k];
      r.terms_[e] = c * rat_pow(a, w);
    }
    return r;
  }

  /// Expand P(t_1 - w, t_2 - w^2/2, ..., t_k - w^k/k, ...) as a polynomial in w:
  /// result[n] is the coefficient of w^n. Exact and finite (degree <= weighted degree).
  std::vector<MultiPoly> shift_by_inverse_powers() const {
    long wd = weighted_degree();
    std::vector<MultiPoly> out((size_t)wd + 1, MultiPoly(m_));
    for (auto& [e, c] : terms_) {
      // expand prod_k (t_k - w^k/k)^{e_k}
      std::vector<std::pair<std::vector<int>, std::pair<long, Rat>>> acc;  // (exps, (wpow, coeff))
      acc.push_back({std::vector<int>(m_, 0), {0, c}});
      for (int k = 0; k < m_; ++k) {
        if (e[k] == 0) continue;
        std::vector<std::pair<std::vector<int>, std::pair<long, Rat>>> next;
        for (auto& [ex, wc] : acc) {
          for (int i = 0; i <= e[k]; ++i) {
            auto ex2 = ex;
            ex2[k] += e[k] - i;
            Rat coef = wc.second * Rat(binomial(e[k], i)) * rat_pow(Rat(-1, k + 1), i);
            next.push_back({std::move(ex2), {wc.first + (long)(k + 1) * i, coef}});
          }
        }
        acc = std::move(next);
      }
      for (auto& [ex, wc] : acc) out[(size_t)wc.first].add_term(ex, wc.second);
    }
    while (out.size() > 1 && out.back().is_zero()) out.pop_back();
    return out;
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.m_ == b.m_ && a.terms_ == b.terms_;
  }

  /// Deterministic text form, also the cache payload format.
  std::string serialize() const {
    std::ostringstream os;
    os << m_;
    for (auto& [e, c] : terms_) {
      os << ";";
      for (int k = 0; k < m_; ++k) {
        if (k) os << ",";
        os << e[k];
      }
      os << ":" << c.str();
    }
    return os.str();
  }

  static MultiPoly deserialize(const std::string& s) {
    std::istringstream is(s);
    std::string tok;
    if (!std::getline(is, tok, ';')) throw std::invalid_argument("MultiPoly: bad payload");
    MultiPoly p(std::stoi(tok));
    while (std::getline(is, tok, ';')) {
      auto colon = tok.rfind(':');
      if (colon == std::string::npos) throw std::invalid_argument("MultiPoly: bad term");
      std::vector<int> e;
      std::istringstream es(tok.substr(0, colon));
      std::string num;
      while (std::getline(es, num, ',')) e.push_back(std::stoi(num));
      if ((int)e.size() != p.m_) throw std::invalid_argument("MultiPoly: bad exponents");
      p.terms_[e] = Rat(tok.substr(colon + 1));
    }
    return p;
  }

 private:
  void check_same(const MultiPoly& o) const {
    if (m_ != o.m_) throw std::invalid_argument("MultiPoly: mixed variable counts");
  }

  void add_term(const std::vector<int>& e, const Rat& c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  int m_;
  Terms terms_;
};

}  // namespace taulab
