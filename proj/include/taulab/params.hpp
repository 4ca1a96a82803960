/// @file params.hpp
/// @brief Exact scalar ring for the operator-algebra backend.
///
/// A Scalar is a sparse Laurent polynomial over the rationals in the formal
/// generators
///   beta            (non-negative powers),
///   q_Q  = log Q    (non-negative powers),
///   e_b  = e^beta   (integer powers),
///   Q               (integer powers),
///   c_1, c_2, ...   (non-negative powers; the constant list of the initial
///                    dressing data, indexed from 1).
/// Every coefficient that appears in the initial-operator computations lives
/// in this ring: no division by a formal generator is ever required, so
/// arithmetic stays exact and zero-testing is decidable.
#pragma once

#include "taulab/numbers.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace taulab {

/// Numeric substitution point for exact expressions.
struct NumericParams {
  Real beta;
  Real Q;                // must be > 0 when any q_Q or negative Q power occurs
  std::vector<Real> c;   // c_1..c_K

  Real c_at(int k) const {
    if (k < 1 || k > (int)c.size())
      throw std::out_of_range("NumericParams: c_" + std::to_string(k) +
                              " not provided");
    return c[k - 1];
  }
};

/// Exponent vector of one monomial.
struct Mono {
  int pb = 0;              // beta^pb,  pb >= 0
  int pq = 0;              // q_Q^pq,   pq >= 0
  int pe = 0;              // e_b^pe,   any sign
  int pQ = 0;              // Q^pQ,     any sign
  std::map<int, int> pc;   // c_k^{pc[k]}, powers > 0 only

  auto operator<=>(const Mono&) const = default;

  Mono operator*(const Mono& o) const {
    Mono r = *this;
    r.pb += o.pb;
    r.pq += o.pq;
    r.pe += o.pe;
    r.pQ += o.pQ;
    for (auto& [k, p] : o.pc) {
      int np = (r.pc.count(k) ? r.pc[k] : 0) + p;
      if (np == 0) r.pc.erase(k);
      else r.pc[k] = np;
    }
    return r;
  }
};

class Scalar {
 public:
  Scalar() = default;
  /*implicit*/ Scalar(const Rat& q) {
    if (q != 0) terms_[Mono{}] = q;
  }
  /*implicit*/ Scalar(long n) : Scalar(Rat(n)) {}

  static Scalar beta() { return generator(Mono{1, 0, 0, 0, {}}); }
  static Scalar logQ() { return generator(Mono{0, 1, 0, 0, {}}); }
  /// e^{m beta}
  static Scalar e_beta(int m) { return generator(Mono{0, 0, m, 0, {}}); }
  /// Q^m (m of either sign)
  static Scalar Q_pow(int m) { return generator(Mono{0, 0, 0, m, {}}); }
  /// the constant c_k, k >= 1
  static Scalar c(int k) {
    if (k < 1) throw std::invalid_argument("Scalar::c: index must be >= 1");
    Mono m;
    m.pc[k] = 1;
    return generator(m);
  }

  bool is_zero() const { return terms_.empty(); }
  bool operator==(const Scalar& o) const { return terms_ == o.terms_; }

  Scalar operator+(const Scalar& o) const {
    Scalar r = *this;
    for (auto& [m, q] : o.terms_) r.accumulate(m, q);
    return r;
  }
  Scalar operator-() const {
    Scalar r = *this;
    for (auto& [m, q] : r.terms_) q = -q;
    return r;
  }
  Scalar operator-(const Scalar& o) const { return *this + (-o); }
  Scalar operator*(const Scalar& o) const {
    Scalar r;
    for (auto& [m1, q1] : terms_)
      for (auto& [m2, q2] : o.terms_) r.accumulate(m1 * m2, q1 * q2);
    return r;
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  Scalar pow(int n) const {
    if (n < 0) throw std::invalid_argument("Scalar::pow: negative exponent");
    Scalar r(Rat(1));
    for (int i = 0; i < n; ++i) r *= *this;
    return r;
  }

  Real eval(const NumericParams& p) const {
    Real total = 0;
    for (auto& [m, q] : terms_) {
      Real v = to_real(q);
      if (m.pb) v *= real_pow(p.beta, m.pb);
      if (m.pq) v *= real_pow(log(p.Q), m.pq);
      if (m.pe) v *= exp(p.beta * m.pe);
      if (m.pQ) v *= real_pow(p.Q, m.pQ);
      for (auto& [k, pw] : m.pc) v *= real_pow(p.c_at(k), pw);
      total += v;
    }
    return total;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, q] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << q.str() << ")";
      auto pw = [&](const char* name, int p) {
        if (p == 0) return;
        os << "*" << name;
        if (p != 1) os << "^" << p;
      };
      pw("beta", m.pb);
      pw("logQ", m.pq);
      pw("e_b", m.pe);
      pw("Q", m.pQ);
      for (auto& [k, p] : m.pc) pw(("c" + std::to_string(k)).c_str(), p);
    }
    return os.str();
  }

  const std::map<Mono, Rat>& terms() const { return terms_; }

 private:
  static Scalar generator(Mono m) {
    Scalar s;
    s.terms_[std::move(m)] = 1;
    return s;
  }
  void accumulate(const Mono& m, const Rat& q) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (q != 0) terms_[m] = q;
    } else {
      it->second += q;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::map<Mono, Rat> terms_;
};

inline Scalar operator*(const Rat& q, const Scalar& s) { return Scalar(q) * s; }

}  // namespace taulab
