/// @file expfunc.hpp
/// @brief Exact exponential-polynomial functions of the lattice coordinate s.
///
/// An ExpPolyFunc is a finite sum of atoms q(s) * e^{m beta s} with m an
/// integer and q a polynomial in s whose coefficients are exact Scalars
/// (see params.hpp). The family is closed under addition, multiplication,
/// differentiation d/ds and integer shifts s -> s + j:
///   shift:  e^{m beta (s+j)} = e_b^{m j} e^{m beta s}   (e_b = e^beta),
///   deriv:  (q e^{m beta s})' = (q' + m beta q) e^{m beta s},
/// so every operation is exact and zero-testing is decidable.
#pragma once

#include "taulab/numbers.hpp"
#include "taulab/params.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace taulab {

class ExpPolyFunc {
 public:
  ExpPolyFunc() = default;
  /*implicit*/ ExpPolyFunc(const Scalar& a) {
    if (!a.is_zero()) atoms_[0] = {a};
    normalize();
  }
  /*implicit*/ ExpPolyFunc(const Rat& q) : ExpPolyFunc(Scalar(q)) {}
  /*implicit*/ ExpPolyFunc(long n) : ExpPolyFunc(Scalar(n)) {}

  /// The coordinate function s.
  static ExpPolyFunc s_var() {
    ExpPolyFunc f;
    f.atoms_[0] = {Scalar(Rat(0)), Scalar(Rat(1))};
    return f;
  }

  /// poly(s) given by coefficients low-degree first.
  static ExpPolyFunc poly(std::vector<Scalar> coeffs) {
    ExpPolyFunc f;
    f.atoms_[0] = std::move(coeffs);
    f.normalize();
    return f;
  }

  /// q(s) * e^{m beta s}
  static ExpPolyFunc atom(int m, std::vector<Scalar> coeffs) {
    ExpPolyFunc f;
    f.atoms_[m] = std::move(coeffs);
    f.normalize();
    return f;
  }

  bool is_zero() const { return atoms_.empty(); }
  bool operator==(const ExpPolyFunc& o) const { return atoms_ == o.atoms_; }

  ExpPolyFunc operator+(const ExpPolyFunc& o) const {
    ExpPolyFunc r = *this;
    for (auto& [m, q] : o.atoms_) {
      auto& dst = r.atoms_[m];
      if (dst.size() < q.size()) dst.resize(q.size());
      for (size_t i = 0; i < q.size(); ++i) dst[i] += q[i];
    }
    r.normalize();
    return r;
  }
  ExpPolyFunc operator-() const {
    ExpPolyFunc r = *this;
    for (auto& [m, q] : r.atoms_)
      for (auto& a : q) a = -a;
    return r;
  }
  ExpPolyFunc operator-(const ExpPolyFunc& o) const { return *this + (-o); }
  ExpPolyFunc operator*(const ExpPolyFunc& o) const {
    ExpPolyFunc r;
    for (auto& [m1, q1] : atoms_)
      for (auto& [m2, q2] : o.atoms_) {
        auto& dst = r.atoms_[m1 + m2];
        if (dst.size() < q1.size() + q2.size() - 1)
          dst.resize(q1.size() + q2.size() - 1);
        for (size_t i = 0; i < q1.size(); ++i)
          for (size_t j = 0; j < q2.size(); ++j) dst[i + j] += q1[i] * q2[j];
      }
    r.normalize();
    return r;
  }
  ExpPolyFunc& operator+=(const ExpPolyFunc& o) { return *this = *this + o; }
  ExpPolyFunc& operator-=(const ExpPolyFunc& o) { return *this = *this - o; }
  ExpPolyFunc& operator*=(const ExpPolyFunc& o) { return *this = *this * o; }

  /// f(s) -> f(s + j) for integer j.
  ExpPolyFunc shift(int j) const {
    ExpPolyFunc r;
    for (auto& [m, q] : atoms_) {
      std::vector<Scalar> out(q.size());
      // (s+j)^n expanded binomially
      for (size_t n = 0; n < q.size(); ++n) {
        Rat jp = 1;  // j^(n-i)
        for (size_t i = n + 1; i-- > 0;) {
          out[i] += Rat(binomial((long)n, (long)i)) * jp * q[n];
          jp *= j;
        }
      }
      Scalar e = Scalar::e_beta(m * j);
      auto& dst = r.atoms_[m];
      if (dst.size() < out.size()) dst.resize(out.size());
      for (size_t i = 0; i < out.size(); ++i) dst[i] += e * out[i];
    }
    r.normalize();
    return r;
  }

  /// d/ds
  ExpPolyFunc deriv() const {
    ExpPolyFunc r;
    for (auto& [m, q] : atoms_) {
      std::vector<Scalar> out(q.size());  // one longer than needed is fine
      for (size_t n = 1; n < q.size(); ++n) out[n - 1] += Rat((long)n) * q[n];
      if (m != 0) {
        Scalar mb = Rat(m) * Scalar::beta();
        for (size_t n = 0; n < q.size(); ++n) out[n] += mb * q[n];
      }
      auto& dst = r.atoms_[m];
      if (dst.size() < out.size()) dst.resize(out.size());
      for (size_t i = 0; i < out.size(); ++i) dst[i] += out[i];
    }
    r.normalize();
    return r;
  }

  Real eval(const Rat& s, const NumericParams& p) const {
    Real total = 0, sr = to_real(s);
    for (auto& [m, q] : atoms_) {
      Real poly = 0, sp = 1;
      for (auto& a : q) {
        poly += a.eval(p) * sp;
        sp *= sr;
      }
      total += poly * exp(p.beta * m * sr);
    }
    return total;
  }

  std::string str() const {
    if (atoms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, q] : atoms_) {
      if (!first) os << " + ";
      first = false;
      os << "[";
      for (size_t n = 0; n < q.size(); ++n) {
        if (n) os << " + ";
        os << "(" << q[n].str() << ")";
        if (n == 1) os << "*s";
        if (n > 1) os << "*s^" << n;
      }
      os << "]";
      if (m != 0) os << "*e^{" << m << " beta s}";
    }
    return os.str();
  }

  const std::map<int, std::vector<Scalar>>& atoms() const { return atoms_; }

 private:
  void normalize() {
    for (auto it = atoms_.begin(); it != atoms_.end();) {
      auto& q = it->second;
      while (!q.empty() && q.back().is_zero()) q.pop_back();
      if (q.empty()) it = atoms_.erase(it);
      else ++it;
    }
  }

  std::map<int, std::vector<Scalar>> atoms_;
};

inline ExpPolyFunc operator*(const Scalar& a, const ExpPolyFunc& f) {
  return ExpPolyFunc(a) * f;
}

}  // namespace taulab
