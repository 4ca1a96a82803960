/// @file partition.hpp
/// @brief Integer partitions: enumeration, conjugation, hook lengths,
///        irreducible dimensions, centralizer orders, permutation parity.
#pragma once

#include <taulab/numbers.hpp>

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace taulab {

/// Weakly decreasing positive parts. The empty partition is allowed.
class Partition {
 public:
  Partition() = default;
  Partition(std::initializer_list<int> ps) : parts_(ps) { validate(); }
  explicit Partition(std::vector<int> ps) : parts_(std::move(ps)) {
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    validate();
  }

  const std::vector<int>& parts() const { return parts_; }
  int length() const { return (int)parts_.size(); }
  bool empty() const { return parts_.empty(); }
  int part(int i) const { return i < length() ? parts_[i] : 0; }  // 0-based

  /// |lambda|
  int size() const {
    int s = 0;
    for (int p : parts_) s += p;
    return s;
  }

  /// kappa(lambda) = sum_i lambda_i (lambda_i - 2i + 1), i starting at 1.
  /// Always even; antisymmetric under conjugation.
  long kappa() const {
    long k = 0;
    for (int i = 0; i < length(); ++i) k += (long)parts_[i] * (parts_[i] - 2 * (i + 1) + 1);
    return k;
  }

  Partition conjugate() const {
    std::vector<int> c;
    for (int j = 1; !parts_.empty() && j <= parts_[0]; ++j) {
      int cnt = 0;
      for (int p : parts_)
        if (p >= j) ++cnt;
      c.push_back(cnt);
    }
    return Partition(std::move(c));
  }

  /// Hook length of each cell, row-major.
  std::vector<std::vector<int>> hooks() const {
    Partition conj = conjugate();
    std::vector<std::vector<int>> h(length());
    for (int i = 0; i < length(); ++i) {
      h[i].resize(parts_[i]);
      for (int j = 0; j < parts_[i]; ++j)
        h[i][j] = (parts_[i] - (j + 1)) + (conj.parts_[j] - (i + 1)) + 1;
    }
    return h;
  }

  /// Dimension of the irreducible S_|lambda| representation (hook-length formula).
  Int dim() const {
    Int num = factorial(size());
    for (auto& row : hooks())
      for (int h : row) num /= h;
    return num;
  }

  /// Multiplicity of part value k.
  int multiplicity(int k) const { return (int)std::count(parts_.begin(), parts_.end(), k); }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < length(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Partition& a, const Partition& b) = default;
  friend std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
    return a.parts_ <=> b.parts_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Partition& p) {
    return os << p.str();
  }

 private:
  void validate() const {
    for (int i = 0; i < length(); ++i) {
      if (parts_[i] <= 0) throw std::invalid_argument("Partition: parts must be positive");
      if (i && parts_[i] > parts_[i - 1])
        throw std::invalid_argument("Partition: parts must be weakly decreasing");
    }
  }

  std::vector<int> parts_;
};

namespace detail {
inline void enumerate_rec(int d, int maxp, std::vector<int>& cur,
                          std::vector<Partition>& out) {
  if (d == 0) {
    out.emplace_back(cur);
    return;
  }
  for (int p = std::min(d, maxp); p >= 1; --p) {
    cur.push_back(p);
    enumerate_rec(d - p, p, cur, out);
    cur.pop_back();
  }
}
}  // namespace detail

/// All partitions of d in reverse-lexicographic order: (d), (d-1,1), ..., (1^d).
/// This order is canonical: evaluation order and cache keys depend on it.
inline std::vector<Partition> enumerate_partitions(int d) {
  if (d < 0) throw std::domain_error("enumerate_partitions: negative size");
  std::vector<Partition> out;
  std::vector<int> cur;
  detail::enumerate_rec(d, d, cur, out);
  return out;
}

/// Partitions of 0..dmax, each block in reverse-lex order.
inline std::vector<Partition> enumerate_partitions_upto(int dmax) {
  std::vector<Partition> out;
  for (int d = 0; d <= dmax; ++d) {
    auto block = enumerate_partitions(d);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

inline long partition_count(int d) { return (long)enumerate_partitions(d).size(); }

/// Centralizer order z_mu = prod_k k^{m_k} m_k! of the conjugacy class of
/// cycle type mu in S_|mu|.
inline Int z_centralizer(const Partition& mu) {
  Int z = 1;
  int prev = -1, run = 0;
  auto flush = [&](int val, int count) {
    if (count == 0) return;
    z *= int_pow(Int(val), count) * factorial(count);
  };
  for (int p : mu.parts()) {
    if (p == prev) {
      ++run;
    } else {
      flush(prev, run);
      prev = p;
      run = 1;
    }
  }
  flush(prev, run);
  return z;
}

/// Conjugacy class size |C_mu| = |mu|! / z_mu.
inline Int class_size(const Partition& mu) { return factorial(mu.size()) / z_centralizer(mu); }

/// Sign of any permutation of cycle type mu: (-1)^{|mu| - length(mu)}.
inline int cycle_type_sign(const Partition& mu) {
  return (mu.size() - mu.length()) % 2 == 0 ? 1 : -1;
}

}  // namespace taulab
