/// @file schur.hpp
/// @brief Schur polynomials of the time variables t_1..t_m: the complete
///        homogeneous series, Jacobi-Trudi determinants, the rank-one special
///        value, and the power-sum (character) expansion.
#pragma once

#include <taulab/cache.hpp>
#include <taulab/character.hpp>
#include <taulab/multipoly.hpp>
#include <taulab/numbers.hpp>
#include <taulab/partition.hpp>

#include <map>
#include <mutex>
#include <vector>

namespace taulab {

/// S_0..S_nmax with sum_n S_n z^n = exp(sum_{k<=m} t_k z^k).
/// Recurrence: n S_n = sum_{k=1..min(n,m)} k t_k S_{n-k}.
inline std::vector<MultiPoly> elementary_series(int nmax, int m) {
  if (nmax < 0 || m < 1) throw std::invalid_argument("elementary_series: bad arguments");
  std::vector<MultiPoly> S;
  S.reserve(nmax + 1);
  S.push_back(MultiPoly::one(m));
  for (int n = 1; n <= nmax; ++n) {
    MultiPoly acc(m);
    for (int k = 1; k <= std::min(n, m); ++k)
      acc += (MultiPoly::var(m, k) * S[n - k]).scaled(Rat(k, n));
    S.push_back(std::move(acc));
  }
  return S;
}

namespace detail {

/// Determinant of a square polynomial matrix by Laplace expansion along the
/// last row of each leading-rows submatrix, memoized on the column subset.
inline MultiPoly poly_det(const std::vector<std::vector<MultiPoly>>& M, int m) {
  int N = (int)M.size();
  if (N == 0) return MultiPoly::one(m);
  std::vector<MultiPoly> memo(1u << N, MultiPoly(m));
  memo[0] = MultiPoly::one(m);
  // process masks in increasing popcount order
  std::vector<std::vector<unsigned>> by_pop(N + 1);
  for (unsigned mask = 1; mask < (1u << N); ++mask)
    by_pop[__builtin_popcount(mask)].push_back(mask);
  for (int k = 1; k <= N; ++k) {
    for (unsigned mask : by_pop[k]) {
      MultiPoly det(m);
      int pos = 0;
      for (int c = 0; c < N; ++c) {
        if (!(mask & (1u << c))) continue;
        const MultiPoly& entry = M[k - 1][c];
        if (!entry.is_zero()) {
          MultiPoly sub = entry * memo[mask & ~(1u << c)];
          if ((k - 1 + pos) % 2 == 0)
            det += sub;
          else
            det -= sub;
        }
        ++pos;
      }
      memo[mask] = std::move(det);
    }
  }
  return memo[(1u << N) - 1];
}

}  // namespace detail

/// Jacobi-Trudi determinant with an explicitly padded size N = length + pad.
/// The result is independent of pad (stability of the determinant).
inline MultiPoly schur_poly_padded(const Partition& la, int m, int pad) {
  int N = la.length() + pad;
  if (N == 0) return MultiPoly::one(m);
  auto S = elementary_series(la.part(0) + N, m);
  std::vector<std::vector<MultiPoly>> M(N, std::vector<MultiPoly>(N, MultiPoly(m)));
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) {
      int a = la.part(i - 1) - i + j;
      if (a >= 0) M[i - 1][j - 1] = S[a];
    }
  return detail::poly_det(M, m);
}

/// S_lambda(t_1..t_m), memoized per (lambda, m) and persisted via the disk cache.
inline MultiPoly schur_poly(const Partition& la, int m) {
  static std::map<std::pair<std::vector<int>, int>, MultiPoly> memo;
  static std::mutex lock;
  std::lock_guard<std::mutex> lk(lock);
  auto key = std::make_pair(la.parts(), m);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  if (DiskCache* dc = disk_cache()) {
    std::string ck = "schur|" + la.str() + "|" + std::to_string(m);
    if (auto hit = dc->get(ck)) {
      MultiPoly p = MultiPoly::deserialize(*hit);
      memo.emplace(key, p);
      return p;
    }
    MultiPoly p = schur_poly_padded(la, m, 0);
    memo.emplace(key, p);
    dc->put(ck, p.serialize());
    return p;
  }

  MultiPoly p = schur_poly_padded(la, m, 0);
  memo.emplace(key, p);
  return p;
}

/// S_lambda(c, 0, 0, ...) = (dim lambda / |lambda|!) c^{|lambda|}, exactly.
inline Rat eval_special_c(const Partition& la, const Rat& c) {
  return Rat(la.dim()) / Rat(factorial(la.size())) * rat_pow(c, la.size());
}

/// Coefficients of the power-sum expansion: S_lambda = sum_mu (chi^lambda(mu)/z_mu) p_mu
/// with p_k = k t_k.
inline std::map<Partition, Rat> schur_in_power_sums(const Partition& la) {
  std::map<Partition, Rat> out;
  for (const Partition& mu : enumerate_partitions(la.size())) {
    Rat c = Rat(mn_character(la, mu)) / Rat(z_centralizer(mu));
    if (c != 0) out.emplace(mu, c);
  }
  return out;
}

/// The monomial prod_i mu_i t_{mu_i} (the power-sum product p_mu in the t variables).
inline MultiPoly power_sum_monomial(const Partition& mu, int m) {
  MultiPoly p = MultiPoly::one(m);
  for (int part : mu.parts()) p *= MultiPoly::var(m, part).scaled(part);
  return p;
}

}  // namespace taulab
