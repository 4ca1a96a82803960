/// @file character.hpp
/// @brief Irreducible symmetric-group characters chi^lambda(mu) by the
///        border-strip (Murnaghan-Nakayama) recursion, memoized in-process
///        and optionally persisted through the disk cache.
#pragma once

#include <taulab/cache.hpp>
#include <taulab/numbers.hpp>
#include <taulab/partition.hpp>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace taulab {

namespace detail {

/// First-column hook lengths ("beta set") b_i = lambda_i + (L - i), 1-based i,
/// strictly decreasing. Strip removal of length r: replace some b by b - r >= 0
/// not already present; the sign is (-1)^{#elements strictly between b-r and b}.
inline std::vector<int> beta_set(const Partition& la) {
  int L = la.length();
  std::vector<int> b(L);
  for (int i = 0; i < L; ++i) b[i] = la.parts()[i] + (L - 1 - i);
  return b;
}

inline Partition from_beta(std::vector<int> b) {
  std::sort(b.begin(), b.end(), std::greater<int>());
  int L = (int)b.size();
  std::vector<int> parts;
  for (int i = 0; i < L; ++i) {
    int p = b[i] - (L - 1 - i);
    if (p > 0) parts.push_back(p);
  }
  return Partition(std::move(parts));
}

inline Int mn_rec(const Partition& la, const std::vector<int>& mu, size_t mi,
                  std::map<std::pair<std::vector<int>, std::vector<int>>, Int>& memo);

inline Int mn_eval(const Partition& la, std::vector<int> mu_rest,
                   std::map<std::pair<std::vector<int>, std::vector<int>>, Int>& memo) {
  if (mu_rest.empty()) return la.empty() ? Int(1) : Int(0);
  auto key = std::make_pair(la.parts(), mu_rest);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  int r = mu_rest.front();
  std::vector<int> rest(mu_rest.begin() + 1, mu_rest.end());
  auto b = beta_set(la);
  Int total = 0;
  for (size_t i = 0; i < b.size(); ++i) {
    int nb = b[i] - r;
    if (nb < 0) continue;
    bool taken = false;
    int between = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (j == i) continue;
      if (b[j] == nb) { taken = true; break; }
      if (b[j] > nb && b[j] < b[i]) ++between;
    }
    if (taken) continue;
    auto b2 = b;
    b2[i] = nb;
    Int sub = mn_eval(from_beta(std::move(b2)), rest, memo);
    total += (between % 2 == 0) ? sub : -sub;
  }
  memo.emplace(std::move(key), total);
  return total;
}

}  // namespace detail

/// chi^lambda(mu) for |lambda| == |mu|. Parts of mu are consumed largest-first.
inline Int mn_character(const Partition& la, const Partition& mu) {
  if (la.size() != mu.size())
    throw std::invalid_argument("mn_character: |lambda| != |mu|");

  static std::map<std::pair<std::vector<int>, std::vector<int>>, Int> memo;
  static std::mutex mu_lock;
  std::lock_guard<std::mutex> lk(mu_lock);

  auto key = std::make_pair(la.parts(), mu.parts());
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  if (DiskCache* dc = disk_cache()) {
    std::string ck = "mn|" + la.str() + "|" + mu.str();
    if (auto hit = dc->get(ck)) {
      Int v(hit->c_str());
      memo.emplace(key, v);
      return v;
    }
    Int v = detail::mn_eval(la, mu.parts(), memo);
    memo[key] = v;
    dc->put(ck, v.str());
    return v;
  }

  Int v = detail::mn_eval(la, mu.parts(), memo);
  memo[key] = v;
  return v;
}

}  // namespace taulab
