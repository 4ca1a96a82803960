/// @file hurwitz.hpp
/// @brief Disconnected-count branched-cover numbers for the sphere, by two
///        independent routes: brute-force monodromy enumeration in S_d and
///        the character-sum formula. Also the transposition-power coefficient
///        extracted from the generating function.
#pragma once

#include <taulab/character.hpp>
#include <taulab/numbers.hpp>
#include <taulab/partition.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

namespace taulab {

using Perm = std::vector<int>;  // images of 0..d-1

inline Perm perm_identity(int d) {
  Perm p(d);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline Perm perm_compose(const Perm& a, const Perm& b) {  // (a*b)(x) = a(b(x))
  Perm r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[b[i]];
  return r;
}

inline Perm perm_inverse(const Perm& a) {
  Perm r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[a[i]] = (int)i;
  return r;
}

inline Partition cycle_type(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  std::vector<int> lens;
  for (size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = p[j];
      ++len;
    }
    lens.push_back(len);
  }
  std::sort(lens.begin(), lens.end(), std::greater<int>());
  return Partition(std::move(lens));
}

/// All elements of S_d with cycle type mu (enumeration; intended for small d).
inline std::vector<Perm> conjugacy_class(int d, const Partition& mu) {
  if (mu.size() != d) throw std::invalid_argument("conjugacy_class: |mu| != d");
  std::vector<Perm> out;
  Perm p = perm_identity(d);
  if (d == 0) {
    out.push_back(p);
    return out;
  }
  do {
    if (cycle_type(p) == mu) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// A ramification profile: an ordered list of partitions of a common d.
using Profile = std::vector<Partition>;

inline void check_profile(int d, const Profile& profile) {
  for (const Partition& mu : profile)
    if (mu.size() != d)
      throw std::invalid_argument("profile part has wrong size: " + mu.str());
}

/// Brute force: (1/d!) * #{(sigma_1..sigma_r) : type(sigma_j) = mu^(j),
/// sigma_1 ... sigma_r = id}. The r-1 smallest classes are enumerated and the
/// last factor is solved for; its type is checked against the largest class.
inline Rat hurwitz_bruteforce(int d, Profile profile) {
  check_profile(d, profile);
  if (profile.empty())
    return d == 0 ? Rat(1) : Rat(0);  // empty product must be id; one empty cover
  // put the largest class last, solve for it
  std::stable_sort(profile.begin(), profile.end(), [](const Partition& a, const Partition& b) {
    return class_size(a) < class_size(b);
  });
  const Partition target = profile.back();
  profile.pop_back();
  std::vector<std::vector<Perm>> classes;
  for (const Partition& mu : profile) classes.push_back(conjugacy_class(d, mu));

  long long count = 0;
  std::vector<size_t> idx(classes.size(), 0);
  while (true) {
    Perm prod = perm_identity(d);
    for (size_t i = 0; i < classes.size(); ++i) prod = perm_compose(prod, classes[i][idx[i]]);
    if (cycle_type(perm_inverse(prod)) == target) ++count;
    // odometer
    size_t k = 0;
    while (k < idx.size()) {
      if (++idx[k] < classes[k].size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == idx.size()) break;  // also exits the classes-empty case after one pass
  }
  return Rat(count) / Rat(factorial(d));
}

/// Character-sum formula:
/// H_d(mu^(1)..mu^(r)) = (prod_i |C_i| / (d!)^2) * sum_lambda prod_i chi^lambda(mu^(i))
///                       / (dim lambda)^{r-2}.
inline Rat hurwitz_frobenius(int d, const Profile& profile) {
  check_profile(d, profile);
  if (profile.empty()) return d == 0 ? Rat(1) : Rat(0);
  int r = (int)profile.size();
  Rat front = 1;
  for (const Partition& mu : profile) front *= Rat(class_size(mu));
  front /= Rat(factorial(d)) * Rat(factorial(d));
  Rat sum = 0;
  for (const Partition& la : enumerate_partitions(d)) {
    Rat term = 1;
    for (const Partition& mu : profile) term *= Rat(mn_character(la, mu));
    if (term == 0) continue;
    sum += term / rat_pow(Rat(la.dim()), r - 2);
  }
  return front * sum;
}

/// The profile (mu, mubar, simple, simple, ... r times) with simple = (2,1^{d-2}).
inline Profile transposition_profile(int d, int r, const Partition& mu, const Partition& mubar) {
  if (r > 0 && d < 2)
    throw std::invalid_argument("transposition profile needs d >= 2 when r >= 1");
  Profile p{mu, mubar};
  std::vector<int> simple{2};
  for (int i = 0; i < d - 2; ++i) simple.push_back(1);
  for (int i = 0; i < r; ++i) p.emplace_back(simple);
  return p;
}

/// Coefficient extracted from the Schur generating function:
/// sum_{|lambda|=d} (kappa(lambda)/2)^r chi^lambda(mu) chi^lambda(mubar) / (z_mu z_mubar).
/// Equals the branched-cover count with r extra simple branch points.
inline Rat double_hurwitz_coeff(int d, int r, const Partition& mu, const Partition& mubar) {
  if (mu.size() != d || mubar.size() != d)
    throw std::invalid_argument("double_hurwitz_coeff: |mu| != d");
  if (r < 0) throw std::invalid_argument("double_hurwitz_coeff: r < 0");
  if (r >= 1 && d < 2)
    throw std::invalid_argument("double_hurwitz_coeff: r >= 1 requires d >= 2");
  Rat sum = 0;
  for (const Partition& la : enumerate_partitions(d)) {
    Rat chi2 = Rat(mn_character(la, mu)) * Rat(mn_character(la, mubar));
    if (chi2 == 0) continue;
    Rat k2 = Rat(la.kappa(), 2);
    Rat kpow = (r == 0) ? Rat(1) : rat_pow(k2, r);  // 0^0 = 1 for the empty product
    sum += kpow * chi2;
  }
  return sum / (Rat(z_centralizer(mu)) * Rat(z_centralizer(mubar)));
}

/// Total parity of a profile: the product of the signs of its classes.
/// Counts with odd total parity vanish identically.
inline int profile_parity(const Profile& profile) {
  int s = 1;
  for (const Partition& mu : profile) s *= cycle_type_sign(mu);
  return s;
}

}  // namespace taulab
