#include <catch2/catch_amalgamated.hpp>

#include <taulab/multipoly.hpp>
#include <taulab/numbers.hpp>
#include <taulab/partition.hpp>
#include <taulab/schur.hpp>

#include "oracle_helpers.hpp"

using namespace taulab;

TEST_CASE("sparse polynomial arithmetic basics") {
  int m = 3;
  MultiPoly t1 = MultiPoly::var(m, 1), t2 = MultiPoly::var(m, 2);
  MultiPoly p = t1 * t1 - t2.scaled(Rat(2));
  CHECK(p.coeff({2, 0, 0}) == 1);
  CHECK(p.coeff({0, 1, 0}) == -2);
  CHECK(p.coeff({1, 1, 0}) == 0);
  CHECK(p.deriv(1) == t1.scaled(Rat(2)));
  CHECK((p - p).is_zero());
  CHECK(p.eval<Rat>({Rat(3), Rat(1), Rat(0)}) == 7);
  // weighted degree counts variable k with weight k
  CHECK((t1 * t2).weighted_degree() == 3);
  // serialization round-trip
  CHECK(MultiPoly::deserialize(p.serialize()) == p);
}

TEST_CASE("derivatives commute and match multi-index form") {
  int m = 3;
  MultiPoly t1 = MultiPoly::var(m, 1), t3 = MultiPoly::var(m, 3);
  MultiPoly p = t1 * t1 * t3 + t3.scaled(Rat(5, 2));
  CHECK(p.deriv(1).deriv(3) == p.deriv(3).deriv(1));
  CHECK(p.deriv_multi({2, 0, 0}) == t3.scaled(Rat(2)));
  CHECK(p.deriv_multi({2, 0, 1}).coeff({0, 0, 0}) == 2);
}

TEST_CASE("complete-homogeneous series in scaled power sums") {
  auto S = elementary_series(4, 4);
  int m = 4;
  MultiPoly t1 = MultiPoly::var(m, 1), t2 = MultiPoly::var(m, 2),
            t3 = MultiPoly::var(m, 3), t4 = MultiPoly::var(m, 4);
  CHECK(S[0] == MultiPoly::one(m));
  CHECK(S[1] == t1);
  CHECK(S[2] == t1 * t1.scaled(Rat(1, 2)) + t2);
  CHECK(S[3] == t1 * t1 * t1.scaled(Rat(1, 6)) + t1 * t2 + t3);
  MultiPoly s4 = t1 * t1 * t1 * t1.scaled(Rat(1, 24)) +
                 t1 * t1 * t2.scaled(Rat(1, 2)) + t2 * t2.scaled(Rat(1, 2)) +
                 t1 * t3 + t4;
  CHECK(S[4] == s4);
}

TEST_CASE("small determinant expansions in closed form") {
  int m = 3;
  MultiPoly t1 = MultiPoly::var(m, 1), t2 = MultiPoly::var(m, 2),
            t3 = MultiPoly::var(m, 3);
  CHECK(schur_poly(Partition{2}, m) == t1 * t1.scaled(Rat(1, 2)) + t2);
  CHECK(schur_poly(Partition{1, 1}, m) == t1 * t1.scaled(Rat(1, 2)) - t2);
  CHECK(schur_poly(Partition{2, 1}, m) == t1 * t1 * t1.scaled(Rat(1, 3)) - t3);
  CHECK(schur_poly(Partition{}, m) == MultiPoly::one(m));
  CHECK(schur_poly(Partition{1}, m) == t1);
}

TEST_CASE("determinant value is stable under extra padding rows") {
  for (int d = 1; d <= 5; ++d)
    for (const Partition& la : enumerate_partitions(d))
      CHECK(schur_poly_padded(la, d, 1) == schur_poly_padded(la, d, 3));
}

TEST_CASE("expansion over class types with character coefficients") {
  // s_lambda = sum_mu chi^lambda(mu)/z_mu * prod_i (mu_i t_{mu_i}),  exactly
  for (int d = 0; d <= 6; ++d)
    for (const Partition& la : enumerate_partitions(d)) {
      MultiPoly sum = MultiPoly::zero(d == 0 ? 1 : d);
      for (const auto& [mu, coeff] : schur_in_power_sums(la))
        sum += power_sum_monomial(mu, d == 0 ? 1 : d).scaled(coeff);
      CHECK(sum == schur_poly(la, d == 0 ? 1 : d));
    }
}

TEST_CASE("first-variable specialization value") {
  // setting t_1 = c and all higher t_k = 0 collapses to (dim/|la|!) c^|la|
  Rat c(3, 2);
  for (int d = 0; d <= 6; ++d)
    for (const Partition& la : enumerate_partitions(d)) {
      std::vector<Rat> tv(std::max(1, d), Rat(0));
      tv[0] = c;
      Rat direct = schur_poly(la, std::max(1, d)).eval<Rat>(tv);
      CHECK(direct == eval_special_c(la, c));
      CHECK(eval_special_c(la, c) ==
            Rat(la.dim()) / Rat(factorial(d)) * rat_pow(c, d));
    }
}

TEST_CASE("single geometric variable kills multi-row shapes") {
  // setting t_k = c^k/k gives c^d for one-row shapes and 0 otherwise
  Rat c(3, 2);
  for (int d = 1; d <= 6; ++d)
    for (const Partition& la : enumerate_partitions(d)) {
      std::vector<Rat> tv;
      for (int k = 1; k <= d; ++k) tv.push_back(rat_pow(c, k) / k);
      Rat direct = schur_poly(la, d).eval<Rat>(tv);
      CHECK(direct == (la.length() <= 1 ? rat_pow(c, d) : Rat(0)));
    }
}

TEST_CASE("weighted homogeneity: scaling t_k by a^k scales the polynomial by a^d") {
  Rat a(3, 2);
  for (int d = 1; d <= 5; ++d)
    for (const Partition& la : enumerate_partitions(d))
      CHECK(schur_poly(la, d).weighted_scale(a) ==
            schur_poly(la, d).scaled(rat_pow(a, d)));
}

TEST_CASE("dimension-weighted sum over shapes of fixed size collapses to a power") {
  // sum_{|la|=d} dim(la) * s_la = t_1^d / d! * d!... i.e. equals t_1^d
  for (int d = 0; d <= 6; ++d) {
    int m = std::max(1, d);
    MultiPoly sum = MultiPoly::zero(m);
    for (const Partition& la : enumerate_partitions(d))
      sum += schur_poly(la, m).scaled(Rat(la.dim()));
    MultiPoly t1d = MultiPoly::one(m);
    for (int i = 0; i < d; ++i) t1d *= MultiPoly::var(m, 1);
    CHECK(sum == t1d);
  }
}

TEST_CASE("substituting t_k -> t_k - z^-k/k expands into a finite tower") {
  // For p = t_1^2, the shift gives (t_1 - w)^2 = t_1^2 - 2w t_1 + w^2.
  int m = 2;
  MultiPoly t1 = MultiPoly::var(m, 1);
  auto tower = (t1 * t1).shift_by_inverse_powers();
  REQUIRE(tower.size() == 3);
  CHECK(tower[0] == t1 * t1);
  CHECK(tower[1] == t1.scaled(Rat(-2)));
  CHECK(tower[2] == MultiPoly::one(m));
  // For p = t_2, the shift inserts -1/2 at w^2.
  MultiPoly t2 = MultiPoly::var(m, 2);
  auto tower2 = t2.shift_by_inverse_powers();
  REQUIRE(tower2.size() == 3);
  CHECK(tower2[0] == t2);
  CHECK(tower2[1].is_zero());
  CHECK(tower2[2] == MultiPoly::one(m).scaled(Rat(-1, 2)));
}

TEST_CASE("shifted-variable tower reproduces direct substitution numerically") {
  // evaluate s_la(t - [1/z]) two ways at rational points
  Rat z(5, 2);
  std::vector<Rat> tv{Rat(1, 3), Rat(1, 7), Rat(2, 5)};
  for (const Partition& la :
       {Partition{2}, Partition{1, 1}, Partition{2, 1}, Partition{3}}) {
    MultiPoly p = schur_poly(la, 3);
    auto tower = p.shift_by_inverse_powers();
    Rat via_tower = 0;
    Rat zp = 1;
    for (size_t j = 0; j < tower.size(); ++j) {
      via_tower += tower[j].eval<Rat>(tv) / zp;
      zp *= z;
    }
    std::vector<Rat> shifted;
    for (int k = 1; k <= 3; ++k)
      shifted.push_back(tv[k - 1] - Rat(1) / (rat_pow(z, k) * k));
    CHECK(via_tower == p.eval<Rat>(shifted));
  }
}
