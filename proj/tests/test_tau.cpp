#include <catch2/catch_amalgamated.hpp>

#include <taulab/numbers.hpp>
#include <taulab/tau.hpp>

#include "oracle_helpers.hpp"

using namespace taulab;

namespace {
struct PrecisionInit {
  PrecisionInit() { set_precision(50); }
} const precision_init;

const std::vector<Rat> sample_s{Rat(-2), Rat(-1), Rat(0), Rat(1, 3), Rat(1), Rat(2)};

Real closed_prefactor(const TauSpec& sp, const Rat& s) {
  Real sr = to_real(s), b = to_real(sp.beta), lq = log(to_real(sp.Q));
  return exp(b * (4 * sr * sr * sr - sr) / 24 + lq * sr * (sr + 1) / 2);
}
}  // namespace

TEST_CASE("all t zero: only the empty shape survives") {
  TauSpec sp = TauSpec::defaults(6);
  for (auto& x : sp.t) x = 0;
  TauFunction tau(sp);
  for (const Rat& s : sample_s) {
    CHECK(abs(tau.eval_Ztilde(s).value - 1) < pow(Real(10), -45));
    CHECK(abs(tau.eval_Z(s).value - closed_prefactor(sp, s)) <
          pow(Real(10), -45) * closed_prefactor(sp, s));
  }
}

TEST_CASE("tbar1 zero: the reduced sum is identically 1 with zero tail") {
  TauSpec sp = TauSpec::defaults(6);
  sp.tbar1 = 0;
  TauFunction tau(sp);
  TauValue v = tau.eval_Ztilde(Rat(1, 3));
  CHECK(v.value == 1);
  CHECK(v.tail_bound == 0);
  CHECK(tau.eval_Ztilde(Rat(1, 3), {1, {}, 0}).value == 0);
}

TEST_CASE("first t1-derivative at t = 0 matches the one-box closed form") {
  TauSpec sp = TauSpec::defaults(6);
  for (auto& x : sp.t) x = 0;
  TauFunction tau(sp);
  for (const Rat& s : sample_s) {
    Real expect = -to_real(sp.Q) * exp(to_real(sp.beta) * to_real(s)) * to_real(sp.tbar1);
    CHECK(abs(tau.eval_Ztilde(s, {0, {1}, 0}).value - expect) < pow(Real(10), -45));
  }
}

TEST_CASE("mixed t1/tbar1 derivative at the origin matches the one-box closed form") {
  TauSpec sp = TauSpec::defaults(6);
  for (auto& x : sp.t) x = 0;
  sp.tbar1 = 0;
  TauFunction tau(sp);
  for (const Rat& s : sample_s) {
    Real expect = -to_real(sp.Q) * exp(to_real(sp.beta) * to_real(s));
    CHECK(abs(tau.eval_Ztilde(s, {0, {1}, 1}).value - expect) < pow(Real(10), -45));
  }
}

TEST_CASE("at s = 0 the prefactor is 1") {
  TauFunction tau(TauSpec::defaults(6));
  CHECK(abs(tau.eval_Z(Rat(0)).value - tau.eval_Ztilde(Rat(0)).value) <
        pow(Real(10), -45));
}

TEST_CASE("two assembly routes agree to working precision, including derivatives") {
  TauFunction tau(TauSpec::defaults(6));
  SFunc a = tau.Z();
  SFunc b = tau.Z_onepiece();
  for (const Rat& s : sample_s)
    for (int n = 0; n <= 2; ++n) {
      Real va = a.eval(s, n), vb = b.eval(s, n);
      Real scale = abs(va) > 1 ? abs(va) : Real(1);
      CHECK(abs(va - vb) < pow(Real(10), -40) * scale);
    }
  SFunc at = tau.Z({1}, 1);
  SFunc bt = tau.Z_onepiece({1}, 1);
  for (const Rat& s : sample_s)
    CHECK(abs(at.eval(s, 0) - bt.eval(s, 0)) < pow(Real(10), -40));
}

TEST_CASE("explicit tbar vector reproduces the single-sector closed form") {
  TauSpec sp = TauSpec::defaults(6);
  TauSpec spd = sp;
  spd.tbar = {sp.tbar1};  // same point, forced through the generic route
  TauFunction single(sp), dbl(spd);
  for (const Rat& s : sample_s) {
    CHECK(abs(single.eval_Ztilde(s).value - dbl.eval_Ztilde(s).value) <
          pow(Real(10), -40));
    CHECK(abs(single.eval_Ztilde(s, {0, {}, 1}).value -
              dbl.eval_Ztilde(s, {0, {}, 1}).value) < pow(Real(10), -40));
    CHECK(abs(single.eval_Ztilde(s, {0, {1, 1}, 2}).value -
              dbl.eval_Ztilde(s, {0, {1, 1}, 2}).value) < pow(Real(10), -40));
  }
}

TEST_CASE("linear flow identity holds symbolically and numerically") {
  CheckResult r = check_linear_flow(TauSpec::defaults(6), sample_s);
  INFO(r.detail);
  CHECK(r.pass);
  CHECK_FALSE(r.inconclusive);
  CHECK(r.max_err < pow(Real(10), -30));  // frozen sample-point bound
  // degenerate spec: D = 0 is constant in both variables
  TauSpec sp0 = TauSpec::defaults(0);
  CheckResult r0 = check_linear_flow(sp0, sample_s);
  CHECK(r0.pass);
  CHECK(r0.max_err == 0);
}

TEST_CASE("successive truncations differ by less than the tail bound") {
  TauFunction t8(TauSpec::defaults(8));
  TauFunction t10(TauSpec::defaults(10));
  TauFunction t12(TauSpec::defaults(12));
  for (const Rat& s : sample_s) {
    Real v8 = t8.eval_Ztilde(s).value;
    Real v10 = t10.eval_Ztilde(s).value;
    // D=12 lies outside the majorant's certifiable region; evaluate the raw
    // truncation without requesting a tail certificate.
    Real v12 = t12.Ztilde().eval(s, 0);
    Real bound8 = t8.tail(s).bound;
    CHECK(abs(v8 - v10) <= bound8);
    CHECK(abs(v8 - v12) <= bound8 + t10.tail(s).bound);
    CHECK(abs(v10 - v12) <= t10.tail(s).bound);
  }
}

TEST_CASE("range-wide tail bound at the default point is below 1e-6 and shrinks") {
  TauFunction t8(TauSpec::defaults(8));
  TauFunction t10(TauSpec::defaults(10));
  CHECK(t8.tail_range().bound < pow(Real(10), -6));
  CHECK(t10.tail_range().bound < t8.tail_range().bound);
}

TEST_CASE("tail majorant rejects parameters outside its certifiable region") {
  TauSpec sp = TauSpec::defaults(8);
  sp.tbar1 = 4;  // passes the <1 precondition but the block ratio exceeds 1
  sp.validate();
  TauFunction tau(sp);
  CHECK_THROWS_AS(tau.tail_range(), DivergentTailError);
  CheckResult r = check_linear_flow(sp, sample_s);
  CHECK(r.inconclusive);
  CHECK_FALSE(r.pass);
}

TEST_CASE("specification validation rejects bad parameters") {
  auto bad = [](auto mutate) {
    TauSpec sp = TauSpec::defaults(4);
    mutate(sp);
    return sp;
  };
  CHECK_THROWS_AS(TauFunction(bad([](TauSpec& s) { s.tbar1 = 100; })),
                  std::invalid_argument);
  CHECK_THROWS_AS(TauFunction(bad([](TauSpec& s) { s.P = 20; })), std::invalid_argument);
  CHECK_THROWS_AS(TauFunction(bad([](TauSpec& s) { s.t.resize(2); s.D = 6; })),
                  std::invalid_argument);
  CHECK_THROWS_AS(TauFunction(bad([](TauSpec& s) { s.Q = 0; })), std::invalid_argument);
  CHECK_THROWS_AS(TauFunction(bad([](TauSpec& s) { s.D = -1; })), std::invalid_argument);
  CHECK_THROWS_AS(TauFunction(bad([](TauSpec& s) { s.s_min = 3; })),
                  std::invalid_argument);
}

TEST_CASE("a tolerance tighter than the tail bound is refused") {
  TauFunction tau(TauSpec::defaults(4));
  CHECK_THROWS_AS(tau.eval_Ztilde(Rat(1), {}, Real(pow(Real(10), -30))),
                  PrecisionExhaustedError);
  CHECK_NOTHROW(tau.eval_Ztilde(Rat(1), {}, Real(1)));
}

TEST_CASE("integer lattice points: exact bookkeeping matches float evaluation") {
  TauSpec sp = TauSpec::defaults(6);
  sp.s_min = -2;
  sp.s_max = 3;
  TauFunction tau(sp);
  for (long s0 : {-2L, 0L, 1L, 3L}) {
    auto series = ztilde_exact_wseries(sp, s0);
    Real exact = eval_wseries(series, sp.beta);
    Real leaf = tau.eval_Ztilde(Rat(s0)).value;
    Real scale = abs(exact) > 1 ? abs(exact) : Real(1);
    CHECK(abs(exact - leaf) < pow(Real(10), -40) * scale);
  }
}

TEST_CASE("analytic derivatives match central finite differences") {
  const Rat h(1, Int("10000000000"));  // 1e-10, exact
  const Real tol_abs = pow(Real(10), -15);
  TauSpec sp = TauSpec::defaults(5);
  TauFunction tau(sp);
  const Rat s0(1, 3);

  SECTION("in s, first and second order") {
    Real f = tau.eval_Z(s0).value;
    Real fp = tau.eval_Z(s0 + h).value, fm = tau.eval_Z(s0 - h).value;
    CHECK(abs(tau.eval_Z(s0, {1, {}, 0}).value - (fp - fm) / (2 * to_real(h))) <
          tol_abs);
    CHECK(abs(tau.eval_Z(s0, {2, {}, 0}).value -
              (fp - 2 * f + fm) / (to_real(h) * to_real(h))) < tol_abs);
  }

  SECTION("in t1, first and second order; in t2, first order") {
    auto at_t = [&](int k, const Rat& delta) {
      TauSpec p = sp;
      p.t[k - 1] += delta;
      return TauFunction(p).eval_Ztilde(s0).value;
    };
    Real f = tau.eval_Ztilde(s0).value;
    Real fp1 = at_t(1, h), fm1 = at_t(1, -h);
    CHECK(abs(tau.eval_Ztilde(s0, {0, {1}, 0}).value -
              (fp1 - fm1) / (2 * to_real(h))) < tol_abs);
    CHECK(abs(tau.eval_Ztilde(s0, {0, {2}, 0}).value -
              (fp1 - 2 * f + fm1) / (to_real(h) * to_real(h))) < tol_abs);
    Real fp2 = at_t(2, h), fm2 = at_t(2, -h);
    CHECK(abs(tau.eval_Ztilde(s0, {0, {0, 1}, 0}).value -
              (fp2 - fm2) / (2 * to_real(h))) < tol_abs);
  }

  SECTION("in tbar1, first and second order") {
    auto at_b = [&](const Rat& delta) {
      TauSpec p = sp;
      p.tbar1 += delta;
      return TauFunction(p).eval_Ztilde(s0).value;
    };
    Real f = tau.eval_Ztilde(s0).value;
    Real fp = at_b(h), fm = at_b(-h);
    CHECK(abs(tau.eval_Ztilde(s0, {0, {}, 1}).value - (fp - fm) / (2 * to_real(h))) <
          tol_abs);
    CHECK(abs(tau.eval_Ztilde(s0, {0, {}, 2}).value -
              (fp - 2 * f + fm) / (to_real(h) * to_real(h))) < tol_abs);
  }

  SECTION("mixed s and t1") {
    SFunc g = tau.Ztilde({1}, 0);
    auto at_t1 = [&](const Rat& delta) {
      TauSpec p = sp;
      p.t[0] += delta;
      return TauFunction(p).eval_Ztilde(s0, {1, {}, 0}).value;  // d/ds then FD in t1
    };
    CHECK(abs(g.eval(s0, 1) - (at_t1(h) - at_t1(-h)) / (2 * to_real(h))) < tol_abs);
  }
}

TEST_CASE("shifted-argument tower: degree-0 slice is the unshifted sum") {
  TauFunction tau(TauSpec::defaults(5));
  for (const Rat& s : {Rat(0), Rat(1, 3)}) {
    CHECK(abs(tau.shifted_tower(0).eval(s, 0) - tau.Ztilde().eval(s, 0)) <
          pow(Real(10), -45));
  }
}

TEST_CASE("shifted-argument tower sums back to a directly shifted evaluation") {
  // Ztilde(s, t - [1/z]) == sum_n z^{-n} * tower_n(s), summed exactly over the
  // finite tower, for a concrete z. The direct side substitutes shifted
  // rational t-values into a fresh spec.
  TauSpec sp = TauSpec::defaults(5);
  const Rat z(7, 2);
  TauSpec shifted = sp;
  for (int k = 1; k <= sp.m(); ++k)
    shifted.t[k - 1] = sp.t[k - 1] - Rat(1) / (rat_pow(z, k) * k);
  TauFunction tau(sp), tau_shifted(shifted);
  for (const Rat& s : {Rat(-1), Rat(1, 3), Rat(1)}) {
    Real direct = tau_shifted.eval_Ztilde(s).value;
    Real via_tower = 0;
    for (int n = 0; n <= sp.D; ++n)
      via_tower += tau.shifted_tower(n).eval(s, 0) * real_pow(to_real(z), -(long)n);
    CHECK(abs(direct - via_tower) < pow(Real(10), -40));
  }
}

TEST_CASE("tail bound is zero when tbar1 vanishes and positive otherwise") {
  TauSpec sp = TauSpec::defaults(6);
  sp.tbar1 = 0;
  CHECK(TauFunction(sp).tail(Rat(1)).bound == 0);
  CHECK(TauFunction(TauSpec::defaults(6)).tail(Rat(1)).bound > 0);
}
