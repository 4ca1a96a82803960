#include <catch2/catch_amalgamated.hpp>

#include <taulab/dressing.hpp>
#include <taulab/numbers.hpp>

#include <string>

using namespace taulab;

namespace {
struct PrecisionInit {
  PrecisionInit() { set_precision(50); }
} const precision_init;

BAPoint default_point(int D = 8, Rat z = Rat(2)) {
  BAPoint p;
  p.spec = TauSpec::defaults(D);
  p.z = z;
  return p;
}

BAPoint initial_point() {
  BAPoint p = default_point();
  for (auto& x : p.spec.t) x = 0;
  return p;
}

// shared across test cases; construction (tau towers, operator algebra)
// is the expensive part
Dressing& dr2() {
  static Dressing d(default_point());
  return d;
}
Dressing& dr4() {
  static Dressing d(default_point(8, Rat(4)));
  return d;
}
Dressing& dr2_10() {
  static Dressing d(default_point(10));
  return d;
}
Dressing& dr4_10() {
  static Dressing d(default_point(10, Rat(4)));
  return d;
}
Dressing& dr_t0() {
  static Dressing d(initial_point());
  return d;
}

bool mentions(const CheckResult& r, const std::string& needle) {
  return r.detail.find(needle) != std::string::npos;
}
}  // namespace

TEST_CASE("sample-point validation rejects bad inputs") {
  CHECK_THROWS_AS(Dressing([] {
                    BAPoint p = default_point();
                    p.z = 0;
                    return p;
                  }()),
                  std::domain_error);
  CHECK_THROWS_AS(Dressing([] {
                    BAPoint p = default_point();
                    p.z = -2;
                    return p;
                  }()),
                  std::domain_error);
  CHECK_THROWS_AS(Dressing([] {
                    BAPoint p = default_point();
                    p.N_exp = 0;
                    return p;
                  }()),
                  std::invalid_argument);
  CHECK_THROWS_AS(Dressing([] {
                    BAPoint p = default_point();
                    p.N_exp = 26;
                    return p;
                  }()),
                  std::invalid_argument);
  CHECK_THROWS_AS(Dressing([] {
                    BAPoint p = default_point();
                    p.N = 2;
                    return p;
                  }()),
                  std::invalid_argument);
  CHECK_THROWS_AS(Dressing([] {
                    BAPoint p = default_point();
                    p.s_grid.clear();
                    return p;
                  }()),
                  std::invalid_argument);
}

TEST_CASE("wave coefficient series terminates exactly at the truncation degree") {
  const Dressing& d = dr2();
  const Real tiny = pow(Real(10), -40);
  for (const Rat& s : {Rat(1, 3), Rat(1)}) {
    Real direct = d.psi_ratio().eval(s, 0);
    Real series = 0;
    for (int n = 0; n <= d.point().spec.D; ++n)
      series += d.w_sfunc(n).eval(s, 0) * real_pow(to_real(d.point().z), -n);
    CHECK(abs(direct - series) < tiny);
  }
  // the degree-0 coefficient is identically 1
  CHECK(abs(d.w_sfunc(0).eval(Rat(1, 3), 0) - 1) < pow(Real(10), -45));
  CHECK_THROWS_AS(d.w_coeffs(0, Rat(1)), std::invalid_argument);
  CHECK_THROWS_AS(d.w_coeffs(9, Rat(1)), std::invalid_argument);
}

TEST_CASE("first wave coefficient at the initial point matches its closed form") {
  const Dressing& d = dr_t0();
  const TauSpec& sp = d.point().spec;
  const Real br = to_real(sp.beta);
  const Rat qb = sp.Q * sp.tbar1;
  for (const Rat& s : d.point().s_grid) {
    Real closed = to_real(qb) * exp(br * (to_real(s) - 1));
    CHECK(abs(d.w_sfunc(1).eval(s, 0) - closed) < pow(Real(10), -45));
    CHECK(abs(d.w_coeffs(1, s)[0] - closed) < pow(Real(10), -45));
  }
}

TEST_CASE("full wave function assembles from its coefficient series") {
  const Dressing& d = dr2();
  const Rat s(1, 3);
  const Real zr = to_real(d.point().z);
  Real series = 0;
  for (int n = 0; n <= d.point().spec.D; ++n)
    series += d.w_sfunc(n).eval(s, 0) * real_pow(zr, -n);
  Real expected = series * exp(to_real(s) * log(zr)) * exp(d.xi());
  Real got = d.eval_psi(s);
  CHECK(abs(got - expected) / abs(expected) < pow(Real(10), -40));
}

TEST_CASE("spectral truncation gap scales at the predicted order") {
  // cutting the coefficient series at n_max leaves a gap O(z^{-(n_max+1)});
  // doubling z from 2 to 4 must shrink the gap by at least 2^{n_max + 0.5}
  const int n_max = 3;
  const Rat s(1, 3);
  auto gap = [&](const Dressing& d) -> Real {
    Real series = 0;
    for (int n = 0; n <= n_max; ++n)
      series += d.w_sfunc(n).eval(s, 0) * real_pow(to_real(d.point().z), -n);
    return abs(d.psi_ratio().eval(s, 0) - series);
  };
  Real g2 = gap(dr2()), g4 = gap(dr4());
  REQUIRE(g4 > 0);
  Real rate = log(g2 / g4) / log(Real(2));
  CHECK(rate > Real(2 * n_max + 1) / 2);
}

TEST_CASE("coefficient functions match their initial-point closed forms") {
  const Dressing& d = dr_t0();
  const TauSpec& sp = d.point().spec;
  const Real br = to_real(sp.beta);
  const Real tiny = pow(Real(10), -45);
  const Rat bt = sp.beta * sp.tbar1;
  const Rat qb = sp.Q * sp.tbar1;
  for (const Rat& s : d.point().s_grid) {
    Real sr = to_real(s);
    Real ubar_closed = to_real(sp.Q) * exp(br * (sr - 1));
    Real v_closed = to_real(bt) * ubar_closed;
    Real u1_closed = -to_real(qb) * (exp(br * sr) - exp(br * (sr - 1)));
    CHECK(abs(d.ubar0().eval(s, 0) - ubar_closed) < tiny);
    CHECK(abs(d.v_fn().eval(s, 0) - v_closed) < tiny);
    CHECK(abs(d.u1().eval(s, 0) - u1_closed) < tiny);
  }
}

TEST_CASE("potential gauge: the step of the potential exponentiates to the lattice coefficient") {
  const Dressing& d = dr2();
  for (const Rat& s : d.point().s_grid) {
    Real step = exp(d.phi()(s) - d.phi()(s - 1));
    Real v = d.v_fn().eval(s, 0);
    CHECK(abs(step - v) / abs(v) < pow(Real(10), -40));
  }
  // the gauge requires a positive product of slope and conjugate time
  BAPoint neg = default_point();
  neg.spec.tbar1 = Rat(-1, 2);
  CHECK_THROWS_AS(Dressing(neg).phi(), std::domain_error);
}

TEST_CASE("dressed operator: unit leading coefficient and coefficient identity") {
  const Dressing& d = dr2();
  NumOp L = d.build_L(d.default_order());
  for (const Rat& s : d.point().s_grid) {
    CHECK(L.coeff_at(1, 0).eval(s, 0) == 1);
    // degree-0 coefficient is u1 computed independently
    CHECK(abs(L.coeff_at(0, 0).eval(s, 0) - d.u1().eval(s, 0)) <
          pow(Real(10), -40));
  }
  CHECK_THROWS_AS(d.build_L(0), std::invalid_argument);
  CHECK_THROWS_AS(d.build_L(8), std::invalid_argument);  // D - 1 = 7 is the cap
}

TEST_CASE("projections split the dressed operator without loss") {
  const Dressing& d = dr2();
  NumOp L = d.build_L(d.default_order());
  NumOp up = L.project_nonneg(), down = L.project_neg();
  const Rat s(1, 3);
  for (const auto& [key, c] : L.terms()) {
    Real whole = Dressing::eval_sf(c, s);
    Real parts = Dressing::eval_sf(up.coeff_at(key.k, key.j), s) +
                 Dressing::eval_sf(down.coeff_at(key.k, key.j), s);
    CHECK(whole == parts);  // same shared graphs: exact
  }
  // the reduced operator carries -v on its lowering term by construction
  Real rc = Dressing::eval_sf(d.reduced_op().coeff_at(-1, 0), s);
  CHECK(rc == -d.v_fn().eval(s, 0));
}

TEST_CASE("auxiliary linear flows hold on the sample grid") {
  CheckResult r1 = dr2().check_BA_linear(1);
  INFO(r1.detail);
  CHECK(r1.pass);
  CHECK_FALSE(r1.inconclusive);
  CHECK(r1.max_err < pow(Real(10), -6));

  CheckResult r1_deep = dr2_10().check_BA_linear(1);
  INFO(r1_deep.detail);
  CHECK(r1_deep.pass);
  CHECK(r1_deep.max_err < r1.max_err / 2);

  CheckResult r2 = dr2().check_BA_linear(2);
  INFO(r2.detail);
  CHECK(r2.pass);
  CHECK(r2.max_err < pow(Real(10), -4));
}

TEST_CASE("auxiliary linear flows at a larger spectral parameter") {
  CheckResult r = dr4().check_BA_linear(1);
  INFO(r.detail);
  CHECK(r.pass);
  CHECK(r.max_err < pow(Real(10), -6));

  CheckResult r_deep = dr4_10().check_BA_linear(1);
  INFO(r_deep.detail);
  CHECK(r_deep.pass);
  CHECK(r_deep.max_err < r.max_err / 2);
}

TEST_CASE("conjugate flow at the initial point is tail-accurate") {
  const Dressing& d = dr_t0();
  const Real zr = to_real(d.point().z);
  Real worst = 0;
  for (const Rat& s : d.point().s_grid) {
    Real pv = d.psi_ratio().eval(s, 0);
    Real lhs = d.dpsi_tbar_over_psi().eval(s, 0);
    Real rhs = d.ubar0().eval(s, 0) * d.psi_ratio().eval(s - 1, 0) / (pv * zr);
    Real al = abs(lhs);
    Real scale = al > 1 ? al : Real(1);
    Real r = abs(lhs - rhs) / scale;
    if (r > worst) worst = r;
  }
  CHECK(worst < pow(Real(10), -8));
}

TEST_CASE("logarithmic eigenvalue relation holds and sharpens with depth") {
  CheckResult r8 = dr2().check_log_eigen();
  INFO(r8.detail);
  CHECK(r8.pass);
  CHECK_FALSE(r8.inconclusive);
  CHECK(r8.max_err < pow(Real(10), -6));

  CheckResult r10 = dr2_10().check_log_eigen();
  INFO(r10.detail);
  CHECK(r10.pass);
  CHECK(r10.max_err < r8.max_err / 2);
}

TEST_CASE("exponential of the reduced operator multiplies by the spectral parameter") {
  CheckResult r = dr2().check_exp_identity();
  INFO(r.detail);
  CHECK(r.pass);
  CHECK_FALSE(r.inconclusive);
  CHECK(r.max_err < pow(Real(10), -4));
  CHECK(mentions(r, "triangle holds"));

  // a series cut too early must be reported as unsettled, not as pass/fail
  CheckResult shallow = dr2().check_exp_identity(3);
  INFO(shallow.detail);
  CHECK(shallow.inconclusive);
  CHECK(mentions(shallow, "not settled"));
}

TEST_CASE("Lax flow equations for the reduced operator") {
  CheckResult r1 = dr_t0().check_fkL_lax(1);
  INFO(r1.detail);
  CHECK(r1.pass);
  CHECK(r1.max_err < pow(Real(10), -8));

  CheckResult r2 = dr2().check_fkL_lax(2);
  INFO(r2.detail);
  CHECK(r2.pass);
  CHECK(r2.max_err < pow(Real(10), -5));

  CHECK_THROWS_AS(dr2().check_fkL_lax(3), std::invalid_argument);
}

TEST_CASE("Lax flow is identically zero when the conjugate time vanishes") {
  BAPoint p = default_point();
  p.spec.tbar1 = 0;
  Dressing d(p);
  CheckResult r = d.check_fkL_lax(1);
  INFO(r.detail);
  CHECK(r.pass);
  CHECK(r.max_err == 0);
}

TEST_CASE("field equation of Volterra type") {
  // at the initial point the residual cancels in closed form
  CheckResult r0 = dr_t0().check_toda_field();
  INFO(r0.detail);
  CHECK(r0.pass);
  CHECK(r0.max_err < pow(Real(10), -45));

  // at a generic time the residual is truncation-limited and deepens with D
  BAPoint p8 = default_point();
  p8.spec.t[1] = 0;  // t = (1/10, 0, ...)
  Dressing d8(p8);
  CheckResult r8 = d8.check_toda_field();
  INFO(r8.detail);
  CHECK(r8.pass);
  CHECK(r8.max_err < pow(Real(10), -5));

  BAPoint p10 = default_point(10);
  p10.spec.t[1] = 0;
  Dressing d10(p10);
  CheckResult r10 = d10.check_toda_field();
  INFO(r10.detail);
  CHECK(r10.pass);
  CHECK(r10.max_err < r8.max_err);
}

TEST_CASE("field equation falls back to the coefficient route for non-positive gauge") {
  BAPoint p = default_point();
  p.spec.tbar1 = Rat(-1, 2);
  Dressing d(p);
  CheckResult r = d.check_toda_field();
  INFO(r.detail);
  CHECK(r.pass);
  CHECK(mentions(r, "coefficient route"));
}

TEST_CASE("field equation requires the single sector") {
  BAPoint p = default_point();
  p.spec.tbar = {p.spec.tbar1};
  Dressing d(p);
  CheckResult r = d.check_toda_field();
  CHECK(r.inconclusive);
  CHECK(mentions(r, "single sector"));
}

TEST_CASE("derivative oracle: analytic graphs against central differences") {
  CheckResult r = dr2().check_fd_oracle();
  INFO(r.detail);
  CHECK(r.pass);
  CHECK(r.max_err < pow(Real(10), -15));
}

TEST_CASE("reduced operator agrees between construction routes") {
  CheckResult r = check_reduction(default_point());
  INFO(r.detail);
  CHECK(r.pass);
  CHECK_FALSE(r.inconclusive);
  CHECK(r.max_err < pow(Real(10), -8));

  // with the conjugate time off, the reduced operator is bare differentiation
  BAPoint p = default_point();
  p.spec.tbar1 = 0;
  CheckResult r0 = check_reduction(p);
  INFO(r0.detail);
  CHECK(r0.pass);
  CHECK(r0.max_err == 0);
  CHECK(mentions(r0, "trivial"));
}

TEST_CASE("divergent tail majorant turns lattice checks inconclusive, not failed") {
  BAPoint p = default_point();
  p.spec.tbar1 = 4;  // valid spec, but the tail majorant cannot certify it
  Dressing d(p);
  for (const CheckResult& r :
       {d.check_log_eigen(), d.check_BA_linear(1), d.check_exp_identity(),
        d.check_toda_field(), d.check_fkL_lax(1)}) {
    INFO(r.id << ": " << r.detail);
    CHECK(r.inconclusive);
    CHECK_FALSE(r.pass);
  }
}

TEST_CASE("flow order beyond the built window is rejected") {
  BAPoint p = default_point(2);
  p.N = 3;
  Dressing d(p);
  CHECK_THROWS_AS(d.check_BA_linear(2), std::invalid_argument);
  CheckResult r = d.check_BA_linear(1);
  INFO(r.detail);
  CHECK(r.pass);
}
