#include <catch2/catch_amalgamated.hpp>

#include <taulab/numbers.hpp>
#include <taulab/sfunc.hpp>

using namespace taulab;

namespace {
struct PrecisionInit {
  PrecisionInit() { set_precision(50); }
} const precision_init;

Real tol() { return pow(Real(10), -40); }
}  // namespace

TEST_CASE("exponential-sum leaf differentiates linear exponents in closed form") {
  // f(s) = 2 e^{3s}: f^(n)(s) = 2 * 3^n e^{3s}
  SFunc f = SFunc::exp_poly_sum("f", {{Real(2), {Real(0), Real(3), Real(0), Real(0)}}});
  Rat s(1, 2);
  Real e3s = exp(Real(3) * Real(0.5));
  for (int n = 0; n <= 5; ++n)
    CHECK(abs(f.eval(s, n) - 2 * real_pow(Real(3), n) * e3s) < tol());
}

TEST_CASE("exponential-sum leaf handles quadratic and cubic exponents") {
  // f = e^{s^2): f' = 2s f, f'' = (4s^2+2) f, f''' = (8s^3+12s) f
  SFunc f = SFunc::exp_poly_sum("g2", {{Real(1), {Real(0), Real(0), Real(1), Real(0)}}});
  Rat s(2, 3);
  Real sr = to_real(s), base = exp(sr * sr);
  CHECK(abs(f.eval(s, 0) - base) < tol());
  CHECK(abs(f.eval(s, 1) - 2 * sr * base) < tol());
  CHECK(abs(f.eval(s, 2) - (4 * sr * sr + 2) * base) < tol());
  CHECK(abs(f.eval(s, 3) - (8 * sr * sr * sr + 12 * sr) * base) < tol());
  // g = e^{s^3}: g' = 3s^2 g, g'' = (9s^4 + 6s) g
  SFunc g = SFunc::exp_poly_sum("g3", {{Real(1), {Real(0), Real(0), Real(0), Real(1)}}});
  Real base3 = exp(sr * sr * sr);
  CHECK(abs(g.eval(s, 1) - 3 * sr * sr * base3) < tol());
  CHECK(abs(g.eval(s, 2) - (9 * real_pow(sr, 4) + 6 * sr) * base3) < tol());
}

TEST_CASE("polynomial node derivatives terminate") {
  SFunc p = SFunc::polynomial("p", {Real(1), Real(2), Real(3)});  // 1 + 2s + 3s^2
  Rat s(5, 4);
  Real sr = to_real(s);
  CHECK(abs(p.eval(s, 0) - (1 + 2 * sr + 3 * sr * sr)) < tol());
  CHECK(abs(p.eval(s, 1) - (2 + 6 * sr)) < tol());
  CHECK(abs(p.eval(s, 2) - 6) < tol());
  CHECK(p.eval(s, 3) == 0);
  CHECK(p.eval(Rat(0), 2) == 6);  // falling-factorial path at s = 0
}

TEST_CASE("product rule matches merged exponents") {
  SFunc a = SFunc::exp_poly_sum("a", {{Real(1), {Real(0), Real(2), Real(0), Real(0)}}});
  SFunc b = SFunc::exp_poly_sum("b", {{Real(1), {Real(0), Real(5), Real(0), Real(0)}}});
  SFunc ab = a * b;
  SFunc merged = SFunc::exp_poly_sum("m", {{Real(1), {Real(0), Real(7), Real(0), Real(0)}}});
  Rat s(1, 3);
  for (int n = 0; n <= 6; ++n) CHECK(abs(ab.eval(s, n) - merged.eval(s, n)) < tol());
}

TEST_CASE("shift, scale, negation, addition, subtraction") {
  SFunc f = SFunc::exp_poly_sum("f", {{Real(1), {Real(0), Real(1), Real(0), Real(0)}}});
  CHECK(abs(f.shift(2).eval(Rat(0), 0) - exp(Real(2))) < tol());
  CHECK(abs(f.shift(-3).eval(Rat(1), 1) - exp(Real(-2))) < tol());
  CHECK(abs(f.scale(Real(4)).eval(Rat(1), 0) - 4 * exp(Real(1))) < tol());
  CHECK(abs((-f).eval(Rat(1), 0) + exp(Real(1))) < tol());
  CHECK(abs((f + f).eval(Rat(1), 0) - 2 * exp(Real(1))) < tol());
  CHECK((f - f).eval(Rat(1), 3) == 0);
}

TEST_CASE("derivative node composes with itself") {
  SFunc f = SFunc::exp_poly_sum("f", {{Real(1), {Real(0), Real(2), Real(0), Real(0)}}});
  CHECK(abs(f.deriv(3).eval(Rat(0), 1) - 16) < tol());  // d^4/ds^4 e^{2s} at 0
}

TEST_CASE("reciprocal inverts an exponential to all orders") {
  SFunc f = SFunc::exp_poly_sum("f", {{Real(1), {Real(0), Real(3), Real(0), Real(0)}}});
  SFunc r = f.recip();
  Rat s(1, 5);
  for (int n = 0; n <= 4; ++n) {
    Real expect = real_pow(Real(-3), n) * exp(Real(-3) * to_real(s));
    CHECK(abs(r.eval(s, n) - expect) < tol());
  }
}

TEST_CASE("logarithm recovers the exponent polynomial") {
  // log(5 e^{2s + s^2}) = log 5 + 2s + s^2
  SFunc f = SFunc::exp_poly_sum("f", {{Real(5), {Real(0), Real(2), Real(1), Real(0)}}});
  SFunc l = f.log_of();
  Rat s(3, 7);
  Real sr = to_real(s);
  CHECK(abs(l.eval(s, 0) - (log(Real(5)) + 2 * sr + sr * sr)) < tol());
  CHECK(abs(l.eval(s, 1) - (2 + 2 * sr)) < tol());
  CHECK(abs(l.eval(s, 2) - 2) < tol());
  CHECK(abs(l.eval(s, 3)) < tol());
  CHECK_THROWS_AS(SFunc::constant(Real(-1)).log_of().eval(Rat(0), 0), std::domain_error);
}

TEST_CASE("per-node memoization avoids recomputation") {
  int calls = 0;
  SFunc f = SFunc::leaf("counter", [&calls](const Rat&, int) {
    ++calls;
    return Real(7);
  });
  f.eval(Rat(1), 0);
  f.eval(Rat(1), 0);
  CHECK(calls == 1);
  f.eval(Rat(1), 1);
  CHECK(calls == 2);
  f.eval(Rat(2), 0);
  CHECK(calls == 3);
}

TEST_CASE("empty handles are rejected loudly") {
  SFunc empty;
  CHECK_FALSE(empty.valid());
  CHECK_THROWS_AS(empty.eval(Rat(0), 0), std::logic_error);
  CHECK_THROWS_AS(SFunc::constant(Real(1)).eval(Rat(0), -1), std::invalid_argument);
}
