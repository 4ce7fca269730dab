#include <doctest.h>

#include <cmath>

#include "lpw/atoms.hpp"
#include "lpw/quad.hpp"

using namespace lpw;
using namespace lpw::quad;

namespace {

QuadPlan test_plan() {
  QuadPlan plan;
  return plan;
}

kern::KernelSpec std_kernel() { return kern::make_builtin("circle-harmonic-1"); }

BallPoly std_atom() {
  return atoms::build_atom(2, 1.0, Ball{Vec(0.0, 0.0), 1.0}, "bump", 0).profile;
}

FieldRef synthetic_field(std::function<double(const Vec&, double)> f, double hull_radius,
                         double rho, double far_sup) {
  FieldRef r;
  r.eval = std::move(f);
  r.hull = Ball{Vec(0.0, 0.0), hull_radius};
  r.rho = rho;
  r.dim = 2;
  r.far_sup = far_sup;
  r.far_energy = far_sup * far_sup * M_PI * hull_radius * hull_radius;
  r.pieces = {r.hull};
  return r;
}

}  // namespace

TEST_CASE("plan validation") {
  QuadPlan p = test_plan();
  CHECK_NOTHROW(p.validate());
  p.rel_tol = 0.5;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = test_plan();
  p.t_min = 1.0;
  p.t_max = 0.5;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
}

TEST_CASE("inner integral: empty intersection gives exact zero") {
  QuadPlan plan = test_plan();
  InnerField F(std_kernel(), std_atom(), 1.5, plan);
  CHECK(F(Vec(5.0, 0.0), 3.0) == 0.0);  // dist 5 >= t + r = 4
  CHECK(F(Vec(5.0, 0.0), 4.0) == 0.0);  // boundary case is still empty
  CHECK(F(Vec(5.0, 0.0), -1.0) == 0.0);
}

TEST_CASE("inner integral: constant kernel and flat f give the polar closed form") {
  QuadPlan plan = test_plan();
  double t = 0.8;
  Vec y(0.4, -0.2);
  // f = 1 on a ball around y that contains B(y, t)
  BallPoly flat(Ball{y, 2.0}, {1.0}, {});
  InnerField F(kern::make_builtin("test-constant-2d"), flat, 1.5, plan);
  double expect = 2.0 * M_PI * std::pow(t, 1.5) / 1.5;  // (4 pi / 3) t^{3/2}
  CHECK(F(y, t) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("inner integral is exactly homogeneous in f") {
  QuadPlan plan = test_plan();
  BallPoly a = std_atom();
  InnerField F1(std_kernel(), a, 1.5, plan);
  InnerField Fc(std_kernel(), a.scaled(-2.0), 1.5, plan);
  for (auto [y, t] : std::vector<std::pair<Vec, double>>{
           {Vec(0.3, 0.0), 0.7}, {Vec(1.2, -0.5), 2.0}, {Vec(0.0, 0.0), 0.05}}) {
    CHECK(Fc(y, t) == -2.0 * F1(y, t));
  }
}

TEST_CASE("inner integral agrees with the dense Cartesian oracle") {
  QuadPlan plan = test_plan();
  auto kernel = std_kernel();
  BallPoly a = std_atom();
  InnerField F(kernel, a, 1.5, plan);
  struct Case {
    Vec y;
    double t;
  };
  for (auto c : {Case{Vec(0.3, 0.0), 0.7}, Case{Vec(0.9, 0.4), 1.3}, Case{Vec(1.7, 0.0), 1.0}}) {
    double fast = F(c.y, c.t);
    double dense = dense_inner_integral(kernel, a, c.y, c.t, 1.5, 192);
    INFO("y = (", c.y[0], ",", c.y[1], "), t = ", c.t);
    CHECK(fast == doctest::Approx(dense).epsilon(plan.rel_tol));
  }
}

TEST_CASE("inner field saturation and far sup") {
  QuadPlan plan = test_plan();
  InnerField F(std_kernel(), std_atom(), 1.5, plan);
  Vec y(2.0, 1.0);
  double sat = F.saturation_t(y);
  CHECK(sat == doctest::Approx(norm(y) + 1.0));
  CHECK(F(y, sat) == F(y, 10.0 * sat));
  CHECK(F.far_field_sup() > 0.0);
  CHECK(F.far_field_energy() > 0.0);
}

TEST_CASE("cone integral of the zero field is zero") {
  QuadPlan plan = test_plan();
  auto zero = synthetic_field([](const Vec&, double) { return 0.0; }, 1.0, 1.5, 0.0);
  auto res = cone_integral(zero, Vec(0.2, 0.1), plan);
  CHECK(res.integral.value == 0.0);
  CHECK(res.integral.uncertainty == 0.0);
}

TEST_CASE("cone integral flags the t_min-divergent synthetic field") {
  // F(y,t) = t^rho for t < 1: integrand bookkeeping gives pi/t, so the
  // [t_min/2, t_min] slab moves the value by pi log 2 and must be flagged.
  QuadPlan plan = test_plan();
  plan.t_min = 1e-3;
  plan.t_max = 40.0;
  double rho = 1.5;
  auto f = synthetic_field(
      [rho](const Vec&, double t) { return t < 1.0 ? std::pow(t, rho) : 0.0; }, 1e3, rho, 0.0);
  CHECK_THROWS_AS(cone_integral(f, Vec(0.0, 0.0), plan), TMinSensitivityError);
  try {
    cone_integral(f, Vec(0.0, 0.0), plan);
  } catch (const TMinSensitivityError& e) {
    CHECK(e.increment == doctest::Approx(M_PI * std::log(2.0)).epsilon(0.02));
    CHECK(e.value == doctest::Approx(M_PI * std::log(1.0 / 1e-3)).epsilon(0.02));
  }
}

TEST_CASE("cone integral of a bounded synthetic field matches the closed form") {
  // F = t^rho only below t = 1 but evaluated away from t_min divergence:
  // use F(y,t) = t^rho on 0.5 < t < 1, else 0. Then
  // I = pi int_{0.5}^{1} t^{2+2rho} / t^{n+2rho+1} dt = pi log 2.
  QuadPlan plan = test_plan();
  plan.t_min = 1e-2;
  plan.t_max = 30.0;
  double rho = 1.5;
  auto f = synthetic_field(
      [rho](const Vec&, double t) {
        return (t > 0.5 && t < 1.0) ? std::pow(t, rho) : 0.0;
      },
      1e3, rho, 0.0);
  auto res = cone_integral(f, Vec(0.0, 0.0), plan);
  CHECK(res.integral.value == doctest::Approx(M_PI * std::log(2.0)).epsilon(5e-3));
}

TEST_CASE("domination monotonicity of the outer integrals") {
  QuadPlan plan = test_plan();
  plan.t_min = 0.05;
  plan.t_max = 20.0;
  auto f1 = synthetic_field(
      [](const Vec& y, double t) { return std::exp(-norm2(y)) * std::min(t, 1.0); }, 6.0, 1.5,
      1.0);
  auto f2 = synthetic_field(
      [](const Vec& y, double t) { return 2.0 * std::exp(-norm2(y)) * std::min(t, 1.0); }, 6.0,
      1.5, 2.0);
  Vec x(0.5, 0.0);
  CHECK(cone_integral(f1, x, plan).integral.value <=
        cone_integral(f2, x, plan).integral.value);
  CHECK(halfspace_weighted_integral(f1, x, 3.0, plan).integral.value <=
        halfspace_weighted_integral(f2, x, 3.0, plan).integral.value);
}

TEST_CASE("halfspace integral dominates its cone part by the weight floor") {
  QuadPlan plan = test_plan();
  auto kernel = std_kernel();
  BallPoly a = std_atom();
  InnerField F(kernel, a, 1.5, plan);
  double lambda = 3.0;
  for (Vec x : {Vec(3.0, 0.0), Vec(0.5, 0.5)}) {
    double cone = cone_integral(F, x, plan).integral.value;
    double half = halfspace_weighted_integral(F, x, lambda, plan).integral.value;
    // on the cone the weight exceeds 2^{-lambda n}
    CHECK(half >= std::pow(2.0, -lambda * 2.0) * cone * (1.0 - 1e-9));
  }
}

TEST_CASE("tail bound closed form, scaling, and zero field") {
  QuadPlan plan = test_plan();
  plan.t_max = 10.0;
  auto f = synthetic_field([](const Vec&, double) { return 1.0; }, 1.0, 1.5, 1.0);
  Vec x(0.0, 0.0);
  double tb = tail_bound(f, x, plan);
  // pi * sup^2 * t_max^{-3} / 3, checked against direct integration of the
  // bound integrand vol(B(x,t)) sup^2 t^{-(n+2rho+1)}
  CHECK(tb == doctest::Approx(M_PI * 1e-3 / 3.0).epsilon(1e-12));
  double direct = gl_integrate(
      [&](double u) {  // t = 10 e^u substitution over a long range
        double t = 10.0 * std::exp(u);
        return M_PI * t * t / std::pow(t, 6.0) * t;
      },
      0.0, 30.0, 48);
  CHECK(tb == doctest::Approx(direct).epsilon(1e-6));

  QuadPlan plan2 = plan;
  plan2.t_max = 20.0;
  CHECK(tail_bound(f, x, plan2) == doctest::Approx(tb / std::pow(2.0, 3.0)).epsilon(1e-12));

  auto fz = synthetic_field([](const Vec&, double) { return 0.0; }, 1.0, 1.5, 0.0);
  CHECK(tail_bound(fz, x, plan) == 0.0);

  plan2.t_max = 0.5;  // below dist + diam
  CHECK_THROWS_AS(tail_bound(f, x, plan2), std::domain_error);
}

TEST_CASE("truncation-insufficient error carries a workable suggestion") {
  QuadPlan plan = test_plan();
  plan.t_min = 0.05;
  plan.t_max = 2.5;  // deliberately too small for a slowly saturating field
  auto f = synthetic_field(
      [](const Vec& y, double) { return std::exp(-0.1 * norm2(y)); }, 1.0, 1.5, 1.0);
  Vec x(0.0, 0.0);
  double suggested = 0.0;
  try {
    cone_integral(f, x, plan);
    CHECK(false);
  } catch (const TruncationError& e) {
    suggested = e.suggested_t_max;
  }
  CHECK(suggested > plan.t_max);
}

TEST_CASE("monte carlo oracle brackets the deterministic cone integral") {
  QuadPlan plan = test_plan();
  auto kernel = std_kernel();
  BallPoly a = std_atom();
  InnerField F(kernel, a, 1.5, plan);
  Vec x(4.0, 0.0);
  double det = cone_integral(F, x, plan).integral.value;
  auto mc = monte_carlo_square_integral(kernel, a, x, OperatorTag::mu_s, 1.5, 0.0, 120000,
                                        20240817ull, plan, 32);
  INFO("det = ", det, " mc = ", mc.value, " sigma = ", mc.sigma);
  CHECK(std::abs(det - mc.value) <= 3.0 * mc.sigma + 0.01 * det);
}

TEST_CASE("dense oracle self-converges and is deterministic") {
  QuadPlan plan = test_plan();
  auto kernel = std_kernel();
  BallPoly a = std_atom();
  Vec x(4.0, 0.0);
  double r1 = dense_oracle(kernel, a, x, OperatorTag::mu_s, 1.5, 0.0, 1, plan);
  double r2 = dense_oracle(kernel, a, x, OperatorTag::mu_s, 1.5, 0.0, 2, plan);
  CHECK(r1 == doctest::Approx(r2).epsilon(plan.rel_tol));
  CHECK(r1 == dense_oracle(kernel, a, x, OperatorTag::mu_s, 1.5, 0.0, 1, plan));
  BallPoly zero = a.scaled(0.0);
  CHECK(dense_oracle(kernel, zero, x, OperatorTag::mu_s, 1.5, 0.0, 1, plan) == 0.0);
}

TEST_CASE("memo cache returns identical values") {
  QuadPlan plan = test_plan();
  plan.cache_quantum = 1e-9;
  InnerField F(std_kernel(), std_atom(), 1.5, plan);
  QuadPlan plain = test_plan();
  InnerField G(std_kernel(), std_atom(), 1.5, plain);
  Vec y(0.4, 0.2);
  double v1 = F(y, 0.9);
  double v2 = F(y, 0.9);  // cache hit
  CHECK(v1 == v2);
  CHECK(v1 == G(y, 0.9));
}
