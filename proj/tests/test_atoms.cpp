#include <doctest.h>

#include <cmath>
#include <random>

#include "lpw/atoms.hpp"
#include "lpw/sphere_rules.hpp"

using namespace lpw;
using namespace lpw::atoms;

TEST_CASE("min_moment_order floor") {
  CHECK(min_moment_order(2, 1.0) == 0);
  CHECK(min_moment_order(2, 2.0 / 3.0) == 1);
  CHECK(min_moment_order(3, 0.9) == 0);
  CHECK(min_moment_order(2, 0.5) == 2);
  CHECK_THROWS_AS(min_moment_order(2, 0.0), std::domain_error);
  CHECK_THROWS_AS(min_moment_order(2, 1.2), std::domain_error);
}

TEST_CASE("build_atom: unit-ball bump satisfies all three conditions") {
  Atom a = build_atom(2, 1.0, Ball{Vec(0.0, 0.0), 1.0}, "bump", 0);
  CHECK(std::abs(a.profile.moment({0, 0, 0})) < 1e-10);
  double cap = 1.0 / M_PI;  // |B|^{-1/p}, p = 1
  CHECK(a.sup_norm <= cap);
  CHECK(a.sup_norm == doctest::Approx(0.95 * cap).epsilon(1e-6));
  auto rep = verify_atom(a);
  CHECK(rep.pass());
}

TEST_CASE("build_atom: first moments vanish for p = 2/3, s = 1") {
  Atom a = build_atom(2, 2.0 / 3.0, Ball{Vec(0.0, 0.0), 1.0}, "tilted-bump", 1);
  CHECK(std::abs(a.profile.moment({0, 0, 0})) < 1e-10);
  CHECK(std::abs(a.profile.moment({1, 0, 0})) < 1e-10);
  CHECK(std::abs(a.profile.moment({0, 1, 0})) < 1e-10);
  CHECK(verify_atom(a).pass());
}

TEST_CASE("build_atom: off-center ball, sup equals the rescale target") {
  Atom a = build_atom(2, 1.0, Ball{Vec(3.0, 3.0), 0.5}, "bump", 0);
  // dense-grid evaluation oracle for the sup
  double sup = 0.0;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) {
      Vec x(3.0 - 0.5 + i * 1.0 / 400, 3.0 - 0.5 + j * 1.0 / 400);
      sup = std::max(sup, std::abs(a.profile.eval(x)));
    }
  CHECK(sup == doctest::Approx(a.sup_norm).epsilon(1e-3));
  CHECK(sup <= std::pow(M_PI * 0.25, -1.0));
  // global moment about the origin also vanishes (binomial equivalence)
  double m = 0.0;
  int N = 160;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Vec x(2.5 + (i + 0.5) / N, 2.5 + (j + 0.5) / N);
      m += a.profile.eval(x) / (N * N);
    }
  CHECK(std::abs(m) < 1e-4 * a.sup_norm);
}

TEST_CASE("build_atom rejects shapes the projection annihilates") {
  // a polynomial of degree <= s is projected to zero
  BallPoly flat(Ball{Vec(0.0, 0.0), 1.0}, {1.0}, {});
  CHECK_THROWS_AS(build_atom(2, 1.0, Ball{Vec(0.0, 0.0), 1.0}, flat, 0), std::domain_error);
  CHECK_THROWS_AS(build_atom(2, 1.0, Ball{Vec(0.0, 0.0), 1.0}, "bump", -1), std::domain_error);
}

TEST_CASE("verify_atom flags the broken variants") {
  Atom a = build_atom(2, 1.0, Ball{Vec(0.0, 0.0), 1.0}, "bump", 0);
  SUBCASE("scaling the profile by 2 breaks the size condition only") {
    Atom bad = a;
    bad.profile = a.profile.scaled(2.0);
    auto rep = verify_atom(bad);
    CHECK_FALSE(rep.size_ok);
    CHECK(rep.support_ok);
    CHECK(rep.moments_ok);
  }
  SUBCASE("translating the profile out of the declared ball breaks support") {
    Atom bad = a;
    bad.profile = a.profile.transplanted(Ball{Vec(0.7, 0.0), 1.0});
    auto rep = verify_atom(bad);
    CHECK_FALSE(rep.support_ok);
  }
}

TEST_CASE("atoms are scale-covariant") {
  Atom small = build_atom(2, 1.0, Ball{Vec(0.0, 0.0), 1.0}, "bump", 0);
  Atom big = build_atom(2, 1.0, Ball{Vec(0.0, 0.0), 2.0}, "bump", 0);
  // sup scales by |B|^{-1/p} ratio = 4; values at scaled points match
  for (double r : {0.0, 0.3, 0.7, 0.95}) {
    Vec x1(r, 0.1 * r);
    Vec x2 = 2.0 * x1;
    CHECK(small.profile.eval(x1) == doctest::Approx(4.0 * big.profile.eval(x2)).epsilon(1e-10));
  }
}

TEST_CASE("randomized atoms pass verify_atom across p values") {
  std::mt19937_64 rng(20240817ull);
  std::uniform_real_distribution<double> uc(-4.0, 4.0), ur(0.25, 2.5);
  const char* shapes[3] = {"bump", "tilted-bump", "ridged-bump"};
  for (int i = 0; i < 30; ++i) {
    double p = (i % 3 == 0) ? 1.0 : (i % 3 == 1 ? 0.8 : 2.0 / 3.0);
    int s = min_moment_order(2, p);
    Ball B{Vec(uc(rng), uc(rng)), ur(rng)};
    Atom a = build_atom(2, p, B, shapes[i % 3], s);
    auto rep = verify_atom(a);
    INFO("instance ", i, " p=", p, " r=", B.radius);
    CHECK(rep.pass());
    CHECK(rep.worst_moment_rel < 1e-9);
  }
}

TEST_CASE("n = 3 atom smoke") {
  Atom a = build_atom(3, 1.0, Ball{Vec(0.0, 0.0, 0.0), 1.0}, "bump", 0);
  CHECK(std::abs(a.profile.moment({0, 0, 0})) < 1e-10);
  CHECK(verify_atom(a).pass());
}

TEST_CASE("weak Hardy sequences: budgets, sup bounds, moments") {
  WeakHardyPlan plan;
  plan.p = 1.0;
  SUBCASE("single level, single ball") {
    plan.levels = {{0, {Ball{Vec(0.0, 0.0), 1.0}}}};
    auto seq = build_weak_hardy(plan);
    REQUIRE(seq.blocks.size() == 1);
    CHECK(seq.budget_c == doctest::Approx(M_PI));
    CHECK(seq.blocks[0].profile.sup_abs(128) == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("three levels with halving measures satisfy the level budgets") {
    double r = 1.0;
    plan.levels = {};
    for (int k = 1; k <= 3; ++k) {
      plan.levels.push_back({k, {Ball{Vec(0.0, 4.0 * k), r}}});
      r /= std::sqrt(2.0);  // halves |B| per level
    }
    auto seq = build_weak_hardy(plan);
    // direct measure summation oracle per level
    double c = seq.budget_c;
    for (int k = 1; k <= 3; ++k) {
      double measure = 0.0;
      for (const Block* b : seq.level_blocks(k)) measure += ball_measure(b->ball);
      CHECK(measure <= c * std::pow(2.0, -k * plan.p) * (1.0 + 1e-12));
      for (const Block* b : seq.level_blocks(k)) {
        CHECK(b->profile.sup_abs(96) <=
              seq.sup_constant * std::pow(2.0, k) * (1.0 + 1e-3));
        CHECK(std::abs(b->profile.moment({0, 0, 0})) <
              1e-9 * b->profile.sup_abs(96) * ball_measure(b->ball));
      }
    }
    // overlap bound: disjoint balls per level (C_ov = 1)
    for (int k = 1; k <= 3; ++k) {
      auto blocks = seq.level_blocks(k);
      for (size_t i = 0; i < blocks.size(); ++i)
        for (size_t j = i + 1; j < blocks.size(); ++j)
          CHECK(norm(blocks[i]->ball.center - blocks[j]->ball.center) >=
                blocks[i]->ball.radius + blocks[j]->ball.radius);
    }
  }
  SUBCASE("empty plan gives the empty sequence") {
    plan.levels = {};
    auto seq = build_weak_hardy(plan);
    CHECK(seq.blocks.empty());
    CHECK(seq.budget_c == 0.0);
  }
  SUBCASE("overlapping balls within a level are rejected") {
    plan.levels = {{0, {Ball{Vec(0.0, 0.0), 1.0}, Ball{Vec(1.0, 0.0), 1.0}}}};
    CHECK_THROWS_AS(build_weak_hardy(plan), std::domain_error);
  }
}

TEST_CASE("split_at_level: k0 = floor(log2 lambda) and monotone partition") {
  WeakHardyPlan plan;
  plan.p = 1.0;
  plan.levels = {{0, {Ball{Vec(0.0, 0.0), 0.5}}},
                 {2, {Ball{Vec(4.0, 0.0), 0.5}}},
                 {4, {Ball{Vec(8.0, 0.0), 0.5}}}};
  auto seq = build_weak_hardy(plan);

  CHECK(split_at_level(seq, 5.0).k0 == 2);
  CHECK(split_at_level(seq, 1.0).k0 == 0);
  CHECK(split_at_level(seq, 0.3).k0 == -2);
  CHECK_THROWS_AS(split_at_level(seq, 0.0), std::domain_error);

  auto s1 = split_at_level(seq, 5.0);
  CHECK(s1.low.size() + s1.high.size() == seq.blocks.size());
  CHECK(s1.low.size() == 2);
  CHECK(s1.low_l4_bound > 0.0);

  // monotone: raising lambda never moves a block from low to high
  auto s2 = split_at_level(seq, 20.0);
  CHECK(s2.low.size() >= s1.low.size());
}

TEST_CASE("dilated cover radii and measure bookkeeping") {
  CHECK(dilation_factor(1, 0, 1.0, 2) == doctest::Approx(64.0 * std::sqrt(1.5)));
  CHECK(dilation_factor(0, 0, 1.0, 2) == doctest::Approx(64.0));
  CHECK(64.0 * std::pow(1.5, 0.5) == doctest::Approx(78.38).epsilon(1e-3));

  WeakHardyPlan plan;
  plan.p = 1.0;
  plan.levels = {{1, {Ball{Vec(0.0, 0.0), 1.0}}},
                 {2, {Ball{Vec(8.0, 0.0), 0.7}}},
                 {3, {Ball{Vec(0.0, 9.0), 0.5}}}};
  auto seq = build_weak_hardy(plan);
  auto cover = dilated_cover(seq, 0);
  REQUIRE(cover.balls.size() == 3);
  // term-by-term hand summation oracle
  double expect = 0.0;
  for (const auto& lv : plan.levels) {
    double f = 64.0 * std::pow(1.5, lv.k * plan.p / 2.0);
    for (const auto& b : lv.balls) expect += M_PI * f * f * b.radius * b.radius;
  }
  CHECK(cover.total_measure == doctest::Approx(expect).epsilon(1e-12));
  for (const auto& db : cover.balls) CHECK(db.ball.radius >= 64.0 * 0.5);
  // blocks at or below k0 are excluded
  CHECK(dilated_cover(seq, 2).balls.size() == 1);
}
