#pragma once

#include <string>
#include <vector>

#include "lpw/poly.hpp"

namespace lpw::atoms {

// smallest admissible vanishing-moment order floor(n(1/p - 1))
int min_moment_order(int n, double p);

// A (p, infinity, s)-atom: supported in its ball, sup bounded by
// |B|^{-1/p}, moments vanishing through order s.
struct Atom {
  Ball ball;
  double p = 1.0;
  int s = 0;
  BallPoly profile;
  double sup_norm = 0.0;  // achieved sup (after headroom rescale)
};

struct AtomBuildOptions {
  double headroom = 0.05;      // stay this fraction below the sup-norm cap
  int sup_resolution = 192;    // polar grid used for the sup sample
};

// Names of shipped profile shapes ("bump" = (1-|u|^2)^2).
const std::vector<std::string>& profile_catalog();

// Shape in normalized coordinates on the unit ball.
BallPoly make_shape(const std::string& name, int dim);

// Moment-free atom: translate/scale the shape to the ball, remove the
// L^2(B)-projection onto polynomials of degree <= s, rescale the sup norm to
// (1 - headroom) |B|^{-1/p}.
Atom build_atom(int n, double p, const Ball& ball, const BallPoly& shape, int s,
                const AtomBuildOptions& opt = {});
Atom build_atom(int n, double p, const Ball& ball, const std::string& shape_name, int s,
                const AtomBuildOptions& opt = {});

struct AtomReport {
  bool support_ok = false;
  bool size_ok = false;
  bool moments_ok = false;
  double support_leak = 0.0;       // max |a| sampled outside the ball
  double sup_measured = 0.0;       // dense-grid sup
  double sup_cap = 0.0;            // |B|^{-1/p}
  double worst_moment_rel = 0.0;   // max_gamma |moment| / (||a||_inf |B| r^{|gamma|})
  bool pass() const { return support_ok && size_ok && moments_ok; }
};

struct AtomTols {
  double moment_tol = 1e-9;  // relative to ||a||_inf |B| r^{|gamma|}
  int quad_resolution = 64;  // independent quadrature for the moment check
};

// Checks the three atom conditions with quadrature independent of the
// construction path.
AtomReport verify_atom(const Atom& a, const AtomTols& tols = {});

// --- weak Hardy sequences ----------------------------------------------------

struct Block {
  int level = 0;  // k
  Ball ball;
  BallPoly profile;  // sup |b| = sup_scale * 2^k
};

// Synthetic decomposition f = sum_k sum_i b_i^k with per-level measure
// budgets, disjoint balls within a level, shared sup constant, and
// vanishing moments through floor(n(1/p-1)).
struct WeakHardySequence {
  double p = 1.0;
  int n = 2;
  double budget_c = 0.0;  // achieved c with sum_i |B_i^k| <= c 2^{-kp}
  double sup_constant = 1.0;  // C_b: blocks obey sup|b_i^k| <= C_b 2^k
  int moment_order = 0;
  std::vector<Block> blocks;

  std::vector<int> levels() const;
  std::vector<const Block*> level_blocks(int k) const;
};

struct WeakHardyPlanLevel {
  int k = 0;
  std::vector<Ball> balls;
};

struct WeakHardyPlan {
  int n = 2;
  double p = 1.0;
  std::vector<WeakHardyPlanLevel> levels;
  std::string shape = "bump";
};

WeakHardySequence build_weak_hardy(const WeakHardyPlan& plan);

struct LevelSplit {
  int k0 = 0;
  std::vector<const Block*> low;   // k <= k0
  std::vector<const Block*> high;  // k > k0
  double low_l4_bound = 0.0;       // sum_k sum_i sup|b| |B|^{1/4}
};

// k0 = floor(log2 lambda); partitions blocks at that level.
LevelSplit split_at_level(const WeakHardySequence& seq, double lambda);

struct DilatedBall {
  int level = 0;
  Ball ball;  // radius 64 (3/2)^{(k-k0)p/n} r
};

struct DilatedCover {
  int k0 = 0;
  std::vector<DilatedBall> balls;
  double total_measure = 0.0;
};

DilatedCover dilated_cover(const WeakHardySequence& seq, int k0);

// dilation factor 64 (3/2)^{(k-k0)p/n}
double dilation_factor(int k, int k0, double p, int n);

}  // namespace lpw::atoms
