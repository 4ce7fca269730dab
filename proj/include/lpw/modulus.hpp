#pragma once

#include <optional>
#include <vector>

#include "lpw/kernel.hpp"

namespace lpw::modulus {

// Sampling controls for the continuity modulus estimate.
struct ModulusMeta {
  int sphere_order = 256;       // outer z' quadrature nodes (n = 2)
  int cap_subgrid_factor = 10;  // cap search resolution vs outer spacing
  int x_budget = 8;             // sampled x per axis (non-separable kernels)
  int r_budget = 4;             // sampled r values (non-separable kernels)
};

// Estimated L^2 integral continuity modulus on an increasing delta grid.
// Values come from a discrete cap search, so they are lower bounds of the
// true suprema (one_sided flags this in reports); a running max enforces
// monotonicity in delta.
struct ModulusTable {
  std::vector<double> delta_grid;     // increasing, in (0, 1]
  std::vector<double> omega2_values;  // nonnegative, nondecreasing
  ModulusMeta meta;
  bool one_sided = true;
  bool analytic_x_sup = true;  // separable kernels: x,r supremum replaced by coeff_sup

  // Piecewise power-law interpolation (log-log linear); clamps outside the
  // grid to the local power fit at the left end and omega2(delta_max) at
  // the right.
  double interp(double delta) const;
};

struct DiniCheckParams {
  double alpha = 0.5;   // in (0, 1]
  double sigma = 2.0;   // > 1, for the log-Dini variant
};

// Geometric default grid 2^-20 .. 1 with `points` nodes.
std::vector<double> default_delta_grid(int points = 64);

ModulusTable omega2(const kern::KernelSpec& k, const std::vector<double>& delta_grid,
                    const ModulusMeta& meta = {});

// Result of a Dini-type integral: finite value, or a divergence flag with
// the tail power that triggered it.
struct DiniResult {
  bool divergent = false;
  double value = 0.0;          // finite part when divergent is false
  double fitted_tail_power = 0.0;
  double fitted_tail_coeff = 0.0;
};

// integral over (0,1] of omega2(delta) / delta^{1+alpha}; the grid tail
// below delta_min is extrapolated with the power law fitted on the 8
// smallest grid points, and divergence is declared when that power is
// <= alpha.
DiniResult dini_integral(const ModulusTable& table, double alpha);

// integral over (0,1] of omega2(delta)/delta * (1+|log delta|)^sigma, same
// tail handling with divergence when the fitted power is <= 0.
DiniResult log_dini_integral(const ModulusTable& table, double sigma);

// integral of omega2(delta)/delta over [a, b] using the table interpolant
// (the slice appearing in the annulus kernel-difference bound).
double dini_slice(const ModulusTable& table, double a, double b);

}  // namespace lpw::modulus
