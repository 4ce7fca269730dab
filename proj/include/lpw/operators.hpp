#pragma once

#include <string>
#include <vector>

#include "lpw/quad.hpp"

namespace lpw::ops {

// Admissibility box for the two square functions. Point evaluation needs
// only the basic ranges; the Hardy-space suites additionally constrain
// (rho, lambda, beta, p).
struct OperatorParams {
  int n = 2;
  double rho = 1.5;
  double lambda = 3.0;
  double alpha = 1.0;
  double beta = 0.45;
  double p = 1.0;
  bool unsafe = false;  // skip validation, watermark reports

  // largest admissible beta (strict upper bound)
  double beta_limit(bool for_mu_star) const;

  // throws std::domain_error naming the violated constraint
  void validate_basic() const;
  void validate_hardy(bool for_mu_star) const;
};

// mu_S: square root of the cone integral of the inner convolution.
Measured mu_s(const quad::InnerField& field, const Vec& x, const quad::QuadPlan& plan);
Measured mu_s(const kern::KernelSpec& kernel, const BallPoly& f, const Vec& x,
              const OperatorParams& params, const quad::QuadPlan& plan);

// mu*_lambda: square root of the weighted half-space integral.
Measured mu_star(const quad::InnerField& field, const Vec& x, double lambda,
                 const quad::QuadPlan& plan);
Measured mu_star(const kern::KernelSpec& kernel, const BallPoly& f, const Vec& x,
                 const OperatorParams& params, const quad::QuadPlan& plan);

struct GridPoint {
  Vec x;
  Measured value;
  bool failed = false;
  std::string error;
};

// Per-point evaluation over an arbitrary point list; parallel, output in
// input order; per-point errors recorded, not fatal.
std::vector<GridPoint> evaluate_on_grid(quad::OperatorTag op, const kern::KernelSpec& kernel,
                                        const std::vector<BallPoly>& pieces,
                                        const std::vector<Vec>& grid,
                                        const OperatorParams& params,
                                        const quad::QuadPlan& plan, int jobs = 0);

// pointwise domination constant 2^{lambda n / 2} (the norm chain uses
// 2^{lambda n}; both are echoed in reports)
inline double domination_constant_pointwise(const OperatorParams& p) {
  return std::pow(2.0, p.lambda * p.n / 2.0);
}
inline double domination_constant_norm_chain(const OperatorParams& p) {
  return std::pow(2.0, p.lambda * p.n);
}

}  // namespace lpw::ops
