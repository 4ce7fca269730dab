#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "lpw/kernel.hpp"
#include "lpw/measured.hpp"
#include "lpw/poly.hpp"

namespace lpw::quad {

// Quadrature controls. Nonpositive t_min / t_max / r_y mean "derive from the
// evaluation geometry" (t_min = 1e-3 * support radius, t_max = 4 (dist+diam),
// r_y covering the whole support so the y-truncation remainder is zero).
struct QuadPlan {
  int sphere_order = 32;     // inner angular node budget (full circle)
  int radial_panels = 6;     // Gauss order per structured outer radial panel
  int outer_angular = 24;    // outer angular node budget per slice
  int t_panel_order = 4;     // Gauss order per t panel
  double t_grading = 1.6;    // geometric ratio for panel fills
  double t_min = 0.0;
  double t_max = 0.0;
  double r_y = 0.0;
  double rel_tol = 0.01;
  double abs_tol = 1e-14;
  double cache_quantum = 0.0;  // 0 disables the (y,t) memo cache

  void validate() const;
  double effective_t_min(double support_radius) const;
  QuadPlan refined(double factor) const;  // scale node budgets (self-convergence checks)
};

struct TruncationError : std::runtime_error {
  explicit TruncationError(double suggested)
      : std::runtime_error("t_max truncation insufficient; suggest t_max >= " +
                           std::to_string(suggested)),
        suggested_t_max(suggested) {}
  double suggested_t_max;
};

struct TMinSensitivityError : std::runtime_error {
  TMinSensitivityError(double inc, double val)
      : std::runtime_error("result is t_min-sensitive (halving slab moves it by " +
                           std::to_string(inc) + " against value " + std::to_string(val) + ")"),
        increment(inc), value(val) {}
  double increment;
  double value;
};

// Type-erased view of an inner field F(y,t): evaluation, a hull ball so that
// F(.,t) vanishes outside {|y - hull.center| < t + hull.radius}, and the
// saturated sup used by tail bounds.
struct FieldRef {
  std::function<double(const Vec&, double)> eval;
  Ball hull;
  double rho = 1.5;
  int dim = 2;
  double far_sup = 0.0;     // sup_y |F(y, infinity)|
  double far_energy = 0.0;  // integral of |F(., infinity)|^2 (0 = unknown)
  // support balls the outer quadrature grades against
  std::vector<Ball> pieces;
};

// The inner convolution F(y,t) = integral over {|y-z|<t} of
// Omega(y, y-z) |y-z|^{rho-n} f(z) dz for ball-supported polynomial f.
// Radial integration along rays is closed-form; the angular part uses a
// panelized rule split at support-visibility and t-truncation kinks.
class InnerField {
 public:
  InnerField(kern::KernelSpec kernel, std::vector<BallPoly> pieces, double rho,
             const QuadPlan& plan);
  InnerField(kern::KernelSpec kernel, BallPoly piece, double rho, const QuadPlan& plan)
      : InnerField(std::move(kernel), std::vector<BallPoly>{std::move(piece)}, rho, plan) {}

  double operator()(const Vec& y, double t) const;

  double saturation_t(const Vec& y) const;  // F(y, .) constant past this t
  const Ball& support_hull() const { return hull_; }
  double rho() const { return rho_; }
  int dim() const { return dim_; }
  const kern::KernelSpec& kernel() const { return kernel_; }
  const std::vector<BallPoly>& pieces() const { return pieces_; }

  double far_field_sup() const;     // sampled sup |F(y, infinity)|, 1.25 safety
  double far_field_energy() const;  // estimated integral of |F(., infinity)|^2
  FieldRef ref() const;

 private:
  double eval_piece(const BallPoly& f, double mass, const Vec& y, double t) const;
  double eval_uncached(const Vec& y, double t) const;

  kern::KernelSpec kernel_;
  std::vector<BallPoly> pieces_;
  std::vector<double> piece_mass_;  // exact integral of each piece
  Ball hull_;
  double rho_;
  int dim_;
  int angular_order_;
  double cache_quantum_ = 0.0;
  mutable std::unordered_map<uint64_t, double> cache_;
  mutable std::mutex cache_mu_;
  mutable double far_sup_ = -1.0;
  mutable double far_energy_ = -1.0;
  mutable std::mutex far_mu_;
};

struct ConeResult {
  Measured integral;             // truncated double integral with tail as uncertainty
  double tail_bound = 0.0;       // analytic t > t_max remainder bound
  double tmin_increment = 0.0;   // contribution of the slab [t_min/2, t_min]
  double t_lo = 0.0, t_hi = 0.0; // effective truncation actually used
};

// integral over t in (t_min,t_max), {|y-x|<t} of |F(y,t)|^2 dy dt/t^{n+2rho+1}.
// Throws TruncationError / TMinSensitivityError per the rel_tol contract.
ConeResult cone_integral(const FieldRef& field, const Vec& x, const QuadPlan& plan);
ConeResult cone_integral(const InnerField& field, const Vec& x, const QuadPlan& plan);

// Same integrand weighted by (t/(t+|x-y|))^{lambda n} over the half-space,
// y truncated to |y-x| <= r_y (auto r_y covers the support exactly).
ConeResult halfspace_weighted_integral(const FieldRef& field, const Vec& x, double lambda,
                                       const QuadPlan& plan);
ConeResult halfspace_weighted_integral(const InnerField& field, const Vec& x, double lambda,
                                       const QuadPlan& plan);

// Closed-form bound on the neglected t > t_max mass once every F(y,.) has
// saturated: c sup|F|^2 t_max^{-2 rho} / (2 rho), with c the unit-ball
// volume for the cone and the weight-integral constant for lambda > 1.
double tail_bound(const FieldRef& field, const Vec& x, const QuadPlan& plan, double lambda = 0.0);

// --- oracles (independent routes, test use) -----------------------------------

enum class OperatorTag { mu_s, mu_star };

// Dense-grid evaluation of F(y,t): midpoint rule on a Cartesian z-grid over
// the support with subdivided cells near the support boundary, near z = y,
// and near the t-circle.
double dense_inner_integral(const kern::KernelSpec& kernel, const BallPoly& f, const Vec& y,
                            double t, double rho, int resolution);

// Brute-force tensor-grid evaluation of mu at x (midpoint in log t, polar
// midpoint in y, dense Cartesian inner grid). Returns the mu value (sqrt
// applied). resolution multiplies every node count.
double dense_oracle(const kern::KernelSpec& kernel, const BallPoly& f, const Vec& x,
                    OperatorTag op, double rho, double lambda, int resolution,
                    const QuadPlan& plan);

struct MonteCarloResult {
  double value = 0.0;  // estimate of the squared integral
  double sigma = 0.0;  // standard error of the estimate
  size_t samples = 0;
};

// Monte-Carlo estimate of the truncated square integral over the same
// domain as the deterministic routines; log-uniform in t, mixture-uniform
// in y, inner values from the dense Cartesian evaluator.
MonteCarloResult monte_carlo_square_integral(const kern::KernelSpec& kernel, const BallPoly& f,
                                             const Vec& x, OperatorTag op, double rho,
                                             double lambda, size_t samples, uint64_t seed,
                                             const QuadPlan& plan, int inner_resolution = 40);

}  // namespace lpw::quad
