#include "lpw/operators.hpp"

#include <algorithm>
#include <cmath>

#include "lpw/parallel.hpp"

namespace lpw::ops {

double OperatorParams::beta_limit(bool for_mu_star) const {
  double lim = std::min({0.5, alpha, rho - 0.5 * n});
  if (for_mu_star) lim = std::min(lim, (lambda - 2.0) * n / 3.0);
  return lim;
}

void OperatorParams::validate_basic() const {
  if (unsafe) return;
  if (n < 2) throw std::domain_error("n < 2");
  if (!(rho > 0.0) || !(rho < n)) throw std::domain_error("rho outside (0, n)");
  if (!(lambda > 1.0)) throw std::domain_error("lambda <= 1");
  if (!(alpha > 0.0) || alpha > 1.0) throw std::domain_error("alpha outside (0, 1]");
}

void OperatorParams::validate_hardy(bool for_mu_star) const {
  if (unsafe) return;
  validate_basic();
  if (!(rho > 0.5 * n)) throw std::domain_error("rho <= n/2");
  if (for_mu_star && !(lambda > 2.0)) throw std::domain_error("lambda <= 2");
  if (!(beta > 0.0)) throw std::domain_error("beta <= 0");
  if (beta >= 0.5) throw std::domain_error("beta >= 1/2");
  if (beta >= alpha) throw std::domain_error("beta >= alpha");
  if (beta >= rho - 0.5 * n) throw std::domain_error("beta >= rho - n/2");
  if (for_mu_star && beta >= (lambda - 2.0) * n / 3.0)
    throw std::domain_error("beta >= (lambda - 2) n / 3");
  if (!(p > n / (n + beta))) throw std::domain_error("p <= n/(n + beta)");
  if (p > 1.0) throw std::domain_error("p > 1");
}

Measured mu_s(const quad::InnerField& field, const Vec& x, const quad::QuadPlan& plan) {
  return sqrt_measured(quad::cone_integral(field, x, plan).integral);
}

Measured mu_s(const kern::KernelSpec& kernel, const BallPoly& f, const Vec& x,
              const OperatorParams& params, const quad::QuadPlan& plan) {
  params.validate_basic();
  quad::InnerField field(kernel, f, params.rho, plan);
  return mu_s(field, x, plan);
}

Measured mu_star(const quad::InnerField& field, const Vec& x, double lambda,
                 const quad::QuadPlan& plan) {
  return sqrt_measured(quad::halfspace_weighted_integral(field, x, lambda, plan).integral);
}

Measured mu_star(const kern::KernelSpec& kernel, const BallPoly& f, const Vec& x,
                 const OperatorParams& params, const quad::QuadPlan& plan) {
  params.validate_basic();
  quad::InnerField field(kernel, f, params.rho, plan);
  return mu_star(field, x, params.lambda, plan);
}

std::vector<GridPoint> evaluate_on_grid(quad::OperatorTag op, const kern::KernelSpec& kernel,
                                        const std::vector<BallPoly>& pieces,
                                        const std::vector<Vec>& grid,
                                        const OperatorParams& params,
                                        const quad::QuadPlan& plan, int jobs) {
  params.validate_basic();
  std::vector<GridPoint> out(grid.size());
  if (grid.empty()) return out;
  quad::InnerField field(kernel, pieces, params.rho, plan);
  field.far_field_sup();  // materialize shared state before the sweep
  field.far_field_energy();
  parallel_for(
      grid.size(),
      [&](size_t i) {
        out[i].x = grid[i];
        try {
          out[i].value = (op == quad::OperatorTag::mu_s)
                             ? mu_s(field, grid[i], plan)
                             : mu_star(field, grid[i], params.lambda, plan);
        } catch (const std::exception& e) {
          out[i].failed = true;
          out[i].error = e.what();
        }
      },
      jobs);
  return out;
}

}  // namespace lpw::ops
