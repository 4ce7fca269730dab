#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lpw/geometry.hpp"
#include "lpw/sphere_rules.hpp"

namespace lpw::kern {

// Variable kernel Omega(x, z) = coefficient(x) * angular(z/|z|), homogeneous
// of degree zero in z by construction: evaluation normalizes z first and the
// angular part only ever sees unit vectors.
struct KernelSpec {
  std::string id;
  int dimension = 2;
  std::function<double(const Vec&)> angular;      // on S^{n-1}
  std::function<double(const Vec&)> coefficient;  // bounded on R^n
  double coeff_sup = 1.0;
  bool cancellation_exempt = false;
  struct LipschitzDecl {
    double alpha = 1.0;
    double constant = 1.0;
  };
  std::optional<LipschitzDecl> lipschitz_alpha;

  // Optional fully general two-argument kernel; when set it overrides the
  // separable product in evaluate() and the modulus falls back to sampled
  // (x, r) suprema.
  std::function<double(const Vec& x, const Vec& zprime)> custom_xz;

  bool separable() const { return !custom_xz; }
};

double evaluate(const KernelSpec& k, const Vec& x, const Vec& z);

// |integral of the angular part over the sphere|, estimated by `rule`.
double check_cancellation(const KernelSpec& k, const SphereRule& rule);

struct UniformL2Result {
  double sampled_max = 0.0;                  // max over (x, r) samples
  std::optional<double> analytic_bound;      // coeff_sup * ||Y||_L2, separable only
};

UniformL2Result check_uniform_l2(const KernelSpec& k, const std::vector<Vec>& x_samples,
                                 const std::vector<double>& r_samples, const SphereRule& rule);

// ||angular||_{L^2(S^{n-1})} by quadrature.
double angular_l2_norm(const KernelSpec& k, const SphereRule& rule);

// L^infty x L^2 size of the kernel (coeff_sup * ||Y||_L2 for separable).
double kernel_l2_size(const KernelSpec& k, const SphereRule& rule);

// Largest sampled ratio |Omega(x,y') - Omega(x,z')| / |y'-z'|^alpha over a
// deterministic family of sphere pairs with chord separations spanning
// [sep_min, 2]; grows without bound for kernels with jumps.
double lipschitz_check(const KernelSpec& k, double alpha, int pair_budget,
                       double sep_min = 1e-6);

// --- built-in kernel catalog -------------------------------------------------

struct BuiltinInfo {
  std::string id;
  int dimension;
  bool cancellation_exempt;
  std::string description;
};

const std::vector<BuiltinInfo>& builtin_catalog();
KernelSpec make_builtin(const std::string& id);

// Factories used by the catalog and the config loader.
KernelSpec make_coordinate_monomial(int dim, const std::array<int, 3>& e);
KernelSpec make_circular_harmonic(int m, bool use_sin = false);
KernelSpec make_constant_angular(int dim);     // cancellation-exempt test kernel
KernelSpec make_jump_angular();                // sign(theta < pi), n = 2, mean zero
KernelSpec make_sample_table(const std::vector<double>& angles,
                             const std::vector<double>& values);

// Replaces the coefficient b(x) with 1 + amplitude*sin(x_1), amplitude < 1.
KernelSpec with_sinusoidal_coefficient(KernelSpec k, double amplitude);
// Scales the whole kernel by c > 0 (coefficient and sup bound).
KernelSpec scaled_kernel(KernelSpec k, double c);

}  // namespace lpw::kern
