#include "lpw/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace lpw::kern {

double evaluate(const KernelSpec& k, const Vec& x, const Vec& z) {
  Vec zp = normalized(z);  // throws on z = 0
  if (k.custom_xz) return k.custom_xz(x, zp);
  return k.coefficient(x) * k.angular(zp);
}

double check_cancellation(const KernelSpec& k, const SphereRule& rule) {
  double acc = 0.0;
  for (const auto& node : rule.nodes) acc += node.weight * k.angular(node.dir);
  return std::abs(acc);
}

double angular_l2_norm(const KernelSpec& k, const SphereRule& rule) {
  double acc = 0.0;
  for (const auto& node : rule.nodes) {
    double y = k.angular(node.dir);
    acc += node.weight * y * y;
  }
  return std::sqrt(acc);
}

double kernel_l2_size(const KernelSpec& k, const SphereRule& rule) {
  return k.coeff_sup * angular_l2_norm(k, rule);
}

UniformL2Result check_uniform_l2(const KernelSpec& k, const std::vector<Vec>& x_samples,
                                 const std::vector<double>& r_samples, const SphereRule& rule) {
  if (x_samples.empty() || r_samples.empty())
    throw std::domain_error("check_uniform_l2: empty sample set");
  UniformL2Result res;
  for (const auto& x : x_samples) {
    for (double r : r_samples) {
      if (r < 0.0) throw std::domain_error("check_uniform_l2: r < 0");
      double acc = 0.0;
      for (const auto& node : rule.nodes) {
        Vec xs = x + r * node.dir;
        double v = k.custom_xz ? k.custom_xz(xs, node.dir)
                               : k.coefficient(xs) * k.angular(node.dir);
        acc += node.weight * v * v;
      }
      res.sampled_max = std::max(res.sampled_max, std::sqrt(acc));
    }
  }
  if (k.separable()) res.analytic_bound = kernel_l2_size(k, rule);
  return res;
}

double lipschitz_check(const KernelSpec& k, double alpha, int pair_budget, double sep_min) {
  if (!(alpha > 0.0) || alpha > 1.0) throw std::domain_error("lipschitz_check: alpha not in (0,1]");
  pair_budget = std::max(pair_budget, 16);
  const int n = k.dimension;
  // Deterministic pair family: base points around the sphere, chord
  // separations geometric down to sep_min.
  int n_base = std::max(16, pair_budget / 32);
  int n_sep = std::max(8, pair_budget / n_base);
  double best = 0.0;
  std::vector<Vec> xs = {Vec(0.0, 0.0), Vec(1.3, -0.4), Vec(-2.0, 5.0)};
  if (n == 3)
    xs = {Vec(0.0, 0.0, 0.0), Vec(1.3, -0.4, 0.7), Vec(-2.0, 5.0, -1.0)};
  for (int ib = 0; ib < n_base; ++ib) {
    double theta = 2.0 * M_PI * ib / n_base + 0.123;
    Vec zp = (n == 2) ? circle_dir(theta)
                      : normalized(Vec(std::cos(theta), std::sin(theta),
                                       std::sin(2.1 * theta + 0.5)));
    for (int is = 0; is < n_sep; ++is) {
      double sep = 2.0 * std::pow(sep_min / 2.0, static_cast<double>(is) / (n_sep - 1));
      double ang = 2.0 * std::asin(std::min(1.0, 0.5 * sep));
      Vec yp;
      if (n == 2) {
        yp = circle_dir(theta + ang);
      } else {
        // rotate zp by `ang` inside the plane spanned with a fixed helper
        Vec u = (std::abs(zp[2]) < 0.9) ? Vec(0.0, 0.0, 1.0) : Vec(1.0, 0.0, 0.0);
        Vec e1 = normalized(u - dot(u, zp) * zp);
        yp = normalized(std::cos(ang) * zp + std::sin(ang) * e1);
      }
      double chord = norm(yp - zp);
      if (chord <= 0.0) continue;
      for (const auto& x : xs) {
        double d = std::abs(evaluate(k, x, yp) - evaluate(k, x, zp));
        best = std::max(best, d / std::pow(chord, alpha));
      }
    }
  }
  return best;
}

// --- builtins ----------------------------------------------------------------

namespace {

KernelSpec base_spec(std::string id, int dim) {
  KernelSpec k;
  k.id = std::move(id);
  k.dimension = dim;
  k.coefficient = [](const Vec&) { return 1.0; };
  k.coeff_sup = 1.0;
  return k;
}

}  // namespace

KernelSpec make_coordinate_monomial(int dim, const std::array<int, 3>& e) {
  std::string id = "coord-monomial-" + std::to_string(dim) + "d-" + std::to_string(e[0]) +
                   std::to_string(e[1]) + std::to_string(e[2]);
  KernelSpec k = base_spec(id, dim);
  k.angular = [e](const Vec& zp) {
    double v = 1.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < e[static_cast<size_t>(i)]; ++j) v *= zp[i];
    return v;
  };
  int total = e[0] + e[1] + e[2];
  k.lipschitz_alpha = KernelSpec::LipschitzDecl{1.0, static_cast<double>(total)};
  return k;
}

KernelSpec make_circular_harmonic(int m, bool use_sin) {
  KernelSpec k = base_spec(std::string("circle-harmonic-") + (use_sin ? "sin-" : "") +
                               std::to_string(m),
                           2);
  k.angular = [m, use_sin](const Vec& zp) {
    double theta = std::atan2(zp[1], zp[0]);
    return use_sin ? std::sin(m * theta) : std::cos(m * theta);
  };
  k.lipschitz_alpha = KernelSpec::LipschitzDecl{1.0, static_cast<double>(m)};
  return k;
}

KernelSpec make_constant_angular(int dim) {
  KernelSpec k = base_spec("test-constant-" + std::to_string(dim) + "d", dim);
  k.angular = [](const Vec&) { return 1.0; };
  k.cancellation_exempt = true;
  k.lipschitz_alpha = KernelSpec::LipschitzDecl{1.0, 0.0};
  return k;
}

KernelSpec make_jump_angular() {
  KernelSpec k = base_spec("test-jump", 2);
  k.angular = [](const Vec& zp) { return zp[1] >= 0.0 ? 1.0 : -1.0; };
  return k;
}

KernelSpec make_sample_table(const std::vector<double>& angles,
                             const std::vector<double>& values) {
  if (angles.size() != values.size() || angles.size() < 3)
    throw std::domain_error("sample table needs >= 3 (angle, value) rows");
  for (size_t i = 1; i < angles.size(); ++i)
    if (!(angles[i] > angles[i - 1]))
      throw std::domain_error("sample table angles must be strictly increasing");
  KernelSpec k = base_spec("custom-sample-table", 2);
  auto a = std::make_shared<std::vector<double>>(angles);
  auto v = std::make_shared<std::vector<double>>(values);
  k.angular = [a, v](const Vec& zp) {
    double theta = std::atan2(zp[1], zp[0]);
    if (theta < 0.0) theta += 2.0 * M_PI;
    // periodic linear interpolation
    const auto& A = *a;
    const auto& V = *v;
    auto it = std::upper_bound(A.begin(), A.end(), theta);
    size_t hi = static_cast<size_t>(it - A.begin());
    double a0, a1, v0, v1;
    if (hi == 0) {
      a0 = A.back() - 2.0 * M_PI;
      v0 = V.back();
      a1 = A.front();
      v1 = V.front();
    } else if (hi == A.size()) {
      a0 = A.back();
      v0 = V.back();
      a1 = A.front() + 2.0 * M_PI;
      v1 = V.front();
    } else {
      a0 = A[hi - 1];
      v0 = V[hi - 1];
      a1 = A[hi];
      v1 = V[hi];
    }
    double t = (a1 > a0) ? (theta - a0) / (a1 - a0) : 0.0;
    return v0 + t * (v1 - v0);
  };
  return k;
}

KernelSpec with_sinusoidal_coefficient(KernelSpec k, double amplitude) {
  if (!(std::abs(amplitude) < 1.0))
    throw std::domain_error("sinusoidal coefficient requires |amplitude| < 1");
  k.id += "-sincoeff";
  k.coefficient = [amplitude](const Vec& x) { return 1.0 + amplitude * std::sin(x[0]); };
  k.coeff_sup = 1.0 + std::abs(amplitude);
  return k;
}

KernelSpec scaled_kernel(KernelSpec k, double c) {
  if (!(c > 0.0)) throw std::domain_error("kernel scale must be positive");
  auto base = k.coefficient;
  k.id += "-x" + std::to_string(c);
  k.coefficient = [base, c](const Vec& x) { return c * base(x); };
  k.coeff_sup *= c;
  if (k.lipschitz_alpha) k.lipschitz_alpha->constant *= c;
  if (k.custom_xz) {
    auto cf = k.custom_xz;
    k.custom_xz = [cf, c](const Vec& x, const Vec& zp) { return c * cf(x, zp); };
  }
  return k;
}

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"circle-harmonic-1", 2, false, "Y = z'_1 = cos(theta), b = 1"},
      {"circle-harmonic-2", 2, false, "Y = cos(2 theta), b = 1"},
      {"circle-harmonic-sin-1", 2, false, "Y = sin(theta), b = 1"},
      {"circle-harmonic-1-sincoeff", 2, false, "Y = cos(theta), b = 1 + 0.5 sin(x_1)"},
      {"coord-monomial-3d-100", 3, false, "Y = z'_1, b = 1 (n = 3)"},
      {"test-constant-2d", 2, true, "Y = 1 (cancellation exempt, test only)"},
      {"test-jump", 2, false, "Y = sign jump at theta = 0 (mean zero, not Lipschitz)"},
  };
  return catalog;
}

KernelSpec make_builtin(const std::string& id) {
  if (id == "circle-harmonic-1") return make_circular_harmonic(1);
  if (id == "circle-harmonic-2") return make_circular_harmonic(2);
  if (id == "circle-harmonic-sin-1") return make_circular_harmonic(1, true);
  if (id == "circle-harmonic-1-sincoeff")
    return with_sinusoidal_coefficient(make_circular_harmonic(1), 0.5);
  if (id == "coord-monomial-3d-100") return make_coordinate_monomial(3, {1, 0, 0});
  if (id == "test-constant-2d") return make_constant_angular(2);
  if (id == "test-jump") return make_jump_angular();
  throw std::domain_error("unknown builtin kernel id: " + id);
}

}  // namespace lpw::kern
