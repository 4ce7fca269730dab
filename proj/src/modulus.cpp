#include "lpw/modulus.hpp"

#include <algorithm>
#include <cmath>

#include "lpw/parallel.hpp"

namespace lpw::modulus {

namespace {

// sup over the cap {|y'-z'| <= delta} of |Y(y') - Y(z')| via discrete search.
double cap_sup(const std::function<double(const Vec&)>& Y, const Vec& zp, double delta,
               int steps) {
  double base = Y(zp);
  double best = 0.0;
  for (const auto& yp : cap_sample(zp, delta, steps)) {
    // enforce the chord constraint (samples ride the geodesic cap)
    if (norm(yp - zp) > delta * (1.0 + 1e-12)) continue;
    best = std::max(best, std::abs(Y(yp) - base));
  }
  return best;
}

int cap_steps(double delta, int sphere_order, int subgrid_factor) {
  // Sub-grid at `subgrid_factor` times the outer node spacing, but never
  // fewer than a handful of probes inside tiny caps.
  double half_angle = 2.0 * std::asin(std::min(1.0, 0.5 * delta));
  double outer_step = 2.0 * M_PI / sphere_order;
  double sub_step = outer_step / subgrid_factor;
  int steps = static_cast<int>(std::ceil(half_angle / sub_step));
  return std::clamp(steps, 6, 4096);
}

}  // namespace

double ModulusTable::interp(double delta) const {
  const auto& d = delta_grid;
  const auto& v = omega2_values;
  if (d.empty()) throw std::domain_error("empty modulus table");
  if (delta >= d.back()) return v.back();
  if (delta <= d.front()) {
    // extend by the local power between the two smallest nodes
    if (d.size() < 2 || v[0] <= 0.0 || v[1] <= 0.0) return v.front();
    double s = std::log(v[1] / v[0]) / std::log(d[1] / d[0]);
    return v[0] * std::pow(delta / d[0], s);
  }
  auto it = std::upper_bound(d.begin(), d.end(), delta);
  size_t hi = static_cast<size_t>(it - d.begin());
  size_t lo = hi - 1;
  if (v[lo] <= 0.0 || v[hi] <= 0.0) {
    double t = (delta - d[lo]) / (d[hi] - d[lo]);
    return v[lo] + t * (v[hi] - v[lo]);
  }
  double s = std::log(v[hi] / v[lo]) / std::log(d[hi] / d[lo]);
  return v[lo] * std::pow(delta / d[lo], s);
}

std::vector<double> default_delta_grid(int points) {
  if (points < 3) throw std::domain_error("delta grid needs >= 3 points");
  std::vector<double> grid(static_cast<size_t>(points));
  const double lo = std::pow(2.0, -20.0);
  for (int i = 0; i < points; ++i)
    grid[static_cast<size_t>(i)] =
        lo * std::pow(1.0 / lo, static_cast<double>(i) / (points - 1));
  grid.back() = 1.0;
  return grid;
}

ModulusTable omega2(const kern::KernelSpec& k, const std::vector<double>& delta_grid,
                    const ModulusMeta& meta) {
  if (delta_grid.empty()) throw std::domain_error("omega2: empty delta grid");
  for (size_t i = 0; i < delta_grid.size(); ++i) {
    if (delta_grid[i] <= 0.0 || delta_grid[i] > 1.0)
      throw std::domain_error("omega2: delta grid must lie in (0,1]");
    if (i > 0 && delta_grid[i] <= delta_grid[i - 1])
      throw std::domain_error("omega2: delta grid must be increasing");
  }
  ModulusTable table;
  table.delta_grid = delta_grid;
  table.meta = meta;
  table.omega2_values.assign(delta_grid.size(), 0.0);
  SphereRule rule = (k.dimension == 2) ? circle_rule(meta.sphere_order)
                                       : lebedev_rule(26);

  table.analytic_x_sup = k.separable();
  auto l2_of_capsup = [&](const std::function<double(const Vec&)>& Y, double delta) {
    int steps = cap_steps(delta, meta.sphere_order, meta.cap_subgrid_factor);
    double acc = 0.0;
    for (const auto& node : rule.nodes) {
      double g = cap_sup(Y, node.dir, delta, steps);
      acc += node.weight * g * g;
    }
    return std::sqrt(acc);
  };

  parallel_for(delta_grid.size(), [&](size_t i) {
    double delta = delta_grid[i];
    if (k.separable()) {
      // Omega = b(x) Y(z'): the (x, r) supremum of |b(x + r z')| is the
      // declared coeff_sup, leaving the x-independent modulus of Y.
      table.omega2_values[i] = k.coeff_sup * l2_of_capsup(k.angular, delta);
    } else {
      // general kernel: sample x and r
      double best = 0.0;
      for (int ix = 0; ix < meta.x_budget; ++ix) {
        for (int ir = 0; ir < meta.r_budget; ++ir) {
          Vec x(ix * 0.7 - 2.0, ix * 0.3 - 1.0);
          if (k.dimension == 3) x = Vec(ix * 0.7 - 2.0, ix * 0.3 - 1.0, 0.4 * ix);
          double r = ir * 0.8;
          int steps = cap_steps(delta, meta.sphere_order, meta.cap_subgrid_factor);
          double acc = 0.0;
          for (const auto& node : rule.nodes) {
            Vec xs = x + r * node.dir;
            auto Yx = [&](const Vec& yp) { return k.custom_xz(xs, yp); };
            double g = cap_sup(Yx, node.dir, delta, steps);
            acc += node.weight * g * g;
          }
          best = std::max(best, std::sqrt(acc));
        }
      }
      table.omega2_values[i] = best;
    }
  });

  // Monotone envelope: suprema over nested caps cannot decrease.
  for (size_t i = 1; i < table.omega2_values.size(); ++i)
    table.omega2_values[i] = std::max(table.omega2_values[i], table.omega2_values[i - 1]);
  return table;
}

namespace {

// Least-squares power fit omega2 ~ C delta^s on the smallest positive grid
// points (up to `count`).
bool fit_tail_power(const ModulusTable& t, int count, double& s, double& C) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < t.delta_grid.size() && static_cast<int>(lx.size()) < count; ++i) {
    if (t.omega2_values[i] > 0.0) {
      lx.push_back(std::log(t.delta_grid[i]));
      ly.push_back(std::log(t.omega2_values[i]));
    }
  }
  if (lx.size() < 2) return false;
  double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return false;
  s = (n * sxy - sx * sy) / denom;
  double intercept = (sy - s * sx) / n;
  C = std::exp(intercept);
  return true;
}

// integral over [a,b] of c x^{s-1-alpha} dx with the s ~ alpha guard.
double power_slice(double c, double s, double alpha, double a, double b) {
  double ex = s - alpha;
  if (std::abs(ex) < 1e-12) return c * std::log(b / a);
  return c * (std::pow(b, ex) - std::pow(a, ex)) / ex;
}

DiniResult dini_like(const ModulusTable& table, double alpha, double sigma, bool log_variant) {
  if (table.delta_grid.size() < 3)
    throw std::domain_error("dini integral: table shorter than 3 points");
  DiniResult res;
  const auto& d = table.delta_grid;
  const auto& v = table.omega2_values;

  if (*std::max_element(v.begin(), v.end()) == 0.0) return res;  // identically zero

  double s = 0.0, C = 0.0;
  if (!fit_tail_power(table, 8, s, C))
    throw std::domain_error("dini integral: cannot fit tail power");
  res.fitted_tail_power = s;
  res.fitted_tail_coeff = C;
  double critical = log_variant ? 0.0 : alpha;
  if (s <= critical) {
    res.divergent = true;
    return res;
  }

  auto weight = [&](double delta) {
    return log_variant ? std::pow(1.0 + std::abs(std::log(delta)), sigma) : 1.0;
  };

  // Interior: per-interval power interpolation of omega2. The plain Dini
  // integrand is then exact in closed form; the log variant integrates the
  // (1+|log|)^sigma weight with Gauss nodes in log-delta.
  double acc = 0.0;
  for (size_t i = 0; i + 1 < d.size(); ++i) {
    double d0 = d[i], d1 = d[i + 1];
    double v0 = v[i], v1 = v[i + 1];
    if (v0 <= 0.0 && v1 <= 0.0) continue;
    double si, ci;
    if (v0 > 0.0 && v1 > 0.0) {
      si = std::log(v1 / v0) / std::log(d1 / d0);
      ci = v0 / std::pow(d0, si);
    } else {  // one endpoint zero: trapezoid fallback for this rare case
      double g0 = v0 * weight(d0) / std::pow(d0, log_variant ? 1.0 : 1.0 + alpha);
      double g1 = v1 * weight(d1) / std::pow(d1, log_variant ? 1.0 : 1.0 + alpha);
      acc += 0.5 * (g0 + g1) * (d1 - d0);
      continue;
    }
    if (!log_variant) {
      acc += power_slice(ci, si, alpha, d0, d1);
    } else {
      // integrate in u = log delta with 8-point Gauss per interval
      acc += gl_integrate(
          [&](double u) {
            double delta = std::exp(u);
            return ci * std::pow(delta, si) * weight(delta);  // omega2/delta * delta du
          },
          std::log(d0), std::log(d1), 8);
    }
  }

  // Tail below the grid, using the fitted power law.
  double dmin = d.front();
  if (!log_variant) {
    double ex = s - alpha;  // > 0 here, divergence was flagged above
    acc += C * std::pow(dmin, ex) / ex;
  } else {
    // integral over (0, dmin] of C delta^{s-1} (1+|log delta|)^sigma ddelta,
    // in u = -log delta it decays like e^{-s u} u^sigma; extend until
    // negligible.
    double u0 = -std::log(dmin);
    double du = 5.0 / s;
    double tail = 0.0;
    for (int j = 0; j < 40; ++j) {
      double a = u0 + j * du, b = u0 + (j + 1) * du;
      double part = gl_integrate(
          [&](double u) { return C * std::exp(-s * u) * std::pow(1.0 + u, sigma); }, a, b, 12);
      tail += part;
      if (part < 1e-16 * (acc + tail)) break;
    }
    acc += tail;
  }
  res.value = acc;
  return res;
}

}  // namespace

DiniResult dini_integral(const ModulusTable& table, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) throw std::domain_error("dini_integral: alpha not in (0,1]");
  return dini_like(table, alpha, 0.0, false);
}

DiniResult log_dini_integral(const ModulusTable& table, double sigma) {
  if (!(sigma > 1.0)) throw std::domain_error("log_dini_integral: sigma must exceed 1");
  return dini_like(table, 0.0, sigma, true);
}

double dini_slice(const ModulusTable& table, double a, double b) {
  if (!(b > a) || !(a > 0.0)) return 0.0;
  // omega2/delta integrated with the interpolant; log-space Gauss panels.
  double acc = 0.0;
  auto edges = geometric_edges(a, b, 1.5);
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    acc += gl_integrate([&](double u) { return table.interp(std::exp(u)); }, std::log(edges[i]),
                        std::log(edges[i + 1]), 8);
  }
  return acc;
}

}  // namespace lpw::modulus
