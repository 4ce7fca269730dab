#include "lpw/sphere_rules.hpp"

#include <algorithm>
#include <cmath>

namespace lpw {

SphereRule circle_rule(int order) {
  if (order < 4) throw std::domain_error("circle_rule: order < 4");
  SphereRule rule;
  rule.dim = 2;
  rule.nodes.reserve(static_cast<size_t>(order));
  const double w = 2.0 * M_PI / order;
  for (int k = 0; k < order; ++k) {
    double theta = w * k;
    rule.nodes.push_back({circle_dir(theta), w});
  }
  return rule;
}

namespace {

void push_axis_points(SphereRule& r, double w) {
  for (int i = 0; i < 3; ++i)
    for (double s : {1.0, -1.0}) {
      Vec v(0.0, 0.0, 0.0);
      v[i] = s;
      r.nodes.push_back({v, w});
    }
}

void push_edge_points(SphereRule& r, double w) {
  const double q = 1.0 / std::sqrt(2.0);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (auto& pr : pairs)
    for (double si : {1.0, -1.0})
      for (double sj : {1.0, -1.0}) {
        Vec v(0.0, 0.0, 0.0);
        v[pr[0]] = si * q;
        v[pr[1]] = sj * q;
        r.nodes.push_back({v, w});
      }
}

void push_corner_points(SphereRule& r, double w) {
  const double q = 1.0 / std::sqrt(3.0);
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) r.nodes.push_back({Vec(sx * q, sy * q, sz * q), w});
}

}  // namespace

SphereRule lebedev_rule(int points) {
  SphereRule rule;
  rule.dim = 3;
  const double full = 4.0 * M_PI;
  switch (points) {
    case 6:
      push_axis_points(rule, full / 6.0);
      break;
    case 14:
      push_axis_points(rule, full * (1.0 / 15.0));
      push_corner_points(rule, full * (3.0 / 40.0));
      break;
    case 26:
      push_axis_points(rule, full * (1.0 / 21.0));
      push_edge_points(rule, full * (4.0 / 105.0));
      push_corner_points(rule, full * (9.0 / 280.0));
      break;
    default:
      throw std::domain_error("lebedev_rule: supported point counts are 6, 14, 26");
  }
  return rule;
}

SphereRule sphere_product_rule(int n_polar, int n_azimuth) {
  SphereRule rule;
  rule.dim = 3;
  const auto& gl = gauss_legendre(n_polar);
  const double wphi = 2.0 * M_PI / n_azimuth;
  for (const auto& [c, wc] : gl) {  // c = cos(polar angle)
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int k = 0; k < n_azimuth; ++k) {
      double phi = wphi * k;
      rule.nodes.push_back({Vec(s * std::cos(phi), s * std::sin(phi), c), wc * wphi});
    }
  }
  return rule;
}

SphereRule default_sphere_rule(int dim, int order) {
  if (dim == 2) return circle_rule(std::max(order, 16));
  if (dim == 3) return lebedev_rule(26);
  throw std::domain_error("default_sphere_rule: dim must be 2 or 3");
}

double sphere_monomial_integral(int dim, const std::array<int, 3>& e) {
  for (int i = 0; i < 3; ++i)
    if (e[static_cast<size_t>(i)] % 2 != 0) return 0.0;
  if (dim == 2 && e[2] != 0) return 0.0;
  auto g = [](int k) { return std::tgamma(0.5 * (k + 1)); };
  int total = e[0] + e[1] + (dim == 3 ? e[2] : 0);
  double num = g(e[0]) * g(e[1]);
  if (dim == 3) num *= g(e[2]);
  return 2.0 * num / std::tgamma(0.5 * (total + dim));
}

double ball_monomial_integral(int dim, const std::array<int, 3>& e) {
  double s = sphere_monomial_integral(dim, e);
  if (s == 0.0) return 0.0;
  int total = e[0] + e[1] + (dim == 3 ? e[2] : 0);
  return s / (total + dim);
}

std::vector<Vec> cap_sample(const Vec& zprime, double delta_chord, int steps) {
  std::vector<Vec> out;
  steps = std::max(steps, 4);
  // Chord delta corresponds to geodesic half-angle 2*asin(delta/2).
  double half_angle = 2.0 * std::asin(std::min(1.0, 0.5 * delta_chord));
  if (zprime.n == 2) {
    double theta0 = std::atan2(zprime[1], zprime[0]);
    out.reserve(static_cast<size_t>(2 * steps + 1));
    for (int k = -steps; k <= steps; ++k)
      out.push_back(circle_dir(theta0 + half_angle * k / steps));
    return out;
  }
  // n = 3: rings of constant polar offset around z', plus the endpoints of
  // the principal meridians.
  Vec u = (std::abs(zprime[2]) < 0.9) ? Vec(0.0, 0.0, 1.0) : Vec(1.0, 0.0, 0.0);
  Vec e1 = normalized(u - dot(u, zprime) * zprime);
  Vec e2(zprime[1] * e1[2] - zprime[2] * e1[1], zprime[2] * e1[0] - zprime[0] * e1[2],
         zprime[0] * e1[1] - zprime[1] * e1[0]);
  e2.n = 3;
  int rings = std::max(4, steps / 2);
  int az = std::max(8, steps);
  out.push_back(zprime);
  for (int i = 1; i <= rings; ++i) {
    double ang = half_angle * i / rings;
    double ca = std::cos(ang), sa = std::sin(ang);
    for (int j = 0; j < az; ++j) {
      double phi = 2.0 * M_PI * j / az;
      Vec v = ca * zprime + sa * (std::cos(phi) * e1 + std::sin(phi) * e2);
      v.n = 3;
      out.push_back(normalized(v));
    }
  }
  return out;
}

}  // namespace lpw
