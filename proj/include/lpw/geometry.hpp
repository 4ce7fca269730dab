#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpw {

// Point/vector in R^n for n in {2,3}. The third coordinate is kept at 0
// for n = 2 so norms and dots are dimension-agnostic.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int n = 2;

  Vec() = default;
  Vec(double x, double y) : c{x, y, 0.0}, n(2) {}
  Vec(double x, double y, double z) : c{x, y, z}, n(3) {}

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }
};

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < 3; ++i) r.c[i] += b.c[i];
  return r;
}
inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < 3; ++i) r.c[i] -= b.c[i];
  return r;
}
inline Vec operator*(double s, const Vec& a) {
  Vec r = a;
  for (int i = 0; i < 3; ++i) r.c[i] *= s;
  return r;
}
inline double dot(const Vec& a, const Vec& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec normalized(const Vec& a) {
  double m = norm(a);
  if (m == 0.0) throw std::domain_error("cannot normalize the zero vector");
  // true division: z and lambda*z map to identical bits for dyadic lambda
  Vec r = a;
  for (int i = 0; i < 3; ++i) r.c[static_cast<size_t>(i)] /= m;
  return r;
}

// Direction on the unit circle.
inline Vec circle_dir(double theta) { return Vec(std::cos(theta), std::sin(theta)); }

struct Ball {
  Vec center;
  double radius = 1.0;
};

// Lebesgue measure of the unit ball and surface measure of the unit sphere.
inline double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
    default: return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  }
}
inline double sphere_area(int n) {  // |S^{n-1}|
  return n * unit_ball_volume(n);
}
inline double ball_measure(const Ball& b) {
  return unit_ball_volume(b.center.n) * std::pow(b.radius, b.center.n);
}

// Parameter interval {s : |o + s d - c| < R} for a unit direction d.
// Empty when the line misses the ball.
inline std::optional<std::pair<double, double>> ray_ball_span(const Vec& o, const Vec& d,
                                                              const Vec& c, double R) {
  Vec oc = o - c;
  double b = dot(oc, d);
  double q = norm2(oc) - R * R;
  double disc = b * b - q;
  if (disc <= 0.0) return std::nullopt;
  double s = std::sqrt(disc);
  return std::make_pair(-b - s, -b + s);
}

// Gauss-Legendre nodes/weights on [-1,1], orders 1..32 computed by Newton
// iteration on Legendre polynomials (deterministic, cached).
const std::vector<std::pair<double, double>>& gauss_legendre(int order);

// Integrate f over [a,b] with a fixed-order Gauss rule.
template <typename F>
double gl_integrate(F&& f, double a, double b, int order) {
  if (!(b > a)) return 0.0;
  const auto& rule = gauss_legendre(order);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (const auto& [x, w] : rule) acc += w * f(mid + half * x);
  return acc * half;
}

// Split [a,b] into segments graded geometrically toward both endpoints of a
// set of breakpoints; returns sorted unique edges including a and b.
std::vector<double> merge_breakpoints(double a, double b, const std::vector<double>& pts,
                                      double min_gap_rel = 1e-12);

// Geometric fill of [a,b] (a>0) with ratio <= `ratio`; returns edges.
std::vector<double> geometric_edges(double a, double b, double ratio);

}  // namespace lpw
