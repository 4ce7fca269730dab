#pragma once

#include <array>
#include <memory>
#include <vector>

#include "lpw/geometry.hpp"

namespace lpw {

// Univariate polynomial sum c[k] s^k with small inline storage (the hot
// paths restrict ball polynomials to rays millions of times; no heap).
struct RayPoly {
  static constexpr int kMaxLen = 12;
  std::array<double, kMaxLen> c{};
  int len = 0;

  RayPoly() = default;
  RayPoly(std::initializer_list<double> init) {
    for (double v : init) push(v);
  }
  void push(double v) {
    if (len >= kMaxLen) throw std::length_error("RayPoly overflow");
    c[static_cast<size_t>(len++)] = v;
  }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }
};

RayPoly ray_poly_mul(const RayPoly& a, const RayPoly& b);
void ray_poly_add(RayPoly& acc, const RayPoly& p, double scale);

// Exact integral of u^{rho-1} * sum c_k u^k over [a, b], 0 <= a <= b.
double singular_ray_integral(const RayPoly& p, double rho, double a, double b);

// A compactly supported function f = P((x - center)/radius) restricted to
// its ball, with P a polynomial split into a radial part (polynomial in
// w = |v|^2) and a general monomial part. Point evaluation and the
// restriction to a line are closed-form, which lets the singular radial
// integrals downstream be computed exactly.
class BallPoly {
 public:
  struct Term {
    std::array<int, 3> e{0, 0, 0};
    double coeff = 0.0;
  };

  BallPoly() = default;
  BallPoly(Ball support, std::vector<double> radial, std::vector<Term> mono)
      : ball_(support), radial_(std::move(radial)), mono_(std::move(mono)) {}

  const Ball& support() const { return ball_; }
  int dim() const { return ball_.center.n; }

  // Zero outside the closed support ball.
  double eval(const Vec& x) const;

  // Coefficients in s of f(o + s*d) for unit d, valid on the span where the
  // line is inside the ball (the caller clips with ray_ball_span).
  RayPoly restrict_to_ray(const Vec& o, const Vec& d) const;

  // Integral of f(x) (x - center)^e dx, exact via ball monomial moments.
  double moment(const std::array<int, 3>& e) const;

  // Supremum of |f| sampled on a dense polar grid over the ball.
  double sup_abs(int resolution = 192) const;

  BallPoly scaled(double factor) const;

  // The same polynomial profile transplanted to another ball (shape in
  // normalized coordinates is preserved).
  BallPoly transplanted(const Ball& b) const;

  const std::vector<double>& radial_part() const { return radial_; }
  const std::vector<Term>& monomial_part() const { return mono_; }

  int degree() const;

 private:
  Ball ball_;
  std::vector<double> radial_;  // coeffs of w^k, w = |v|^2, v = (x-c)/r
  std::vector<Term> mono_;      // general monomials in v
};

}  // namespace lpw
