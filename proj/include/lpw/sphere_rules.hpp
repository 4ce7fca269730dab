#pragma once

#include <vector>

#include "lpw/geometry.hpp"

namespace lpw {

// Quadrature node on S^{n-1}; weights sum to the surface measure |S^{n-1}|
// (2*pi for the circle, 4*pi for the sphere).
struct SphereNode {
  Vec dir;
  double weight;
};

struct SphereRule {
  int dim = 2;  // ambient dimension n
  std::vector<SphereNode> nodes;
};

// n = 2: composite trapezoid on the circle with `order` nodes
// (spectrally accurate for smooth integrands, exact for trig degree < order).
SphereRule circle_rule(int order);

// n = 3: Lebedev rules of octahedral symmetry; supported point counts
// 6 (degree 3), 14 (degree 5), 26 (degree 7).
SphereRule lebedev_rule(int points);

// n = 3 product rule: Gauss-Legendre in cos(polar) x trapezoid in azimuth.
// Used where a scalable node count is needed (inner convolution rays).
SphereRule sphere_product_rule(int n_polar, int n_azimuth);

// Default rule for kernel-side sphere integrals.
SphereRule default_sphere_rule(int dim, int order);

// Closed form of the sphere integral of a monomial z^e (surface measure);
// zero for any odd exponent.
double sphere_monomial_integral(int dim, const std::array<int, 3>& e);

// Closed form of the ball integral of v^e over the unit ball in R^dim.
double ball_monomial_integral(int dim, const std::array<int, 3>& e);

// Points y' on the cap {|y' - z'| <= delta_chord} around z', used for the
// cap supremum searches. `steps` controls the resolution along each cap
// axis; endpoints of the cap are always included.
std::vector<Vec> cap_sample(const Vec& zprime, double delta_chord, int steps);

}  // namespace lpw
