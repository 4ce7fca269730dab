#pragma once

#include <algorithm>
#include <cmath>

namespace lpw {

// A scalar with its quadrature uncertainty. Every reported number keeps this
// pair; inequality checks use value +/- uncertainty intervals.
struct Measured {
  double value = 0.0;
  double uncertainty = 0.0;
};

inline Measured operator+(const Measured& a, const Measured& b) {
  return {a.value + b.value, a.uncertainty + b.uncertainty};
}
inline Measured operator*(double s, const Measured& a) {
  return {s * a.value, std::abs(s) * a.uncertainty};
}

// sqrt with first-order uncertainty propagation; exact zero stays exact.
inline Measured sqrt_measured(const Measured& a) {
  double v = std::max(0.0, a.value);
  double r = std::sqrt(v);
  double u = (r > 0.0) ? 0.5 * a.uncertainty / r : std::sqrt(a.uncertainty);
  return {r, u};
}

// True when a <= b is certain within the combined uncertainty band.
inline bool leq_within(const Measured& a, const Measured& b) {
  return a.value <= b.value + a.uncertainty + b.uncertainty;
}

}  // namespace lpw
