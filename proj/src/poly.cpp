#include "lpw/poly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lpw/sphere_rules.hpp"

namespace lpw {

RayPoly ray_poly_mul(const RayPoly& a, const RayPoly& b) {
  RayPoly out;
  if (a.len == 0 || b.len == 0) return out;
  out.len = a.len + b.len - 1;
  if (out.len > RayPoly::kMaxLen) throw std::length_error("RayPoly overflow in mul");
  for (int i = 0; i < a.len; ++i)
    for (int j = 0; j < b.len; ++j) out.c[static_cast<size_t>(i + j)] += a[i] * b[j];
  return out;
}

void ray_poly_add(RayPoly& acc, const RayPoly& p, double scale) {
  if (acc.len < p.len) {
    if (p.len > RayPoly::kMaxLen) throw std::length_error("RayPoly overflow in add");
    acc.len = p.len;
  }
  for (int i = 0; i < p.len; ++i) acc.c[static_cast<size_t>(i)] += scale * p[i];
}

double singular_ray_integral(const RayPoly& p, double rho, double a, double b) {
  if (!(b > a) || p.len == 0 || !(b > 0.0)) return 0.0;
  // sum over k of c_k (b^{rho+k} - a^{rho+k}) / (rho + k), with the power
  // ladders built from a single pow each.
  double bp = std::pow(b, rho);
  double ap = (a > 0.0) ? std::pow(a, rho) : 0.0;
  double acc = 0.0;
  for (int k = 0; k < p.len; ++k) {
    if (p[k] != 0.0) acc += p[k] * (bp - ap) / (rho + k);
    bp *= b;
    ap *= a;
  }
  return acc;
}

namespace {

RayPoly ray_poly_pow(const RayPoly& base, int k) {
  RayPoly out{1.0};
  for (int i = 0; i < k; ++i) out = ray_poly_mul(out, base);
  return out;
}

}  // namespace

double BallPoly::eval(const Vec& x) const {
  Vec v = x - ball_.center;
  double r2 = norm2(v) / (ball_.radius * ball_.radius);
  if (r2 > 1.0) return 0.0;
  double acc = 0.0;
  double wk = 1.0;
  for (double c : radial_) {
    acc += c * wk;
    wk *= r2;
  }
  const double inv_r = 1.0 / ball_.radius;
  for (const auto& t : mono_) {
    double m = t.coeff;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < t.e[static_cast<size_t>(i)]; ++k) m *= v[i] * inv_r;
    acc += m;
  }
  return acc;
}

RayPoly BallPoly::restrict_to_ray(const Vec& o, const Vec& d) const {
  const double inv_r = 1.0 / ball_.radius;
  Vec a = inv_r * (o - ball_.center);
  Vec b = inv_r * d;
  // w(s) = |a + s b|^2, a quadratic in s.
  RayPoly w{norm2(a), 2.0 * dot(a, b), norm2(b)};
  RayPoly out;
  if (!radial_.empty()) {
    RayPoly wk{1.0};
    ray_poly_add(out, wk, radial_[0]);
    for (size_t k = 1; k < radial_.size(); ++k) {
      wk = ray_poly_mul(wk, w);
      ray_poly_add(out, wk, radial_[k]);
    }
  }
  for (const auto& t : mono_) {
    RayPoly m{1.0};
    for (int i = 0; i < 3; ++i) {
      int e = t.e[static_cast<size_t>(i)];
      if (e > 0) m = ray_poly_mul(m, ray_poly_pow(RayPoly{a[i], b[i]}, e));
    }
    ray_poly_add(out, m, t.coeff);
  }
  return out;
}

double BallPoly::moment(const std::array<int, 3>& e) const {
  // integral of f(x) (x - c)^e dx = r^{n+|e|} * integral over the unit ball
  // of P(v) v^e dv; the radial part expands w^k by the multinomial theorem.
  const int n = dim();
  double acc = 0.0;
  std::function<void(int, std::array<int, 3>, double)> expand =
      [&](int k, std::array<int, 3> extra, double coeff) {
        if (k == 0) {
          std::array<int, 3> full{};
          for (int i = 0; i < 3; ++i)
            full[static_cast<size_t>(i)] =
                extra[static_cast<size_t>(i)] + e[static_cast<size_t>(i)];
          acc += coeff * ball_monomial_integral(n, full);
          return;
        }
        for (int i = 0; i < n; ++i) {
          auto next = extra;
          next[static_cast<size_t>(i)] += 2;
          expand(k - 1, next, coeff);
        }
      };
  for (size_t k = 0; k < radial_.size(); ++k)
    if (radial_[k] != 0.0) expand(static_cast<int>(k), {0, 0, 0}, radial_[k]);
  for (const auto& t : mono_) {
    std::array<int, 3> full{};
    for (int i = 0; i < 3; ++i)
      full[static_cast<size_t>(i)] = t.e[static_cast<size_t>(i)] + e[static_cast<size_t>(i)];
    acc += t.coeff * ball_monomial_integral(n, full);
  }
  int total_e = e[0] + e[1] + e[2];
  return acc * std::pow(ball_.radius, n + total_e);
}

double BallPoly::sup_abs(int resolution) const {
  const int n = dim();
  double best = std::abs(eval(ball_.center));
  if (n == 2) {
    for (int i = 1; i <= resolution; ++i) {
      double s = ball_.radius * i / resolution;
      int naz = std::max(16, 2 * resolution);
      for (int j = 0; j < naz; ++j) {
        double phi = 2.0 * M_PI * j / naz;
        Vec x = ball_.center + s * circle_dir(phi);
        best = std::max(best, std::abs(eval(x)));
      }
    }
    return best;
  }
  SphereRule sph = sphere_product_rule(std::max(8, resolution / 8), std::max(16, resolution / 4));
  int nr = std::max(8, resolution / 2);
  for (int i = 1; i <= nr; ++i) {
    double s = ball_.radius * i / nr;
    for (const auto& node : sph.nodes) {
      Vec x = ball_.center + s * node.dir;
      best = std::max(best, std::abs(eval(x)));
    }
  }
  return best;
}

BallPoly BallPoly::scaled(double factor) const {
  BallPoly out = *this;
  for (double& c : out.radial_) c *= factor;
  for (auto& t : out.mono_) t.coeff *= factor;
  return out;
}

BallPoly BallPoly::transplanted(const Ball& b) const {
  BallPoly out = *this;
  out.ball_ = b;
  return out;
}

int BallPoly::degree() const {
  int deg = 0;
  if (!radial_.empty()) deg = 2 * static_cast<int>(radial_.size() - 1);
  for (const auto& t : mono_) deg = std::max(deg, t.e[0] + t.e[1] + t.e[2]);
  return deg;
}

}  // namespace lpw
