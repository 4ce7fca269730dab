#include "lpw/geometry.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace lpw {

namespace {

std::vector<std::pair<double, double>> compute_gauss_legendre(int order) {
  std::vector<std::pair<double, double>> rule(static_cast<size_t>(order));
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-style initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule[static_cast<size_t>(i)] = {-x, w};
    rule[static_cast<size_t>(order - 1 - i)] = {x, w};
  }
  return rule;
}

}  // namespace

const std::vector<std::pair<double, double>>& gauss_legendre(int order) {
  if (order < 1 || order > 64) throw std::domain_error("gauss_legendre: order out of range");
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

std::vector<double> merge_breakpoints(double a, double b, const std::vector<double>& pts,
                                      double min_gap_rel) {
  std::vector<double> edges;
  edges.push_back(a);
  for (double p : pts)
    if (p > a && p < b) edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  const double gap = min_gap_rel * (std::abs(a) + std::abs(b) + (b - a));
  std::vector<double> out;
  out.push_back(edges.front());
  for (size_t i = 1; i + 1 < edges.size(); ++i)
    if (edges[i] - out.back() > gap) out.push_back(edges[i]);
  if (edges.back() - out.back() > gap)
    out.push_back(edges.back());
  else
    out.back() = edges.back();
  return out;
}

std::vector<double> geometric_edges(double a, double b, double ratio) {
  if (!(a > 0.0) || !(b > a) || !(ratio > 1.0))
    throw std::domain_error("geometric_edges: need 0 < a < b and ratio > 1");
  std::vector<double> edges{a};
  double x = a;
  while (x * ratio < b) {
    x *= ratio;
    edges.push_back(x);
  }
  edges.push_back(b);
  return edges;
}

}  // namespace lpw
