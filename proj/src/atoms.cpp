#include "lpw/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lpw/sphere_rules.hpp"

namespace lpw::atoms {

int min_moment_order(int n, double p) {
  if (n < 1) throw std::domain_error("min_moment_order: n must be >= 1");
  if (!(p > 0.0) || p > 1.0) throw std::domain_error("min_moment_order: p not in (0,1]");
  return static_cast<int>(std::floor(n * (1.0 / p - 1.0)));
}

const std::vector<std::string>& profile_catalog() {
  static const std::vector<std::string> names = {"bump", "tilted-bump", "ridged-bump"};
  return names;
}

BallPoly make_shape(const std::string& name, int dim) {
  Ball unit{Vec(0.0, 0.0), 1.0};
  if (dim == 3) unit.center = Vec(0.0, 0.0, 0.0);
  // (1-w)^2 = 1 - 2w + w^2, w = |u|^2
  if (name == "bump") return BallPoly(unit, {1.0, -2.0, 1.0}, {});
  if (name == "tilted-bump") {
    // bump * (1 + u1/2): breaks radial symmetry, keeps closed-form moments.
    // The (1 - 2w + w^2) u1/2 product is expanded into monomials in u.
    std::vector<BallPoly::Term> terms;
    auto add = [&](std::array<int, 3> e, double c) {
      if (c != 0.0) terms.push_back({e, c});
    };
    // u1 * 1
    add({1, 0, 0}, 0.5);
    // u1 * (-2w)
    add({3, 0, 0}, -1.0);
    add({1, 2, 0}, -1.0);
    if (dim == 3) add({1, 0, 2}, -1.0);
    // u1 * w^2
    add({5, 0, 0}, 0.5);
    add({1, 4, 0}, 0.5);
    add({3, 2, 0}, 1.0);
    if (dim == 3) {
      add({1, 0, 4}, 0.5);
      add({3, 0, 2}, 1.0);
      add({1, 2, 2}, 1.0);
    }
    return BallPoly(unit, {1.0, -2.0, 1.0}, terms);
  }
  if (name == "ridged-bump") {
    // bump * (1 + u1 u2): mildly anisotropic second variant
    std::vector<BallPoly::Term> terms;
    auto add = [&](std::array<int, 3> e, double c) { terms.push_back({e, c}); };
    add({1, 1, 0}, 1.0);
    add({3, 1, 0}, -2.0);
    add({1, 3, 0}, -2.0);
    if (dim == 3) add({1, 1, 2}, -2.0);
    add({5, 1, 0}, 1.0);
    add({1, 5, 0}, 1.0);
    add({3, 3, 0}, 2.0);
    if (dim == 3) {
      add({1, 1, 4}, 1.0);
      add({3, 1, 2}, 2.0);
      add({1, 3, 2}, 2.0);
    }
    return BallPoly(unit, {1.0, -2.0, 1.0}, terms);
  }
  throw std::domain_error("unknown profile shape: " + name);
}

namespace {

// multi-indices |e| <= s in dimension n, deterministic order
std::vector<std::array<int, 3>> monomials_up_to(int n, int s) {
  std::vector<std::array<int, 3>> out;
  for (int total = 0; total <= s; ++total)
    for (int i = 0; i <= total; ++i)
      for (int j = 0; j + i <= total; ++j) {
        int k = total - i - j;
        if (n == 2 && k != 0) continue;
        out.push_back({i, j, k});
      }
  return out;
}

// Solve the symmetric system G c = m with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> G, std::vector<double> m) {
  const size_t N = m.size();
  for (size_t col = 0; col < N; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < N; ++r)
      if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
    if (std::abs(G[piv][col]) < 1e-300) throw std::runtime_error("singular Gram matrix");
    std::swap(G[piv], G[col]);
    std::swap(m[piv], m[col]);
    for (size_t r = col + 1; r < N; ++r) {
      double f = G[r][col] / G[col][col];
      for (size_t c2 = col; c2 < N; ++c2) G[r][c2] -= f * G[col][c2];
      m[r] -= f * m[col];
    }
  }
  std::vector<double> x(N, 0.0);
  for (size_t riv = N; riv-- > 0;) {
    double acc = m[riv];
    for (size_t c2 = riv + 1; c2 < N; ++c2) acc -= G[riv][c2] * x[c2];
    x[riv] = acc / G[riv][riv];
  }
  return x;
}

// Subtract from `shape` (on the unit ball) its projection onto polynomials
// of degree <= s; moments are exact ball monomial integrals evaluated on a
// Gauss x trapezoid polar grid's closed form.
BallPoly remove_moments(const BallPoly& shape, int n, int s) {
  auto basis = monomials_up_to(n, s);
  const size_t N = basis.size();
  std::vector<std::vector<double>> G(N, std::vector<double>(N, 0.0));
  std::vector<double> rhs(N, 0.0);
  for (size_t i = 0; i < N; ++i) {
    for (size_t j = 0; j < N; ++j) {
      std::array<int, 3> e{};
      for (int d = 0; d < 3; ++d)
        e[static_cast<size_t>(d)] =
            basis[i][static_cast<size_t>(d)] + basis[j][static_cast<size_t>(d)];
      G[i][j] = ball_monomial_integral(n, e);
    }
    rhs[i] = shape.moment(basis[i]);  // unit ball: r = 1, center 0
  }
  auto coeffs = solve_dense(G, rhs);
  std::vector<BallPoly::Term> mono = shape.monomial_part();
  for (size_t i = 0; i < N; ++i)
    if (coeffs[i] != 0.0) mono.push_back({basis[i], -coeffs[i]});
  return BallPoly(shape.support(), shape.radial_part(), mono);
}

}  // namespace

Atom build_atom(int n, double p, const Ball& ball, const BallPoly& shape, int s,
                const AtomBuildOptions& opt) {
  if (s < min_moment_order(n, p))
    throw std::domain_error("build_atom: s below floor(n(1/p-1))");
  if (!(ball.radius > 0.0)) throw std::domain_error("build_atom: radius must be positive");
  BallPoly centered = remove_moments(shape, n, s);
  double raw_sup = centered.sup_abs(opt.sup_resolution);
  if (raw_sup < 1e-13)
    throw std::domain_error("build_atom: degenerate shape (projection removed everything)");
  Ball b = ball;
  b.center.n = n;
  double cap = std::pow(ball_measure(b), -1.0 / p);
  double target = (1.0 - opt.headroom) * cap;
  BallPoly profile = centered.scaled(target / raw_sup).transplanted(b);
  Atom a;
  a.ball = b;
  a.p = p;
  a.s = s;
  a.profile = profile;
  a.sup_norm = target;
  return a;
}

Atom build_atom(int n, double p, const Ball& ball, const std::string& shape_name, int s,
                const AtomBuildOptions& opt) {
  return build_atom(n, p, ball, make_shape(shape_name, n), s, opt);
}

AtomReport verify_atom(const Atom& a, const AtomTols& tols) {
  AtomReport rep;
  const int n = a.ball.center.n;
  // (i) support: sample outside the ball
  double leak = 0.0;
  for (int i = 0; i < 64; ++i) {
    double phi = 2.0 * M_PI * i / 64;
    for (double f : {1.0 + 1e-9, 1.1, 1.5, 3.0}) {
      Vec dir = (n == 2) ? circle_dir(phi)
                         : normalized(Vec(std::cos(phi), std::sin(phi), std::cos(3 * phi)));
      leak = std::max(leak, std::abs(a.profile.eval(a.ball.center + (f * a.ball.radius) * dir)));
    }
  }
  rep.support_leak = leak;
  rep.support_ok = (leak == 0.0);

  // (ii) size
  rep.sup_measured = a.profile.sup_abs(tols.quad_resolution * 3);
  rep.sup_cap = std::pow(ball_measure(a.ball), -1.0 / a.p);
  rep.size_ok = rep.sup_measured <= rep.sup_cap * (1.0 + 1e-12);

  // (iii) moments through order s, in centered coordinates (equivalent to
  // the global monomials by binomial expansion). Exact ball moments give an
  // independent route from the construction's Gram solve.
  double worst = 0.0;
  double scale_base = rep.sup_measured * ball_measure(a.ball);
  for (const auto& e : monomials_up_to(n, a.s)) {
    double m = a.profile.moment(e);
    int te = e[0] + e[1] + e[2];
    double scale = scale_base * std::pow(a.ball.radius, te);
    worst = std::max(worst, std::abs(m) / scale);
  }
  rep.worst_moment_rel = worst;
  rep.moments_ok = worst <= tols.moment_tol;
  return rep;
}

// --- weak Hardy --------------------------------------------------------------

std::vector<int> WeakHardySequence::levels() const {
  std::vector<int> ks;
  for (const auto& b : blocks)
    if (std::find(ks.begin(), ks.end(), b.level) == ks.end()) ks.push_back(b.level);
  std::sort(ks.begin(), ks.end());
  return ks;
}

std::vector<const Block*> WeakHardySequence::level_blocks(int k) const {
  std::vector<const Block*> out;
  for (const auto& b : blocks)
    if (b.level == k) out.push_back(&b);
  return out;
}

WeakHardySequence build_weak_hardy(const WeakHardyPlan& plan) {
  WeakHardySequence seq;
  seq.p = plan.p;
  seq.n = plan.n;
  seq.moment_order = min_moment_order(plan.n, plan.p);
  if (plan.levels.empty()) {
    seq.budget_c = 0.0;
    return seq;
  }
  BallPoly shape = make_shape(plan.shape, plan.n);

  double c_needed = 0.0;
  for (const auto& lvl : plan.levels) {
    // disjointness within a level (v1 packing; overlap bound C_ov = 1)
    for (size_t i = 0; i < lvl.balls.size(); ++i)
      for (size_t j = i + 1; j < lvl.balls.size(); ++j) {
        double gap = norm(lvl.balls[i].center - lvl.balls[j].center);
        if (gap < lvl.balls[i].radius + lvl.balls[j].radius)
          throw std::domain_error("build_weak_hardy: balls overlap within a level");
      }
    double level_measure = 0.0;
    for (const auto& b : lvl.balls) level_measure += ball_measure(b);
    c_needed = std::max(c_needed, level_measure * std::pow(2.0, lvl.k * plan.p));
    for (const auto& b : lvl.balls) {
      Atom proto = build_atom(plan.n, plan.p, b, shape, seq.moment_order,
                              AtomBuildOptions{0.0, 192});
      // blocks are rescaled to sup = 2^k (shared C_b = 1)
      double target = std::pow(2.0, lvl.k);
      Block blk;
      blk.level = lvl.k;
      blk.ball = b;
      blk.profile = proto.profile.scaled(target / proto.sup_norm);
      seq.blocks.push_back(std::move(blk));
    }
  }
  seq.sup_constant = 1.0;
  seq.budget_c = c_needed;
  return seq;
}

LevelSplit split_at_level(const WeakHardySequence& seq, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("split_at_level: lambda must be positive");
  LevelSplit out;
  out.k0 = static_cast<int>(std::floor(std::log2(lambda)));
  for (const auto& b : seq.blocks) {
    if (b.level <= out.k0)
      out.low.push_back(&b);
    else
      out.high.push_back(&b);
  }
  for (const Block* b : out.low)
    out.low_l4_bound += b->profile.sup_abs(64) * std::pow(ball_measure(b->ball), 0.25);
  return out;
}

double dilation_factor(int k, int k0, double p, int n) {
  return 64.0 * std::pow(1.5, (k - k0) * p / n);
}

DilatedCover dilated_cover(const WeakHardySequence& seq, int k0) {
  DilatedCover cover;
  cover.k0 = k0;
  for (const auto& b : seq.blocks) {
    if (b.level <= k0) continue;
    DilatedBall db;
    db.level = b.level;
    db.ball = b.ball;
    db.ball.radius = b.ball.radius * dilation_factor(b.level, k0, seq.p, seq.n);
    cover.total_measure += ball_measure(db.ball);
    cover.balls.push_back(db);
  }
  return cover;
}

}  // namespace lpw::atoms
