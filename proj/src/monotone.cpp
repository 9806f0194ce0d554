#include "fracwave/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void require_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw MonotoneError("epsilon must lie in (0,1)");
}

MonotoneGraph MonotoneGraph::indicator(double a, double b) {
  if (std::isnan(a) || std::isnan(b) || a > b) throw MonotoneError("interval bounds must satisfy a <= b");
  if (a > 0.0 || b < 0.0) throw MonotoneError("interval must contain 0");
  MonotoneGraph g;
  g.kind_ = Kind::Indicator;
  g.a_ = a;
  g.b_ = b;
  return g;
}

MonotoneGraph MonotoneGraph::free() { return indicator(-kInf, kInf); }
MonotoneGraph MonotoneGraph::lower(double a) { return indicator(a, kInf); }
MonotoneGraph MonotoneGraph::upper(double b) { return indicator(-kInf, b); }

MonotoneGraph MonotoneGraph::staircase(std::vector<Breakpoint> points, double slope_below,
                                       double slope_above) {
  if (points.empty()) throw MonotoneError("staircase needs at least one breakpoint");
  if (!(slope_below >= 0.0) || !(slope_above >= 0.0) || !std::isfinite(slope_below) ||
      !std::isfinite(slope_above))
    throw MonotoneError("staircase slopes must be finite and nonnegative");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Breakpoint& p = points[k];
    if (!std::isfinite(p.x) || !std::isfinite(p.left) || !std::isfinite(p.right))
      throw MonotoneError("staircase breakpoints must be finite");
    if (p.left > p.right) throw MonotoneError("staircase jump must be nondecreasing");
    if (k > 0) {
      if (!(points[k - 1].x < p.x)) throw MonotoneError("staircase breakpoints must be increasing");
      if (points[k - 1].right > p.left) throw MonotoneError("staircase must be nondecreasing");
    }
  }
  MonotoneGraph g;
  g.kind_ = Kind::Staircase;
  g.a_ = -kInf;
  g.b_ = kInf;
  g.points_ = std::move(points);
  g.slope_below_ = slope_below;
  g.slope_above_ = slope_above;
  const auto v = g.values(0.0);
  if (!(v.first <= 0.0 && 0.0 <= v.second)) throw MonotoneError("staircase must satisfy 0 in beta(0)");
  return g;
}

bool MonotoneGraph::is_free() const {
  if (kind_ == Kind::Indicator) return a_ == -kInf && b_ == kInf;
  if (slope_below_ != 0.0 || slope_above_ != 0.0) return false;
  for (const auto& p : points_)
    if (p.left != 0.0 || p.right != 0.0) return false;
  return true;
}

std::pair<double, double> MonotoneGraph::values(double r) const {
  if (kind_ == Kind::Indicator) {
    if (r < a_ || r > b_) return {kInf, -kInf};
    const double lo = r == a_ ? -kInf : 0.0;
    const double hi = r == b_ ? kInf : 0.0;
    return {lo, hi};
  }
  const auto& P = points_;
  if (r < P.front().x) {
    const double v = P.front().left + slope_below_ * (r - P.front().x);
    return {v, v};
  }
  if (r > P.back().x) {
    const double v = P.back().right + slope_above_ * (r - P.back().x);
    return {v, v};
  }
  auto it = std::lower_bound(P.begin(), P.end(), r,
                             [](const Breakpoint& p, double x) { return p.x < x; });
  if (it->x == r) return {it->left, it->right};
  const Breakpoint& hi = *it;
  const Breakpoint& lo = *(it - 1);
  const double t = (r - lo.x) / (hi.x - lo.x);
  const double v = lo.right + t * (hi.left - lo.right);
  return {v, v};
}

double MonotoneGraph::staircase_primitive(double x) const {
  // Integral from 0 to x of the single-valued part of beta; exact for
  // piecewise-linear beta.
  const auto& P = points_;
  std::vector<double> knots{0.0, x};
  for (const auto& p : P)
    if (p.x > std::min(0.0, x) && p.x < std::max(0.0, x)) knots.push_back(p.x);
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double l = knots[k], r = knots[k + 1];
    if (r <= l) continue;
    // Evaluate strictly inside the piece to avoid jump values.
    const double ml = l + (r - l) * 0.25, mr = l + (r - l) * 0.75;
    const double vl = values(ml).first, vr = values(mr).first;
    const double slope = (vr - vl) / (mr - ml);
    const double at_l = vl - slope * (ml - l);
    const double at_r = vr + slope * (r - mr);
    total += 0.5 * (at_l + at_r) * (r - l);
  }
  return x >= 0.0 ? total : -total;
}

double MonotoneGraph::potential(double r) const {
  if (kind_ == Kind::Indicator) return (r < a_ || r > b_) ? kInf : 0.0;
  return staircase_primitive(r);
}

// Solves x + lambda beta(x) ∋ r. The map x -> x + lambda beta(x) is strictly
// increasing, so the breakpoints are bisected to locate the piece holding the
// solution, which is then solved exactly.
double MonotoneGraph::staircase_resolvent(double r, double lambda, double* slope) const {
  const auto& P = points_;
  auto phi_lo = [&](const Breakpoint& p) { return p.x + lambda * p.left; };
  auto phi_hi = [&](const Breakpoint& p) { return p.x + lambda * p.right; };
  // First breakpoint whose upper value reaches r.
  std::size_t lo = 0, hi = P.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (phi_hi(P[mid]) < r)
      lo = mid + 1;
    else
      hi = mid;
  }
  const std::size_t k = lo;
  if (k < P.size() && phi_lo(P[k]) <= r) {
    if (slope) *slope = kInf;
    return P[k].x;
  }
  // r lies strictly between phi_hi(P[k-1]) and phi_lo(P[k]) on a linear piece.
  double x0, v0, kslope;
  if (k == 0) {
    x0 = P.front().x;
    v0 = P.front().left;
    kslope = slope_below_;
  } else if (k == P.size()) {
    x0 = P.back().x;
    v0 = P.back().right;
    kslope = slope_above_;
  } else {
    x0 = P[k - 1].x;
    v0 = P[k - 1].right;
    kslope = (P[k].left - P[k - 1].right) / (P[k].x - P[k - 1].x);
  }
  if (slope) *slope = kslope;
  // x + lambda (v0 + kslope (x - x0)) = r
  double x = (r - lambda * v0 + lambda * kslope * x0) / (1.0 + lambda * kslope);
  if (k > 0) x = std::max(x, P[k - 1].x);
  if (k < P.size()) x = std::min(x, P[k].x);
  return x;
}

double MonotoneGraph::resolvent(double r, double lambda) const {
  if (!(lambda > 0.0)) throw MonotoneError("resolvent parameter must be positive");
  if (kind_ == Kind::Indicator) return std::clamp(r, a_, b_);
  return staircase_resolvent(r, lambda, nullptr);
}

double MonotoneGraph::yosida(double r, double eps) const {
  require_epsilon(eps);
  if (kind_ == Kind::Indicator) {
    // Same expression as the vector kernels so both routes agree bitwise.
    return (std::max(r - b_, 0.0) + std::min(r - a_, 0.0)) / eps;
  }
  if (r == 0.0) return 0.0;
  return (r - staircase_resolvent(r, eps, nullptr)) / eps;
}

double MonotoneGraph::yosida_derivative(double r, double eps) const {
  require_epsilon(eps);
  if (kind_ == Kind::Indicator) return (r > b_ || r < a_) ? 1.0 / eps : 0.0;
  double k = 0.0;
  staircase_resolvent(r, eps, &k);
  if (std::isinf(k)) return 1.0 / eps;
  return k / (1.0 + eps * k);
}

double MonotoneGraph::envelope(double r, double eps) const {
  require_epsilon(eps);
  const double J = resolvent(r, eps);
  const double jJ = kind_ == Kind::Indicator ? 0.0 : staircase_primitive(J);
  return jJ + (r - J) * (r - J) / (2.0 * eps);
}

void MonotoneGraph::yosida(std::span<const double> u, double eps, std::span<double> out,
                           std::span<double> deriv) const {
  require_epsilon(eps);
  const std::size_t n = u.size();
  if (kind_ == Kind::Indicator) {
    kernels::active().yosida_interval(u.data(), a_, b_, eps, out.data(),
                                      deriv.empty() ? nullptr : deriv.data(), n);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double k = 0.0;
    const double J = u[i] == 0.0 ? 0.0 : staircase_resolvent(u[i], eps, &k);
    out[i] = (u[i] - J) / eps;
    if (!deriv.empty()) {
      if (u[i] == 0.0) staircase_resolvent(0.0, eps, &k);
      deriv[i] = std::isinf(k) ? 1.0 / eps : k / (1.0 + eps * k);
    }
  }
}

double MonotoneGraph::envelope_sum(std::span<const double> u, double eps) const {
  require_epsilon(eps);
  double s = 0.0;
  if (kind_ == Kind::Indicator) {
    if (is_free()) return 0.0;
    for (double r : u) {
      const double d = std::max(r - b_, 0.0) + std::min(r - a_, 0.0);
      s += d * d;
    }
    return s / (2.0 * eps);
  }
  for (double r : u) s += envelope(r, eps);
  return s;
}

double required_c2(const MonotoneGraph& g, double c1, double eps, double r_lo, double r_hi,
                   int samples) {
  double c2 = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double r = r_lo + (r_hi - r_lo) * k / double(samples - 1);
    const double be = g.yosida(r, eps);
    c2 = std::max(c2, c1 * std::abs(be) - be * r);
  }
  // Maxima of the concave pieces may fall between samples; refine around 0
  // where they concentrate for obstacle graphs.
  for (int k = 1; k <= 64; ++k) {
    for (double sign : {-1.0, 1.0}) {
      const double r = sign * c1 * k / 64.0;
      if (r < r_lo || r > r_hi) continue;
      const double be = g.yosida(r, eps);
      c2 = std::max(c2, c1 * std::abs(be) - be * r);
    }
  }
  return c2;
}

CoercivityResult coercivity_constants(const MonotoneGraph& g, double r_lo, double r_hi,
                                      const CoercivityOptions& opt) {
  if (!(r_lo < r_hi)) throw MonotoneError("probe range must be a nonempty interval");
  if (opt.epsilons.size() < 2 || opt.samples < 2)
    throw MonotoneError("coercivity search needs at least two epsilons and two samples");
  double c1 = 1.0;
  for (int attempt = 0; attempt <= opt.c1_halvings; ++attempt, c1 *= 0.5) {
    std::vector<double> c2s;
    for (double eps : opt.epsilons) c2s.push_back(required_c2(g, c1, eps, r_lo, r_hi, opt.samples));
    const double last = c2s.back();
    const double prev = c2s[c2s.size() - 2];
    const bool uniform = last <= opt.growth_tolerance * prev + 1e-12;
    if (uniform) return {c1, *std::max_element(c2s.begin(), c2s.end()), true};
  }
  throw NonConformingGraph(
      "no epsilon-uniform coercivity constants: c2 grows like 1/epsilon on the probe range "
      "(0 is not an interior point of the domain of beta)");
}

}  // namespace fracwave
