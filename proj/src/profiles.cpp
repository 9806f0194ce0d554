#include "fracwave/profiles.hpp"

#include <cmath>

namespace fracwave {

double smooth_bump(double r) {
  const double a = std::abs(r);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

namespace {

std::vector<double> centre_of(const ProfileSpec& p, const GridSpec& g) {
  if (p.center.empty()) return std::vector<double>(std::size_t(g.d), 0.5 * g.L);
  if (p.center.size() != std::size_t(g.d)) throw DomainError("profile centre must have d entries");
  return p.center;
}

template <class Fn>
void fill(Field& f, const GridSpec& g, Fn fn) {
  const int N = g.N;
  if (g.d == 1) {
    for (int i = 0; i < N; ++i) f.values[std::size_t(i)] = fn(g.local_coord(i), 0.0);
  } else {
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix)
        f.values[std::size_t(iy) * N + ix] = fn(g.local_coord(ix), g.local_coord(iy));
  }
}

}  // namespace

Field evaluate_profile(const ProfileSpec& p, const GridSpec& g) {
  Field f = Field::scalar(g);
  const double A = p.amplitude;
  const double L = g.L;
  if (p.type == "zero") return f;
  if (p.type == "constant") {
    std::fill(f.values.begin(), f.values.end(), A);
  } else if (p.type == "bump" || p.type == "gaussian") {
    const auto c = centre_of(p, g);
    const bool bump = p.type == "bump";
    const double scale = (bump ? p.radius : p.width) * L;
    if (!(scale > 0.0)) throw DomainError("profile radius/width must be positive");
    fill(f, g, [&](double x, double y) {
      double r2 = (x - c[0]) * (x - c[0]);
      if (g.d == 2) r2 += (y - c[1]) * (y - c[1]);
      if (bump) return A * smooth_bump(std::sqrt(r2) / scale);
      return A * std::exp(-r2 / (2.0 * scale * scale));
    });
  } else if (p.type == "mode") {
    const double k = p.mode * M_PI / L;
    fill(f, g, [&](double x, double y) {
      return A * std::sin(k * x) * (g.d == 2 ? std::sin(k * y) : 1.0);
    });
  } else if (p.type == "torus_mode") {
    const double k = 2.0 * M_PI * p.mode / g.box();
    fill(f, g, [&](double x, double y) {
      return A * std::sin(k * (x + g.offset)) * (g.d == 2 ? std::sin(k * (y + g.offset)) : 1.0);
    });
    return f;
  } else if (p.type == "plucked") {
    const auto c = centre_of(p, g);
    for (double ci : c)
      if (!(ci > 0.0 && ci < L)) throw DomainError("plucked peak must lie inside omega");
    auto tri = [&](double x, double ci) { return x <= ci ? x / ci : (L - x) / (L - ci); };
    fill(f, g, [&](double x, double y) {
      return A * tri(x, c[0]) * (g.d == 2 ? tri(y, c[1]) : 1.0);
    });
  } else if (p.type == "table") {
    const auto idx = g.interior_indices();
    if (p.values.size() != idx.size())
      throw DomainError("node table must have one value per omega node");
    for (std::size_t k = 0; k < idx.size(); ++k) f.values[idx[k]] = A * p.values[k];
  } else {
    throw DomainError("unknown profile type '" + p.type + "'");
  }
  mask_in_place(f);
  return f;
}

}  // namespace fracwave
