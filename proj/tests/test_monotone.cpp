#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "fracwave/monotone.hpp"

using namespace fracwave;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

MonotoneGraph test_staircase() {
  return MonotoneGraph::staircase({{-1.0, -1.0, -0.5}, {0.0, 0.0, 0.0}, {1.0, 0.5, 1.0}}, 0.5, 2.0);
}

// Solves x + lambda beta(x) ∋ r by bisection on the strictly increasing graph.
double bisect_resolvent(const MonotoneGraph& g, double r, double lambda) {
  double lo = -1e3, hi = 1e3;
  for (int it = 0; it < 200; ++it) {
    const double x = 0.5 * (lo + hi);
    const auto [bl, bh] = g.values(x);
    if (x + lambda * bl > r)
      hi = x;
    else if (x + lambda * bh < r)
      lo = x;
    else
      return x;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> samples(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("graph construction errors") {
  CHECK_THROWS_WITH_AS(MonotoneGraph::indicator(0.5, 1.0), "interval must contain 0", MonotoneError);
  CHECK_THROWS_WITH_AS(MonotoneGraph::indicator(1.0, -1.0), "interval bounds must satisfy a <= b",
                       MonotoneError);
  CHECK_THROWS_AS(MonotoneGraph::staircase({}, 0.0, 0.0), MonotoneError);
  CHECK_THROWS_AS(MonotoneGraph::staircase({{0.0, 1.0, 0.0}}, 0.0, 0.0), MonotoneError);
  CHECK_THROWS_AS(MonotoneGraph::staircase({{0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}}, 0.0, 0.0),
                  MonotoneError);
  CHECK_THROWS_AS(MonotoneGraph::staircase({{1.0, 2.0, 3.0}}, 1.0, 1.0), MonotoneError);
  CHECK_THROWS_AS(MonotoneGraph::staircase({{0.0, 0.0, 0.0}}, -1.0, 1.0), MonotoneError);
  CHECK(MonotoneGraph::free().is_free());
  CHECK_FALSE(MonotoneGraph::lower().is_free());
  CHECK(MonotoneGraph::lower(-0.5).a() == -0.5);
  CHECK(MonotoneGraph::upper(0.5).b() == 0.5);
}

TEST_CASE("epsilon range") {
  CHECK_THROWS_WITH_AS(require_epsilon(0.0), "epsilon must lie in (0,1)", MonotoneError);
  CHECK_THROWS_AS(require_epsilon(1.0), MonotoneError);
  CHECK_NOTHROW(require_epsilon(0.5));
  CHECK_THROWS_AS(MonotoneGraph::free().yosida(0.0, 2.0), MonotoneError);
}

TEST_CASE("indicator resolvent is the projection") {
  for (const auto& g : {MonotoneGraph::indicator(-1.0, 0.5), MonotoneGraph::lower(),
                        MonotoneGraph::upper(0.25), MonotoneGraph::free()}) {
    for (double r : samples(500, 1)) {
      const double p = std::clamp(r, g.a(), g.b());
      CHECK(g.resolvent(r, 0.3) == p);
      CHECK(g.yosida(r, 0.01) == doctest::Approx((r - p) / 0.01).epsilon(1e-14));
      CHECK(std::abs(g.yosida(r, 0.01)) <= std::abs(r) / 0.01);
      const double env = g.envelope(r, 0.01);
      CHECK(env == doctest::Approx((r - p) * (r - p) / 0.02).epsilon(1e-12));
    }
  }
  CHECK(MonotoneGraph::lower().potential(-1.0) == kInf);
  CHECK(MonotoneGraph::lower().potential(1.0) == 0.0);
  const auto v = MonotoneGraph::lower().values(0.0);
  CHECK(v.first == -kInf);
  CHECK(v.second == 0.0);
  CHECK(MonotoneGraph::lower().values(-1.0).first > MonotoneGraph::lower().values(-1.0).second);
}

TEST_CASE("staircase values and potential") {
  const auto g = test_staircase();
  CHECK(g.values(-2.0).first == doctest::Approx(-1.5));
  CHECK(g.values(-1.0).first == doctest::Approx(-1.0));
  CHECK(g.values(-1.0).second == doctest::Approx(-0.5));
  CHECK(g.values(0.5).first == doctest::Approx(0.25));
  CHECK(g.values(2.0).first == doctest::Approx(3.0));
  // Primitive from 0 by exact integration of the linear pieces.
  CHECK(g.potential(0.0) == 0.0);
  CHECK(g.potential(1.0) == doctest::Approx(0.25));
  CHECK(g.potential(2.0) == doctest::Approx(0.25 + 1.0 + 1.0));
  CHECK(g.potential(-1.0) == doctest::Approx(0.25));
  CHECK(g.potential(-2.0) == doctest::Approx(0.25 + 1.25));
}

TEST_CASE("staircase resolvent matches bisection") {
  const auto g = test_staircase();
  for (double lambda : {1e-3, 0.1, 1.0}) {
    for (double r : samples(2000, 2)) {
      CAPTURE(r);
      CHECK(g.resolvent(r, lambda) == doctest::Approx(bisect_resolvent(g, r, lambda)).epsilon(1e-12));
    }
    // Points that land exactly on a jump.
    CHECK(g.resolvent(-1.0 - 0.7 * lambda, lambda) == doctest::Approx(-1.0));
    CHECK(g.resolvent(1.0 + 0.7 * lambda, lambda) == doctest::Approx(1.0));
  }
}

TEST_CASE("Yosida approximation is Lipschitz, monotone and the envelope derivative") {
  const auto stair = test_staircase();
  for (const auto& g : {stair, MonotoneGraph::indicator(-1.0, 1.0), MonotoneGraph::lower()}) {
    for (double eps : {0.1, 0.01}) {
      auto r = samples(1000, 3);
      std::sort(r.begin(), r.end());
      for (std::size_t k = 1; k < r.size(); ++k) {
        const double d = g.yosida(r[k], eps) - g.yosida(r[k - 1], eps);
        CHECK(d >= 0.0);
        CHECK(d <= (r[k] - r[k - 1]) / eps * (1 + 1e-12) + 1e-12);
      }
      for (double x : r) {
        const double delta = 1e-6;
        const double fd = (g.envelope(x + delta, eps) - g.envelope(x - delta, eps)) / (2 * delta);
        CHECK(fd == doctest::Approx(g.yosida(x, eps)).epsilon(1e-5).scale(1.0));
        CHECK(g.envelope(x, eps) >= 0.0);
      }
      CHECK(g.yosida(0.0, eps) == 0.0);
      CHECK(g.envelope(0.0, eps) == 0.0);
    }
  }
}

TEST_CASE("Newton derivative agrees with finite differences away from kinks") {
  const auto g = test_staircase();
  const double eps = 0.05;
  for (double r : samples(500, 4)) {
    const double d = 1e-7;
    const double lo = g.yosida(r - d, eps), mid = g.yosida(r, eps), hi = g.yosida(r + d, eps);
    // Skip samples where the two one-sided slopes disagree.
    if (std::abs((hi - mid) - (mid - lo)) > 1e-6 * std::max(1.0, std::abs(mid))) continue;
    CHECK(g.yosida_derivative(r, eps) == doctest::Approx((hi - lo) / (2 * d)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("vectorised Yosida agrees with the pointwise version") {
  const auto r = samples(1003, 5);
  for (const auto& g : {test_staircase(), MonotoneGraph::indicator(-0.5, 2.0), MonotoneGraph::free()}) {
    std::vector<double> out(r.size()), der(r.size());
    g.yosida(r, 0.02, out, der);
    double env = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(out[k] == g.yosida(r[k], 0.02));
      CHECK(der[k] == g.yosida_derivative(r[k], 0.02));
      env += g.envelope(r[k], 0.02);
    }
    CHECK(g.envelope_sum(r, 0.02) == doctest::Approx(env).epsilon(1e-12));
    std::vector<double> only(r.size());
    g.yosida(r, 0.02, only);
    CHECK(only == out);
  }
}

TEST_CASE("coercivity constants") {
  const auto box = coercivity_constants(MonotoneGraph::indicator(-1.0, 1.0), -3.0, 3.0);
  CHECK(box.epsilon_uniform);
  CHECK(box.c1 > 0.0);
  for (double eps : {1e-2, 1e-4})
    CHECK(required_c2(MonotoneGraph::indicator(-1.0, 1.0), box.c1, eps, -3.0, 3.0, 2001) <=
          box.c2 * (1 + 1e-12));
  CHECK_THROWS_AS(coercivity_constants(MonotoneGraph::lower(), -3.0, 3.0), NonConformingGraph);
  CHECK(required_c2(MonotoneGraph::free(), 1.0, 0.1, -3.0, 3.0, 101) == 0.0);
  CHECK_THROWS_AS(coercivity_constants(MonotoneGraph::free(), 1.0, -1.0), MonotoneError);
}

TEST_CASE("closed-form resolvent and Yosida values") {
  const auto sign = MonotoneGraph::staircase({{0.0, 0.0, 1.0}}, 0.0, 0.0);
  CHECK(sign.resolvent(0.5, 1.0) == 0.0);
  CHECK(sign.resolvent(2.0, 1.0) == doctest::Approx(1.0));
  CHECK(MonotoneGraph::lower().yosida(-0.5, 0.25) == doctest::Approx(-2.0));
  CHECK(MonotoneGraph::indicator(-1.0, 1.0).yosida(2.0, 0.5) == doctest::Approx(2.0));
  const auto lo = MonotoneGraph::lower();
  CHECK(lo.envelope(-1.0, 0.5) == doctest::Approx(1.0));
  const double d = 1e-6;
  CHECK((lo.envelope(-1.0 + d, 0.5) - lo.envelope(-1.0 - d, 0.5)) / (2 * d) == doctest::Approx(-2.0));
}

TEST_CASE("coercivity constants on the domain window") {
  const auto half = coercivity_constants(MonotoneGraph::lower(), 0.0, 10.0);
  CHECK(half.c1 == 1.0);
  CHECK(half.c2 == 0.0);
  CHECK(half.epsilon_uniform);
  const auto box = coercivity_constants(MonotoneGraph::indicator(-1.0, 1.0), -10.0, 10.0);
  CHECK(box.c1 == doctest::Approx(1.0));
  CHECK(box.c2 == doctest::Approx(0.0));
}
