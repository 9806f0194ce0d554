#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fracwave/frac_ops.hpp"
#include "fracwave/profiles.hpp"

using namespace fracwave;
using cd = std::complex<double>;

namespace {

// Brute-force DFT evaluation of component c of D^s u: the symbol
// i 2 pi xi_c |2 pi xi|^(s-1) on signed wavenumbers, zero on Nyquist lines.
std::vector<double> dft_gradient(const Field& u, double s, int c) {
  const GridSpec& g = u.grid;
  const int N = g.N;
  const int ny = g.d == 2 ? N : 1;
  auto signed_k = [&](int k) { return k <= N / 2 ? k : k - N; };
  std::vector<cd> uh(std::size_t(N) * std::size_t(ny));
  for (int ky = 0; ky < ny; ++ky)
    for (int kx = 0; kx < N; ++kx) {
      cd acc = 0.0;
      for (int jy = 0; jy < ny; ++jy)
        for (int jx = 0; jx < N; ++jx) {
          const double ph = -2.0 * M_PI * (double(kx) * jx + double(ky) * jy) / N;
          acc += u.values[std::size_t(jy * N + jx)] * cd(std::cos(ph), std::sin(ph));
        }
      uh[std::size_t(ky * N + kx)] = acc;
    }
  for (int ky = 0; ky < ny; ++ky)
    for (int kx = 0; kx < N; ++kx) {
      const int sx = signed_k(kx), sy = g.d == 2 ? signed_k(ky) : 0;
      const double xi_x = sx / g.box(), xi_y = sy / g.box();
      const double mag = 2.0 * M_PI * std::sqrt(xi_x * xi_x + xi_y * xi_y);
      const int axis_k = c == 0 ? kx : ky;
      const double xi_c = c == 0 ? xi_x : xi_y;
      double a = 0.0;
      if (mag > 0.0 && axis_k != N / 2) a = 2.0 * M_PI * xi_c * std::pow(mag, s - 1.0);
      uh[std::size_t(ky * N + kx)] *= cd(0.0, a);
    }
  std::vector<double> out(std::size_t(N) * std::size_t(ny));
  for (int jy = 0; jy < ny; ++jy)
    for (int jx = 0; jx < N; ++jx) {
      cd acc = 0.0;
      for (int ky = 0; ky < ny; ++ky)
        for (int kx = 0; kx < N; ++kx) {
          const double ph = 2.0 * M_PI * (double(kx) * jx + double(ky) * jy) / N;
          acc += uh[std::size_t(ky * N + kx)] * cd(std::cos(ph), std::sin(ph));
        }
      out[std::size_t(jy * N + jx)] = acc.real() / (double(N) * ny);
    }
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("exponent range") {
  const GridSpec g = build_grid(1, 1.0, 8, 64);
  CHECK_THROWS_AS(RieszOperator(g, 0.0), DomainError);
  CHECK_THROWS_AS(RieszOperator(g, 1.5), DomainError);
  CHECK_NOTHROW(RieszOperator(g, 1.0));
}

TEST_CASE("spectral gradient matches a brute-force DFT") {
  for (int d : {1, 2}) {
    const GridSpec g = d == 1 ? build_grid(1, 1.0, 8, 64) : build_grid(2, 1.0, 4, 16);
    const Field u = random_field(g, 1, 42, true);
    for (double s : {0.3, 0.75, 1.0}) {
      CAPTURE(d);
      CAPTURE(s);
      const Field du = RieszOperator(g, s).gradient(u);
      for (int c = 0; c < d; ++c) {
        const auto ref = dft_gradient(u, s, c);
        CHECK(max_abs_diff(du.component(c), ref) <= 1e-12 * max_abs(ref));
      }
    }
  }
}

TEST_CASE("symbol is odd and purely imaginary with zero Nyquist components") {
  const GridSpec g = build_grid(2, 1.0, 4, 16);
  const RieszOperator R(g, 0.6);
  for (int kx = -7; kx <= 7; ++kx)
    for (int ky = -7; ky <= 7; ++ky)
      for (int c = 0; c < 2; ++c) {
        const cd m = R.symbol(c, kx, ky), mm = R.symbol(c, -kx, -ky);
        CHECK(m.real() == 0.0);
        CHECK(mm == std::conj(m));
        CHECK(mm == -m);
      }
  CHECK(R.symbol(0, 8, 3) == cd(0.0));
  CHECK(R.symbol(1, 3, 8) == cd(0.0));
  CHECK(R.symbol(0, 3, 8) != cd(0.0));
  const double xi = 3.0 / g.box();
  CHECK(R.symbol(0, 3, 0).imag() == doctest::Approx(std::pow(2.0 * M_PI * xi, 0.6)));
}

TEST_CASE("single Fourier modes on the torus") {
  const GridSpec g = build_torus(1, 2.0, 64);
  const int k = 3;
  const double w = 2.0 * M_PI * k / g.L;
  Field u = Field::scalar(g), cosine = Field::scalar(g);
  for (int i = 0; i < g.N; ++i) {
    u.values[std::size_t(i)] = std::sin(w * g.coord(i));
    cosine.values[std::size_t(i)] = std::cos(w * g.coord(i));
  }
  for (double s : {0.25, 0.5, 0.9, 1.0}) {
    const RieszOperator R(g, s);
    const Field du = R.gradient(u);
    for (int i = 0; i < g.N; ++i)
      CHECK(du.values[std::size_t(i)] ==
            doctest::Approx(std::pow(w, s) * cosine.values[std::size_t(i)]).epsilon(1e-12).scale(1.0));
    std::vector<double> lap(u.values.size());
    R.fractional_laplacian(u.values, lap, 2.0);
    for (int i = 0; i < g.N; ++i)
      CHECK(lap[std::size_t(i)] ==
            doctest::Approx(2.0 * std::pow(w, 2 * s) * u.values[std::size_t(i)]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("s = 1 reproduces the classical derivative of a Gaussian") {
  const GridSpec g = build_grid(1, 1.0, 8, 1024);
  const double sigma = 0.05;
  ProfileSpec p;
  p.type = "gaussian";
  p.width = sigma;
  const Field u = evaluate_profile(p, g);
  const Field du = RieszOperator(g, 1.0).gradient(u);
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < g.N; ++i) {
    const double x = g.local_coord(i) - 0.5;
    const double exact = -x / (sigma * sigma) * std::exp(-x * x / (2 * sigma * sigma));
    err += std::pow(du.values[std::size_t(i)] - exact, 2);
    ref += exact * exact;
  }
  CHECK(std::sqrt(err / ref) <= 1e-10);
}

TEST_CASE("divergence is the negative adjoint of the gradient") {
  for (int d : {1, 2}) {
    const GridSpec g = d == 1 ? build_grid(1, 1.0, 8, 128) : build_grid(2, 1.0, 4, 32);
    for (double s : {0.2, 0.5, 1.0}) {
      const RieszOperator R(g, s);
      const Field u = random_field(g, 1, 7, true);
      const Field phi = random_field(g, d, 8, false);
      const double lhs = inner(R.gradient(u), phi) + inner(u, R.divergence(phi));
      CHECK(std::abs(lhs) <= 1e-12 * l2_norm(u) * l2_norm(phi));
    }
  }
}

TEST_CASE("elliptic operator pairing and symmetry") {
  const GridSpec g = build_grid(2, 1.0, 4, 32);
  const RieszOperator R(g, 0.7);
  const CoefficientField cf = CoefficientField::from_matrices(
      g, constant_matrix(g, {2.0, 0.3, 0.3, 1.0}), constant_matrix(g, {1.0, 0.0, 0.0, 1.0}));
  const EllipticOperator A = make_operator_A(R, cf);
  const Field u = random_field(g, 1, 1, true), w = random_field(g, 1, 2, true);
  const Field Au = A.apply(u), Aw = A.apply(w);
  CHECK(is_interior_supported(Au));
  CHECK(inner(Au, w) == doctest::Approx(A.pairing(u, w)).epsilon(1e-11));
  CHECK(inner(Au, w) == doctest::Approx(inner(u, Aw)).epsilon(1e-11));
  CHECK(A.pairing(u, u) >= 0.0);
  // Coercivity with the lower ellipticity bound.
  CHECK(A.pairing(u, u) >= cf.a_lo * std::pow(norms(u, R).hs_semi, 2) * (1 - 1e-12));

  // Identity fast path agrees with the general matrix path.
  const CoefficientField id = CoefficientField::identity(g, 1.5, 1.0);
  const EllipticOperator fast = make_operator_A(R, id);
  const EllipticOperator general(R, constant_matrix(g, {1.5, 0.0, 0.0, 1.5}), 0.0);
  CHECK(max_abs_diff(fast.apply(u).values, general.apply(u).values) <=
        1e-12 * max_abs(fast.apply(u).values));
}

TEST_CASE("shifted inverse inverts c0 + c1 S") {
  const GridSpec g = build_grid(1, 1.0, 8, 128);
  const RieszOperator R(g, 0.4);
  const Field f = random_field(g, 1, 3, false);
  std::vector<double> x(f.values.size()), back(f.values.size());
  R.shifted_inverse(f.values, x, 2.0, 0.5);
  R.fractional_laplacian(x, back, 0.5);
  for (std::size_t i = 0; i < x.size(); ++i) back[i] += 2.0 * x[i];
  CHECK(max_abs_diff(back, f.values) <= 1e-12 * max_abs(f.values));
}

TEST_CASE("normalising constant") {
  CHECK(fractional_laplacian_constant(1, 0.5) == doctest::Approx(1.0 / M_PI));
  CHECK(fractional_laplacian_constant(2, 0.5) == doctest::Approx(1.0 / (2.0 * M_PI)));
  CHECK_THROWS_AS(fractional_laplacian_constant(1, 1.0), DomainError);
}

TEST_CASE("singular integral agrees with the spectral operator") {
  const GridSpec g = build_grid(1, 1.0, 8, 512);
  ProfileSpec p;
  p.type = "bump";
  p.radius = 0.3;
  const Field u = evaluate_profile(p, g);
  const CoefficientField id = CoefficientField::identity(g);
  for (double s : {0.4, 0.6}) {
    const RieszOperator R(g, s);
    const Field a = apply_elliptic(make_operator_A(R, id), u);
    const Field b = singular_integral_laplacian(u, s, 2.0 * g.dx);
    double num = 0.0, den = 0.0;
    for (std::size_t i : g.interior_indices()) {
      num += std::pow(a.values[i] - b.values[i], 2);
      den += b.values[i] * b.values[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-2);
  }
  CHECK_THROWS_AS(singular_integral_laplacian(u, 0.5, g.dx), DomainError);
  CHECK_THROWS_AS(singular_integral_laplacian(u, 1.0, 2.0 * g.dx), DomainError);
}

TEST_CASE("singular integral in two dimensions converges to the spectral operator") {
  auto error_at = [](int N) {
    const GridSpec g = build_grid(2, 1.0, 4, N);
    ProfileSpec p;
    p.type = "bump";
    p.radius = 0.35;
    const Field u = evaluate_profile(p, g);
    const RieszOperator R(g, 0.5);
    const Field a = apply_elliptic(make_operator_A(R, CoefficientField::identity(g)), u);
    const Field b = singular_integral_laplacian(u, 0.5, 2.0 * g.dx);
    double num = 0.0, den = 0.0;
    for (std::size_t i : g.interior_indices()) {
      num += std::pow(a.values[i] - b.values[i], 2);
      den += b.values[i] * b.values[i];
    }
    return std::sqrt(num / den);
  };
  const double e32 = error_at(32), e64 = error_at(64);
  CHECK(e64 < e32);
  CHECK(e64 <= 0.1);
}

TEST_CASE("gradient limit as s -> 1") {
  const GridSpec g = build_grid(1, 10.0, 8, 512);
  ProfileSpec p;
  p.type = "bump";
  p.radius = 0.3;
  const auto probe = gradient_limit_probe(evaluate_profile(p, g), {0.5, 0.9, 0.99, 1.0});
  REQUIRE(probe.errors.size() == 4);
  CHECK(probe.errors[0] > probe.errors[1]);
  CHECK(probe.errors[1] > probe.errors[2]);
  CHECK(probe.errors[3] == 0.0);
  CHECK(probe.reference > 0.0);
}

TEST_CASE("Poincare constant bounds the sampled ratios") {
  const GridSpec g = build_grid(1, 1.0, 8, 128);
  const double c = calibrate_poincare_constant(g, 0.5, 20, 1);
  CHECK(c > 0.0);
  const RieszOperator R(g, 0.5);
  for (int k = 0; k < 20; ++k)
    CHECK(0.5 * poincare_ratio(random_field(g, 1, 1 + std::uint64_t(k), true), R) <= c);
  CHECK_THROWS_AS(poincare_ratio(Field::scalar(g), R), DomainError);
}

TEST_CASE("multiplier values on single modes of the unit torus") {
  const GridSpec g = build_torus(1, 1.0, 64);
  const RieszOperator R(g, 0.5);
  CHECK(std::abs(R.symbol(0, 1, 0)) == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  CHECK(R.symbol(0, 0, 0) == cd(0.0));

  Field u = Field::scalar(g);
  for (int i = 0; i < g.N; ++i) u.values[std::size_t(i)] = std::sin(2.0 * M_PI * g.coord(i));
  const Field du = R.gradient(u);
  const Field div = R.divergence(du);
  const Field Au = apply_elliptic(make_operator_A(R, CoefficientField::identity(g)), u);
  for (int i = 0; i < g.N; ++i) {
    const double x = g.coord(i);
    CHECK(du.values[std::size_t(i)] == doctest::Approx(2.50663 * std::cos(2.0 * M_PI * x)).epsilon(1e-5).scale(1.0));
    CHECK(du.values[std::size_t(i)] ==
          doctest::Approx(std::sqrt(2.0 * M_PI) * std::cos(2.0 * M_PI * x)).epsilon(1e-12).scale(1.0));
    CHECK(div.values[std::size_t(i)] ==
          doctest::Approx(-2.0 * M_PI * std::sin(2.0 * M_PI * x)).epsilon(1e-12).scale(1.0));
    CHECK(Au.values[std::size_t(i)] ==
          doctest::Approx(2.0 * M_PI * u.values[std::size_t(i)]).epsilon(1e-12).scale(1.0));
  }
  const Norms n = norms(u, R);
  CHECK(n.hs_semi == doctest::Approx(std::sqrt(2.0 * M_PI) * n.l2).epsilon(1e-12));
  CHECK(poincare_ratio(u, R) == doctest::Approx(std::pow(2.0 * M_PI, -0.5)).epsilon(1e-12));

  const Field c = Field::scalar(g, 3.0);
  CHECK(max_abs(R.gradient(c).values) <= 1e-14);
}

TEST_CASE("extended-box mode norms") {
  const GridSpec g = build_grid(1, 1.0, 8, 256);
  const int k = 5;
  Field u = Field::scalar(g);
  for (int i = 0; i < g.N; ++i)
    u.values[std::size_t(i)] = std::sin(2.0 * M_PI * k * g.local_coord(i) / g.box());
  for (double s : {0.3, 0.8}) {
    const Norms n = norms(u, RieszOperator(g, s));
    CHECK(n.hs_semi == doctest::Approx(std::pow(2.0 * M_PI * k / g.box(), s) * n.l2).epsilon(1e-12));
  }
}

TEST_CASE("s = 1 agrees with centred differences to second order") {
  auto error_at = [](int N) {
    const GridSpec g = build_torus(1, 1.0, N);
    Field u = Field::scalar(g);
    for (int i = 0; i < N; ++i) u.values[std::size_t(i)] = std::exp(std::sin(2.0 * M_PI * g.coord(i)));
    const Field du = RieszOperator(g, 1.0).gradient(u);
    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double fd = (u.values[std::size_t((i + 1) % N)] - u.values[std::size_t((i + N - 1) % N)]) /
                        (2.0 * g.dx);
      err = std::max(err, std::abs(du.values[std::size_t(i)] - fd));
    }
    return err;
  };
  const double e1 = error_at(64), e2 = error_at(128);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("singular integral oracle at N = 1024") {
  const GridSpec g = build_grid(1, 1.0, 8, 1024);
  const RieszOperator R(g, 0.5);
  const EllipticOperator A = make_operator_A(R, CoefficientField::identity(g));
  Field gauss = Field::scalar(g);
  for (int i = 0; i < g.N; ++i) {
    const double x = g.local_coord(i) - 0.5;
    gauss.values[std::size_t(i)] = std::exp(-50.0 * x * x);
  }
  ProfileSpec p;
  p.type = "bump";
  p.radius = 0.4;
  for (const Field& u : {mask_to_interior(gauss), evaluate_profile(p, g)}) {
    const Field a = apply_elliptic(A, u);
    const Field b = singular_integral_laplacian(u, 0.5, 2.0 * g.dx);
    double num = 0.0, den = 0.0;
    for (std::size_t i : g.interior_indices()) {
      num += std::pow(a.values[i] - b.values[i], 2);
      den += a.values[i] * a.values[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-2);
  }
}

TEST_CASE("gradient limit probe on the listed exponents") {
  // Unit-scale Gaussian on a wide window: |log|2 pi xi|| stays small on its spectrum.
  const GridSpec g = build_grid(1, 10.0, 8, 1024);
  ProfileSpec p;
  p.type = "gaussian";
  p.width = 0.1;
  const auto probe = gradient_limit_probe(evaluate_profile(p, g), {0.9, 0.99, 0.999});
  CHECK(probe.errors[0] > probe.errors[1]);
  CHECK(probe.errors[1] > probe.errors[2]);
  CHECK(probe.errors[2] <= 1e-3 * probe.reference);
}
