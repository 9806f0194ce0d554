#pragma once

// Maximal monotone graphs beta = dj with 0 in beta(0): interval indicators
// and nondecreasing piecewise-linear staircases with jumps, together with
// their resolvents, Yosida approximations and Moreau envelopes.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracwave {

class MonotoneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonConformingGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value of beta just left and just right of x; a jump when left < right.
struct Breakpoint {
  double x = 0.0;
  double left = 0.0;
  double right = 0.0;
  bool operator==(const Breakpoint&) const = default;
};

class MonotoneGraph {
 public:
  enum class Kind { Indicator, Staircase };

  // j = indicator of [a, b]; infinite bounds allowed.
  static MonotoneGraph indicator(double a, double b);
  static MonotoneGraph free();
  static MonotoneGraph lower(double a = 0.0);   // [a, +inf)
  static MonotoneGraph upper(double b = 0.0);   // (-inf, b]
  // beta linear between breakpoints (sorted by x), with the given slopes
  // below the first and above the last breakpoint.
  static MonotoneGraph staircase(std::vector<Breakpoint> points, double slope_below,
                                 double slope_above);

  Kind kind() const { return kind_; }
  bool is_indicator() const { return kind_ == Kind::Indicator; }
  bool is_free() const;
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<Breakpoint>& breakpoints() const { return points_; }
  double slope_below() const { return slope_below_; }
  double slope_above() const { return slope_above_; }

  // [min beta(r), max beta(r)]; empty (lo > hi) outside the domain.
  std::pair<double, double> values(double r) const;
  // j(r); +inf outside the domain of an indicator.
  double potential(double r) const;

  double resolvent(double r, double lambda) const;
  double yosida(double r, double eps) const;
  // Newton derivative of the Yosida approximation (a.e. derivative, with the
  // steeper one-sided value at kinks).
  double yosida_derivative(double r, double eps) const;
  double envelope(double r, double eps) const;

  void yosida(std::span<const double> u, double eps, std::span<double> out,
              std::span<double> deriv = {}) const;
  double envelope_sum(std::span<const double> u, double eps) const;

 private:
  Kind kind_ = Kind::Indicator;
  double a_ = 0.0, b_ = 0.0;
  std::vector<Breakpoint> points_;
  double slope_below_ = 0.0, slope_above_ = 0.0;

  double staircase_resolvent(double r, double lambda, double* slope) const;
  double staircase_primitive(double x) const;
};

void require_epsilon(double eps);

struct CoercivityOptions {
  int samples = 20001;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  int c1_halvings = 12;
  double growth_tolerance = 1.01;
};

struct CoercivityResult {
  double c1 = 0.0;
  double c2 = 0.0;
  bool epsilon_uniform = false;
};

// Smallest c2 with c1 |beta_eps(r)| <= beta_eps(r) r + c2 on the probe range.
double required_c2(const MonotoneGraph& g, double c1, double eps, double r_lo, double r_hi,
                   int samples);

// Searches c1 = 1, 1/2, 1/4, ... for a pair valid for every sampled eps with
// c2 not growing as eps decreases. Throws NonConformingGraph when none exists.
CoercivityResult coercivity_constants(const MonotoneGraph& g, double r_lo, double r_hi,
                                      const CoercivityOptions& opt = {});

}  // namespace fracwave
