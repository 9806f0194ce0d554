#pragma once

// Analytic initial-data and forcing profiles evaluated in Omega-local
// coordinates (x - offset), so Omega is (0, L)^d.

#include <string>
#include <vector>

#include "fracwave/domain.hpp"

namespace fracwave {

struct ProfileSpec {
  // zero | constant | bump | gaussian | mode | torus_mode | plucked | table
  std::string type = "zero";
  double amplitude = 1.0;
  std::vector<double> center;  // empty means the centre of Omega
  double radius = 0.25;        // bump support radius, as a fraction of L
  double width = 0.1;          // gaussian standard deviation, as a fraction of L
  int mode = 1;                // wavenumber for mode / torus_mode
  std::vector<double> values;  // table: one value per Omega node, row-major

  bool operator==(const ProfileSpec&) const = default;
};

// C-infinity bump exp(1 - 1 / (1 - r^2)) for r < 1, else 0; peak value 1.
double smooth_bump(double r);

// Every profile except torus_mode is masked to Omega.
Field evaluate_profile(const ProfileSpec& p, const GridSpec& g);

}  // namespace fracwave
