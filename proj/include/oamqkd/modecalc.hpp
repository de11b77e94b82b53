// Copyright 2026 The oamqkd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Paraxial Hermite-Gauss and Laguerre-Gauss mode functions and the grid
// quadrature used to check their orthonormality.
//
//   HG_nm = C_HG / w * exp(-i[k r^2 / 2R + (n+m+1) psi]) exp(-r^2/w^2)
//           * H_n(sqrt2 x / w) H_m(sqrt2 y / w)
//   LG_nm = C_LG / w * exp(-i[k r^2 / 2R + (n+m+1) psi] - r^2/w^2)
//           * exp(-i(n-m) phi) (-1)^min(n,m) (sqrt2 r / w)^|n-m|
//           * L_min(n,m)^|n-m|(2 r^2 / w^2)
//
//   C_HG = sqrt(2 / (pi n! m!)) 2^{-(n+m)/2}
//   C_LG = sqrt(2 / (pi n! m!)) min(n,m)!
//
// w(z)^2 = 2 (z_R^2 + z^2) / (k z_R),  1/R(z) = z / (z_R^2 + z^2),
// psi(z) = arctan(z / z_R).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <vector>

#include "oamqkd/common.hpp"

namespace oamqkd::modecalc {

enum class ModeFamily { HG, LG };

inline std::string to_string(ModeFamily f) {
  return f == ModeFamily::HG ? "HG" : "LG";
}

struct ModeLabel {
  ModeFamily family = ModeFamily::HG;
  unsigned n = 0;
  unsigned m = 0;

  unsigned order() const { return n + m; }
  // Signed OAM carried by the e^{-i(n-m)phi} factor; meaningful for LG.
  int signed_oam() const { return static_cast<int>(n) - static_cast<int>(m); }
  unsigned oam_magnitude() const { return static_cast<unsigned>(std::abs(signed_oam())); }

  friend bool operator==(const ModeLabel &, const ModeLabel &) = default;
};

inline std::string to_string(const ModeLabel &label) {
  return to_string(label.family) + "(" + std::to_string(label.n) + "," +
         std::to_string(label.m) + ")";
}

struct BeamGeometry {
  double wavenumber = 7.757018897752e6; // 810 nm
  double rayleigh_range = 1.0;

  void validate() const {
    if (!(wavenumber > 0.0) || !(rayleigh_range > 0.0))
      throw Error(ErrorKind::ValidationError,
                  "BeamGeometry requires wavenumber > 0 and rayleigh_range > 0");
  }

  double waist() const { return std::sqrt(2.0 * rayleigh_range / wavenumber); }
};

struct BeamParams {
  double width;           // w(z)
  double inv_curvature;   // 1/R(z); zero at the waist
  double gouy;            // psi(z)

  // R(z) itself; infinite at z = 0.
  double curvature_radius() const {
    return inv_curvature == 0.0 ? HUGE_VAL : 1.0 / inv_curvature;
  }
};

inline BeamParams beam_params(const BeamGeometry &geom, double z) {
  const double zr = geom.rayleigh_range;
  const double s = zr * zr + z * z;
  return {std::sqrt(2.0 * s / (geom.wavenumber * zr)), z / s, std::atan(z / zr)};
}

// Physicists' Hermite polynomial by the three-term recurrence.
inline double hermite_poly(unsigned n, double x) {
  double prev = 1.0;
  if (n == 0)
    return prev;
  double cur = 2.0 * x;
  for (unsigned k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Generalized Laguerre polynomial L_p^alpha(x).
inline double laguerre_poly(unsigned p, unsigned alpha, double x) {
  double prev = 1.0;
  if (p == 0)
    return prev;
  double cur = 1.0 + alpha - x;
  for (unsigned k = 1; k < p; ++k) {
    const double next =
        ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace detail {

inline double log_factorial(unsigned n) { return std::lgamma(n + 1.0); }

inline double normalization(const ModeLabel &label) {
  const double base = std::log(2.0 / kPi) - log_factorial(label.n) - log_factorial(label.m);
  if (label.family == ModeFamily::HG)
    return std::exp(0.5 * base - 0.5 * label.order() * std::log(2.0));
  return std::exp(0.5 * base + log_factorial(std::min(label.n, label.m)));
}

} // namespace detail

// u(x, y, z) for the given mode.
inline complex_t eval_mode(const ModeLabel &label, const BeamGeometry &geom,
                           double x, double y, double z) {
  const BeamParams bp = beam_params(geom, z);
  const double w = bp.width;
  const double r2 = x * x + y * y;
  const double common_phase =
      geom.wavenumber * r2 * 0.5 * bp.inv_curvature + (label.order() + 1.0) * bp.gouy;
  const double envelope = detail::normalization(label) / w * std::exp(-r2 / (w * w));

  if (label.family == ModeFamily::HG) {
    const double s = std::sqrt(2.0) / w;
    const double amp = envelope * hermite_poly(label.n, s * x) * hermite_poly(label.m, s * y);
    return amp * phase(-common_phase);
  }

  const unsigned p = std::min(label.n, label.m);
  const unsigned l = label.oam_magnitude();
  const double rho = std::sqrt(2.0 * r2) / w;
  const double sign = (p % 2 == 0) ? 1.0 : -1.0;
  const double amp = envelope * sign * std::pow(rho, static_cast<double>(l)) *
                     laguerre_poly(p, l, rho * rho);
  const double phi = std::atan2(y, x);
  return amp * phase(-common_phase - label.signed_oam() * phi);
}

struct SpatialGrid {
  double half_width = 1.0;
  std::size_t samples_per_axis = 512;

  void validate() const {
    if (!(half_width > 0.0) || samples_per_axis < 2)
      throw Error(ErrorKind::ValidationError,
                  "SpatialGrid requires half_width > 0 and samples_per_axis >= 2");
  }

  double spacing() const { return 2.0 * half_width / static_cast<double>(samples_per_axis); }

  // Midpoint of cell i along either axis.
  double coordinate(std::size_t i) const {
    return -half_width + (static_cast<double>(i) + 0.5) * spacing();
  }

  std::size_t size() const { return samples_per_axis * samples_per_axis; }

  // Grid sized to the beam: half_width = widths * w(z).
  static SpatialGrid for_beam(const BeamGeometry &geom, double z, double widths = 6.0,
                              std::size_t samples = 512) {
    return {widths * beam_params(geom, z).width, samples};
  }
};

// Mode sampled on the grid midpoints, row-major with y as the slow index.
// `rotation` evaluates the mode in a frame rotated by that angle about the
// beam axis, i.e. returns u(R(-rotation) (x, y)).
inline cvector_t sample_mode(const ModeLabel &label, const BeamGeometry &geom, double z,
                             const SpatialGrid &grid, double rotation = 0.0) {
  grid.validate();
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  cvector_t field(grid.size());
  for (std::size_t iy = 0; iy < grid.samples_per_axis; ++iy) {
    const double y = grid.coordinate(iy);
    for (std::size_t ix = 0; ix < grid.samples_per_axis; ++ix) {
      const double x = grid.coordinate(ix);
      field[iy * grid.samples_per_axis + ix] =
          eval_mode(label, geom, c * x + s * y, -s * x + c * y, z);
    }
  }
  return field;
}

// Midpoint-rule approximation of the sum of conj(a) * b * dA.
inline complex_t quadrature_inner(const cvector_t &a, const cvector_t &b, const SpatialGrid &grid) {
  if (a.size() != b.size() || a.size() != grid.size())
    throw Error(ErrorKind::DimensionMismatch, "sampled fields do not match the grid");
  complex_t acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += std::conj(a[i]) * b[i];
  const double h = grid.spacing();
  return acc * (h * h);
}

// Overlap integral of conj(a) b. Throws GridTooCoarse if either mode's
// self-overlap is off by more than `tolerance`, which also catches grids too
// narrow to contain the beam.
inline complex_t overlap(const ModeLabel &a, const ModeLabel &b, const BeamGeometry &geom, double z,
                         const SpatialGrid &grid, double tolerance = 1e-4,
                         double rotate_a = 0.0) {
  geom.validate();
  const cvector_t fa = sample_mode(a, geom, z, grid, rotate_a);
  const cvector_t fb = sample_mode(b, geom, z, grid);
  for (const auto *f : {&fa, &fb}) {
    const double self = std::real(quadrature_inner(*f, *f, grid));
    if (std::abs(self - 1.0) > tolerance)
      throw Error(ErrorKind::GridTooCoarse,
                  "self-overlap " + std::to_string(self) + " deviates from 1 by more than " +
                      std::to_string(tolerance));
  }
  return quadrature_inner(fa, fb, grid);
}

// All labels of one family with order n + m <= max_order.
inline std::vector<ModeLabel> modes_up_to_order(ModeFamily family, unsigned max_order) {
  std::vector<ModeLabel> out;
  for (unsigned order = 0; order <= max_order; ++order)
    for (unsigned n = 0; n <= order; ++n)
      out.push_back({family, n, order - n});
  return out;
}

} // namespace oamqkd::modecalc
