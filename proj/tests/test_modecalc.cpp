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

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "oamqkd/modecalc.hpp"
#include "oracles.hpp"

using namespace oamqkd;
using namespace oamqkd::modecalc;
using Catch::Approx;

namespace {
const BeamGeometry kGeom{7.757018897752e6, 1.0};
}

TEST_CASE("Hermite polynomials", "[modecalc]") {
  CHECK(hermite_poly(0, 1.7) == 1.0);
  CHECK(hermite_poly(1, 0.5) == Approx(1.0));
  CHECK(hermite_poly(4, 1.0) == Approx(-20.0));
  CHECK(oracles::hermite_expansion(4, 1.0) == Approx(-20.0));

  SECTION("recurrence matches the explicit expansion") {
    for (unsigned n = 0; n <= 12; ++n)
      for (double x : {-2.3, -0.7, 0.0, 0.4, 1.1, 3.0})
        CHECK(hermite_poly(n, x) ==
              Approx(oracles::hermite_expansion(n, x)).epsilon(1e-10).margin(1e-9));
  }
}

TEST_CASE("Generalized Laguerre polynomials", "[modecalc]") {
  CHECK(laguerre_poly(0, 3, 2.5) == 1.0);
  CHECK(laguerre_poly(1, 0, 2.0) == Approx(-1.0));
  CHECK(laguerre_poly(2, 1, 1.0) == Approx(0.5));
  CHECK(oracles::laguerre_expansion(2, 1, 1.0) == Approx(0.5));

  SECTION("recurrence matches the explicit expansion") {
    for (unsigned p = 0; p <= 10; ++p)
      for (unsigned a = 0; a <= 6; ++a)
        for (double x : {0.0, 0.3, 1.0, 2.7, 6.5})
          CHECK(laguerre_poly(p, a, x) ==
                Approx(oracles::laguerre_expansion(p, a, x)).epsilon(1e-10).margin(1e-9));
  }
}

TEST_CASE("Beam parameters", "[modecalc]") {
  const auto waist = beam_params(kGeom, 0.0);
  CHECK(waist.gouy == 0.0);
  CHECK(waist.inv_curvature == 0.0);
  CHECK(std::isinf(waist.curvature_radius()));
  CHECK(waist.width == Approx(kGeom.waist()));

  const auto at_zr = beam_params(kGeom, kGeom.rayleigh_range);
  CHECK(at_zr.gouy == Approx(kPi / 4));
  CHECK(at_zr.width == Approx(std::sqrt(2.0) * kGeom.waist()));
  CHECK(at_zr.curvature_radius() == Approx(2.0 * kGeom.rayleigh_range));

  const auto far = beam_params(kGeom, 1e6 * kGeom.rayleigh_range);
  CHECK(std::abs(far.gouy - kPi / 2) < 1e-5);

  CHECK_THROWS_AS((BeamGeometry{0.0, 1.0}.validate()), Error);
  CHECK_THROWS_AS((BeamGeometry{1.0, -1.0}.validate()), Error);
}

TEST_CASE("Mode labels", "[modecalc]") {
  const ModeLabel lg{ModeFamily::LG, 2, 5};
  CHECK(lg.order() == 7);
  CHECK(lg.signed_oam() == -3);
  CHECK(lg.oam_magnitude() == 3);
  CHECK(to_string(lg) == "LG(2,5)");
}

TEST_CASE("Mode evaluation", "[modecalc]") {
  const double w = kGeom.waist();

  SECTION("HG(0,0) at the waist is a real Gaussian") {
    const ModeLabel g{ModeFamily::HG, 0, 0};
    const complex_t u0 = eval_mode(g, kGeom, 0.0, 0.0, 0.0);
    CHECK(u0.imag() == Approx(0.0).margin(1e-12));
    CHECK(u0.real() == Approx(std::sqrt(2.0 / kPi) / w));
    for (double x : {0.2 * w, 0.9 * w})
      for (double y : {-0.5 * w, 0.3 * w}) {
        const complex_t u = eval_mode(g, kGeom, x, y, 0.0);
        CHECK(std::abs(u - u0 * std::exp(-(x * x + y * y) / (w * w))) < 1e-9 * std::abs(u0));
        // no azimuthal dependence
        const double r = std::hypot(x, y);
        CHECK(std::abs(u - eval_mode(g, kGeom, r, 0.0, 0.0)) < 1e-9 * std::abs(u0));
      }
  }

  SECTION("LG(n,n) does not depend on the azimuth") {
    for (unsigned n = 0; n <= 4; ++n) {
      const ModeLabel lg{ModeFamily::LG, n, n};
      for (double z : {0.0, 0.7, 3.0}) {
        const double r = 0.8 * beam_params(kGeom, z).width;
        const complex_t ref = eval_mode(lg, kGeom, r, 0.0, z);
        for (double phi : {0.3, 1.9, -2.5})
          CHECK(std::abs(eval_mode(lg, kGeom, r * std::cos(phi), r * std::sin(phi), z) - ref) <
                1e-9 * std::abs(ref) + 1e-12);
      }
    }
  }

  SECTION("LG(2,1) carries e^{-i phi}") {
    const ModeLabel lg{ModeFamily::LG, 2, 1};
    const double r = 0.9 * w;
    const complex_t ref = eval_mode(lg, kGeom, r, 0.0, 0.4);
    for (double phi : {0.5, 2.0, -1.2}) {
      const complex_t u = eval_mode(lg, kGeom, r * std::cos(phi), r * std::sin(phi), 0.4);
      CHECK(std::abs(u - ref * phase(-phi)) < 1e-9 * std::abs(ref));
    }
  }

  SECTION("azimuthal phase e^{-i(n-m)phi} for all low-order LG modes") {
    for (const auto &label : modes_up_to_order(ModeFamily::LG, 6)) {
      for (double r : {0.3 * w, 1.0 * w, 1.7 * w}) {
        const complex_t ref = eval_mode(label, kGeom, r, 0.0, 0.0);
        if (std::abs(ref) <= 1e-6)
          continue;
        for (double phi : {0.7, 2.4, -1.1}) {
          const complex_t u = eval_mode(label, kGeom, r * std::cos(phi), r * std::sin(phi), 0.0);
          CHECK(std::abs(u / ref - phase(-label.signed_oam() * phi)) < 1e-6);
        }
      }
    }
  }

  SECTION("Gouy factorization: removing (N+1) psi leaves only the curvature phase") {
    for (const auto family : {ModeFamily::HG, ModeFamily::LG})
      for (const auto &label : modes_up_to_order(family, 4))
        for (double z : {0.5, 1.0, 4.0}) {
          const auto bp = beam_params(kGeom, z);
          const double x = 0.6 * bp.width, y = -0.4 * bp.width;
          const complex_t u = eval_mode(label, kGeom, x, y, z);
          if (std::abs(u) < 1e-8)
            continue;
          const double r2 = x * x + y * y;
          const complex_t stripped =
              u * phase((label.order() + 1.0) * bp.gouy + kGeom.wavenumber * r2 * 0.5 * bp.inv_curvature);
          // What is left is the waist-shape factor: the same function of the
          // scaled coordinates as at z = 0, up to the 1/w amplitude scaling.
          const double s = kGeom.waist() / bp.width;
          const complex_t at_waist = eval_mode(label, kGeom, x * s, y * s, 0.0) * s;
          CHECK(std::abs(stripped - at_waist) < 1e-9 * std::abs(u));
        }
  }
}

TEST_CASE("Quadrature overlaps", "[modecalc]") {
  const auto grid = SpatialGrid::for_beam(kGeom, 0.0, 6.0, 256);

  const ModeLabel g{ModeFamily::HG, 0, 0};
  const ModeLabel h11{ModeFamily::HG, 1, 1};
  CHECK(std::abs(overlap(g, g, kGeom, 0.0, grid) - 1.0) < 1e-4);
  CHECK(std::abs(overlap(h11, g, kGeom, 0.0, grid)) < 1e-4);

  SECTION("LG(n,n) is invariant under rotation of the grid") {
    for (unsigned n = 0; n <= 3; ++n) {
      const ModeLabel lg{ModeFamily::LG, n, n};
      for (double phi0 : {0.37, 1.3, 2.9})
        CHECK(std::abs(overlap(lg, lg, kGeom, 0.5, SpatialGrid::for_beam(kGeom, 0.5, 6.0, 256),
                               1e-4, phi0) -
                       1.0) < 1e-4);
    }
  }

  SECTION("rotated LG(n+l,n) overlap gives the e^{i l phi0} phase") {
    const ModeLabel lg{ModeFamily::LG, 3, 1};
    const double phi0 = 0.6;
    const complex_t ov = overlap(lg, lg, kGeom, 0.0, grid, 1e-4, phi0);
    // rotated field = e^{i l phi0} * original with l = n - m = 2
    CHECK(std::abs(ov - phase(-2.0 * phi0)) < 1e-4);
  }

  SECTION("grid too narrow or too coarse is detected") {
    const SpatialGrid narrow{0.5 * kGeom.waist(), 128};
    CHECK_THROWS_MATCHES(overlap(g, g, kGeom, 0.0, narrow), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error &e) { return e.kind() == ErrorKind::GridTooCoarse; }));
    const SpatialGrid coarse{6.0 * kGeom.waist(), 3};
    CHECK_THROWS_AS(overlap(ModeLabel{ModeFamily::HG, 4, 4}, g, kGeom, 0.0, coarse), Error);
  }

  SECTION("deterministic") {
    const ModeLabel a{ModeFamily::LG, 2, 0};
    const ModeLabel b{ModeFamily::LG, 1, 1};
    CHECK(overlap(a, b, kGeom, 0.3, grid) == overlap(a, b, kGeom, 0.3, grid));
  }
}
