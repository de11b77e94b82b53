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
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oamqkd/qstate.hpp"
#include "oracles.hpp"

using namespace oamqkd;
using Catch::Approx;

namespace {

bool has_kind(ErrorKind kind, const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind() == kind;
  }
  return false;
}

PureState random_state(std::size_t d, Rng &rng) {
  cvector_t amps(d);
  for (auto &a : amps)
    a = complex_t(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return PureState::normalized(std::move(amps));
}

} // namespace

TEST_CASE("B1 states", "[qstate]") {
  const auto s0 = make_b1_state(4, 0);
  const auto s3 = make_b1_state(4, 3);
  CHECK(s0.amplitudes() == cvector_t{1.0, 0.0, 0.0, 0.0});
  CHECK(s3.amplitudes() == cvector_t{0.0, 0.0, 0.0, 1.0});
  CHECK(s0.frame() == Frame::HG_side);
  CHECK(fidelity(s3, s3) == Approx(1.0));
  CHECK(has_kind(ErrorKind::IndexOutOfRange, [] { make_b1_state(4, 4); }));
}

TEST_CASE("B2 states", "[qstate]") {
  const double r = 1.0 / std::sqrt(2.0);
  const auto p = make_b2_state(2, 0);
  const auto m = make_b2_state(2, 1);
  CHECK(std::abs(p[0] - r) < 1e-15);
  CHECK(std::abs(p[1] - r) < 1e-15);
  CHECK(std::abs(m[0] - r) < 1e-15);
  CHECK(std::abs(m[1] + r) < 1e-15);
  CHECK(has_kind(ErrorKind::IndexOutOfRange, [] { make_b2_state(3, 3); }));

  for (std::size_t d : {2, 4, 8})
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        CHECK(std::norm(inner(make_b1_state(d, i), make_b2_state(d, j))) ==
              Approx(1.0 / d).margin(1e-14));
}

TEST_CASE("Physical mode bookkeeping", "[qstate]") {
  const auto s = make_b1_state(4, 2);
  CHECK(s.physical_mode(2) == modecalc::ModeLabel{modecalc::ModeFamily::HG, 2, 2});
  CHECK(s.physical_order(2) == 4);
  const PureState lg(make_b1_state(4, 1, 3).amplitudes(), 3, Frame::LG_side);
  CHECK(lg.physical_mode(1) == modecalc::ModeLabel{modecalc::ModeFamily::LG, 4, 1});
  CHECK(lg.physical_mode(1).signed_oam() == 3);
  CHECK(lg.physical_order(1) == 5);
  const PureState neg(make_b1_state(4, 1).amplitudes(), -2, Frame::LG_side);
  CHECK(neg.physical_mode(1).signed_oam() == -2);
}

TEST_CASE("States must be normalized", "[qstate]") {
  CHECK(has_kind(ErrorKind::ValidationError, [] { PureState(cvector_t{1.0, 1.0}); }));
  CHECK(has_kind(ErrorKind::DimensionMismatch, [] { PureState(cvector_t{}); }));
  CHECK(PureState::normalized(cvector_t{3.0, 4.0})[1] == complex_t(0.8));
}

TEST_CASE("Fourier unitary", "[qstate]") {
  const auto u1 = fourier_unitary(1);
  CHECK(u1(0, 0) == complex_t(1.0));

  const auto u2 = fourier_unitary(2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(u2(0, 0) - r) < 1e-15);
  CHECK(std::abs(u2(0, 1) - r) < 1e-15);
  CHECK(std::abs(u2(1, 0) - r) < 1e-15);
  CHECK(std::abs(u2(1, 1) + r) < 1e-15);

  for (std::size_t d = 1; d <= 16; ++d) {
    const auto u = fourier_unitary(d);
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        complex_t acc = 0.0;
        for (std::size_t k = 0; k < d; ++k)
          acc += std::conj(u(k, i)) * u(k, j);
        worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
      }
    CHECK(worst < 1e-12);
    for (std::size_t k = 0; k < d; ++k)
      CHECK(fidelity(PureState(u[k]), make_b2_state(d, k)) == Approx(1.0).margin(1e-14));
    // U e_0 is the uniform-amplitude vector
    for (std::size_t n = 0; n < d; ++n)
      CHECK(std::abs(u(n, 0) - 1.0 / std::sqrt(double(d))) < 1e-15);
  }
}

TEST_CASE("MUB families", "[qstate]") {
  SECTION("two-basis families for any d") {
    for (std::size_t d : {1, 2, 3, 4, 6, 8, 12}) {
      const auto fam = build_mub_family(d, 2);
      CHECK(fam.size() == 2);
      CHECK(fam.max_deviation() < 1e-10);
      CHECK(fidelity(fam.state(1, d - 1), make_b2_state(d, d - 1)) == Approx(1.0));
    }
  }

  SECTION("complete families for prime d") {
    for (std::size_t d : {2, 3, 5, 7, 11}) {
      const auto fam = build_mub_family(d, d + 1);
      CHECK(fam.size() == d + 1);
      // Exhaustive pairwise check, independent of max_deviation()
      double worst = 0.0;
      for (std::size_t a = 0; a < fam.size(); ++a)
        for (std::size_t b = a + 1; b < fam.size(); ++b)
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
              worst = std::max(worst, std::abs(oracles::overlap2(fam[a][i], fam[b][j]) - 1.0 / d));
      CHECK(worst < 1e-10);
    }
  }

  SECTION("errors") {
    CHECK(has_kind(ErrorKind::UnsupportedDimension, [] { build_mub_family(4, 5); }));
    CHECK(has_kind(ErrorKind::UnsupportedDimension, [] { build_mub_family(6, 3); }));
    CHECK(has_kind(ErrorKind::UnsupportedDimension, [] { build_mub_family(5, 7); }));
    CHECK(has_kind(ErrorKind::ValidationError, [] { build_mub_family(5, 1); }));
  }

  SECTION("the family constructor rejects biased bases") {
    const auto b1 = computational_basis(3);
    CHECK(has_kind(ErrorKind::ValidationError, [&] { MubFamily({b1, b1}); }));
  }
}

TEST_CASE("Born measurement", "[qstate]") {
  Rng rng(42);
  const std::size_t d = 4;
  const auto b1 = computational_basis(d);
  const auto b2 = fourier_unitary(d);

  for (std::size_t k = 0; k < d; ++k)
    for (int t = 0; t < 200; ++t) {
      CHECK(born_measure(make_b1_state(d, k), b1, rng) == k);
      CHECK(born_measure(make_b2_state(d, k), b2, rng) == k);
    }

  SECTION("wrong basis is uniform") {
    std::vector<double> counts(d, 0.0);
    for (int t = 0; t < 100000; ++t)
      counts[born_measure(make_b2_state(d, 1), b1, rng)] += 1.0;
    CHECK(oracles::within_multinomial(counts, std::vector<double>(d, 0.25), 5.0));
  }

  SECTION("random states follow the Born weights") {
    for (int s = 0; s < 5; ++s) {
      const auto psi = random_state(d, rng);
      std::vector<double> expect(d), counts(d, 0.0);
      for (std::size_t j = 0; j < d; ++j)
        expect[j] = std::norm(psi[j]);
      for (int t = 0; t < 100000; ++t)
        counts[born_measure(psi, b1, rng)] += 1.0;
      CHECK(oracles::within_multinomial(counts, expect, 5.0));
    }
  }

  SECTION("exactly one draw per measurement") {
    Rng a(7), b(7);
    const auto psi = random_state(d, a);
    (void)random_state(d, b);
    born_measure(psi, b1, a);
    b.uniform();
    CHECK(a.uniform() == b.uniform());
  }

  SECTION("identical seeds give identical sequences") {
    Rng a(99), b(99);
    const auto psi = make_b2_state(d, 2);
    for (int t = 0; t < 1000; ++t)
      CHECK(born_measure(psi, b1, a) == born_measure(psi, b1, b));
  }

  CHECK(has_kind(ErrorKind::DimensionMismatch,
                 [&] { born_measure(make_b1_state(2, 0), b1, rng); }));
}
