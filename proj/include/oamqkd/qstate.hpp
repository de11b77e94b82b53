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

// Logical d-dimensional state algebra: the computational basis B1 of
// |n,n> modes, the Fourier basis B2, larger MUB families for prime d, and
// Born-rule sampling.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "oamqkd/common.hpp"
#include "oamqkd/modecalc.hpp"
#include "oamqkd/rng.hpp"

namespace oamqkd {

// Which side of the HG <-> LG converter a state lives on.
enum class Frame { HG_side, LG_side };

inline std::string to_string(Frame f) { return f == Frame::HG_side ? "HG_side" : "LG_side"; }

class PureState {
public:
  static constexpr double kNormTolerance = 1e-12;

  PureState(cvector_t amplitudes, int oam_sector = 0, Frame frame = Frame::HG_side)
      : amplitudes_(std::move(amplitudes)), oam_sector_(oam_sector), frame_(frame) {
    if (amplitudes_.empty())
      throw Error(ErrorKind::DimensionMismatch, "state dimension must be positive");
    double norm2 = 0.0;
    for (const auto &a : amplitudes_)
      norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > kNormTolerance)
      throw Error(ErrorKind::ValidationError,
                  "state is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }

  // Rescales arbitrary nonzero amplitudes to unit norm.
  static PureState normalized(cvector_t amplitudes, int oam_sector = 0,
                              Frame frame = Frame::HG_side) {
    double norm2 = 0.0;
    for (const auto &a : amplitudes)
      norm2 += std::norm(a);
    if (!(norm2 > 0.0))
      throw Error(ErrorKind::ValidationError, "cannot normalize the zero vector");
    const double s = 1.0 / std::sqrt(norm2);
    for (auto &a : amplitudes)
      a *= s;
    return PureState(std::move(amplitudes), oam_sector, frame);
  }

  std::size_t dim() const { return amplitudes_.size(); }
  const cvector_t &amplitudes() const { return amplitudes_; }
  const complex_t &operator[](std::size_t n) const { return amplitudes_[n]; }
  int oam_sector() const { return oam_sector_; }
  Frame frame() const { return frame_; }

  PureState with_frame(Frame f) const {
    PureState out = *this;
    out.frame_ = f;
    return out;
  }

  // Per-component phases e^{i theta_n}; the result stays normalized.
  template <class PhaseFn>
  PureState with_component_phases(PhaseFn &&theta) const {
    PureState out = *this;
    for (std::size_t n = 0; n < out.amplitudes_.size(); ++n)
      out.amplitudes_[n] *= phase(theta(n));
    return out;
  }

  PureState with_global_phase(double theta) const {
    PureState out = *this;
    const complex_t g = phase(theta);
    for (auto &a : out.amplitudes_)
      a *= g;
    return out;
  }

  // Physical order (n + m) of the mode carrying logical index n.
  unsigned physical_order(std::size_t n) const {
    return 2 * static_cast<unsigned>(n) + static_cast<unsigned>(std::abs(oam_sector_));
  }

  // Mode carrying logical index n: (n+l, n) for l >= 0, (n, n+|l|) for l < 0,
  // so that the signed OAM n - m equals the sector.
  modecalc::ModeLabel physical_mode(std::size_t n) const {
    const auto fam = frame_ == Frame::HG_side ? modecalc::ModeFamily::HG : modecalc::ModeFamily::LG;
    const auto idx = static_cast<unsigned>(n);
    const auto l = static_cast<unsigned>(std::abs(oam_sector_));
    return oam_sector_ >= 0 ? modecalc::ModeLabel{fam, idx + l, idx}
                            : modecalc::ModeLabel{fam, idx, idx + l};
  }

private:
  cvector_t amplitudes_;
  int oam_sector_;
  Frame frame_;
};

inline complex_t inner(const cvector_t &a, const cvector_t &b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::DimensionMismatch, "inner product of vectors with different dimension");
  complex_t acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += std::conj(a[i]) * b[i];
  return acc;
}

inline complex_t inner(const PureState &a, const PureState &b) {
  return inner(a.amplitudes(), b.amplitudes());
}

// |<a|b>|; global phases are invisible to it.
inline double fidelity(const PureState &a, const PureState &b) { return std::abs(inner(a, b)); }

// d orthonormal vectors; vector j is column j of a unitary.
class Basis {
public:
  static constexpr double kOrthoTolerance = 1e-12;

  explicit Basis(std::vector<cvector_t> vectors) : vectors_(std::move(vectors)) {
    const std::size_t d = vectors_.size();
    if (d == 0)
      throw Error(ErrorKind::DimensionMismatch, "basis must contain at least one vector");
    for (const auto &v : vectors_)
      if (v.size() != d)
        throw Error(ErrorKind::DimensionMismatch, "basis vectors must have length d");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        const complex_t ip = inner(vectors_[i], vectors_[j]);
        if (std::abs(ip - (i == j ? 1.0 : 0.0)) > kOrthoTolerance)
          throw Error(ErrorKind::ValidationError, "basis vectors are not orthonormal");
      }
  }

  std::size_t dim() const { return vectors_.size(); }
  const cvector_t &operator[](std::size_t j) const { return vectors_[j]; }
  const std::vector<cvector_t> &vectors() const { return vectors_; }

  // Matrix element U(row, col) = vector col, component row.
  complex_t operator()(std::size_t row, std::size_t col) const { return vectors_[col][row]; }

private:
  std::vector<cvector_t> vectors_;
};

// Largest | |<a_i|b_j>|^2 - 1/d | over all vector pairs of two bases.
inline double max_unbias_deviation(const Basis &a, const Basis &b) {
  const double target = 1.0 / static_cast<double>(a.dim());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      worst = std::max(worst, std::abs(std::norm(inner(a[i], b[j])) - target));
  return worst;
}

class MubFamily {
public:
  static constexpr double kUnbiasTolerance = 1e-10;

  explicit MubFamily(std::vector<Basis> bases) : bases_(std::move(bases)) {
    if (bases_.size() < 2)
      throw Error(ErrorKind::ValidationError, "a MUB family needs at least two bases");
    const std::size_t d = bases_.front().dim();
    for (const auto &b : bases_)
      if (b.dim() != d)
        throw Error(ErrorKind::DimensionMismatch, "all bases in a family share one dimension");
    if (bases_.size() > d + 1)
      throw Error(ErrorKind::ValidationError, "at most d+1 mutually unbiased bases exist");
    if (max_deviation() > kUnbiasTolerance)
      throw Error(ErrorKind::ValidationError, "bases are not mutually unbiased");
  }

  std::size_t dim() const { return bases_.front().dim(); }
  std::size_t size() const { return bases_.size(); }
  const Basis &operator[](std::size_t b) const { return bases_.at(b); }
  const std::vector<Basis> &bases() const { return bases_; }

  // Worst unbiasedness deviation over all unordered pairs of bases.
  double max_deviation() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < bases_.size(); ++a)
      for (std::size_t b = a + 1; b < bases_.size(); ++b)
        worst = std::max(worst, max_unbias_deviation(bases_[a], bases_[b]));
    return worst;
  }

  PureState state(std::size_t basis, std::size_t k, int oam_sector = 0,
                  Frame frame = Frame::HG_side) const {
    if (basis >= size() || k >= dim())
      throw Error(ErrorKind::IndexOutOfRange, "basis or symbol index out of range");
    return PureState(bases_[basis][k], oam_sector, frame);
  }

private:
  std::vector<Basis> bases_;
};

inline PureState make_b1_state(std::size_t d, std::size_t k, int oam_sector = 0) {
  if (k >= d)
    throw Error(ErrorKind::IndexOutOfRange,
                "symbol " + std::to_string(k) + " not in {0.." + std::to_string(d) + "-1}");
  cvector_t amps(d, 0.0);
  amps[k] = 1.0;
  return PureState(std::move(amps), oam_sector, Frame::HG_side);
}

namespace detail {

// e^{i 2 pi k n / d} / sqrt(d), with the exponent reduced mod d first so
// that the phase is exact at the lattice points.
inline complex_t fourier_entry(std::size_t d, std::size_t k, std::size_t n) {
  const std::size_t kn = (k * n) % d;
  return phase(kTwoPi * static_cast<double>(kn) / static_cast<double>(d)) /
         std::sqrt(static_cast<double>(d));
}

// Per-path phase theta_b(n) of extra basis b >= 1 in the quadratic family:
// omega^{(b-1) n^2} for odd prime d, i^{(b-1) n^2} for d = 2. Basis index b
// here counts from B2 (b = 1 gives no extra phase).
inline double quadratic_phase(std::size_t d, std::size_t b, std::size_t n) {
  if (b <= 1)
    return 0.0;
  const std::size_t c = b - 1;
  if (d == 2)
    return 0.5 * kPi * static_cast<double>((c * n * n) % 4);
  return kTwoPi * static_cast<double>((c * n * n) % d) / static_cast<double>(d);
}

} // namespace detail

inline PureState make_b2_state(std::size_t d, std::size_t k, int oam_sector = 0) {
  if (k >= d)
    throw Error(ErrorKind::IndexOutOfRange,
                "symbol " + std::to_string(k) + " not in {0.." + std::to_string(d) + "-1}");
  cvector_t amps(d);
  for (std::size_t n = 0; n < d; ++n)
    amps[n] = detail::fourier_entry(d, k, n);
  return PureState(std::move(amps), oam_sector, Frame::HG_side);
}

// Columns are the B2 vectors.
inline Basis fourier_unitary(std::size_t d) {
  if (d == 0)
    throw Error(ErrorKind::DimensionMismatch, "dimension must be positive");
  std::vector<cvector_t> cols(d, cvector_t(d));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t n = 0; n < d; ++n)
      cols[k][n] = detail::fourier_entry(d, k, n);
  return Basis(std::move(cols));
}

inline Basis computational_basis(std::size_t d) {
  std::vector<cvector_t> cols(d, cvector_t(d, 0.0));
  for (std::size_t k = 0; k < d; ++k)
    cols[k][k] = 1.0;
  return Basis(std::move(cols));
}

// Basis vectors of family member `basis` (>= 1): v_n = e^{i theta_b(n)} F_{kn}.
inline Basis quadratic_basis(std::size_t d, std::size_t basis) {
  std::vector<cvector_t> cols(d, cvector_t(d));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t n = 0; n < d; ++n)
      cols[k][n] = detail::fourier_entry(d, k, n) * phase(detail::quadratic_phase(d, basis, n));
  return Basis(std::move(cols));
}

// bases[0] = B1, bases[1] = B2; for prime d, bases[b] for b >= 2 add the
// quadratic phase e^{i 2 pi (b-1) n^2 / d} (d = 2 uses i^{n^2}).
inline MubFamily build_mub_family(std::size_t d, std::size_t num_bases) {
  if (d == 0)
    throw Error(ErrorKind::DimensionMismatch, "dimension must be positive");
  if (num_bases < 2)
    throw Error(ErrorKind::ValidationError, "a MUB family needs at least two bases");
  if (num_bases > 2 && !is_prime(d))
    throw Error(ErrorKind::UnsupportedDimension,
                "more than two MUBs are only constructed for prime d (got d=" +
                    std::to_string(d) + ")");
  if (num_bases > d + 1)
    throw Error(ErrorKind::UnsupportedDimension,
                "at most d+1 MUBs exist in dimension " + std::to_string(d));
  std::vector<Basis> bases;
  bases.reserve(num_bases);
  bases.push_back(computational_basis(d));
  for (std::size_t b = 1; b < num_bases; ++b)
    bases.push_back(quadratic_basis(d, b));
  return MubFamily(std::move(bases));
}

inline rvector_t born_probabilities(const PureState &state, const Basis &basis) {
  if (state.dim() != basis.dim())
    throw Error(ErrorKind::DimensionMismatch, "state and basis dimensions differ");
  rvector_t p(basis.dim());
  for (std::size_t j = 0; j < basis.dim(); ++j)
    p[j] = std::norm(inner(basis[j], state.amplitudes()));
  return p;
}

// Weights below this are rounding residue of exact zeros.
inline constexpr double kNegligibleProbability = 1e-14;

// Cumulative inversion on a single uniform draw. Falls back to the last
// outcome with non-negligible weight so rounding never selects an outcome
// whose exact probability is zero.
inline std::size_t sample_index(const rvector_t &probabilities, Rng &rng) {
  const double u = rng.uniform();
  double total = 0.0;
  for (double p : probabilities)
    if (p > kNegligibleProbability)
      total += p;
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    if (probabilities[j] <= kNegligibleProbability)
      continue;
    last_nonzero = j;
    acc += probabilities[j];
    if (u * total < acc)
      return j;
  }
  return last_nonzero;
}

inline std::size_t born_measure(const PureState &state, const Basis &basis, Rng &rng) {
  return sample_index(born_probabilities(state, basis), rng);
}

} // namespace oamqkd
