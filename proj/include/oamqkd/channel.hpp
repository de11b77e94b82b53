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

// In-flight transformations between the two modal converters.

#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oamqkd/common.hpp"
#include "oamqkd/modecalc.hpp"
#include "oamqkd/qstate.hpp"
#include "oamqkd/rng.hpp"

namespace oamqkd::channel {

// Intercept-resend eavesdropper.
struct EveStrategy {
  enum class Mode { RandomBasis, FixedBasis };

  Mode mode = Mode::RandomBasis;
  std::size_t fixed_index = 0;
  std::shared_ptr<const MubFamily> mub;

  static EveStrategy random_basis(MubFamily family) {
    return {Mode::RandomBasis, 0, std::make_shared<const MubFamily>(std::move(family))};
  }
  static EveStrategy fixed_basis(MubFamily family, std::size_t index) {
    EveStrategy s{Mode::FixedBasis, index, std::make_shared<const MubFamily>(std::move(family))};
    s.validate();
    return s;
  }

  void validate() const {
    if (!mub)
      throw Error(ErrorKind::ValidationError, "eavesdropper needs a MUB family");
    if (mode == Mode::FixedBasis && fixed_index >= mub->size())
      throw Error(ErrorKind::ValidationError, "FixedBasis index must be < number of bases");
  }
};

struct Rotation {
  double angle = 0.0; // radians
};
// Frame angle Omega * t at the photon's emission time.
struct TimeVaryingRotation {
  double angular_velocity = 0.0; // rad/s
};
// Fresh uniform angle in [0, 2 pi) for every photon.
struct RandomRotation {};
struct Gouy {
  double z = 0.0;
  modecalc::BeamGeometry geom{};
};
struct Loss {
  double probability = 0.0;
};
struct Eve {
  EveStrategy strategy;
};
struct FrequencyShift {
  double angular_velocity = 0.0; // rad/s
};

using ChannelElement =
    std::variant<Rotation, TimeVaryingRotation, RandomRotation, Gouy, Loss, Eve, FrequencyShift>;

struct ChannelSpec {
  std::vector<ChannelElement> elements;

  void validate() const {
    for (const auto &e : elements) {
      if (const auto *loss = std::get_if<Loss>(&e))
        if (!(loss->probability >= 0.0 && loss->probability <= 1.0))
          throw Error(ErrorKind::ValidationError, "loss probability must lie in [0, 1]");
      if (const auto *g = std::get_if<Gouy>(&e))
        g->geom.validate();
      if (const auto *eve = std::get_if<Eve>(&e))
        eve->strategy.validate();
    }
  }

  bool has_eavesdropper() const {
    for (const auto &e : elements)
      if (std::holds_alternative<Eve>(e))
        return true;
    return false;
  }
};

// Rotating the transverse frame by phi0 multiplies an LG(n+l, n) mode by
// e^{i l phi0}; with a fixed sector this is a global phase.
inline PureState apply_rotation(const PureState &state, double phi0) {
  if (state.frame() != Frame::LG_side)
    throw Error(ErrorKind::WrongFrame, "rotations act on the transmitted (LG_side) state");
  if (state.oam_sector() == 0)
    return state;
  return state.with_global_phase(state.oam_sector() * phi0);
}

inline PureState apply_time_varying_rotation(const PureState &state, double angular_velocity,
                                             double t) {
  return apply_rotation(state, angular_velocity * t);
}

// Component n (physical order 2n + |l|) picks up e^{-i (order + 1) psi(z)}.
inline PureState apply_gouy(const PureState &state, double z, const modecalc::BeamGeometry &geom) {
  const double psi = modecalc::beam_params(geom, z).gouy;
  return state.with_component_phases(
      [&](std::size_t n) { return -(state.physical_order(n) + 1.0) * psi; });
}

// nullopt means the photon was lost.
inline std::optional<PureState> apply_loss(const PureState &state, double p, Rng &rng) {
  if (rng.bernoulli(p))
    return std::nullopt;
  return state;
}

inline PureState apply_frequency_shift(const PureState &state, double angular_velocity, double t) {
  if (state.oam_sector() == 0)
    return state;
  return state.with_global_phase(state.oam_sector() * angular_velocity * t);
}

struct EveGuess {
  std::size_t basis = 0;
  std::size_t outcome = 0;
};

struct EveResult {
  PureState forwarded;
  EveGuess guess;
};

// Eve measures in her chosen basis and resends the basis vector she
// observed, in the same sector and frame.
inline EveResult eve_attack(const PureState &state, const EveStrategy &strategy, Rng &rng) {
  strategy.validate();
  const MubFamily &mub = *strategy.mub;
  if (state.dim() != mub.dim())
    throw Error(ErrorKind::DimensionMismatch, "eavesdropper family dimension differs from state");
  const std::size_t basis = strategy.mode == EveStrategy::Mode::RandomBasis
                                ? rng.below(mub.size())
                                : strategy.fixed_index;
  const std::size_t outcome = born_measure(state, mub[basis], rng);
  return {mub.state(basis, outcome, state.oam_sector(), state.frame()), {basis, outcome}};
}

struct TransmitResult {
  std::optional<PureState> state;
  std::optional<EveGuess> eve;
};

// Applies every element in list order. Elements after a loss are skipped.
inline TransmitResult transmit(const ChannelSpec &spec, PureState state, double emission_time,
                               Rng &rng) {
  TransmitResult result;
  for (const auto &element : spec.elements) {
    bool lost = false;
    std::visit(
        [&](const auto &e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, Rotation>) {
            state = apply_rotation(state, e.angle);
          } else if constexpr (std::is_same_v<T, TimeVaryingRotation>) {
            state = apply_time_varying_rotation(state, e.angular_velocity, emission_time);
          } else if constexpr (std::is_same_v<T, RandomRotation>) {
            state = apply_rotation(state, kTwoPi * rng.uniform());
          } else if constexpr (std::is_same_v<T, Gouy>) {
            state = apply_gouy(state, e.z, e.geom);
          } else if constexpr (std::is_same_v<T, Loss>) {
            auto delivered = apply_loss(state, e.probability, rng);
            if (delivered)
              state = std::move(*delivered);
            else
              lost = true;
          } else if constexpr (std::is_same_v<T, Eve>) {
            auto r = eve_attack(state, e.strategy, rng);
            state = std::move(r.forwarded);
            result.eve = r.guess;
          } else if constexpr (std::is_same_v<T, FrequencyShift>) {
            state = apply_frequency_shift(state, e.angular_velocity, emission_time);
          }
        },
        element);
    if (lost)
      return result;
  }
  result.state = std::move(state);
  return result;
}

} // namespace oamqkd::channel
