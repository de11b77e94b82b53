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

// Behavioral models of the preparation and measurement hardware.
//
// B1 measurement: a cascade of spatial modal interleavers (SMIs). With
// d = 2^s there are s stages, stage j holding 2^{j-1} SMIs; each SMI
// splits its input on one bit of the logical mode index, most significant
// bit first, so mode n exits at port n.
//
// B2 measurement: the same sorter, then a mode analyzer (MODAN) on every
// port that converts the photon to |0>_HG and thereby erases the mode label,
// optional per-path phase shifters, and a d-port inverse Fourier transform
// in front of the detectors.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "oamqkd/common.hpp"
#include "oamqkd/modecalc.hpp"
#include "oamqkd/qstate.hpp"
#include "oamqkd/rng.hpp"

namespace oamqkd::devices {

struct DeviceConfig {
  std::size_t d = 4;
  bool compensate_gouy = false;
  // Link distance the receiver's compensation phases are calibrated for.
  double propagation_z = 0.0;
  modecalc::BeamGeometry geom{};
  // Per-path phase gradient n * epsilon inside the B2 analyzer.
  double detuning_epsilon = 0.0;

  void validate(bool sorter_backed = true) const {
    if (d == 0)
      throw Error(ErrorKind::ValidationError, "device dimension must be positive");
    if (sorter_backed && (d < 2 || !is_power_of_two(d)))
      throw Error(ErrorKind::ValidationError,
                  "d must be a power of 2 (d = 2^s, s >= 1) for the sorter device model, got d=" +
                      std::to_string(d));
    if (!(detuning_epsilon >= 0.0))
      throw Error(ErrorKind::ValidationError, "detuning_epsilon must be >= 0");
    geom.validate();
  }

  // psi(z) the compensation phases are set for; zero when compensation is off.
  double compensation_gouy() const {
    return compensate_gouy ? modecalc::beam_params(geom, propagation_z).gouy : 0.0;
  }
};

enum class ConvertDirection { HGtoLG, LGtoHG };

// Cylindrical-lens converter: HG(n,m) <-> LG(n,m) index by index, so the
// logical amplitudes are untouched and only the frame changes.
inline PureState modal_convert(const PureState &state, ConvertDirection dir) {
  const Frame from = dir == ConvertDirection::HGtoLG ? Frame::HG_side : Frame::LG_side;
  const Frame to = dir == ConvertDirection::HGtoLG ? Frame::LG_side : Frame::HG_side;
  if (state.frame() != from)
    throw Error(ErrorKind::WrongFrame, "converter input must be on the " + to_string(from));
  return state.with_frame(to);
}

// A photon component travelling along one sorter path.
struct ModeAmplitude {
  std::size_t mode = 0;
  complex_t amplitude{};
};

// The SMI cascade. Paths are numbered so that after the last stage the
// leaf index equals the binary number formed by the arms taken at each
// stage (0 = upper, 1 = lower), first stage most significant.
class SorterTree {
public:
  explicit SorterTree(std::size_t d) : d_(d) {
    if (d < 2 || !is_power_of_two(d))
      throw Error(ErrorKind::ValidationError,
                  "sorter requires d = 2^s with s >= 1, got d=" + std::to_string(d));
    while ((std::size_t{1} << stages_) < d)
      ++stages_;
  }

  std::size_t dim() const { return d_; }
  std::size_t stages() const { return stages_; }
  std::size_t smis_in_stage(std::size_t j) const { return std::size_t{1} << (j - 1); }
  std::size_t smi_count() const { return d_ - 1; }

  // Bit of the mode index examined at stage j (1-based).
  std::size_t stage_bit(std::size_t j) const { return stages_ - j; }

  // Propagate the input components stage by stage; returns the content of
  // every output port.
  std::vector<std::vector<ModeAmplitude>> route(const cvector_t &amplitudes) const {
    if (amplitudes.size() != d_)
      throw Error(ErrorKind::DimensionMismatch, "sorter input has the wrong dimension");
    std::vector<std::vector<ModeAmplitude>> paths(1);
    for (std::size_t n = 0; n < d_; ++n)
      paths[0].push_back({n, amplitudes[n]});
    for (std::size_t j = 1; j <= stages_; ++j) {
      const std::size_t bit = stage_bit(j);
      std::vector<std::vector<ModeAmplitude>> next(2 * paths.size());
      for (std::size_t p = 0; p < paths.size(); ++p)
        for (const auto &c : paths[p])
          next[2 * p + ((c.mode >> bit) & 1U)].push_back(c);
      paths = std::move(next);
    }
    return paths;
  }

  // Port a pure mode exits from.
  std::size_t port_of(std::size_t mode) const {
    if (mode >= d_)
      throw Error(ErrorKind::IndexOutOfRange, "mode index out of range");
    cvector_t probe(d_, 0.0);
    probe[mode] = 1.0;
    const auto ports = route(probe);
    for (std::size_t p = 0; p < ports.size(); ++p)
      for (const auto &c : ports[p])
        if (c.mode == mode)
          return p;
    return d_;
  }

private:
  std::size_t d_;
  std::size_t stages_ = 0;
};

namespace detail {

inline void check_input(const PureState &state, const DeviceConfig &cfg) {
  if (state.frame() != Frame::HG_side)
    throw Error(ErrorKind::WrongFrame, "measurement devices act on HG_side states");
  if (state.dim() != cfg.d)
    throw Error(ErrorKind::DimensionMismatch,
                "state dimension " + std::to_string(state.dim()) + " != device dimension " +
                    std::to_string(cfg.d));
}

// Inverse DFT across paths: out_j = sum_n conj(F_{jn}) a_n.
inline cvector_t inverse_fourier(const cvector_t &paths) {
  const std::size_t d = paths.size();
  cvector_t out(d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t n = 0; n < d; ++n)
      out[j] += std::conj(oamqkd::detail::fourier_entry(d, j, n)) * paths[n];
  return out;
}

inline cvector_t forward_fourier(const cvector_t &ports) {
  const std::size_t d = ports.size();
  cvector_t out(d, 0.0);
  for (std::size_t n = 0; n < d; ++n)
    for (std::size_t j = 0; j < d; ++j)
      out[n] += oamqkd::detail::fourier_entry(d, j, n) * ports[j];
  return out;
}

} // namespace detail

// MODAN on every sorter port: each port's content becomes |0>_HG, so only
// the summed path amplitude survives and the mode labels are discarded.
inline cvector_t modan_erase(const std::vector<std::vector<ModeAmplitude>> &ports) {
  cvector_t paths(ports.size(), 0.0);
  for (std::size_t p = 0; p < ports.size(); ++p)
    for (const auto &c : ports[p])
      paths[p] += c.amplitude;
  return paths;
}

// Steps (iii)-(v) on the erased path amplitudes, returning detector
// intensities. Path n holds the component sorted from logical index n, of
// physical order 2n + |l|, which accumulated -(order + 1) psi in flight.
// basis = 1 is B2; larger values add the quadratic-phase mask of that MUB
// family member to the per-path phase shifters.
inline rvector_t analyze_paths(cvector_t paths, const DeviceConfig &cfg, std::size_t basis,
                               int oam_sector) {
  const double psi_c = cfg.compensation_gouy();
  const auto l = static_cast<double>(std::abs(oam_sector));
  for (std::size_t n = 0; n < paths.size(); ++n) {
    const double nn = static_cast<double>(n);
    double theta = (2.0 * nn + l + 1.0) * psi_c + nn * cfg.detuning_epsilon;
    theta -= oamqkd::detail::quadratic_phase(paths.size(), basis, n);
    paths[n] *= phase(theta);
  }
  const cvector_t out = detail::inverse_fourier(paths);
  rvector_t p(out.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    p[j] = std::norm(out[j]);
  return p;
}

// Port intensities at the sorter outputs.
inline rvector_t b1_port_distribution(const PureState &state, const DeviceConfig &cfg) {
  detail::check_input(state, cfg);
  const SorterTree tree(cfg.d);
  const auto ports = tree.route(state.amplitudes());
  rvector_t p(cfg.d, 0.0);
  for (std::size_t port = 0; port < ports.size(); ++port)
    for (const auto &c : ports[port])
      p[port] += std::norm(c.amplitude);
  return p;
}

inline std::size_t measure_b1(const PureState &state, const DeviceConfig &cfg, Rng &rng) {
  return sample_index(b1_port_distribution(state, cfg), rng);
}

// Detector intensities of the analyzer for family basis `basis` (>= 1).
inline rvector_t mub_detector_distribution(const PureState &state, const DeviceConfig &cfg,
                                           std::size_t basis) {
  detail::check_input(state, cfg);
  const SorterTree tree(cfg.d);
  return analyze_paths(modan_erase(tree.route(state.amplitudes())), cfg, basis,
                       state.oam_sector());
}

inline rvector_t b2_detector_distribution(const PureState &state, const DeviceConfig &cfg) {
  return mub_detector_distribution(state, cfg, 1);
}

// (vi) one uniform draw per photon.
inline std::size_t measure_b2(const PureState &state, const DeviceConfig &cfg, Rng &rng) {
  return sample_index(b2_detector_distribution(state, cfg), rng);
}

inline std::size_t measure_mub(const PureState &state, const DeviceConfig &cfg, std::size_t basis,
                               Rng &rng) {
  if (basis == 0)
    return measure_b1(state, cfg, rng);
  return sample_index(mub_detector_distribution(state, cfg, basis), rng);
}

// Photon gun emits |0>_HG; a MODAN turns it into |k>_HG.
inline PureState prepare_b1(std::size_t d, std::size_t k, const DeviceConfig &cfg,
                            int oam_sector = 0) {
  if (k >= d)
    throw Error(ErrorKind::IndexOutOfRange, "symbol index out of range");
  if (cfg.d != d)
    throw Error(ErrorKind::DimensionMismatch, "preparation dimension differs from device");
  cvector_t amps(d, 0.0);
  amps[k] = 1.0;
  return PureState(std::move(amps), oam_sector, Frame::HG_side);
}

// The analyzer run backwards for basis `basis` >= 1: a photon injected at
// detector port k passes the Fourier device (adjoint of the inverse DFT),
// the preparation-side phase mask, the MODANs in reverse (path n -> mode n),
// and the sorter in reverse, which recombines the paths into one beam.
// Receiver-only compensation and detuning shifters are not part of the
// preparation device.
inline PureState prepare_mub(std::size_t d, std::size_t basis, std::size_t k,
                             const DeviceConfig &cfg, int oam_sector = 0) {
  if (basis == 0)
    return prepare_b1(d, k, cfg, oam_sector);
  if (k >= d)
    throw Error(ErrorKind::IndexOutOfRange, "symbol index out of range");
  if (cfg.d != d)
    throw Error(ErrorKind::DimensionMismatch, "preparation dimension differs from device");
  const SorterTree tree(d);
  cvector_t detectors(d, 0.0);
  detectors[k] = 1.0;
  cvector_t paths = detail::forward_fourier(detectors);
  for (std::size_t n = 0; n < d; ++n)
    paths[n] *= phase(oamqkd::detail::quadratic_phase(d, basis, n));

  // Reverse sorter: port p feeds back the mode that the forward tree routes
  // to p.
  cvector_t modes(d, 0.0);
  for (std::size_t n = 0; n < d; ++n)
    modes[n] = paths[tree.port_of(n)];
  return PureState::normalized(std::move(modes), oam_sector, Frame::HG_side);
}

inline PureState prepare_b2(std::size_t d, std::size_t k, const DeviceConfig &cfg,
                            int oam_sector = 0) {
  return prepare_mub(d, 1, k, cfg, oam_sector);
}

} // namespace oamqkd::devices
