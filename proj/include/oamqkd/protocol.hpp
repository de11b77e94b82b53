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

// BB84 session engine.
//
// Each round draws from its own PRNG substream derived from (seed, round_id),
// so rounds can be simulated on any number of threads and the merged
// transcript is still identical. Draw order within a round: Alice's basis,
// Alice's symbol, channel elements in list order, Bob's basis, Bob's
// detector. The test-subset selection uses a second substream per round.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "oamqkd/channel.hpp"
#include "oamqkd/common.hpp"
#include "oamqkd/devices.hpp"
#include "oamqkd/qstate.hpp"
#include "oamqkd/rng.hpp"

namespace oamqkd::protocol {

// Sorter: preparation and measurement through the device models (d = 2^s).
// Ideal: direct basis-vector preparation and Born measurement, any d. The
// ideal model has no receiver phase shifters, so Gouy compensation and
// detuning do not apply to it.
enum class DeviceModel { Sorter, Ideal };

struct SessionConfig {
  std::size_t d = 4;
  std::size_t num_mubs = 2;
  int oam_sector = 0;
  std::size_t photons = 1000;
  channel::ChannelSpec channel{};
  double test_fraction = 0.1;
  double qber_abort_threshold = 0.11;
  double emission_rate = 1e6; // photons / s
  std::uint64_t seed = 0;
  devices::DeviceConfig device{};
  DeviceModel device_model = DeviceModel::Sorter;
  std::size_t threads = 1;

  void validate() const {
    auto fail = [](const std::string &what) { throw Error(ErrorKind::ConfigInvalid, what); };
    if (d < 1)
      fail("d must be >= 1");
    if (photons < 1)
      fail("photons must be >= 1");
    if (num_mubs < 2)
      fail("num_mubs must be >= 2");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
      fail("test_fraction must lie in (0, 1)");
    if (!(qber_abort_threshold >= 0.0 && qber_abort_threshold <= 1.0))
      fail("qber_abort_threshold must lie in [0, 1]");
    if (!(emission_rate > 0.0))
      fail("emission_rate must be > 0");
    if (threads < 1)
      fail("threads must be >= 1");
    if (device.d != d)
      fail("device.d must equal d");
    try {
      device.validate(device_model == DeviceModel::Sorter);
      channel.validate();
    } catch (const Error &e) {
      fail(e.what());
    }
    for (const auto &e : channel.elements)
      if (const auto *eve = std::get_if<channel::Eve>(&e))
        if (eve->strategy.mub->dim() != d)
          fail("eavesdropper family dimension must equal d");
  }
};

struct RoundRecord {
  std::uint64_t round_id = 0;
  double emission_time = 0.0;
  std::size_t alice_basis = 0;
  std::size_t alice_symbol = 0;
  bool delivered = false;
  std::size_t bob_basis = 0;
  std::optional<std::size_t> bob_outcome;
  bool sifted = false;
  bool sacrificed = false;
  std::optional<channel::EveGuess> eve;

  bool error() const { return bob_outcome && *bob_outcome != alice_symbol; }
};

struct QberEstimate {
  double qber = 0.0;
  std::size_t sacrificed = 0;
  std::size_t mismatches = 0;
  // Set when no sifted round was sampled for testing; qber is then 0.
  bool low_statistics = false;
};

struct SessionStats {
  std::size_t sent = 0;
  std::size_t delivered = 0;
  std::size_t sifted_count = 0;
  std::size_t sacrificed_count = 0;
  std::size_t mismatches = 0;
  double qber_estimate = 0.0;
  bool low_statistics = false;
  bool aborted = false;
  std::vector<std::size_t> key_symbols;
  double key_bits = 0.0;
  std::optional<double> eve_mutual_information_estimate;
  // Wall-clock figures; the only non-deterministic fields.
  double elapsed_seconds = 0.0;
  double photons_per_second = 0.0;
};

struct SessionResult {
  SessionStats stats;
  std::vector<RoundRecord> records;
};

// Public discussion: keep delivered rounds whose bases agree.
inline void sift(std::span<RoundRecord> records) {
  for (auto &r : records)
    r.sifted = r.delivered && r.alice_basis == r.bob_basis;
}

// Marks a Bernoulli(test_fraction) subset of the sifted rounds as
// sacrificed and returns their error rate. Selection draws from the
// per-round Sacrifice substream, so it does not depend on record order.
inline QberEstimate estimate_qber(std::span<RoundRecord> records, double test_fraction,
                                  std::uint64_t seed) {
  QberEstimate est;
  for (auto &r : records) {
    r.sacrificed = false;
    if (!r.sifted)
      continue;
    Rng rng = substream(seed, r.round_id, StreamTag::Sacrifice);
    if (!rng.bernoulli(test_fraction))
      continue;
    r.sacrificed = true;
    ++est.sacrificed;
    if (r.error())
      ++est.mismatches;
  }
  if (est.sacrificed == 0) {
    est.low_statistics = true;
    est.qber = 0.0;
  } else {
    est.qber = static_cast<double>(est.mismatches) / static_cast<double>(est.sacrificed);
  }
  return est;
}

// Plug-in estimate (bits) of I(Alice symbol; Eve outcome) over sifted rounds
// on which Eve acted.
inline std::optional<double> eve_mutual_information(std::span<const RoundRecord> records,
                                                    std::size_t d) {
  std::vector<double> joint(d * d, 0.0);
  double total = 0.0;
  for (const auto &r : records) {
    if (!r.sifted || !r.eve)
      continue;
    joint[r.alice_symbol * d + r.eve->outcome] += 1.0;
    total += 1.0;
  }
  if (total == 0.0)
    return std::nullopt;
  std::vector<double> pa(d, 0.0), pe(d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t e = 0; e < d; ++e) {
      joint[a * d + e] /= total;
      pa[a] += joint[a * d + e];
      pe[e] += joint[a * d + e];
    }
  double mi = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t e = 0; e < d; ++e) {
      const double p = joint[a * d + e];
      if (p > 0.0)
        mi += p * std::log2(p / (pa[a] * pe[e]));
    }
  return std::max(mi, 0.0);
}

class Session {
public:
  explicit Session(SessionConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    try {
      family_.emplace(build_mub_family(cfg_.d, cfg_.num_mubs));
    } catch (const Error &e) {
      throw Error(ErrorKind::ConfigInvalid, e.what());
    }
  }

  const SessionConfig &config() const { return cfg_; }
  const MubFamily &family() const { return *family_; }

  PureState prepare(std::size_t basis, std::size_t k) const {
    if (cfg_.device_model == DeviceModel::Sorter)
      return devices::prepare_mub(cfg_.d, basis, k, cfg_.device, cfg_.oam_sector);
    return family_->state(basis, k, cfg_.oam_sector, Frame::HG_side);
  }

  std::size_t measure(const PureState &state, std::size_t basis, Rng &rng) const {
    if (cfg_.device_model == DeviceModel::Sorter)
      return devices::measure_mub(state, cfg_.device, basis, rng);
    return born_measure(state, (*family_)[basis], rng);
  }

  // One photon from Alice's gun to Bob's detector.
  RoundRecord run_round(std::uint64_t round_id) const {
    Rng rng = substream(cfg_.seed, round_id);
    RoundRecord rec;
    rec.round_id = round_id;
    rec.emission_time = static_cast<double>(round_id) / cfg_.emission_rate;
    rec.alice_basis = rng.below(cfg_.num_mubs);
    rec.alice_symbol = rng.below(cfg_.d);

    const PureState sent =
        devices::modal_convert(prepare(rec.alice_basis, rec.alice_symbol),
                               devices::ConvertDirection::HGtoLG);
    auto arrived = channel::transmit(cfg_.channel, sent, rec.emission_time, rng);
    rec.eve = arrived.eve;
    rec.bob_basis = rng.below(cfg_.num_mubs);
    if (arrived.state) {
      rec.delivered = true;
      const PureState received =
          devices::modal_convert(*arrived.state, devices::ConvertDirection::LGtoHG);
      rec.bob_outcome = measure(received, rec.bob_basis, rng);
    }
    return rec;
  }

  std::vector<RoundRecord> run_rounds() const {
    std::vector<RoundRecord> records(cfg_.photons);
    const std::size_t workers = std::min(cfg_.threads, cfg_.photons);
    if (workers <= 1) {
      for (std::size_t i = 0; i < records.size(); ++i)
        records[i] = run_round(i);
      return records;
    }
    // Contiguous chunks written in place keep round_id order.
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (records.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(records.size(), begin + chunk);
        pool.emplace_back([this, &records, &errors, w, begin, end] {
          try {
            for (std::size_t i = begin; i < end; ++i)
              records[i] = run_round(i);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto &e : errors)
      if (e)
        std::rethrow_exception(e);
    return records;
  }

  SessionResult run() const {
    const auto start = std::chrono::steady_clock::now();
    SessionResult result;
    result.records = run_rounds();
    auto &records = result.records;
    sift(records);
    const QberEstimate est = estimate_qber(records, cfg_.test_fraction, cfg_.seed);

    SessionStats &s = result.stats;
    s.sent = records.size();
    for (const auto &r : records) {
      s.delivered += r.delivered ? 1 : 0;
      s.sifted_count += r.sifted ? 1 : 0;
    }
    s.sacrificed_count = est.sacrificed;
    s.mismatches = est.mismatches;
    s.qber_estimate = est.qber;
    s.low_statistics = est.low_statistics;
    s.aborted = est.qber > cfg_.qber_abort_threshold;
    if (!s.aborted) {
      for (const auto &r : records)
        if (r.sifted && !r.sacrificed)
          s.key_symbols.push_back(r.alice_symbol);
      s.key_bits = static_cast<double>(s.sifted_count - s.sacrificed_count) *
                   std::log2(static_cast<double>(cfg_.d));
    }
    if (cfg_.channel.has_eavesdropper())
      s.eve_mutual_information_estimate = eve_mutual_information(records, cfg_.d);

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    s.elapsed_seconds = elapsed.count();
    s.photons_per_second =
        s.elapsed_seconds > 0.0 ? static_cast<double>(s.sent) / s.elapsed_seconds : 0.0;
    return result;
  }

private:
  SessionConfig cfg_;
  std::optional<MubFamily> family_;
};

inline SessionResult run_session(const SessionConfig &cfg) { return Session(cfg).run(); }

} // namespace oamqkd::protocol
