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

// Machine-readable outputs: stats JSON, transcript CSV and mode-profile CSV.

#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oamqkd/config.hpp"
#include "oamqkd/modecalc.hpp"
#include "oamqkd/protocol.hpp"

namespace oamqkd::report {

using json = nlohmann::json;

inline constexpr int kStatsSchemaVersion = 1;

// Everything except "wall_clock" is a deterministic function of the config.
inline json stats_json(const protocol::SessionStats &s, const config::RunConfig &cfg) {
  json j;
  j["schema_version"] = kStatsSchemaVersion;
  j["config"] = config::to_json(cfg, /*include_out=*/false);
  j["sent"] = s.sent;
  j["delivered"] = s.delivered;
  j["sifted_count"] = s.sifted_count;
  j["sacrificed_count"] = s.sacrificed_count;
  j["mismatches"] = s.mismatches;
  j["qber_estimate"] = s.qber_estimate;
  j["low_statistics"] = s.low_statistics;
  j["aborted"] = s.aborted;
  j["bits_per_photon"] = std::log2(static_cast<double>(cfg.d));
  j["key_bits"] = s.key_bits;
  j["key_symbols"] = s.key_symbols;
  j["eve_mutual_information_estimate"] = s.eve_mutual_information_estimate
                                             ? json(*s.eve_mutual_information_estimate)
                                             : json(nullptr);
  j["wall_clock"] = {{"elapsed_seconds", s.elapsed_seconds},
                     {"photons_per_second", s.photons_per_second}};
  return j;
}

inline constexpr const char *kTranscriptHeader =
    "round_id,emission_time,alice_basis,alice_symbol,delivered,bob_basis,bob_outcome,"
    "sifted,sacrificed,eve_basis,eve_outcome";

// One RoundRecord per line; empty cells for absent values.
inline void write_transcript(std::ostream &os, const std::vector<protocol::RoundRecord> &records) {
  os << kTranscriptHeader << '\n';
  for (const auto &r : records) {
    os << r.round_id << ',' << config::format_double(r.emission_time) << ',' << r.alice_basis
       << ',' << r.alice_symbol << ',' << (r.delivered ? 1 : 0) << ',' << r.bob_basis << ',';
    if (r.bob_outcome)
      os << *r.bob_outcome;
    os << ',' << (r.sifted ? 1 : 0) << ',' << (r.sacrificed ? 1 : 0) << ',';
    if (r.eve)
      os << r.eve->basis << ',' << r.eve->outcome;
    else
      os << ',';
    os << '\n';
  }
}

// Rows x,y,re,im over a square grid of half width half_width_w * w(z),
// values straight from eval_mode at the grid midpoints.
inline void write_mode_csv(std::ostream &os, const modecalc::ModeLabel &label,
                           const modecalc::BeamGeometry &geom, double z, std::size_t samples,
                           double half_width_w) {
  const modecalc::SpatialGrid grid{half_width_w * modecalc::beam_params(geom, z).width, samples};
  grid.validate();
  os << "x,y,re,im\n";
  for (std::size_t iy = 0; iy < grid.samples_per_axis; ++iy) {
    const double y = grid.coordinate(iy);
    for (std::size_t ix = 0; ix < grid.samples_per_axis; ++ix) {
      const double x = grid.coordinate(ix);
      const complex_t u = modecalc::eval_mode(label, geom, x, y, z);
      os << config::format_double(x) << ',' << config::format_double(y) << ','
         << config::format_double(u.real()) << ',' << config::format_double(u.imag()) << '\n';
    }
  }
}

inline std::string summary_line(const protocol::SessionStats &s) {
  std::ostringstream os;
  os << "sifted=" << s.sifted_count << " qber=" << config::format_double(s.qber_estimate)
     << " aborted=" << (s.aborted ? "true" : "false")
     << " key_bits=" << config::format_double(s.key_bits);
  return os.str();
}

} // namespace oamqkd::report
