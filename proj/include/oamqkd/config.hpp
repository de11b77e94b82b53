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

// Run configuration: a flat JSON document whose keys mirror the command-line
// flags one to one.
//
//   key               default   meaning
//   d                 (req.)    logical dimension
//   photons           (req.)    number of rounds
//   seed              (req.)    PRNG seed; the only entropy source
//   mubs              2         number of bases used by both parties
//   oam               0         OAM sector l of the transmitted modes
//   channel           []        element specs, applied in order (see below)
//   eve               null      "random" or "fixed:IDX"; appended last
//   test_fraction     0.1       share of sifted rounds sacrificed for QBER
//   threshold         0.11      abort if the QBER estimate exceeds this
//   emission_rate     1e6       photons per second (emission clock)
//   devices           "sorter"  "sorter" (d = 2^s) or "ideal"
//   compensate_gouy   false     receiver Gouy compensation
//   propagation_z     null      compensation distance; defaults to the z of
//                               the single gouy element, else 0
//   detuning_epsilon  0         per-path analyzer phase gradient
//   wavenumber        2pi/810nm beam wavenumber k (1/m)
//   rayleigh_range    1.0       z_R (m)
//   threads           1         worker threads for the round loop
//   out               "."       output directory
//   transcript        false     write transcript.csv
//   dump_modes        []        "FAMILY,N,M" or "FAMILY,N,M,Z" entries
//   z                 0         default z for dump_modes entries
//   dump_samples      64        grid samples per axis for mode dumps
//   dump_half_width   4         dump grid half width in units of w(z)
//
// Channel element specs:
//   rotation:PHI | rotation:random | spin:OMEGA | gouy:Z | loss:P
//   freq_shift:OMEGA | eve:random | eve:fixed:IDX

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "oamqkd/channel.hpp"
#include "oamqkd/common.hpp"
#include "oamqkd/modecalc.hpp"
#include "oamqkd/protocol.hpp"
#include "oamqkd/qstate.hpp"

namespace oamqkd::config {

using json = nlohmann::json;

struct ModeDump {
  modecalc::ModeLabel label;
  double z = 0.0;
};

struct RunConfig {
  std::size_t d = 0;
  std::size_t photons = 0;
  std::uint64_t seed = 0;
  std::size_t mubs = 2;
  int oam = 0;
  std::vector<std::string> channel;
  std::optional<std::string> eve;
  double test_fraction = 0.1;
  double threshold = 0.11;
  double emission_rate = 1e6;
  std::string devices = "sorter";
  bool compensate_gouy = false;
  std::optional<double> propagation_z;
  double detuning_epsilon = 0.0;
  double wavenumber = modecalc::BeamGeometry{}.wavenumber;
  double rayleigh_range = modecalc::BeamGeometry{}.rayleigh_range;
  std::size_t threads = 1;
  std::string out = ".";
  bool transcript = false;
  std::vector<ModeDump> dump_modes;
  double z = 0.0;
  std::size_t dump_samples = 64;
  double dump_half_width = 4.0;

  modecalc::BeamGeometry geometry() const { return {wavenumber, rayleigh_range}; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return parts;
}

inline double parse_double(const std::string &text, const std::string &field) {
  double v = 0.0;
  const auto *first = text.data();
  const auto *last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty() || !std::isfinite(v))
    throw Error(ErrorKind::ParseError, "field '" + field + "': '" + text + "' is not a number");
  return v;
}

inline unsigned long long parse_uint(const std::string &text, const std::string &field) {
  unsigned long long v = 0;
  const auto *first = text.data();
  const auto *last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty())
    throw Error(ErrorKind::ParseError,
                "field '" + field + "': '" + text + "' is not a non-negative integer");
  return v;
}

// Line and column of a byte offset, both 1-based.
inline std::pair<std::size_t, std::size_t> line_col(const std::string &text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

} // namespace detail

inline modecalc::ModeFamily parse_family(const std::string &text, const std::string &field) {
  if (text == "HG" || text == "hg")
    return modecalc::ModeFamily::HG;
  if (text == "LG" || text == "lg")
    return modecalc::ModeFamily::LG;
  throw Error(ErrorKind::ParseError, "field '" + field + "': unknown mode family '" + text + "'");
}

// "FAMILY,N,M" or "FAMILY,N,M,Z".
inline ModeDump parse_mode_dump(const std::string &spec, double default_z,
                                const std::string &field = "dump_modes") {
  const auto parts = detail::split(spec, ',');
  if (parts.size() != 3 && parts.size() != 4)
    throw Error(ErrorKind::ParseError,
                "field '" + field + "': expected FAMILY,N,M[,Z], got '" + spec + "'");
  ModeDump dump;
  dump.label.family = parse_family(parts[0], field);
  dump.label.n = static_cast<unsigned>(detail::parse_uint(parts[1], field));
  dump.label.m = static_cast<unsigned>(detail::parse_uint(parts[2], field));
  dump.z = parts.size() == 4 ? detail::parse_double(parts[3], field) : default_z;
  return dump;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string format_mode_dump(const ModeDump &dump) {
  return modecalc::to_string(dump.label.family) + "," + std::to_string(dump.label.n) + "," +
         std::to_string(dump.label.m) + "," + format_double(dump.z);
}

// One channel element from its textual spec.
inline channel::ChannelElement parse_channel_element(const std::string &spec,
                                                     const RunConfig &cfg,
                                                     const std::string &field = "channel") {
  const auto parts = detail::split(spec, ':');
  const std::string &kind = parts[0];
  auto need = [&](std::size_t n) {
    if (parts.size() != n)
      throw Error(ErrorKind::ParseError, "field '" + field + "': malformed element '" + spec + "'");
  };
  if (kind == "rotation") {
    need(2);
    if (parts[1] == "random")
      return channel::RandomRotation{};
    return channel::Rotation{detail::parse_double(parts[1], field)};
  }
  if (kind == "spin" || kind == "time_rotation") {
    need(2);
    return channel::TimeVaryingRotation{detail::parse_double(parts[1], field)};
  }
  if (kind == "gouy") {
    need(2);
    return channel::Gouy{detail::parse_double(parts[1], field), cfg.geometry()};
  }
  if (kind == "loss") {
    need(2);
    const double p = detail::parse_double(parts[1], field);
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorKind::ValidationError,
                  "field '" + field + "': loss probability must lie in [0, 1]");
    return channel::Loss{p};
  }
  if (kind == "freq_shift") {
    need(2);
    return channel::FrequencyShift{detail::parse_double(parts[1], field)};
  }
  if (kind == "eve") {
    if (parts.size() < 2)
      throw Error(ErrorKind::ParseError, "field '" + field + "': malformed element '" + spec + "'");
    auto family = build_mub_family(cfg.d, cfg.mubs);
    if (parts[1] == "random" && parts.size() == 2)
      return channel::Eve{channel::EveStrategy::random_basis(std::move(family))};
    if (parts[1] == "fixed" && parts.size() == 3) {
      const auto idx = detail::parse_uint(parts[2], field);
      if (idx >= cfg.mubs)
        throw Error(ErrorKind::ValidationError,
                    "field '" + field + "': eavesdropper basis index must be < mubs");
      return channel::Eve{channel::EveStrategy::fixed_basis(std::move(family), idx)};
    }
    throw Error(ErrorKind::ParseError,
                "field '" + field + "': eve must be 'random' or 'fixed:IDX', got '" + spec + "'");
  }
  throw Error(ErrorKind::ParseError,
              "field '" + field + "': unknown channel element '" + kind + "'");
}

// Checks every invariant; throws ValidationError naming the violated one.
inline void validate(const RunConfig &cfg) {
  auto fail = [](const std::string &what) { throw Error(ErrorKind::ValidationError, what); };
  if (cfg.d < 1)
    fail("d must be >= 1");
  if (cfg.devices != "sorter" && cfg.devices != "ideal")
    fail("devices must be 'sorter' or 'ideal'");
  if (cfg.devices == "sorter" && (cfg.d < 2 || !is_power_of_two(cfg.d)))
    fail("d must be a power of 2 for the sorter device model (got d=" + std::to_string(cfg.d) +
         "); use devices=ideal for other dimensions");
  if (cfg.photons < 1)
    fail("photons must be >= 1");
  if (cfg.mubs < 2 || cfg.mubs > cfg.d + 1)
    fail("mubs must lie in [2, d+1]");
  if (cfg.mubs > 2 && !is_prime(cfg.d))
    fail("mubs > 2 requires prime d");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    fail("test_fraction must lie in (0, 1)");
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0))
    fail("threshold must lie in [0, 1]");
  if (!(cfg.emission_rate > 0.0))
    fail("emission_rate must be > 0");
  if (!(cfg.wavenumber > 0.0) || !(cfg.rayleigh_range > 0.0))
    fail("wavenumber and rayleigh_range must be > 0");
  if (!(cfg.detuning_epsilon >= 0.0))
    fail("detuning_epsilon must be >= 0");
  if (cfg.threads < 1)
    fail("threads must be >= 1");
  if (cfg.dump_samples < 2)
    fail("dump_samples must be >= 2");
  if (!(cfg.dump_half_width > 0.0))
    fail("dump_half_width must be > 0");
  std::size_t gouy_elements = 0;
  for (std::size_t i = 0; i < cfg.channel.size(); ++i) {
    const auto e = parse_channel_element(cfg.channel[i], cfg, "channel[" + std::to_string(i) + "]");
    gouy_elements += std::holds_alternative<channel::Gouy>(e) ? 1 : 0;
  }
  if (cfg.eve)
    parse_channel_element("eve:" + *cfg.eve, cfg, "eve");
  if (cfg.compensate_gouy && !cfg.propagation_z && gouy_elements > 1)
    fail("propagation_z must be given when compensating a channel with several gouy elements");
}

inline channel::ChannelSpec build_channel(const RunConfig &cfg) {
  channel::ChannelSpec spec;
  for (std::size_t i = 0; i < cfg.channel.size(); ++i)
    spec.elements.push_back(
        parse_channel_element(cfg.channel[i], cfg, "channel[" + std::to_string(i) + "]"));
  if (cfg.eve)
    spec.elements.push_back(parse_channel_element("eve:" + *cfg.eve, cfg, "eve"));
  return spec;
}

inline double effective_propagation_z(const RunConfig &cfg) {
  if (cfg.propagation_z)
    return *cfg.propagation_z;
  for (const auto &e : build_channel(cfg).elements)
    if (const auto *g = std::get_if<channel::Gouy>(&e))
      return g->z;
  return 0.0;
}

inline protocol::SessionConfig to_session_config(const RunConfig &cfg) {
  validate(cfg);
  protocol::SessionConfig s;
  s.d = cfg.d;
  s.num_mubs = cfg.mubs;
  s.oam_sector = cfg.oam;
  s.photons = cfg.photons;
  s.channel = build_channel(cfg);
  s.test_fraction = cfg.test_fraction;
  s.qber_abort_threshold = cfg.threshold;
  s.emission_rate = cfg.emission_rate;
  s.seed = cfg.seed;
  s.threads = cfg.threads;
  s.device_model = cfg.devices == "sorter" ? protocol::DeviceModel::Sorter
                                           : protocol::DeviceModel::Ideal;
  s.device.d = cfg.d;
  s.device.compensate_gouy = cfg.compensate_gouy;
  s.device.propagation_z = effective_propagation_z(cfg);
  s.device.geom = cfg.geometry();
  s.device.detuning_epsilon = cfg.detuning_epsilon;
  return s;
}

inline json to_json(const RunConfig &cfg, bool include_out = true) {
  json j;
  j["d"] = cfg.d;
  j["photons"] = cfg.photons;
  j["seed"] = cfg.seed;
  j["mubs"] = cfg.mubs;
  j["oam"] = cfg.oam;
  j["channel"] = cfg.channel;
  j["eve"] = cfg.eve ? json(*cfg.eve) : json(nullptr);
  j["test_fraction"] = cfg.test_fraction;
  j["threshold"] = cfg.threshold;
  j["emission_rate"] = cfg.emission_rate;
  j["devices"] = cfg.devices;
  j["compensate_gouy"] = cfg.compensate_gouy;
  j["propagation_z"] = cfg.propagation_z ? json(*cfg.propagation_z) : json(nullptr);
  j["detuning_epsilon"] = cfg.detuning_epsilon;
  j["wavenumber"] = cfg.wavenumber;
  j["rayleigh_range"] = cfg.rayleigh_range;
  j["threads"] = cfg.threads;
  if (include_out)
    j["out"] = cfg.out;
  j["transcript"] = cfg.transcript;
  json dumps = json::array();
  for (const auto &d : cfg.dump_modes)
    dumps.push_back(format_mode_dump(d));
  j["dump_modes"] = dumps;
  j["z"] = cfg.z;
  j["dump_samples"] = cfg.dump_samples;
  j["dump_half_width"] = cfg.dump_half_width;
  return j;
}

namespace detail {

template <class T> T get_field(const json &j, const std::string &key) {
  try {
    return j.get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorKind::ParseError, "field '" + key + "': wrong type (" + j.dump() + ")");
  }
}

inline std::size_t get_count(const json &j, const std::string &key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw Error(ErrorKind::ParseError,
                "field '" + key + "': expected a non-negative integer, got " + j.dump());
  return j.get<std::size_t>();
}

inline double get_number(const json &j, const std::string &key) {
  if (!j.is_number())
    throw Error(ErrorKind::ParseError, "field '" + key + "': expected a number, got " + j.dump());
  return j.get<double>();
}

} // namespace detail

// Overlays the keys present in `j` onto `cfg`. Unknown keys are rejected.
inline void apply_json(RunConfig &cfg, const json &j) {
  if (!j.is_object())
    throw Error(ErrorKind::ParseError, "config root must be a JSON object");
  for (const auto &[key, value] : j.items()) {
    if (key == "d") cfg.d = detail::get_count(value, key);
    else if (key == "photons") cfg.photons = detail::get_count(value, key);
    else if (key == "seed") cfg.seed = detail::get_count(value, key);
    else if (key == "mubs") cfg.mubs = detail::get_count(value, key);
    else if (key == "oam") {
      if (!value.is_number_integer())
        throw Error(ErrorKind::ParseError, "field 'oam': expected an integer, got " + value.dump());
      cfg.oam = value.get<int>();
    } else if (key == "channel") {
      if (!value.is_array())
        throw Error(ErrorKind::ParseError, "field 'channel': expected an array of strings");
      cfg.channel.clear();
      for (std::size_t i = 0; i < value.size(); ++i)
        cfg.channel.push_back(detail::trim(
            detail::get_field<std::string>(value[i], "channel[" + std::to_string(i) + "]")));
    } else if (key == "eve") {
      if (value.is_null()) cfg.eve.reset();
      else cfg.eve = detail::get_field<std::string>(value, key);
    } else if (key == "test_fraction") cfg.test_fraction = detail::get_number(value, key);
    else if (key == "threshold") cfg.threshold = detail::get_number(value, key);
    else if (key == "emission_rate") cfg.emission_rate = detail::get_number(value, key);
    else if (key == "devices") cfg.devices = detail::get_field<std::string>(value, key);
    else if (key == "compensate_gouy") cfg.compensate_gouy = detail::get_field<bool>(value, key);
    else if (key == "propagation_z") {
      if (value.is_null()) cfg.propagation_z.reset();
      else cfg.propagation_z = detail::get_number(value, key);
    } else if (key == "detuning_epsilon") cfg.detuning_epsilon = detail::get_number(value, key);
    else if (key == "wavenumber") cfg.wavenumber = detail::get_number(value, key);
    else if (key == "rayleigh_range") cfg.rayleigh_range = detail::get_number(value, key);
    else if (key == "threads") cfg.threads = detail::get_count(value, key);
    else if (key == "out") cfg.out = detail::get_field<std::string>(value, key);
    else if (key == "transcript") cfg.transcript = detail::get_field<bool>(value, key);
    else if (key == "z") {
      cfg.z = detail::get_number(value, key);
    } else if (key == "dump_modes") {
      // resolved below, once z is known
    } else if (key == "dump_samples") cfg.dump_samples = detail::get_count(value, key);
    else if (key == "dump_half_width") cfg.dump_half_width = detail::get_number(value, key);
    else
      throw Error(ErrorKind::ParseError, "unknown field '" + key + "'");
  }
  if (j.contains("dump_modes")) {
    const auto &value = j["dump_modes"];
    if (!value.is_array())
      throw Error(ErrorKind::ParseError, "field 'dump_modes': expected an array of strings");
    cfg.dump_modes.clear();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::string field = "dump_modes[" + std::to_string(i) + "]";
      cfg.dump_modes.push_back(
          parse_mode_dump(detail::get_field<std::string>(value[i], field), cfg.z, field));
    }
  }
}

// Parses config text; JSON syntax errors report line and column.
inline RunConfig parse_config_text(const std::string &text, bool check = true) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    const auto [line, col] = detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(col) + ": " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, j);
  for (const char *required : {"d", "photons", "seed"})
    if (!j.contains(required))
      throw Error(ErrorKind::ParseError, std::string("missing required field '") + required + "'");
  if (check)
    validate(cfg);
  return cfg;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig parse_config_file(const std::string &path, bool check = true) {
  try {
    return parse_config_text(read_file(path), check);
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::ParseError)
      throw Error(ErrorKind::ParseError, path + ": " + e.message());
    throw;
  }
}

inline std::string serialize(const RunConfig &cfg) { return to_json(cfg).dump(2) + "\n"; }

} // namespace oamqkd::config
