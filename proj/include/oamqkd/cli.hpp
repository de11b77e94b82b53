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

// Command-line front end: flags override the values of --config.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oamqkd/config.hpp"
#include "oamqkd/protocol.hpp"
#include "oamqkd/report.hpp"

namespace oamqkd::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kIoError = 3,
};

// Flag values as given; unset flags leave the file value alone.
struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::size_t> d, photons, mubs, threads, dump_samples;
  std::optional<int> oam;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> channel;
  std::optional<std::string> eve, out, devices;
  std::optional<double> test_fraction, threshold, emission_rate, propagation_z, detuning_epsilon,
      wavenumber, rayleigh_range, z, dump_half_width;
  bool compensate_gouy = false;
  bool transcript = false;
  std::vector<std::string> dump_modes;
};

inline void add_flags(CLI::App &app, Flags &f) {
  app.add_option("--config", f.config_path, "JSON config file");
  app.add_option("--d", f.d, "logical dimension");
  app.add_option("--photons", f.photons, "number of rounds");
  app.add_option("--mubs", f.mubs, "number of bases");
  app.add_option("--oam", f.oam, "OAM sector l");
  app.add_option("--seed", f.seed, "PRNG seed");
  app.add_option("--channel", f.channel,
                 "channel element (repeatable): rotation:PHI|rotation:random|spin:OMEGA|"
                 "gouy:Z|loss:P|freq_shift:OMEGA|eve:random|eve:fixed:IDX");
  app.add_option("--eve", f.eve, "intercept-resend eavesdropper: random | fixed:IDX");
  app.add_option("--test-fraction", f.test_fraction, "share of sifted rounds sacrificed");
  app.add_option("--threshold", f.threshold, "QBER abort threshold");
  app.add_option("--emission-rate", f.emission_rate, "photons per second");
  app.add_option("--devices", f.devices, "sorter | ideal");
  app.add_flag("--compensate-gouy", f.compensate_gouy, "enable receiver Gouy compensation");
  app.add_option("--propagation-z", f.propagation_z, "compensation distance");
  app.add_option("--detuning-epsilon", f.detuning_epsilon, "analyzer per-path phase gradient");
  app.add_option("--wavenumber", f.wavenumber, "beam wavenumber k");
  app.add_option("--rayleigh-range", f.rayleigh_range, "Rayleigh range z_R");
  app.add_option("--threads", f.threads, "worker threads");
  app.add_option("--out", f.out, "output directory");
  app.add_flag("--transcript", f.transcript, "write transcript.csv");
  app.add_option("--dump-mode", f.dump_modes, "FAMILY,N,M[,Z] mode profile to dump (repeatable)");
  app.add_option("--z", f.z, "z for --dump-mode entries without their own");
  app.add_option("--dump-samples", f.dump_samples, "dump grid samples per axis");
  app.add_option("--dump-half-width", f.dump_half_width, "dump grid half width in units of w(z)");
}

// Builds the effective JSON document (file, then flags) and parses it like
// a config file so both paths share one set of checks.
inline config::RunConfig resolve(const Flags &f) {
  nlohmann::json j = nlohmann::json::object();
  if (f.config_path) {
    const std::string text = config::read_file(*f.config_path);
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &) {
      config::parse_config_file(*f.config_path, false); // rethrows with line/column
    }
  }
  auto set = [&](const char *key, const auto &opt) {
    if (opt)
      j[key] = *opt;
  };
  set("d", f.d);
  set("photons", f.photons);
  set("mubs", f.mubs);
  set("oam", f.oam);
  set("seed", f.seed);
  set("eve", f.eve);
  set("test_fraction", f.test_fraction);
  set("threshold", f.threshold);
  set("emission_rate", f.emission_rate);
  set("devices", f.devices);
  set("propagation_z", f.propagation_z);
  set("detuning_epsilon", f.detuning_epsilon);
  set("wavenumber", f.wavenumber);
  set("rayleigh_range", f.rayleigh_range);
  set("threads", f.threads);
  set("out", f.out);
  set("z", f.z);
  set("dump_samples", f.dump_samples);
  set("dump_half_width", f.dump_half_width);
  if (!f.channel.empty())
    j["channel"] = f.channel;
  if (!f.dump_modes.empty())
    j["dump_modes"] = f.dump_modes;
  if (f.compensate_gouy)
    j["compensate_gouy"] = true;
  if (f.transcript)
    j["transcript"] = true;
  return config::parse_config_text(j.dump());
}

inline std::filesystem::path write_text(const std::filesystem::path &path,
                                        const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  os << text;
  if (!os)
    throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
  return path;
}

// Runs the session and writes stats.json, optional transcript.csv and
// mode_*.csv into cfg.out. Returns the summary line.
inline std::string run(const config::RunConfig &cfg) {
  namespace fs = std::filesystem;
  const protocol::SessionConfig session = config::to_session_config(cfg);
  const fs::path out_dir(cfg.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw Error(ErrorKind::IoError, "cannot create output directory '" + cfg.out + "'");

  const protocol::SessionResult result = protocol::run_session(session);
  write_text(out_dir / "stats.json", report::stats_json(result.stats, cfg).dump(2) + "\n");
  if (cfg.transcript) {
    std::ostringstream os;
    report::write_transcript(os, result.records);
    write_text(out_dir / "transcript.csv", os.str());
  }
  std::map<std::string, int> used;
  for (const auto &dump : cfg.dump_modes) {
    std::string name = "mode_" + modecalc::to_string(dump.label.family) + "_" +
                       std::to_string(dump.label.n) + "_" + std::to_string(dump.label.m);
    if (const int seen = used[name]++; seen > 0)
      name += "_" + std::to_string(seen);
    std::ostringstream os;
    report::write_mode_csv(os, dump.label, cfg.geometry(), dump.z, cfg.dump_samples,
                           cfg.dump_half_width);
    write_text(out_dir / (name + ".csv"), os.str());
  }
  return report::summary_line(result.stats);
}

inline int main(int argc, char **argv, std::ostream &out = std::cout,
                std::ostream &err = std::cerr) {
  CLI::App app{"Spatial-mode BB84 session simulator"};
  Flags flags;
  add_flags(app, flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage; // --help exits 0
  }
  try {
    const config::RunConfig cfg = resolve(flags);
    out << run(cfg) << '\n';
    return kOk;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::IoError ? kIoError : kConfigError;
  }
}

} // namespace oamqkd::cli
