#include "bicsi/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <json.hpp>

#include "bicsi/encoding.hpp"
#include "bicsi/io.hpp"

namespace bicsi {

namespace {

constexpr int kMaxProfileAttempts = 1000;

enum class Stream : std::uint64_t { profile = 1, packets = 2, drift = 3 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent sub-seed per (stream, session, position).
std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream, std::size_t session,
                           std::size_t position) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
  s = splitmix64(s ^ splitmix64(session + 0x1000));
  s = splitmix64(s ^ splitmix64(position + 0x2000));
  return std::mt19937_64(s);
}

std::vector<std::vector<double>> base_profiles(const SynthConfig &cfg) {
  auto rng = stream_rng(cfg.seed, Stream::profile, 0, 0);
  std::uniform_real_distribution<double> level(static_cast<double>(cfg.amplitude_lo),
                                               static_cast<double>(cfg.amplitude_hi));
  std::vector<std::vector<double>> profiles;
  profiles.reserve(cfg.positions);
  for (std::size_t p = 0; p < cfg.positions; ++p) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxProfileAttempts && !placed; ++attempt) {
      std::vector<double> candidate(cfg.subcarriers);
      for (double &v : candidate) v = level(rng);
      placed = std::all_of(profiles.begin(), profiles.end(), [&](const auto &other) {
        std::size_t separated = 0;
        for (std::size_t c = 0; c < cfg.subcarriers; ++c) {
          separated += std::abs(candidate[c] - other[c]) >= cfg.profile_separation ? 1 : 0;
        }
        return 2 * separated >= cfg.subcarriers;
      });
      if (placed) profiles.push_back(std::move(candidate));
    }
    if (!placed) {
      throw ConfigError("cannot place " + std::to_string(cfg.positions) +
                        " profiles with separation " + std::to_string(cfg.profile_separation) +
                        " in [" + std::to_string(cfg.amplitude_lo) + ", " +
                        std::to_string(cfg.amplitude_hi) + "]");
    }
  }
  return profiles;
}

AmplitudeMatrix packets(const SynthConfig &cfg, const std::vector<double> &profile,
                        std::size_t session, std::size_t position) {
  auto rng = stream_rng(cfg.seed, Stream::packets, session, position);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution burst(cfg.burst_rate);
  std::bernoulli_distribution coin(0.5);

  const std::size_t k = cfg.subcarriers;
  AmplitudeMatrix m(cfg.packets_per_position, k);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const bool is_burst = cfg.burst_rate > 0.0 && burst(rng);
    const double sign = is_burst && coin(rng) ? -1.0 : 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      double v = profile[c];
      if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * noise(rng);
      if (is_burst && coin(rng)) v += sign * cfg.burst_magnitude;
      row[c] = static_cast<Amplitude>(std::floor(std::clamp(v, 0.0, kSynthCeiling)));
    }
  }
  m.subcarrier_mask.resize(k);
  for (std::size_t c = 0; c < k; ++c) m.subcarrier_mask[c] = c;
  return m;
}

SynthDataset assemble(const SynthConfig &cfg, std::size_t session,
                      std::vector<std::vector<double>> profiles) {
  SynthDataset ds{cfg, session, {}, std::move(profiles)};
  ds.traces.reserve(cfg.positions);
  for (std::size_t p = 0; p < cfg.positions; ++p) {
    LabeledTrace t{packets(cfg, ds.profiles[p], session, p), synth_label(p),
                   synth_coord(p, cfg.positions)};
    t.matrix.position_label = t.label;
    ds.traces.push_back(std::move(t));
  }
  return ds;
}

}  // namespace

void SynthConfig::validate() const {
  if (positions < 1 || subcarriers < 1 || packets_per_position < 1) {
    throw ConfigError("positions, subcarriers and packets must all be at least 1");
  }
  if (amplitude_lo > amplitude_hi || amplitude_hi >= kEncoderCutoff) {
    throw ConfigError("amplitude range must satisfy lo <= hi <= 1023");
  }
  if (!(burst_rate >= 0.0 && burst_rate <= 1.0)) {
    throw ConfigError("burst rate must lie in [0, 1]");
  }
  for (double v : {profile_separation, noise_sigma, burst_magnitude, drift_sigma}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError("separation, noise, burst magnitude and drift must be finite and >= 0");
    }
  }
  if (positions > 1 && profile_separation > static_cast<double>(amplitude_hi - amplitude_lo)) {
    throw ConfigError("profile separation exceeds the amplitude range");
  }
}

Coord synth_coord(std::size_t position, std::size_t positions) {
  const double centre = (static_cast<double>(positions) - 1.0) / 2.0;
  return {static_cast<double>(position) - centre, 3.0};
}

std::string synth_label(std::size_t position) { return "P" + std::to_string(position + 1); }

SynthDataset generate(const SynthConfig &cfg) {
  cfg.validate();
  return assemble(cfg, 0, base_profiles(cfg));
}

SynthDataset generate_session(const SynthConfig &cfg, std::size_t session) {
  cfg.validate();
  auto profiles = base_profiles(cfg);
  if (session > 0 && cfg.drift_sigma > 0.0) {
    std::normal_distribution<double> step(0.0, 1.0);
    for (std::size_t p = 0; p < cfg.positions; ++p) {
      auto rng = stream_rng(cfg.seed, Stream::drift, 0, p);
      for (std::size_t s = 1; s <= session; ++s) {
        for (double &v : profiles[p]) v += cfg.drift_sigma * step(rng);
      }
    }
  }
  return assemble(cfg, session, std::move(profiles));
}

std::vector<SynthDataset> drift_sessions(const SynthConfig &cfg, std::size_t sessions) {
  if (sessions < 2) throw ConfigError("drift needs at least two sessions");
  std::vector<SynthDataset> out;
  out.reserve(sessions);
  for (std::size_t s = 0; s < sessions; ++s) out.push_back(generate_session(cfg, s));
  return out;
}

double code_flip_rate(const SynthDataset &ds) {
  std::size_t flips = 0;
  std::size_t bits = 0;
  for (std::size_t p = 0; p < ds.traces.size(); ++p) {
    std::vector<Amplitude> ref(ds.profiles[p].size());
    for (std::size_t c = 0; c < ref.size(); ++c) {
      ref[c] = static_cast<Amplitude>(std::floor(std::clamp(ds.profiles[p][c], 0.0, kSynthCeiling)));
    }
    const GeneSequence expected = encode_row(ref);
    const auto &m = ds.traces[p].matrix;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const GeneSequence got = encode_row(m.row(r));
      for (std::size_t w = 0; w < got.words().size(); ++w) {
        flips += static_cast<std::size_t>(std::popcount(got.words()[w] ^ expected.words()[w]));
      }
      bits += got.bit_size();
    }
  }
  return bits == 0 ? 0.0 : static_cast<double>(flips) / static_cast<double>(bits);
}

double overflow_fraction(const SynthDataset &ds) {
  std::size_t over = 0;
  std::size_t total = 0;
  for (const auto &t : ds.traces) {
    for (Amplitude a : t.matrix.data()) over += a >= kEncoderCutoff ? 1 : 0;
    total += t.matrix.data().size();
  }
  return total == 0 ? 0.0 : static_cast<double>(over) / static_cast<double>(total);
}

std::uint64_t dataset_digest(const SynthDataset &ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto &t : ds.traces) {
    mix(t.matrix.rows());
    mix(t.matrix.cols());
    for (Amplitude a : t.matrix.data()) mix(a);
  }
  return h;
}

std::string config_json(const SynthConfig &cfg, std::size_t sessions, std::size_t train_packets) {
  nlohmann::json j = {{"positions", cfg.positions},
                      {"subcarriers", cfg.subcarriers},
                      {"packets_per_position", cfg.packets_per_position},
                      {"train_packets", train_packets},
                      {"amplitude_lo", cfg.amplitude_lo},
                      {"amplitude_hi", cfg.amplitude_hi},
                      {"profile_separation", cfg.profile_separation},
                      {"noise_sigma", cfg.noise_sigma},
                      {"burst_rate", cfg.burst_rate},
                      {"burst_magnitude", cfg.burst_magnitude},
                      {"drift_sigma", cfg.drift_sigma},
                      {"sessions", sessions},
                      {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

void write_dataset(const SynthDataset &ds, const std::filesystem::path &dir,
                   std::size_t train_packets) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestRow> train, test;
  for (const auto &t : ds.traces) {
    const std::size_t rows = t.matrix.rows();
    const std::size_t n_train = std::min(train_packets, rows);
    if (n_train > 0) {
      const std::string file = t.label + "_train.csv";
      write_file_atomic(dir / file, format_amplitude_csv(t.matrix.slice_rows(0, n_train)));
      train.push_back({t.label, t.coord, file});
    }
    if (rows > n_train) {
      const std::string file = t.label + "_test.csv";
      write_file_atomic(dir / file,
                        format_amplitude_csv(t.matrix.slice_rows(n_train, rows - n_train)));
      test.push_back({t.label, t.coord, file});
    }
  }
  if (!train.empty()) write_file_atomic(dir / "train.csv", format_manifest(train));
  if (!test.empty()) write_file_atomic(dir / "test.csv", format_manifest(test));
}

}  // namespace bicsi
