#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bicsi/evaluation.hpp"

namespace bicsi {

/// Seeded synthetic CSI: per-position mean amplitude profiles, Gaussian
/// packet noise, sparse bursts that offset a random half of the subcarriers,
/// and cumulative per-session profile drift.
struct SynthConfig {
  std::size_t positions = 6;
  std::size_t subcarriers = 230;
  std::size_t packets_per_position = 36000;
  Amplitude amplitude_lo = 96;
  Amplitude amplitude_hi = 928;
  /// Two profiles must differ by at least this much on half the subcarriers.
  double profile_separation = 48.0;
  double noise_sigma = 0.4;
  double burst_rate = 0.02;
  double burst_magnitude = 160.0;
  double drift_sigma = 0.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Clamp ceiling for generated amplitudes; leaves room above the encoder cutoff.
inline constexpr double kSynthCeiling = 4095.0;

struct SynthDataset {
  SynthConfig config;
  std::size_t session = 0;
  std::vector<LabeledTrace> traces;            // one per position
  std::vector<std::vector<double>> profiles;   // noiseless mean amplitudes
};

/// Reference-point layout: one row at y = 3 m with 1 m spacing centred on x = 0.
Coord synth_coord(std::size_t position, std::size_t positions);
std::string synth_label(std::size_t position);

SynthDataset generate(const SynthConfig &cfg);

/// Session `session` alone: base profiles plus `session` cumulative drift
/// steps. Identical to drift_sessions(cfg, n)[session] for any n > session.
SynthDataset generate_session(const SynthConfig &cfg, std::size_t session);

/// `sessions` datasets sharing base profiles; session s adds s cumulative
/// Gaussian drift steps. Session 0 equals generate(cfg). Needs sessions >= 2.
std::vector<SynthDataset> drift_sessions(const SynthConfig &cfg, std::size_t sessions);

/// Fraction of gene-sequence bits that differ from the code of the rounded-down
/// noiseless profile, over all packets of all positions.
double code_flip_rate(const SynthDataset &ds);
/// Fraction of amplitudes at or above the encoder cutoff.
double overflow_fraction(const SynthDataset &ds);

/// Order-sensitive FNV-1a digest over all amplitudes; used to compare datasets.
std::uint64_t dataset_digest(const SynthDataset &ds);

/// Writes <label>_train.csv / <label>_test.csv per position and the train.csv
/// and test.csv manifests. The first `train_packets`
/// rows of each trace are training data, the rest test data (test files are
/// omitted when nothing remains).
void write_dataset(const SynthDataset &ds, const std::filesystem::path &dir,
                   std::size_t train_packets);

std::string config_json(const SynthConfig &cfg, std::size_t sessions, std::size_t train_packets);

}  // namespace bicsi
