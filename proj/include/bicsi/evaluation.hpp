#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bicsi/csi_ingest.hpp"
#include "bicsi/fingerprint.hpp"
#include "bicsi/matcher.hpp"
#include "bicsi/similarity.hpp"

namespace bicsi {

/// Amplitude trace recorded at a known reference point.
struct LabeledTrace {
  AmplitudeMatrix matrix;
  std::string label;
  Coord coord;
};

/// Online parent sequences of one labeled test trace.
struct LabeledWindows {
  std::string label;
  Coord coord;
  std::vector<ParentSequence> parents;
};

PositionTraining to_training(const LabeledTrace &trace);
LabeledWindows to_windows(const LabeledTrace &trace, std::size_t window = kDefaultWindow);

/// Mean absolute error: summed |dx| + |dy| over 2n.
/// Throws LookupError when empty, LengthMismatchError on unequal lengths.
double mae(std::span<const MatchResult> results, std::span<const Coord> truths);
double accuracy(std::span<const MatchResult> results, std::span<const std::string> truths);

struct PositionBreakdown {
  std::string label;
  std::size_t n = 0;
  std::size_t correct = 0;
  double mae_m = 0.0;
};

struct EvalReport {
  std::string metric;
  std::size_t n = 0;
  double mae_m = 0.0;
  double accuracy = 0.0;
  /// One row per db entry, in db order.
  std::vector<PositionBreakdown> per_position;
  /// confusion[truth][predicted], indexed like per_position.
  std::vector<std::vector<std::size_t>> confusion;
  /// Predicted entry index for every window, in input order.
  std::vector<std::size_t> predictions;
};

/// Matches every window of every labeled group. Each group label must exist
/// in the db (LookupError otherwise).
EvalReport evaluate(const FingerprintDb &db, std::span<const LabeledWindows> windows,
                    MetricKind kind);

std::vector<EvalReport> metric_comparison(const FingerprintDb &db,
                                          std::span<const LabeledWindows> windows,
                                          std::span<const MetricKind> kinds);

struct SweepPoint {
  double tr_fraction = 0.0;
  double mean_hamming = 0.0;
};

/// For every fraction, derive one ancestor pair per position and average
/// (d(first_a, first_b) + d(second_a, second_b)) / 2 over all unordered
/// position pairs. Needs at least two positions.
std::vector<SweepPoint> threshold_sweep(std::span<const std::vector<GeneSequence>> training,
                                        std::span<const double> fractions);

/// "start:stop:step" (inclusive of stop) or a comma-separated list. Values are
/// rounded to micro-units. Throws ConfigError on malformed input.
std::vector<double> parse_fraction_range(std::string_view text);

struct Session {
  std::vector<PositionTraining> training;
  std::vector<LabeledWindows> testing;
};

struct TemporalPoint {
  std::size_t sets_used = 0;
  double accuracy = 0.0;
};

/// For m = 1 .. S-1: fingerprints from sessions [0, m), each position holding
/// m ancestor sets; accuracy averaged over the test windows of sessions
/// [m, S) (mean of per-session accuracies).
std::vector<TemporalPoint> temporal_eval(std::span<const Session> sessions,
                                         std::uint32_t threshold_micro, MetricKind kind);

// Raw-amplitude baselines: centroid fingerprints matched with real-valued
// cosine or Pearson similarity.

struct RawBaselineEntry {
  std::string label;
  Coord coord;
  std::vector<double> mean;
};

struct RawBaselineDb {
  std::vector<RawBaselineEntry> entries;
};

struct LabeledRawWindows {
  std::string label;
  Coord coord;
  std::vector<std::vector<double>> means;
};

std::vector<double> column_means(const AmplitudeMatrix &m, std::size_t first_row,
                                 std::size_t rows);
RawBaselineDb build_raw_baseline(std::span<const LabeledTrace> training);
/// Per-window column means, with the same trailing-window rule as windows().
LabeledRawWindows raw_windows(const LabeledTrace &trace, std::size_t window = kDefaultWindow);

/// Real-valued similarities with the same degenerate-case conventions as
/// the binary versions.
double cosine_real(std::span<const double> a, std::span<const double> b);
double pearson_real(std::span<const double> a, std::span<const double> b);

/// best_distance is 1 - cos or (1 - rho) / 2. `kind` must be cosine or pearson.
MatchResult raw_match_one(const RawBaselineDb &db, std::span<const double> window,
                          MetricKind kind, std::size_t window_index = 0);
EvalReport raw_baseline(const RawBaselineDb &db, std::span<const LabeledRawWindows> windows,
                        MetricKind kind);

// Serialized outputs.

std::string report_json(const EvalReport &report);
std::string comparison_json(std::span<const EvalReport> reports);
std::string match_results_json(std::span<const MatchResult> results);
std::string format_report_table(const EvalReport &report);
std::string format_comparison_table(std::span<const EvalReport> reports);
std::string sweep_csv(std::span<const SweepPoint> points);
std::string temporal_csv(std::span<const TemporalPoint> points);

}  // namespace bicsi
