#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bicsi/fingerprint.hpp"
#include "bicsi/similarity.hpp"

namespace bicsi {

struct MatchResult {
  std::size_t window_index = 0;
  std::size_t predicted_index = 0;  // into db.entries()
  std::string predicted_label;
  Coord predicted_coord;
  double best_distance = 0.0;
  /// Best distance of the nearest other position minus best_distance; 0 for a
  /// single-position db.
  double runner_up_margin = 0.0;

  friend bool operator==(const MatchResult &, const MatchResult &) = default;
};

/// Scans both ancestors of every set of every entry and predicts the entry
/// owning the smallest distance. Ties go to the lowest entry index.
/// Throws LookupError on an empty db, LengthMismatchError on length mismatch.
MatchResult match_one(const ParentSequence &ps, const FingerprintDb &db, MetricKind kind);

/// Thrown by match_trace; carries the index of the window that failed.
class MatchError : public Error {
 public:
  MatchError(const std::string &what, std::size_t window_index)
      : Error(what), window_index_(window_index) {}
  std::size_t window_index() const noexcept { return window_index_; }

 private:
  std::size_t window_index_;
};

std::vector<MatchResult> match_trace(std::span<const ParentSequence> parents,
                                     const FingerprintDb &db, MetricKind kind);

}  // namespace bicsi
