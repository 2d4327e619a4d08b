#include "bicsi/matcher.hpp"

#include <algorithm>
#include <limits>

namespace bicsi {

MatchResult match_one(const ParentSequence &ps, const FingerprintDb &db, MetricKind kind) {
  if (db.empty()) throw LookupError("cannot match against an empty fingerprint db");
  if (ps.sequence.bit_size() != db.bit_size()) {
    throw LengthMismatchError("parent sequence has " + std::to_string(ps.sequence.bit_size()) +
                              " bits, db expects " + std::to_string(db.bit_size()));
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  double best = kInf;
  double second = kInf;
  std::size_t best_entry = 0;

  const auto &entries = db.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    double entry_best = kInf;
    for (const auto &pair : entries[e].ancestor_sets) {
      entry_best = std::min(entry_best, distance(kind, pair.first, ps.sequence));
      entry_best = std::min(entry_best, distance(kind, pair.second, ps.sequence));
    }
    // Strict comparison keeps the earliest entry on ties.
    if (entry_best < best) {
      second = best;
      best = entry_best;
      best_entry = e;
    } else if (entry_best < second) {
      second = entry_best;
    }
  }

  const auto &winner = entries[best_entry];
  return {ps.window_index, best_entry,     winner.label,
          winner.coord,    best,           second == kInf ? 0.0 : second - best};
}

std::vector<MatchResult> match_trace(std::span<const ParentSequence> parents,
                                     const FingerprintDb &db, MetricKind kind) {
  std::vector<MatchResult> out;
  out.reserve(parents.size());
  for (const auto &ps : parents) {
    try {
      out.push_back(match_one(ps, db, kind));
    } catch (const Error &e) {
      throw MatchError("window " + std::to_string(ps.window_index) + ": " + e.what(),
                       ps.window_index);
    }
  }
  return out;
}

}  // namespace bicsi
