#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bicsi/common.hpp"
#include "bicsi/encoding.hpp"

namespace bicsi {

/// Offline fingerprint of one training session. Columns where the training
/// bits were balanced hold 1 in `first` and 0 in `second`; elsewhere both
/// carry the majority bit.
struct AncestorPair {
  GeneSequence first;
  GeneSequence second;

  friend bool operator==(const AncestorPair &, const AncestorPair &) = default;
};

struct PositionEntry {
  std::string label;
  Coord coord;
  std::vector<AncestorPair> ancestor_sets;  // one per session, oldest first

  friend bool operator==(const PositionEntry &, const PositionEntry &) = default;
};

struct ParentSequence {
  GeneSequence sequence;
  std::size_t window_index = 0;

  friend bool operator==(const ParentSequence &, const ParentSequence &) = default;
};

/// Threshold fractions are carried as integer millionths so they survive
/// serialization exactly (5% == 50000).
inline constexpr std::uint32_t kMicroPerUnit = 1'000'000;
inline constexpr std::uint32_t kDefaultThresholdMicro = 50'000;

/// Nearest micro-unit; throws ConfigError for negative or non-finite input or
/// values above 4294.967295.
std::uint32_t fraction_to_micro(double fraction);
double micro_to_fraction(std::uint32_t micro) noexcept;

/// ceil(fraction * training_count), the Tr count handed to derive_ancestors.
std::size_t threshold_count(std::uint32_t threshold_micro, std::size_t training_count);

/// Column-wise ancestor derivation over a training set. A column with
/// |N0 - N1| >= tr takes its majority bit (1 on ties) in both sequences;
/// any other column becomes 1 in `first`, 0 in `second`.
/// Throws LookupError on an empty set, LengthMismatchError on mixed lengths.
AncestorPair derive_ancestors(std::span<const GeneSequence> training, std::size_t tr);

/// Column majority without a threshold; ties resolve to 1.
ParentSequence derive_parent(std::span<const GeneSequence> window,
                             std::size_t window_index = 0);

inline constexpr std::size_t kDefaultWindow = 120;

/// Non-overlapping windows of `size`. A trailing partial window is kept when it
/// holds at least size/2 sequences. Throws ConfigError if size == 0.
std::vector<ParentSequence> windows(std::span<const GeneSequence> trace,
                                    std::size_t size = kDefaultWindow);

class FingerprintDb {
 public:
  FingerprintDb() = default;
  FingerprintDb(std::size_t subcarrier_count, std::uint32_t threshold_micro);

  std::size_t subcarrier_count() const noexcept { return subcarriers_; }
  std::size_t bit_size() const noexcept { return 2 * subcarriers_; }
  std::uint32_t threshold_micro() const noexcept { return threshold_micro_; }
  const std::vector<PositionEntry> &entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Throws ConfigError on a duplicate label, LengthMismatchError on wrong
  /// bit length, LookupError when the entry has no ancestor sets.
  void add_position(PositionEntry entry);

  /// Index of the entry with `label`, or entries().size() if absent.
  std::size_t find(std::string_view label) const noexcept;

  friend bool operator==(const FingerprintDb &, const FingerprintDb &) = default;

 private:
  std::size_t subcarriers_ = 0;
  std::uint32_t threshold_micro_ = kDefaultThresholdMicro;
  std::vector<PositionEntry> entries_;
};

/// Copy of `db` with `pair` appended to the ancestor sets of `label`.
FingerprintDb append_ancestor_set(const FingerprintDb &db, std::string_view label,
                                  AncestorPair pair);

/// Training data for one position in one session.
struct PositionTraining {
  std::string label;
  Coord coord;
  std::vector<GeneSequence> sequences;
};

/// One entry per position, each with a single ancestor set derived at
/// threshold_count(threshold_micro, sequences.size()).
FingerprintDb build_db(std::span<const PositionTraining> positions,
                       std::uint32_t threshold_micro);

// Binary format, little-endian, no padding:
//   "BFPD" | u8 version | u16 subcarriers | u32 threshold micro | u32 entries
//   entry: u16 label length | label bytes | f64 x | f64 y | u16 set count
//          set: first, second; each ceil(2k/8) bytes packed MSB-first

inline constexpr std::uint8_t kDbFormatVersion = 1;

enum class DbErrorKind { bad_magic, unsupported_version, truncated, length_mismatch, invalid_content };

class DbFormatError : public Error {
 public:
  DbFormatError(DbErrorKind kind, const std::string &what) : Error(what), kind_(kind) {}
  DbErrorKind kind() const noexcept { return kind_; }

 private:
  DbErrorKind kind_;
};

std::vector<std::uint8_t> serialize_db(const FingerprintDb &db);
FingerprintDb deserialize_db(std::span<const std::uint8_t> bytes);

/// Atomic write (temp file + rename). Returns the byte count written.
std::size_t save_db(const FingerprintDb &db, const std::filesystem::path &path);
FingerprintDb load_db(const std::filesystem::path &path);

}  // namespace bicsi
