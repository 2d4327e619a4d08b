#include "bicsi/fingerprint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "bicsi/io.hpp"

namespace bicsi {

namespace {

// Number of ones in each bit column of a non-empty, uniform-length set.
std::vector<std::size_t> column_ones(std::span<const GeneSequence> set) {
  if (set.empty()) throw LookupError("cannot derive a sequence from an empty set");
  const std::size_t bits = set.front().bit_size();
  std::vector<std::size_t> ones(bits, 0);
  for (const auto &gs : set) {
    if (gs.bit_size() != bits) {
      throw LengthMismatchError("gene sequences in one set differ in length");
    }
    const auto words = gs.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t word = words[w];
      while (word != 0) {
        const int lead = std::countl_zero(word);
        ++ones[w * 64 + static_cast<std::size_t>(lead)];
        word &= ~(std::uint64_t{1} << (63 - lead));
      }
    }
  }
  return ones;
}

constexpr char kMagic[4] = {'B', 'F', 'P', 'D'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw DbFormatError(DbErrorKind::truncated,
                          "fingerprint db truncated at byte " + std::to_string(pos_));
    }
  }
  std::uint64_t le(std::size_t n) {
    need(n);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += n;
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t fraction_to_micro(double fraction) {
  const double micro = std::round(fraction * kMicroPerUnit);
  if (!std::isfinite(fraction) || fraction < 0.0 ||
      micro > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw ConfigError("threshold fraction out of range");
  }
  return static_cast<std::uint32_t>(micro);
}

double micro_to_fraction(std::uint32_t micro) noexcept {
  return static_cast<double>(micro) / kMicroPerUnit;
}

std::size_t threshold_count(std::uint32_t threshold_micro, std::size_t training_count) {
  const auto product = static_cast<unsigned __int128>(threshold_micro) * training_count;
  return static_cast<std::size_t>((product + kMicroPerUnit - 1) / kMicroPerUnit);
}

AncestorPair derive_ancestors(std::span<const GeneSequence> training, std::size_t tr) {
  const auto ones = column_ones(training);
  const std::size_t n = training.size();
  const std::size_t k = training.front().subcarrier_count();

  AncestorPair pair{GeneSequence(k), GeneSequence(k)};
  for (std::size_t j = 0; j < ones.size(); ++j) {
    const std::size_t n1 = ones[j];
    const std::size_t n0 = n - n1;
    const std::size_t gap = n0 > n1 ? n0 - n1 : n1 - n0;
    if (gap >= tr) {
      const bool bit = !(n0 > n1);
      pair.first.set_bit(j, bit);
      pair.second.set_bit(j, bit);
    } else {
      pair.first.set_bit(j, true);
      pair.second.set_bit(j, false);
    }
  }
  return pair;
}

ParentSequence derive_parent(std::span<const GeneSequence> window, std::size_t window_index) {
  const auto ones = column_ones(window);
  const std::size_t n = window.size();
  ParentSequence ps{GeneSequence(window.front().subcarrier_count()), window_index};
  for (std::size_t j = 0; j < ones.size(); ++j) {
    ps.sequence.set_bit(j, ones[j] >= n - ones[j]);
  }
  return ps;
}

std::vector<ParentSequence> windows(std::span<const GeneSequence> trace, std::size_t size) {
  if (size == 0) throw ConfigError("window size must be at least 1");
  std::vector<ParentSequence> out;
  out.reserve(trace.size() / size + 1);
  for (std::size_t first = 0; first < trace.size(); first += size) {
    const std::size_t count = std::min(size, trace.size() - first);
    if (count < size && 2 * count < size) break;
    out.push_back(derive_parent(trace.subspan(first, count), out.size()));
  }
  return out;
}

FingerprintDb::FingerprintDb(std::size_t subcarrier_count, std::uint32_t threshold_micro)
    : subcarriers_(subcarrier_count), threshold_micro_(threshold_micro) {}

void FingerprintDb::add_position(PositionEntry entry) {
  if (find(entry.label) != entries_.size()) {
    throw ConfigError("duplicate position label '" + entry.label + "'");
  }
  if (entry.ancestor_sets.empty()) {
    throw LookupError("position '" + entry.label + "' has no ancestor sets");
  }
  for (const auto &p : entry.ancestor_sets) {
    if (p.first.bit_size() != bit_size() || p.second.bit_size() != bit_size()) {
      throw LengthMismatchError("ancestor length does not match db subcarrier count for '" +
                                entry.label + "'");
    }
  }
  entries_.push_back(std::move(entry));
}

std::size_t FingerprintDb::find(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].label == label) return i;
  }
  return entries_.size();
}

FingerprintDb append_ancestor_set(const FingerprintDb &db, std::string_view label,
                                  AncestorPair pair) {
  const std::size_t idx = db.find(label);
  if (idx == db.entries().size()) {
    throw LookupError("unknown position label '" + std::string(label) + "'");
  }
  if (pair.first.bit_size() != db.bit_size() || pair.second.bit_size() != db.bit_size()) {
    throw LengthMismatchError("ancestor length does not match db");
  }
  FingerprintDb out(db.subcarrier_count(), db.threshold_micro());
  for (std::size_t i = 0; i < db.entries().size(); ++i) {
    PositionEntry e = db.entries()[i];
    if (i == idx) e.ancestor_sets.push_back(pair);
    out.add_position(std::move(e));
  }
  return out;
}

FingerprintDb build_db(std::span<const PositionTraining> positions,
                       std::uint32_t threshold_micro) {
  if (positions.empty()) throw LookupError("no training positions");
  const std::size_t k = positions.front().sequences.empty()
                            ? 0
                            : positions.front().sequences.front().subcarrier_count();
  FingerprintDb db(k, threshold_micro);
  for (const auto &p : positions) {
    if (p.sequences.empty()) {
      throw EmptyTraceError("position '" + p.label + "' has no training sequences");
    }
    const std::size_t tr = threshold_count(threshold_micro, p.sequences.size());
    db.add_position({p.label, p.coord, {derive_ancestors(p.sequences, tr)}});
  }
  return db;
}

std::vector<std::uint8_t> serialize_db(const FingerprintDb &db) {
  if (db.subcarrier_count() > std::numeric_limits<std::uint16_t>::max()) {
    throw ConfigError("subcarrier count does not fit the db format");
  }
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kDbFormatVersion);
  w.u16(static_cast<std::uint16_t>(db.subcarrier_count()));
  w.u32(db.threshold_micro());
  w.u32(static_cast<std::uint32_t>(db.entries().size()));
  for (const auto &e : db.entries()) {
    if (e.label.size() > std::numeric_limits<std::uint16_t>::max() ||
        e.ancestor_sets.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ConfigError("position '" + e.label + "' does not fit the db format");
    }
    w.u16(static_cast<std::uint16_t>(e.label.size()));
    w.bytes({reinterpret_cast<const std::uint8_t *>(e.label.data()), e.label.size()});
    w.f64(e.coord.x);
    w.f64(e.coord.y);
    w.u16(static_cast<std::uint16_t>(e.ancestor_sets.size()));
    for (const auto &p : e.ancestor_sets) {
      w.bytes(p.first.to_bytes());
      w.bytes(p.second.to_bytes());
    }
  }
  return w.take();
}

FingerprintDb deserialize_db(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw DbFormatError(DbErrorKind::bad_magic, "bad magic");
  }
  Reader r(bytes.subspan(sizeof kMagic));
  const std::uint8_t version = r.u8();
  if (version != kDbFormatVersion) {
    throw DbFormatError(DbErrorKind::unsupported_version,
                        "unsupported db format version " + std::to_string(version));
  }
  const std::size_t k = r.u16();
  const std::uint32_t threshold = r.u32();
  const std::uint32_t count = r.u32();
  const std::size_t seq_bytes = packed_gene_bytes(k);

  FingerprintDb db(k, threshold);
  for (std::uint32_t i = 0; i < count; ++i) {
    PositionEntry e;
    const std::size_t label_len = r.u16();
    const auto label = r.bytes(label_len);
    e.label.assign(label.begin(), label.end());
    e.coord.x = r.f64();
    e.coord.y = r.f64();
    if (!std::isfinite(e.coord.x) || !std::isfinite(e.coord.y)) {
      throw DbFormatError(DbErrorKind::invalid_content,
                          "non-finite coordinate for '" + e.label + "'");
    }
    const std::size_t sets = r.u16();
    if (sets == 0) {
      throw DbFormatError(DbErrorKind::invalid_content,
                          "position '" + e.label + "' has no ancestor sets");
    }
    for (std::size_t s = 0; s < sets; ++s) {
      try {
        auto first = GeneSequence::from_bytes(r.bytes(seq_bytes), k);
        auto second = GeneSequence::from_bytes(r.bytes(seq_bytes), k);
        e.ancestor_sets.push_back({std::move(first), std::move(second)});
      } catch (const LengthMismatchError &err) {
        throw DbFormatError(DbErrorKind::length_mismatch, err.what());
      }
    }
    if (db.find(e.label) != db.entries().size()) {
      throw DbFormatError(DbErrorKind::invalid_content, "duplicate label '" + e.label + "'");
    }
    db.add_position(std::move(e));
  }
  if (r.remaining() != 0) {
    throw DbFormatError(DbErrorKind::length_mismatch,
                        std::to_string(r.remaining()) + " trailing bytes after last entry");
  }
  return db;
}

std::size_t save_db(const FingerprintDb &db, const std::filesystem::path &path) {
  const auto bytes = serialize_db(db);
  write_file_atomic(path, bytes);
  return bytes.size();
}

FingerprintDb load_db(const std::filesystem::path &path) {
  return deserialize_db(read_file_bytes(path));
}

}  // namespace bicsi
