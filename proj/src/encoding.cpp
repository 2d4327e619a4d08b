#include "bicsi/encoding.hpp"

#include <array>
#include <bit>

namespace bicsi {

namespace {

// Two-bit code for every in-range amplitude, packed as (H << 1) | L.
constexpr std::array<std::uint8_t, kEncoderCutoff> make_code_table() {
  std::array<std::uint8_t, kEncoderCutoff> table{};
  for (Amplitude ap = 0; ap < kEncoderCutoff; ++ap) {
    const TwoBitCode c = reencode2(encode10(ap));
    table[ap] = static_cast<std::uint8_t>((c.high << 1) | c.low);
  }
  return table;
}

constexpr auto kCodeTable = make_code_table();

std::size_t word_count(std::size_t subcarriers) { return (2 * subcarriers + 63) / 64; }

}  // namespace

std::string TenBitCode::to_string() const {
  std::string s(10, '0');
  for (int p = 1; p <= 10; ++p) s[p - 1] = bit(p) ? '1' : '0';
  return s;
}

GeneSequence::GeneSequence(std::size_t subcarrier_count)
    : subcarriers_(subcarrier_count), words_(word_count(subcarrier_count), 0) {}

GeneSequence GeneSequence::from_string(std::string_view bits) {
  if (bits.size() % 2 != 0) {
    throw LengthMismatchError("gene sequence bit string must have even length");
  }
  GeneSequence gs(bits.size() / 2);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != '0' && bits[j] != '1') {
      throw InputDomainError("gene sequence bit string may contain only 0 and 1");
    }
    gs.set_bit(j, bits[j] == '1');
  }
  return gs;
}

GeneSequence GeneSequence::from_bytes(std::span<const std::uint8_t> bytes,
                                      std::size_t subcarrier_count) {
  GeneSequence gs(subcarrier_count);
  if (bytes.size() != gs.packed_bytes()) {
    throw LengthMismatchError("packed gene sequence has wrong byte count");
  }
  for (std::size_t b = 0; b < bytes.size(); ++b) {
    gs.words_[b / 8] |= std::uint64_t{bytes[b]} << (56 - 8 * (b % 8));
  }
  const std::size_t tail = gs.bit_size() % 64;
  if (tail != 0 && (gs.words_.back() & (~std::uint64_t{0} >> tail)) != 0) {
    throw LengthMismatchError("packed gene sequence has non-zero padding bits");
  }
  return gs;
}

std::size_t GeneSequence::popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::uint8_t> GeneSequence::to_bytes() const {
  std::vector<std::uint8_t> out(packed_bytes());
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b] = static_cast<std::uint8_t>(words_[b / 8] >> (56 - 8 * (b % 8)));
  }
  return out;
}

std::string GeneSequence::to_string() const {
  std::string s(bit_size(), '0');
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = bit(j) ? '1' : '0';
  return s;
}

GeneSequence encode_row(std::span<const Amplitude> amplitudes) {
  GeneSequence gs(amplitudes.size());
  for (std::size_t c = 0; c < amplitudes.size(); ++c) {
    const Amplitude ap = amplitudes[c];
    const std::uint8_t code = ap < kEncoderCutoff ? kCodeTable[ap] : 0;
    gs.set_pair(c, {static_cast<bool>(code >> 1), static_cast<bool>(code & 1u)});
  }
  return gs;
}

std::vector<GeneSequence> encode_matrix(const AmplitudeMatrix &m) {
  std::vector<GeneSequence> out;
  out.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(encode_row(m.row(r)));
  return out;
}

}  // namespace bicsi
