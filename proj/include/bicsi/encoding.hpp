#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bicsi/csi_ingest.hpp"

namespace bicsi {

/// Amplitudes at or above this value encode as ten zero bits.
inline constexpr Amplitude kEncoderCutoff = 1024;

/// Ten-bit amplitude code. Bit 1 is the most significant.
class TenBitCode {
 public:
  constexpr TenBitCode() = default;
  /// Low ten bits of `value` are kept.
  constexpr explicit TenBitCode(std::uint16_t value) : value_(value & 0x3FFu) {}

  constexpr std::uint16_t value() const noexcept { return value_; }
  /// position in [1, 10]
  constexpr bool bit(int position) const noexcept {
    return (value_ >> (10 - position)) & 1u;
  }
  constexpr std::uint8_t high_half() const noexcept { return value_ >> 5; }
  constexpr std::uint8_t low_half() const noexcept { return value_ & 0x1Fu; }

  std::string to_string() const;

  friend constexpr bool operator==(TenBitCode, TenBitCode) = default;

 private:
  std::uint16_t value_ = 0;
};

struct TwoBitCode {
  bool high = false;
  bool low = false;

  friend constexpr bool operator==(TwoBitCode, TwoBitCode) = default;
};

constexpr TenBitCode encode10(Amplitude ap) noexcept {
  return ap < kEncoderCutoff ? TenBitCode(static_cast<std::uint16_t>(ap)) : TenBitCode{};
}

/// 1 iff at least three of the five low bits of `five_bits` are set.
constexpr bool majority5(std::uint8_t five_bits) noexcept {
  unsigned ones = 0;
  for (int i = 0; i < 5; ++i) ones += (five_bits >> i) & 1u;
  return ones >= 3;
}

constexpr TwoBitCode reencode2(TenBitCode code) noexcept {
  return {majority5(code.high_half()), majority5(code.low_half())};
}

/// Packed 2-bits-per-subcarrier vector: subcarrier j occupies bits 2j (H) and
/// 2j+1 (L). Bits beyond bit_size() in the last word are always zero.
class GeneSequence {
 public:
  GeneSequence() = default;
  explicit GeneSequence(std::size_t subcarrier_count);

  /// Parses a string of '0'/'1' characters; length must be even.
  static GeneSequence from_string(std::string_view bits);
  /// Inverse of to_bytes(). Throws LengthMismatchError when the byte count is
  /// wrong or padding bits are set.
  static GeneSequence from_bytes(std::span<const std::uint8_t> bytes,
                                 std::size_t subcarrier_count);

  std::size_t subcarrier_count() const noexcept { return subcarriers_; }
  std::size_t bit_size() const noexcept { return 2 * subcarriers_; }

  bool bit(std::size_t j) const noexcept {
    return (words_[j / 64] >> (63 - j % 64)) & 1u;
  }
  void set_bit(std::size_t j, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (63 - j % 64);
    if (value) {
      words_[j / 64] |= mask;
    } else {
      words_[j / 64] &= ~mask;
    }
  }

  TwoBitCode pair(std::size_t subcarrier) const noexcept {
    return {bit(2 * subcarrier), bit(2 * subcarrier + 1)};
  }
  void set_pair(std::size_t subcarrier, TwoBitCode code) noexcept {
    set_bit(2 * subcarrier, code.high);
    set_bit(2 * subcarrier + 1, code.low);
  }

  std::size_t popcount() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// ceil(bit_size() / 8)
  std::size_t packed_bytes() const noexcept { return (bit_size() + 7) / 8; }
  /// MSB-first packing, zero padded in the final byte.
  std::vector<std::uint8_t> to_bytes() const;
  std::string to_string() const;

  friend bool operator==(const GeneSequence &, const GeneSequence &) = default;

 private:
  std::size_t subcarriers_ = 0;
  std::vector<std::uint64_t> words_;
};

GeneSequence encode_row(std::span<const Amplitude> amplitudes);
std::vector<GeneSequence> encode_matrix(const AmplitudeMatrix &m);

/// Bytes for one packed gene sequence of k subcarriers versus the same row held
/// as ten-bit codes.
constexpr std::size_t packed_gene_bytes(std::size_t k) noexcept { return (2 * k + 7) / 8; }
constexpr std::size_t ten_bit_bytes(std::size_t k) noexcept { return (10 * k + 7) / 8; }

}  // namespace bicsi
