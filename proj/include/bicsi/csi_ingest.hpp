#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bicsi/common.hpp"

namespace bicsi {

using Amplitude = std::uint32_t;

enum class TraceFormat { amplitude_csv, iq_csv };

/// One packet of raw CSI. Amplitude-only traces store (a, 0) per subcarrier so
/// both input forms share a representation; phase is never used downstream.
struct RawCsiRecord {
  std::size_t packet_index = 0;
  std::vector<std::complex<double>> values;
};

/// floor(|i + jq|). Saturates at the Amplitude maximum.
Amplitude amplitude_from_iq(double i, double q);

/// Integer part of a non-negative real amplitude.
Amplitude integer_amplitude(double amplitude);

class SubcarrierFilter {
 public:
  SubcarrierFilter() = default;
  /// Throws ConfigError on duplicate indices.
  explicit SubcarrierFilter(std::vector<std::size_t> excluded);

  /// One 0-based index per line, '#' starts a comment.
  static SubcarrierFilter load(const std::filesystem::path &path);

  const std::vector<std::size_t> &excluded() const noexcept { return excluded_; }
  bool empty() const noexcept { return excluded_.empty(); }

  /// Retained column indices for a trace of `raw_count` subcarriers, in
  /// ascending order. Throws ConfigError if any excluded index is >= raw_count.
  std::vector<std::size_t> retained(std::size_t raw_count) const;

 private:
  std::vector<std::size_t> excluded_;  // sorted, unique
};

/// Row-major packets x subcarriers integer amplitudes.
class AmplitudeMatrix {
 public:
  AmplitudeMatrix() = default;
  AmplitudeMatrix(std::size_t rows, std::size_t cols);
  AmplitudeMatrix(std::size_t rows, std::size_t cols, std::vector<Amplitude> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const Amplitude> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<Amplitude> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  Amplitude at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const Amplitude> data() const noexcept { return data_; }

  /// Rows [first, first + count) as a new matrix; label and mask are kept.
  AmplitudeMatrix slice_rows(std::size_t first, std::size_t count) const;

  std::optional<std::string> position_label;
  std::vector<std::size_t> subcarrier_mask;

  friend bool operator==(const AmplitudeMatrix &, const AmplitudeMatrix &) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Amplitude> data_;
};

/// Parse a trace in the given CSV format. Blank lines and lines starting with
/// '#' are skipped. Throws ParseError, InputDomainError or EmptyTraceError.
std::vector<RawCsiRecord> parse_trace(std::string_view text, TraceFormat format);
std::vector<RawCsiRecord> load_trace(const std::filesystem::path &path, TraceFormat format);

AmplitudeMatrix build_matrix(std::span<const RawCsiRecord> records,
                             const SubcarrierFilter &filter);

/// Writes an amplitude CSV with a '#' header line.
std::string format_amplitude_csv(const AmplitudeMatrix &m);

}  // namespace bicsi
