#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "bicsi/encoding.hpp"

namespace bicsi {

enum class MetricKind { hamming, manhattan, euclidean, cosine, pearson, jaccard };

inline constexpr std::array<MetricKind, 6> kAllMetrics = {
    MetricKind::hamming, MetricKind::manhattan, MetricKind::euclidean,
    MetricKind::cosine,  MetricKind::pearson,   MetricKind::jaccard};

std::string_view metric_name(MetricKind kind) noexcept;
/// Case-insensitive. Throws ConfigError listing the valid names.
MetricKind parse_metric(std::string_view name);

// All pairwise functions throw LengthMismatchError unless
// a.bit_size() == b.bit_size().

std::size_t hamming(const GeneSequence &a, const GeneSequence &b);
std::size_t manhattan_bits(const GeneSequence &a, const GeneSequence &b);
double euclidean_bits(const GeneSequence &a, const GeneSequence &b);

/// 1 when both vectors are all-zero, 0 when only one is.
double cosine_bits(const GeneSequence &a, const GeneSequence &b);
/// Zero-variance input: 1 if a == b, else 0.
double pearson_bits(const GeneSequence &a, const GeneSequence &b);
/// Both supports empty: 1.
double jaccard_bits(const GeneSequence &a, const GeneSequence &b);

/// Lower is more similar for every kind: distances pass through, cosine and
/// jaccard map to 1 - s, pearson to (1 - rho) / 2.
double distance(MetricKind kind, const GeneSequence &a, const GeneSequence &b);

}  // namespace bicsi
