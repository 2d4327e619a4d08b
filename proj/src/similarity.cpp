#include "bicsi/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

namespace bicsi {

namespace {

void require_same_length(const GeneSequence &a, const GeneSequence &b) {
  if (a.bit_size() != b.bit_size()) {
    throw LengthMismatchError("gene sequences differ in length: " +
                              std::to_string(a.bit_size()) + " vs " +
                              std::to_string(b.bit_size()));
  }
}

// Joint bit counts of two equal-length sequences.
struct Counts {
  std::size_t n = 0;    // total bits
  std::size_t a = 0;    // ones in a
  std::size_t b = 0;    // ones in b
  std::size_t both = 0; // positions with a = b = 1
};

Counts joint_counts(const GeneSequence &a, const GeneSequence &b) {
  require_same_length(a, b);
  Counts c;
  c.n = a.bit_size();
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    c.a += static_cast<std::size_t>(std::popcount(wa[i]));
    c.b += static_cast<std::size_t>(std::popcount(wb[i]));
    c.both += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  }
  return c;
}

}  // namespace

std::string_view metric_name(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::hamming: return "hamming";
    case MetricKind::manhattan: return "manhattan";
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::cosine: return "cosine";
    case MetricKind::pearson: return "pearson";
    case MetricKind::jaccard: return "jaccard";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (MetricKind k : kAllMetrics) {
    if (metric_name(k) == lower) return k;
  }
  std::string valid;
  for (MetricKind k : kAllMetrics) {
    if (!valid.empty()) valid += ", ";
    valid += metric_name(k);
  }
  throw ConfigError("unknown metric '" + std::string(name) + "'; valid: " + valid);
}

std::size_t hamming(const GeneSequence &a, const GeneSequence &b) {
  require_same_length(a, b);
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t d = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return d;
}

// |a_j - b_j| is 1 exactly where the bits differ.
std::size_t manhattan_bits(const GeneSequence &a, const GeneSequence &b) {
  return hamming(a, b);
}

double euclidean_bits(const GeneSequence &a, const GeneSequence &b) {
  return std::sqrt(static_cast<double>(hamming(a, b)));
}

double cosine_bits(const GeneSequence &a, const GeneSequence &b) {
  const Counts c = joint_counts(a, b);
  if (c.a == 0 && c.b == 0) return 1.0;
  if (c.a == 0 || c.b == 0) return 0.0;
  return static_cast<double>(c.both) /
         std::sqrt(static_cast<double>(c.a) * static_cast<double>(c.b));
}

double pearson_bits(const GeneSequence &a, const GeneSequence &b) {
  const Counts c = joint_counts(a, b);
  const double n = static_cast<double>(c.n);
  const double sa = static_cast<double>(c.a);
  const double sb = static_cast<double>(c.b);
  // n^2 * var for a 0/1 vector is ones * zeros.
  const double var_a = sa * (n - sa);
  const double var_b = sb * (n - sb);
  if (var_a == 0.0 || var_b == 0.0) return a == b ? 1.0 : 0.0;
  const double cov = n * static_cast<double>(c.both) - sa * sb;
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double jaccard_bits(const GeneSequence &a, const GeneSequence &b) {
  const Counts c = joint_counts(a, b);
  const std::size_t uni = c.a + c.b - c.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(c.both) / static_cast<double>(uni);
}

double distance(MetricKind kind, const GeneSequence &a, const GeneSequence &b) {
  switch (kind) {
    case MetricKind::hamming: return static_cast<double>(hamming(a, b));
    case MetricKind::manhattan: return static_cast<double>(manhattan_bits(a, b));
    case MetricKind::euclidean: return euclidean_bits(a, b);
    case MetricKind::cosine: return 1.0 - cosine_bits(a, b);
    case MetricKind::pearson: return (1.0 - pearson_bits(a, b)) / 2.0;
    case MetricKind::jaccard: return 1.0 - jaccard_bits(a, b);
  }
  return 0.0;
}

}  // namespace bicsi
