#include "bicsi/csi_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bicsi {

namespace {

constexpr double kAmplitudeCeiling =
    static_cast<double>(std::numeric_limits<Amplitude>::max());

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

double parse_number(std::string_view field, std::size_t row) {
  field = trim(field);
  double value = 0.0;
  const auto *end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError("row " + std::to_string(row) + ": not a number: '" +
                         std::string(field) + "'",
                     row);
  }
  if (!std::isfinite(value)) {
    throw InputDomainError("row " + std::to_string(row) + ": non-finite value");
  }
  return value;
}

}  // namespace

Amplitude integer_amplitude(double amplitude) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw InputDomainError("amplitude must be finite and non-negative");
  }
  const double f = std::floor(amplitude);
  return f >= kAmplitudeCeiling ? std::numeric_limits<Amplitude>::max()
                                : static_cast<Amplitude>(f);
}

Amplitude amplitude_from_iq(double i, double q) {
  if (!std::isfinite(i) || !std::isfinite(q)) {
    throw InputDomainError("I/Q components must be finite");
  }
  return integer_amplitude(std::hypot(i, q));
}

SubcarrierFilter::SubcarrierFilter(std::vector<std::size_t> excluded)
    : excluded_(std::move(excluded)) {
  std::sort(excluded_.begin(), excluded_.end());
  if (std::adjacent_find(excluded_.begin(), excluded_.end()) != excluded_.end()) {
    throw ConfigError("subcarrier filter contains duplicate indices");
  }
}

SubcarrierFilter SubcarrierFilter::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open subcarrier filter " + path.string());
  std::vector<std::size_t> indices;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (!body.empty()) {
      std::size_t index = 0;
      const auto *end = body.data() + body.size();
      auto [ptr, ec] = std::from_chars(body.data(), end, index);
      if (ec != std::errc{} || ptr != end) {
        throw ConfigError("subcarrier filter line " + std::to_string(row) +
                          ": not a non-negative integer");
      }
      indices.push_back(index);
    }
    ++row;
  }
  return SubcarrierFilter(std::move(indices));
}

std::vector<std::size_t> SubcarrierFilter::retained(std::size_t raw_count) const {
  if (!excluded_.empty() && excluded_.back() >= raw_count) {
    throw ConfigError("subcarrier filter index " + std::to_string(excluded_.back()) +
                      " out of range for " + std::to_string(raw_count) +
                      " subcarriers");
  }
  std::vector<std::size_t> keep;
  keep.reserve(raw_count - excluded_.size());
  auto next = excluded_.begin();
  for (std::size_t c = 0; c < raw_count; ++c) {
    if (next != excluded_.end() && *next == c) {
      ++next;
      continue;
    }
    keep.push_back(c);
  }
  return keep;
}

AmplitudeMatrix::AmplitudeMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

AmplitudeMatrix::AmplitudeMatrix(std::size_t rows, std::size_t cols,
                                 std::vector<Amplitude> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw LengthMismatchError("matrix data size does not match rows x cols");
  }
}

AmplitudeMatrix AmplitudeMatrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first > rows_ || count > rows_ - first) {
    throw LookupError("row slice out of range");
  }
  const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * cols_);
  AmplitudeMatrix out(count, cols_,
                      std::vector<Amplitude>(begin, begin + static_cast<std::ptrdiff_t>(count * cols_)));
  out.position_label = position_label;
  out.subcarrier_mask = subcarrier_mask;
  return out;
}

std::vector<RawCsiRecord> parse_trace(std::string_view text, TraceFormat format) {
  std::vector<RawCsiRecord> records;
  std::size_t width = 0;
  std::size_t row = 0;
  std::vector<double> fields;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const std::size_t this_row = row++;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    fields.clear();
    while (true) {
      const auto comma = line.find(',');
      fields.push_back(parse_number(line.substr(0, comma), this_row));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }

    if (records.empty()) {
      width = fields.size();
      if (format == TraceFormat::iq_csv && width % 2 != 0) {
        throw ParseError("row " + std::to_string(this_row) +
                             ": I/Q row needs an even number of fields",
                         this_row);
      }
    } else if (fields.size() != width) {
      throw ParseError("row " + std::to_string(this_row) + ": expected " +
                           std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       this_row);
    }

    RawCsiRecord rec;
    rec.packet_index = records.size();
    if (format == TraceFormat::amplitude_csv) {
      rec.values.reserve(fields.size());
      for (double a : fields) {
        if (a < 0.0) {
          throw InputDomainError("row " + std::to_string(this_row) +
                                 ": negative amplitude");
        }
        rec.values.emplace_back(a, 0.0);
      }
    } else {
      rec.values.reserve(fields.size() / 2);
      for (std::size_t f = 0; f + 1 < fields.size(); f += 2) {
        rec.values.emplace_back(fields[f], fields[f + 1]);
      }
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw EmptyTraceError("trace contains no packets");
  return records;
}

std::vector<RawCsiRecord> load_trace(const std::filesystem::path &path,
                                     TraceFormat format) {
  try {
    return parse_trace(read_text(path), format);
  } catch (const EmptyTraceError &) {
    throw EmptyTraceError(path.string() + ": trace contains no packets");
  }
}

AmplitudeMatrix build_matrix(std::span<const RawCsiRecord> records,
                             const SubcarrierFilter &filter) {
  const std::size_t raw = records.empty() ? 0 : records.front().values.size();
  std::vector<std::size_t> keep = filter.retained(raw);

  AmplitudeMatrix m(records.size(), keep.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto &values = records[r].values;
    if (values.size() != raw) {
      throw LengthMismatchError("record " + std::to_string(r) +
                                " has a different subcarrier count");
    }
    auto out = m.row(r);
    for (std::size_t c = 0; c < keep.size(); ++c) {
      const auto &v = values[keep[c]];
      out[c] = amplitude_from_iq(v.real(), v.imag());
    }
  }
  m.subcarrier_mask = std::move(keep);
  return m;
}

std::string format_amplitude_csv(const AmplitudeMatrix &m) {
  std::string out = "# amplitude csv: " + std::to_string(m.rows()) + " packets x " +
                    std::to_string(m.cols()) + " subcarriers\n";
  out.reserve(out.size() + m.rows() * m.cols() * 5);
  char buf[16];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, row[c]);
      out.append(buf, end);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace bicsi
