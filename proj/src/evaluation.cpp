#include "bicsi/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace bicsi {

namespace {

using json = nlohmann::json;

double coord_gap(const Coord &p, const Coord &a) {
  return std::abs(p.x - a.x) + std::abs(p.y - a.y);
}

// Builds a report from match results grouped by true entry index.
struct Group {
  std::size_t truth = 0;
  Coord coord;
  std::vector<MatchResult> results;
};

EvalReport assemble(std::string metric, const std::vector<std::string> &labels,
                    const std::vector<Group> &groups) {
  EvalReport r;
  r.metric = std::move(metric);
  const std::size_t p = labels.size();
  r.per_position.resize(p);
  for (std::size_t i = 0; i < p; ++i) r.per_position[i].label = labels[i];
  r.confusion.assign(p, std::vector<std::size_t>(p, 0));

  std::vector<double> gap_sum(p, 0.0);
  double total_gap = 0.0;
  std::size_t correct = 0;
  for (const auto &g : groups) {
    auto &row = r.per_position[g.truth];
    for (const auto &m : g.results) {
      const double gap = coord_gap(m.predicted_coord, g.coord);
      gap_sum[g.truth] += gap;
      total_gap += gap;
      ++row.n;
      ++r.confusion[g.truth][m.predicted_index];
      if (m.predicted_index == g.truth) {
        ++row.correct;
        ++correct;
      }
      r.predictions.push_back(m.predicted_index);
    }
  }
  r.n = r.predictions.size();
  if (r.n == 0) throw LookupError("evaluation needs at least one window");
  for (std::size_t i = 0; i < p; ++i) {
    const auto n = r.per_position[i].n;
    r.per_position[i].mae_m = n == 0 ? 0.0 : gap_sum[i] / (2.0 * static_cast<double>(n));
  }
  r.mae_m = total_gap / (2.0 * static_cast<double>(r.n));
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
  return r;
}

double pair_distance(const AncestorPair &a, const AncestorPair &b) {
  return (static_cast<double>(hamming(a.first, b.first)) +
          static_cast<double>(hamming(a.second, b.second))) /
         2.0;
}

void require_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw LengthMismatchError("raw vectors differ in length: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
  }
}

std::string fmt_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

json report_to_json(const EvalReport &r) {
  json per = json::array();
  for (const auto &p : r.per_position) {
    per.push_back({{"label", p.label}, {"n", p.n}, {"correct", p.correct}, {"mae_m", p.mae_m}});
  }
  return {{"metric", r.metric},      {"n", r.n},
          {"mae_m", r.mae_m},        {"accuracy", r.accuracy},
          {"per_position", per},     {"confusion", r.confusion}};
}

}  // namespace

PositionTraining to_training(const LabeledTrace &trace) {
  return {trace.label, trace.coord, encode_matrix(trace.matrix)};
}

LabeledWindows to_windows(const LabeledTrace &trace, std::size_t window) {
  return {trace.label, trace.coord, windows(encode_matrix(trace.matrix), window)};
}

double mae(std::span<const MatchResult> results, std::span<const Coord> truths) {
  if (results.size() != truths.size()) {
    throw LengthMismatchError("mae: results and truths differ in length");
  }
  if (results.empty()) throw LookupError("mae: no data points");
  double sum = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    sum += coord_gap(results[i].predicted_coord, truths[i]);
  }
  return sum / (2.0 * static_cast<double>(results.size()));
}

double accuracy(std::span<const MatchResult> results, std::span<const std::string> truths) {
  if (results.size() != truths.size()) {
    throw LengthMismatchError("accuracy: results and truths differ in length");
  }
  if (results.empty()) throw LookupError("accuracy: no data points");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    correct += results[i].predicted_label == truths[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(results.size());
}

EvalReport evaluate(const FingerprintDb &db, std::span<const LabeledWindows> windows,
                    MetricKind kind) {
  std::vector<std::string> labels;
  for (const auto &e : db.entries()) labels.push_back(e.label);

  std::vector<Group> groups;
  for (const auto &w : windows) {
    const std::size_t truth = db.find(w.label);
    if (truth == db.entries().size()) {
      throw LookupError("test label '" + w.label + "' is not in the fingerprint db");
    }
    groups.push_back({truth, w.coord, match_trace(w.parents, db, kind)});
  }
  return assemble(std::string(metric_name(kind)), labels, groups);
}

std::vector<EvalReport> metric_comparison(const FingerprintDb &db,
                                          std::span<const LabeledWindows> windows,
                                          std::span<const MetricKind> kinds) {
  if (kinds.empty()) throw LookupError("metric comparison needs at least one metric");
  std::vector<EvalReport> out;
  out.reserve(kinds.size());
  for (MetricKind k : kinds) out.push_back(evaluate(db, windows, k));
  return out;
}

std::vector<SweepPoint> threshold_sweep(std::span<const std::vector<GeneSequence>> training,
                                        std::span<const double> fractions) {
  if (training.size() < 2) throw LookupError("threshold sweep needs at least two positions");
  const std::size_t p = training.size();
  const double pairs = static_cast<double>(p * (p - 1) / 2);

  std::vector<SweepPoint> out;
  out.reserve(fractions.size());
  std::vector<AncestorPair> fp(p);
  for (double f : fractions) {
    const std::uint32_t micro = fraction_to_micro(f);
    for (std::size_t i = 0; i < p; ++i) {
      fp[i] = derive_ancestors(training[i], threshold_count(micro, training[i].size()));
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a + 1; b < p; ++b) sum += pair_distance(fp[a], fp[b]);
    }
    out.push_back({f, sum / pairs});
  }
  return out;
}

std::vector<double> parse_fraction_range(std::string_view text) {
  auto number = [&](std::string_view f) {
    while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
    while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v) ||
        v < 0.0) {
      throw ConfigError("bad fraction '" + std::string(f) + "' in '" + std::string(text) + "'");
    }
    return v;
  };
  auto snap = [](double v) { return micro_to_fraction(fraction_to_micro(v)); };

  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
      throw ConfigError("range must look like start:stop:step, got '" + std::string(text) + "'");
    }
    const double start = number(text.substr(0, c1));
    const double stop = number(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = number(text.substr(c2 + 1));
    if (step <= 0.0 || stop < start) {
      throw ConfigError("range needs step > 0 and stop >= start");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(snap(start + static_cast<double>(i) * step));
    }
  } else {
    while (true) {
      const auto comma = text.find(',');
      out.push_back(snap(number(text.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      text = text.substr(comma + 1);
    }
  }
  return out;
}

std::vector<TemporalPoint> temporal_eval(std::span<const Session> sessions,
                                         std::uint32_t threshold_micro, MetricKind kind) {
  if (sessions.size() < 2) throw LookupError("temporal evaluation needs at least two sessions");

  // One fingerprint db per session; later dbs only contribute their pairs.
  std::vector<FingerprintDb> per_session;
  per_session.reserve(sessions.size());
  for (const auto &s : sessions) per_session.push_back(build_db(s.training, threshold_micro));

  const FingerprintDb &base = per_session.front();
  for (const auto &db : per_session) {
    if (db.entries().size() != base.entries().size()) {
      throw LookupError("sessions disagree on the set of positions");
    }
    for (const auto &e : db.entries()) {
      if (base.find(e.label) == base.entries().size()) {
        throw LookupError("position '" + e.label + "' missing from the first session");
      }
    }
  }

  std::vector<TemporalPoint> curve;
  FingerprintDb db = base;
  for (std::size_t m = 1; m < sessions.size(); ++m) {
    if (m > 1) {
      for (const auto &e : per_session[m - 1].entries()) {
        db = append_ancestor_set(db, e.label, e.ancestor_sets.front());
      }
    }
    double acc_sum = 0.0;
    for (std::size_t s = m; s < sessions.size(); ++s) {
      acc_sum += evaluate(db, sessions[s].testing, kind).accuracy;
    }
    curve.push_back({m, acc_sum / static_cast<double>(sessions.size() - m)});
  }
  return curve;
}

std::vector<double> column_means(const AmplitudeMatrix &m, std::size_t first_row,
                                 std::size_t rows) {
  if (rows == 0 || first_row + rows > m.rows()) throw LookupError("column_means: bad row range");
  std::vector<double> sum(m.cols(), 0.0);
  for (std::size_t r = first_row; r < first_row + rows; ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) sum[c] += row[c];
  }
  for (double &v : sum) v /= static_cast<double>(rows);
  return sum;
}

RawBaselineDb build_raw_baseline(std::span<const LabeledTrace> training) {
  RawBaselineDb db;
  for (const auto &t : training) {
    if (t.matrix.rows() == 0) {
      throw EmptyTraceError("position '" + t.label + "' has no training packets");
    }
    if (!db.entries.empty() && db.entries.front().mean.size() != t.matrix.cols()) {
      throw LengthMismatchError("raw baseline traces differ in subcarrier count");
    }
    db.entries.push_back({t.label, t.coord, column_means(t.matrix, 0, t.matrix.rows())});
  }
  return db;
}

LabeledRawWindows raw_windows(const LabeledTrace &trace, std::size_t window) {
  if (window == 0) throw ConfigError("window size must be at least 1");
  LabeledRawWindows out{trace.label, trace.coord, {}};
  const std::size_t rows = trace.matrix.rows();
  for (std::size_t first = 0; first < rows; first += window) {
    const std::size_t count = std::min(window, rows - first);
    if (count < window && 2 * count < window) break;
    out.means.push_back(column_means(trace.matrix, first, count));
  }
  return out;
}

double cosine_real(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double pearson_real(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return std::equal(a.begin(), a.end(), b.begin()) ? 1.0 : 0.0;
  return std::clamp(cov / (std::sqrt(va) * std::sqrt(vb)), -1.0, 1.0);
}

MatchResult raw_match_one(const RawBaselineDb &db, std::span<const double> window,
                          MetricKind kind, std::size_t window_index) {
  if (kind != MetricKind::cosine && kind != MetricKind::pearson) {
    throw ConfigError("raw baselines support only cosine and pearson");
  }
  if (db.entries.empty()) throw LookupError("raw baseline db is empty");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double best = kInf, second = kInf;
  std::size_t best_entry = 0;
  for (std::size_t e = 0; e < db.entries.size(); ++e) {
    const auto &mean = db.entries[e].mean;
    const double d = kind == MetricKind::cosine ? 1.0 - cosine_real(mean, window)
                                                : (1.0 - pearson_real(mean, window)) / 2.0;
    if (d < best) {
      second = best;
      best = d;
      best_entry = e;
    } else if (d < second) {
      second = d;
    }
  }
  const auto &w = db.entries[best_entry];
  return {window_index, best_entry, w.label, w.coord, best,
          second == kInf ? 0.0 : second - best};
}

EvalReport raw_baseline(const RawBaselineDb &db, std::span<const LabeledRawWindows> windows,
                        MetricKind kind) {
  std::vector<std::string> labels;
  for (const auto &e : db.entries) labels.push_back(e.label);

  std::vector<Group> groups;
  for (const auto &w : windows) {
    const auto it = std::find(labels.begin(), labels.end(), w.label);
    if (it == labels.end()) {
      throw LookupError("test label '" + w.label + "' is not in the raw baseline db");
    }
    Group g{static_cast<std::size_t>(it - labels.begin()), w.coord, {}};
    for (std::size_t i = 0; i < w.means.size(); ++i) {
      g.results.push_back(raw_match_one(db, w.means[i], kind, i));
    }
    groups.push_back(std::move(g));
  }
  return assemble("raw_" + std::string(metric_name(kind)), labels, groups);
}

std::string report_json(const EvalReport &report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string comparison_json(std::span<const EvalReport> reports) {
  json arr = json::array();
  for (const auto &r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2) + "\n";
}

std::string match_results_json(std::span<const MatchResult> results) {
  json arr = json::array();
  for (const auto &m : results) {
    arr.push_back({{"window_index", m.window_index},
                   {"predicted_label", m.predicted_label},
                   {"predicted_x", m.predicted_coord.x},
                   {"predicted_y", m.predicted_coord.y},
                   {"best_distance", m.best_distance},
                   {"runner_up_margin", m.runner_up_margin}});
  }
  return arr.dump(2) + "\n";
}

std::string format_report_table(const EvalReport &report) {
  std::size_t width = 8;
  for (const auto &p : report.per_position) width = std::max(width, p.label.size() + 2);

  std::ostringstream out;
  out << "metric: " << report.metric << "  windows: " << report.n << "  accuracy: "
      << std::fixed << std::setprecision(4) << report.accuracy << "  mae_m: " << report.mae_m
      << "\n";
  out << std::left << std::setw(static_cast<int>(width)) << "label" << std::right
      << std::setw(8) << "n" << std::setw(9) << "correct" << std::setw(10) << "accuracy"
      << std::setw(10) << "mae_m" << "\n";
  for (const auto &p : report.per_position) {
    const double acc = p.n == 0 ? 0.0 : static_cast<double>(p.correct) / static_cast<double>(p.n);
    out << std::left << std::setw(static_cast<int>(width)) << p.label << std::right
        << std::setw(8) << p.n << std::setw(9) << p.correct << std::setw(10) << acc
        << std::setw(10) << p.mae_m << "\n";
  }
  return out.str();
}

std::string format_comparison_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "metric" << std::right << std::setw(8) << "n"
      << std::setw(10) << "accuracy" << std::setw(10) << "mae_m" << "\n";
  for (const auto &r : reports) {
    out << std::left << std::setw(14) << r.metric << std::right << std::setw(8) << r.n
        << std::fixed << std::setprecision(4) << std::setw(10) << r.accuracy << std::setw(10)
        << r.mae_m << "\n";
  }
  return out.str();
}

std::string sweep_csv(std::span<const SweepPoint> points) {
  std::string out = "tr_fraction,mean_hamming\n";
  for (const auto &p : points) {
    out += fmt_double(p.tr_fraction) + "," + fmt_double(p.mean_hamming) + "\n";
  }
  return out;
}

std::string temporal_csv(std::span<const TemporalPoint> points) {
  std::string out = "sets_used,accuracy\n";
  for (const auto &p : points) {
    out += std::to_string(p.sets_used) + "," + fmt_double(p.accuracy) + "\n";
  }
  return out;
}

}  // namespace bicsi
