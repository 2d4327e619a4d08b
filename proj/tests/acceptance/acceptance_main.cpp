// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Synthetic fixtures use frozen seeds. Their expected reports were recorded
// from an oracle run when the fixtures were frozen and are checked exactly
// here (accuracies as window counts over fixed denominators).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bicsi/encoding.hpp"
#include "bicsi/evaluation.hpp"
#include "bicsi/fingerprint.hpp"
#include "bicsi/io.hpp"
#include "bicsi/matcher.hpp"
#include "bicsi/similarity.hpp"
#include "bicsi/synth.hpp"
#include "../support/oracles.hpp"

using namespace bicsi;

namespace {

using Clock = std::chrono::steady_clock;

/// Collects failure messages for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string &what) {
    if (!ok) failures.push_back(what);
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

int failed = 0;

void criterion(int id, const char *title, double budget_s, const std::function<void(Check &)> &body) {
  Check c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception &e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs >= budget_s) c.failures.push_back("took " + num(secs) + " s, budget " + num(budget_s) + " s");
  const bool ok = c.failures.empty();
  failed += ok ? 0 : 1;
  std::printf("[%s] criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, title, secs);
  for (const auto &f : c.failures) std::printf("         %s\n", f.c_str());
  std::fflush(stdout);
}

// Training/test split shared by the end-to-end and temporal fixtures: the
// first `train` rows of each trace are training data, the rest test data.
Session split(const SynthDataset &ds, std::size_t train) {
  Session s;
  for (const auto &t : ds.traces) {
    const std::size_t rows = t.matrix.rows();
    s.training.push_back(to_training({t.matrix.slice_rows(0, train), t.label, t.coord}));
    s.testing.push_back(to_windows({t.matrix.slice_rows(train, rows - train), t.label, t.coord}));
  }
  return s;
}

SynthConfig fixture(std::uint64_t seed, double sigma, std::size_t packets) {
  SynthConfig cfg;
  cfg.positions = 6;
  cfg.subcarriers = 230;
  cfg.packets_per_position = packets;
  cfg.noise_sigma = sigma;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::vector<GeneSequence>> random_training(std::mt19937_64 &rng) {
  const std::size_t positions = 2 + rng() % 5;
  const std::size_t k = 1 + rng() % 64;
  const std::size_t n = 10 + rng() % 200;
  std::vector<std::vector<GeneSequence>> out(positions);
  for (auto &pos : out) {
    std::vector<double> bias(2 * k);
    for (auto &b : bias) b = std::uniform_real_distribution<double>(0, 1)(rng);
    for (std::size_t i = 0; i < n; ++i) {
      oracle::Bits bits(2 * k);
      for (std::size_t j = 0; j < bits.size(); ++j) bits[j] = std::bernoulli_distribution(bias[j])(rng);
      pos.push_back(oracle::gene_of(bits));
    }
  }
  return out;
}

void c1(Check &c) {
  for (Amplitude ap = 0; ap <= 2047; ++ap) {
    const std::string got = encode10(ap).to_string();
    if (got != oracle::encode10(ap)) {
      c.expect(false, "encode10(" + std::to_string(ap) + ") = " + got);
      return;
    }
  }
}

void c2(Check &c) {
  std::mt19937_64 rng(2001);
  for (int t = 0; t < 10000; ++t) {
    const auto a = oracle::random_gene(rng, 230);
    const auto b = oracle::random_gene(rng, 230);
    const auto h = hamming(a, b);
    const double e = euclidean_bits(a, b);
    if (manhattan_bits(a, b) != h || std::fabs(e * e - static_cast<double>(h)) > 1e-9) {
      c.expect(false, "distance identity broken on pair " + std::to_string(t));
      return;
    }
  }

  // Noisy enough that some windows are mispredicted, so the identity is not
  // just three perfect scores.
  const auto ds = generate(fixture(2002, 8.0, 3600));
  const auto s = split(ds, 1200);
  const auto db = build_db(s.training, kDefaultThresholdMicro);
  const std::vector<MetricKind> three{MetricKind::hamming, MetricKind::manhattan, MetricKind::euclidean};
  const auto reports = metric_comparison(db, s.testing, three);
  c.expect(reports[0].predictions == reports[1].predictions, "manhattan predictions differ from hamming");
  c.expect(reports[0].predictions == reports[2].predictions, "euclidean predictions differ from hamming");
  c.expect(reports[0].n == 120, "expected 120 windows, got " + std::to_string(reports[0].n));
}

void c3(Check &c) {
  std::mt19937_64 rng(3001);
  for (int t = 0; t < 100; ++t) {
    const auto training = random_training(rng).front();
    const auto p = derive_ancestors(training, 0);
    if (!(p.first == p.second)) c.expect(false, "tr = 0 gave AS1 != AS2 on set " + std::to_string(t));
  }

  const auto fractions = parse_fraction_range("0:1:0.05");
  c.expect(fractions.size() == 21 && fractions.back() == 1.0, "fraction grid is not {0, 0.05, ..., 1}");
  std::size_t rising = 0;
  double worst_rise = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto training = random_training(rng);
    const std::size_t n = training.front().size();

    // tr above the training count: every column takes the balanced branch.
    std::vector<AncestorPair> pairs;
    for (const auto &pos : training) pairs.push_back(derive_ancestors(pos, n + 1));
    double total = 0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      for (std::size_t b = a + 1; b < pairs.size(); ++b) {
        total += static_cast<double>(hamming(pairs[a].first, pairs[b].first) +
                                     hamming(pairs[a].second, pairs[b].second)) / 2.0;
        ++count;
      }
    }
    c.expect(total / static_cast<double>(count) == 0.0, "collapse distance not zero on fixture " + std::to_string(t));
    const std::vector<double> beyond{1.0 + 1.0 / static_cast<double>(n)};
    c.expect(threshold_sweep(training, beyond)[0].mean_hamming == 0.0,
             "sweep above the training count not zero on fixture " + std::to_string(t));

    const auto pts = threshold_sweep(training, fractions);
    bool rose = false;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double rise = pts[i].mean_hamming - pts[i - 1].mean_hamming;
      if (rise > 0) {
        rose = true;
        worst_rise = std::max(worst_rise, rise);
      }
    }
    rising += rose ? 1 : 0;
  }
  c.expect(rising == 0, "sweep rises somewhere on " + std::to_string(rising) +
                            " of 20 fixtures (largest step up " + num(worst_rise) + ")");
}

void c4(Check &c) {
  std::mt19937_64 rng(4001);
  FingerprintDb db(230, kDefaultThresholdMicro);
  for (std::size_t p = 0; p < 6; ++p) {
    db.add_position({synth_label(p), synth_coord(p, 6),
                     {{oracle::random_gene(rng, 230), oracle::random_gene(rng, 230)}}});
  }
  const auto dir = std::filesystem::temp_directory_path() / "bicsi_acceptance_c4";
  std::filesystem::create_directories(dir);
  const auto bytes = save_db(db, dir / "six.bfp");
  const auto on_disk = std::filesystem::file_size(dir / "six.bfp");
  std::filesystem::remove_all(dir);
  c.expect(bytes == on_disk, "save_db byte count disagrees with the file size");
  c.expect(on_disk <= 4096, "db file is " + std::to_string(on_disk) + " bytes, above 4 KB");

  const std::size_t row_bytes = db.entries()[0].ancestor_sets[0].first.to_bytes().size();
  const std::size_t ten_bit = (10 * 230 + 7) / 8;
  c.expect(row_bytes == 58, "packed k = 230 row is " + std::to_string(row_bytes) + " bytes");
  c.expect(ten_bit == 288 && (ten_bit + 4) / 5 == row_bytes, "k = 230 row is not ceil(20%) of 288 bytes");
  for (std::size_t k = 1; k <= 4096; ++k) {
    const std::size_t packed = GeneSequence(k).to_bytes().size();
    const std::size_t ten = (10 * k + 7) / 8;
    if (packed != (ten + 4) / 5) {
      c.expect(false, "k = " + std::to_string(k) + ": " + std::to_string(packed) + " vs " + std::to_string(ten));
      break;
    }
  }
  std::printf("         db payload %zu bytes (%.2f KB)\n", static_cast<std::size_t>(on_disk),
              static_cast<double>(on_disk) / 1024.0);
}

// Frozen end-to-end reports: every metric scores 200 windows per position.
struct EndToEnd {
  std::uint64_t seed;
  double sigma;
  double flip_rate;          // frozen, checked to 1e-6
  std::size_t correct;       // frozen hamming window count out of 1200
};

void run_end_to_end(Check &c, const EndToEnd &f, double min_accuracy, double max_flip, double min_flip) {
  const auto ds = generate(fixture(f.seed, f.sigma, 36000));
  const double flip = code_flip_rate(ds);
  c.expect(flip >= min_flip && flip < max_flip, "flip rate " + num(flip) + " outside the fixture band");
  c.expect(std::fabs(flip - f.flip_rate) < 1e-6, "flip rate " + num(flip) + " != frozen " + num(f.flip_rate));

  const auto s = split(ds, 12000);
  const auto db = build_db(s.training, kDefaultThresholdMicro);
  const auto reports = metric_comparison(db, s.testing, kAllMetrics);
  for (const auto &r : reports) {
    c.expect(r.n == 1200, r.metric + ": " + std::to_string(r.n) + " windows");
    std::printf("         seed %llu sigma %.1f flip %.6f %-9s accuracy %.6f mae %.6f m\n",
                static_cast<unsigned long long>(f.seed), f.sigma, flip, r.metric.c_str(), r.accuracy,
                r.mae_m);
  }
  const auto &h = reports.front();
  c.expect(h.accuracy == static_cast<double>(f.correct) / 1200.0,
           "hamming accuracy " + num(h.accuracy) + " != frozen " + std::to_string(f.correct) + "/1200");
  c.expect(h.accuracy >= min_accuracy, "hamming accuracy " + num(h.accuracy) + " below " + num(min_accuracy));
  if (h.accuracy == 1.0) c.expect(h.mae_m == 0.0, "accuracy 1.0 with non-zero MAE");
}

void c5(Check &c) {
  run_end_to_end(c, {20241016, 0.4, 0.0655133, 1200}, 1.0, 0.10, 0.0);
  run_end_to_end(c, {20241017, 5.0, 0.245439, 1200}, 0.95, 0.30, 0.20);
}

void c6(Check &c) {
  auto cfg = fixture(11, 0.4, 7200);
  cfg.drift_sigma = 64.0;
  const auto datasets = drift_sessions(cfg, 7);
  std::vector<Session> sessions;
  for (const auto &ds : datasets) sessions.push_back(split(ds, 2400));
  const auto curve = temporal_eval(sessions, kDefaultThresholdMicro, MetricKind::hamming);

  // Mean of per-session accuracies; each session has 240 windows, so m sets
  // average over (7 - m) * 240 windows.
  const std::size_t frozen_correct[6] = {1239, 1158, 959, 719, 480, 240};
  c.expect(curve.size() == 6, "expected 6 curve points");
  for (std::size_t m = 0; m < curve.size() && m < 6; ++m) {
    const double expected = static_cast<double>(frozen_correct[m]) / static_cast<double>((6 - m) * 240);
    std::printf("         sets %zu accuracy %.6f (frozen %.6f)\n", curve[m].sets_used, curve[m].accuracy,
                expected);
    c.expect(std::fabs(curve[m].accuracy - expected) < 1e-12,
             "sets " + std::to_string(m + 1) + ": accuracy " + num(curve[m].accuracy) + " != frozen " +
                 num(expected));
  }
  if (curve.size() >= 3) {
    c.expect(curve[2].accuracy >= curve[0].accuracy, "3-set accuracy below 1-set accuracy");
    c.expect(curve[2].accuracy >= 0.90, "3-set accuracy " + num(curve[2].accuracy) + " below 0.90");
  }
}

void c7(Check &c) {
  auto at = [](double x, double y, std::string label) {
    MatchResult r;
    r.predicted_coord = {x, y};
    r.predicted_label = std::move(label);
    return r;
  };
  const std::vector<MatchResult> one{at(1, 1, "A")};
  const std::vector<Coord> origin{{0, 0}};
  c.expect(mae(one, origin) == 1.0, "(1,1) vs (0,0) MAE != 1.0");

  const std::vector<MatchResult> two{at(0, 3, "A"), at(1, 3, "B")};
  const std::vector<Coord> truths{{0, 3}, {-1, 3}};
  c.expect(mae(two, truths) == 0.5, "two-point MAE != 0.5");
  const std::vector<Coord> exact{{0, 3}, {1, 3}};
  c.expect(mae(two, exact) == 0.0, "exact MAE != 0");

  const std::vector<MatchResult> four{at(0, 0, "A"), at(0, 0, "B"), at(0, 0, "C"), at(0, 0, "D")};
  c.expect(accuracy(four, std::vector<std::string>{"A", "B", "C", "X"}) == 0.75, "3 of 4 != 0.75");
  c.expect(accuracy(four, std::vector<std::string>{"A", "B", "C", "D"}) == 1.0, "4 of 4 != 1.0");
  c.expect(accuracy(four, std::vector<std::string>{"X", "X", "X", "X"}) == 0.0, "0 of 4 != 0.0");
}

void c8(Check &c) {
  std::mt19937_64 rng(8001);
  std::size_t ties = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + rng() % 8;
    const std::size_t entries = 1 + rng() % 8;
    FingerprintDb db(k, kDefaultThresholdMicro);
    std::vector<std::vector<oracle::Bits>> flat;
    for (std::size_t e = 0; e < entries; ++e) {
      PositionEntry pe{"E" + std::to_string(e), {static_cast<double>(e), 0.0}, {}};
      std::vector<oracle::Bits> anc;
      const std::size_t sets = 1 + rng() % 3;
      for (std::size_t s = 0; s < sets; ++s) {
        const auto a = oracle::random_bits(rng, 2 * k);
        const auto b = oracle::random_bits(rng, 2 * k);
        pe.ancestor_sets.push_back({oracle::gene_of(a), oracle::gene_of(b)});
        anc.push_back(a);
        anc.push_back(b);
      }
      db.add_position(std::move(pe));
      flat.push_back(std::move(anc));
    }
    const auto parent = oracle::random_bits(rng, 2 * k);
    const auto ref = oracle::brute_match(parent, flat, [](const auto &x, const auto &y) {
      return static_cast<double>(oracle::hamming(x, y));
    });
    const auto got = match_one({oracle::gene_of(parent), 0}, db, MetricKind::hamming);
    if (got.predicted_index != ref.index || got.best_distance != ref.best ||
        got.runner_up_margin != ref.margin) {
      c.expect(false, "instance " + std::to_string(t) + ": matcher disagrees with brute force");
      return;
    }
    ties += (entries > 1 && ref.margin == 0.0) ? 1 : 0;
  }
  c.expect(ties > 0, "no tie cases were exercised");
  std::printf("         %zu of 1000 instances had a tie for the minimum\n", ties);
}

DbErrorKind corrupt_kind(const std::vector<std::uint8_t> &bytes, bool &raised) {
  try {
    deserialize_db(bytes);
  } catch (const DbFormatError &e) {
    raised = true;
    return e.kind();
  }
  raised = false;
  return DbErrorKind::bad_magic;
}

void c9(Check &c) {
  std::mt19937_64 rng(9001);
  const auto dir = std::filesystem::temp_directory_path() / "bicsi_acceptance_c9";
  std::filesystem::create_directories(dir);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = rng() % 300;
    FingerprintDb db(k, static_cast<std::uint32_t>(rng() % 1'000'001));
    const std::size_t entries = rng() % 10;
    for (std::size_t e = 0; e < entries; ++e) {
      PositionEntry pe{"pos-" + std::to_string(e), {std::uniform_real_distribution<double>(-50, 50)(rng),
                                                    std::uniform_real_distribution<double>(-50, 50)(rng)}, {}};
      const std::size_t sets = 1 + rng() % 4;
      for (std::size_t s = 0; s < sets; ++s) {
        pe.ancestor_sets.push_back({oracle::random_gene(rng, k), oracle::random_gene(rng, k)});
      }
      db.add_position(std::move(pe));
    }
    const auto path = dir / "db.bfp";
    save_db(db, path);
    const auto back = load_db(path);
    if (!(back == db) || serialize_db(back) != read_file_bytes(path)) {
      c.expect(false, "db " + std::to_string(t) + " did not round-trip");
      break;
    }
  }
  std::filesystem::remove_all(dir);

  FingerprintDb db(5, kDefaultThresholdMicro);
  db.add_position({"A", {0, 0}, {{oracle::random_gene(rng, 5), oracle::random_gene(rng, 5)}}});
  const auto good = serialize_db(db);
  struct Case {
    const char *name;
    std::vector<std::uint8_t> bytes;
    DbErrorKind kind;
  };
  std::vector<Case> cases;
  auto bad = good;
  bad[1] = '?';
  cases.push_back({"bad magic", bad, DbErrorKind::bad_magic});
  bad = good;
  bad[4] = kDbFormatVersion + 1;
  cases.push_back({"version mismatch", bad, DbErrorKind::unsupported_version});
  cases.push_back({"truncated payload", {good.begin(), good.end() - 1}, DbErrorKind::truncated});
  bad = good;
  bad.push_back(0xAB);
  cases.push_back({"trailing bytes", bad, DbErrorKind::length_mismatch});
  bad = good;
  bad[15 + 2 + 1 + 16 + 2 + 1] |= 0x01;  // padding bit of the first sequence
  cases.push_back({"padding bits set", bad, DbErrorKind::length_mismatch});
  bad = good;
  bad[15 + 2 + 1 + 16] = 0;  // zero ancestor sets
  bad.resize(15 + 2 + 1 + 16 + 2);
  cases.push_back({"empty ancestor list", bad, DbErrorKind::invalid_content});
  for (const auto &cs : cases) {
    bool raised = false;
    const auto kind = corrupt_kind(cs.bytes, raised);
    c.expect(raised && kind == cs.kind, std::string(cs.name) + ": wrong or missing error");
  }
}

}  // namespace

int main() {
  criterion(1, "encode10 exhaustive over 0..2047", 1.0, c1);
  criterion(2, "hamming = manhattan = euclidean^2; identical predictions", 5.0, c2);
  criterion(3, "ancestor derivation limits and non-increasing threshold sweep", 10.0, c3);
  criterion(4, "6-position k=230 db <= 4 KB; packed rows are 20% of ten-bit rows", 1.0, c4);
  criterion(5, "frozen end-to-end fixtures (clean and ~25% flip)", 60.0, c5);
  criterion(6, "temporal multi-set trend on the 7-session drift fixture", 60.0, c6);
  criterion(7, "MAE and accuracy hand-computed cases", 1.0, c7);
  criterion(8, "matcher agrees with brute force on 1000 instances", 10.0, c8);
  criterion(9, "db round-trip and corruption classes", 10.0, c9);
  std::printf("%s: %d of 9 criteria failed\n", failed == 0 ? "PASS" : "FAIL", failed);
  return failed == 0 ? 0 : 1;
}
