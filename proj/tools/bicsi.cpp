// bicsi: batch front end for training, matching, evaluation, threshold sweeps,
// metric comparison, temporal studies and synthetic data generation.
//
// Exit codes: 0 success, 1 runtime/data error, 2 usage/config error.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bicsi/csi_ingest.hpp"
#include "bicsi/encoding.hpp"
#include "bicsi/evaluation.hpp"
#include "bicsi/fingerprint.hpp"
#include "bicsi/io.hpp"
#include "bicsi/matcher.hpp"
#include "bicsi/similarity.hpp"
#include "bicsi/synth.hpp"

namespace fs = std::filesystem;
using namespace bicsi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Options shared by every command that reads traces.
struct TraceOptions {
  std::string filter_path;
  std::string format = "amplitude";
  std::size_t window = kDefaultWindow;

  void add_to(CLI::App *cmd, bool with_window) {
    cmd->add_option("--filter", filter_path,
                    "Subcarrier exclusion list (one 0-based index per line)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--format", format, "Trace format")
        ->check(CLI::IsMember({"amplitude", "iq"}))
        ->capture_default_str();
    if (with_window) {
      cmd->add_option("--window", window, "Packets per parent sequence")
          ->check(CLI::PositiveNumber)
          ->capture_default_str();
    }
  }

  SubcarrierFilter filter() const {
    return filter_path.empty() ? SubcarrierFilter{} : SubcarrierFilter::load(filter_path);
  }
  TraceFormat trace_format() const {
    return format == "iq" ? TraceFormat::iq_csv : TraceFormat::amplitude_csv;
  }
};

LabeledTrace load_labeled(const ManifestRow &row, const SubcarrierFilter &filter,
                          TraceFormat format) {
  const auto records = load_trace(row.file, format);
  LabeledTrace t{build_matrix(records, filter), row.label, row.coord};
  t.matrix.position_label = row.label;
  return t;
}

std::vector<LabeledTrace> load_manifest_traces(const fs::path &manifest,
                                               const TraceOptions &opts) {
  const auto rows = read_manifest(manifest);
  if (rows.empty()) throw LookupError("manifest " + manifest.string() + " lists no traces");
  const auto filter = opts.filter();
  std::vector<LabeledTrace> traces;
  traces.reserve(rows.size());
  for (const auto &r : rows) traces.push_back(load_labeled(r, filter, opts.trace_format()));
  return traces;
}

std::vector<LabeledWindows> load_test_windows(const fs::path &manifest,
                                              const TraceOptions &opts) {
  std::vector<LabeledWindows> out;
  for (const auto &t : load_manifest_traces(manifest, opts)) {
    out.push_back(to_windows(t, opts.window));
  }
  return out;
}

std::string kilobytes(std::size_t bytes) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << static_cast<double>(bytes) / 1024.0 << " KB";
  return s.str();
}

std::string fraction_str(double f) {
  std::ostringstream s;
  s << f;
  return s.str();
}

std::vector<MetricKind> parse_metric_list(const std::string &list) {
  std::vector<MetricKind> kinds;
  std::string_view rest = list;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    kinds.push_back(parse_metric(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (kinds.empty()) throw ConfigError("no metrics given");
  return kinds;
}

// --- train ---------------------------------------------------------------

struct TrainCmd {
  std::string manifest;
  std::string out;
  double threshold = micro_to_fraction(kDefaultThresholdMicro);
  TraceOptions trace;

  int run() const {
    const std::uint32_t micro = fraction_to_micro(threshold);
    const auto traces = load_manifest_traces(manifest, trace);
    std::vector<PositionTraining> training;
    for (const auto &t : traces) training.push_back(to_training(t));
    const FingerprintDb db = build_db(training, micro);
    const std::size_t bytes = save_db(db, out);

    std::cout << "positions: " << db.entries().size() << "  subcarriers: " << db.subcarrier_count()
              << "  threshold: " << fraction_str(threshold) << "\n";
    for (const auto &p : training) {
      std::cout << "  " << p.label << ": " << p.sequences.size()
                << " training packets, Tr = " << threshold_count(micro, p.sequences.size())
                << "\n";
    }
    std::cout << "wrote " << out << " (" << bytes << " bytes, " << kilobytes(bytes) << ")\n";
    return kExitOk;
  }
};

// --- match ---------------------------------------------------------------

struct MatchCmd {
  std::string db_path;
  std::string trace_path;
  std::string metric = "hamming";
  std::string out;
  TraceOptions trace;

  int run() const {
    const MetricKind kind = parse_metric(metric);
    const FingerprintDb db = load_db(db_path);
    const auto records = load_trace(trace_path, trace.trace_format());
    const AmplitudeMatrix m = build_matrix(records, trace.filter());
    const auto parents = windows(encode_matrix(m), trace.window);
    const auto results = match_trace(parents, db, kind);
    write_file_atomic(out, match_results_json(results));

    std::map<std::string, std::size_t> votes;
    for (const auto &r : results) ++votes[r.predicted_label];
    std::cout << "windows: " << results.size() << "  metric: " << metric_name(kind) << "\n";
    for (const auto &[label, n] : votes) std::cout << "  " << label << ": " << n << "\n";
    std::cout << "wrote " << out << "\n";
    return kExitOk;
  }
};

// --- eval ----------------------------------------------------------------

struct EvalCmd {
  std::string db_path;
  std::string manifest;
  std::string metric = "hamming";
  std::string out;
  TraceOptions trace;

  int run() const {
    const MetricKind kind = parse_metric(metric);
    const FingerprintDb db = load_db(db_path);
    const auto tests = load_test_windows(manifest, trace);
    const EvalReport report = evaluate(db, tests, kind);
    write_file_atomic(out, report_json(report));
    std::cout << format_report_table(report) << "wrote " << out << "\n";
    return kExitOk;
  }
};

// --- sweep ---------------------------------------------------------------

struct SweepCmd {
  std::string manifest;
  std::string fractions = "0:1:0.05";
  std::string out;
  TraceOptions trace;

  int run() const {
    const auto values = parse_fraction_range(fractions);
    const auto traces = load_manifest_traces(manifest, trace);
    std::vector<std::vector<GeneSequence>> training;
    for (const auto &t : traces) training.push_back(encode_matrix(t.matrix));
    const auto points = threshold_sweep(training, values);
    write_file_atomic(out, sweep_csv(points));
    for (const auto &p : points) {
      std::cout << std::setw(10) << p.tr_fraction << std::setw(12) << p.mean_hamming << "\n";
    }
    std::cout << "wrote " << out << "\n";
    return kExitOk;
  }
};

// --- compare-metrics -----------------------------------------------------

struct CompareCmd {
  std::string db_path;
  std::string manifest;
  std::string metrics = "hamming,manhattan,euclidean,cosine,pearson,jaccard";
  std::string out;
  TraceOptions trace;

  int run() const {
    const auto kinds = parse_metric_list(metrics);
    const FingerprintDb db = load_db(db_path);
    const auto tests = load_test_windows(manifest, trace);
    const auto reports = metric_comparison(db, tests, kinds);
    write_file_atomic(out, comparison_json(reports));
    std::cout << format_comparison_table(reports) << "wrote " << out << "\n";
    return kExitOk;
  }
};

// --- temporal ------------------------------------------------------------

struct TemporalCmd {
  std::string root;
  double threshold = micro_to_fraction(kDefaultThresholdMicro);
  std::string metric = "hamming";
  std::string out;
  TraceOptions trace;

  // session_<n> subdirectories, ordered by n.
  std::vector<fs::path> session_dirs() const {
    std::vector<std::pair<std::size_t, fs::path>> found;
    for (const auto &entry : fs::directory_iterator(root)) {
      const std::string name = entry.path().filename().string();
      if (!entry.is_directory() || !name.starts_with("session_")) continue;
      std::size_t n = 0;
      const auto digits = std::string_view(name).substr(8);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc{} && ptr == digits.data() + digits.size()) {
        found.emplace_back(n, entry.path());
      }
    }
    std::sort(found.begin(), found.end());
    std::vector<fs::path> dirs;
    for (auto &[n, p] : found) dirs.push_back(std::move(p));
    return dirs;
  }

  int run() const {
    const MetricKind kind = parse_metric(metric);
    const std::uint32_t micro = fraction_to_micro(threshold);
    std::vector<Session> sessions;
    for (const auto &dir : session_dirs()) {
      Session s;
      for (const auto &t : load_manifest_traces(dir / "train.csv", trace)) {
        s.training.push_back(to_training(t));
      }
      s.testing = load_test_windows(dir / "test.csv", trace);
      sessions.push_back(std::move(s));
    }
    const auto curve = temporal_eval(sessions, micro, kind);
    write_file_atomic(out, temporal_csv(curve));
    std::cout << "sessions: " << sessions.size() << "  metric: " << metric_name(kind) << "\n";
    for (const auto &p : curve) {
      std::cout << "  sets_used " << p.sets_used << ": accuracy " << std::fixed
                << std::setprecision(4) << p.accuracy << "\n";
    }
    std::cout << "wrote " << out << "\n";
    return kExitOk;
  }
};

// --- baseline ------------------------------------------------------------

struct BaselineCmd {
  std::string train_manifest;
  std::string test_manifest;
  std::string kind = "cosine";
  std::string out;
  TraceOptions trace;

  int run() const {
    const MetricKind k = parse_metric(kind);
    if (k != MetricKind::cosine && k != MetricKind::pearson) {
      throw ConfigError("baseline kind must be cosine or pearson");
    }
    const RawBaselineDb db = build_raw_baseline(load_manifest_traces(train_manifest, trace));
    std::vector<LabeledRawWindows> tests;
    for (const auto &t : load_manifest_traces(test_manifest, trace)) {
      tests.push_back(raw_windows(t, trace.window));
    }
    const EvalReport report = raw_baseline(db, tests, k);
    write_file_atomic(out, report_json(report));
    std::cout << format_report_table(report) << "wrote " << out << "\n";
    return kExitOk;
  }
};

// --- synth ---------------------------------------------------------------

struct SynthCmd {
  std::string out_dir;
  SynthConfig cfg;
  std::size_t train_packets = 12000;
  std::size_t test_packets = 24000;
  std::size_t sessions = 1;
  bool force = false;

  int run() {
    if (const char *env = std::getenv("BICSI_SEED"); env != nullptr && *env != '\0') {
      std::uint64_t seed = 0;
      const std::string_view s(env);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("BICSI_SEED must be an unsigned integer");
      }
      cfg.seed = seed;
    }
    cfg.packets_per_position = train_packets + test_packets;
    if (sessions < 1) throw ConfigError("--sessions must be at least 1");
    cfg.validate();

    const fs::path dir(out_dir);
    if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
      throw ConfigError("output directory " + dir.string() +
                        " is not empty; pass --force to overwrite");
    }
    fs::create_directories(dir);

    if (sessions == 1) {
      const SynthDataset ds = generate(cfg);
      write_dataset(ds, dir, train_packets);
      report(ds, dir);
    } else {
      for (std::size_t s = 0; s < sessions; ++s) {
        const SynthDataset ds = generate_session(cfg, s);
        const fs::path sub = dir / ("session_" + std::to_string(s + 1));
        write_dataset(ds, sub, train_packets);
        report(ds, sub);
      }
    }
    write_file_atomic(dir / "synth_config.json", config_json(cfg, sessions, train_packets));
    return kExitOk;
  }

  void report(const SynthDataset &ds, const fs::path &where) const {
    std::cout << where.string() << ": " << ds.traces.size() << " positions x "
              << cfg.packets_per_position << " packets x " << cfg.subcarriers
              << " subcarriers, flip rate " << std::fixed << std::setprecision(4)
              << code_flip_rate(ds) << ", overflow " << overflow_fraction(ds) << "\n";
  }
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"bicsi: binary CSI fingerprinting and position matching"};
  app.require_subcommand(1);
  std::function<int()> action;

  TrainCmd train;
  auto *train_cmd = app.add_subcommand("train", "Derive ancestor fingerprints into a db file");
  train_cmd->add_option("--manifest", train.manifest, "Positions manifest (label,x,y,file)")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Fingerprint db output path")->required();
  train_cmd->add_option("--threshold", train.threshold, "Tr as a fraction of training size")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train.trace.add_to(train_cmd, false);
  train_cmd->callback([&] { action = [&] { return train.run(); }; });

  MatchCmd match;
  auto *match_cmd = app.add_subcommand("match", "Match one trace window by window");
  match_cmd->add_option("--db", match.db_path)->required()->check(CLI::ExistingFile);
  match_cmd->add_option("--trace", match.trace_path)->required()->check(CLI::ExistingFile);
  match_cmd->add_option("--metric", match.metric)->capture_default_str();
  match_cmd->add_option("--out", match.out, "Match results JSON")->required();
  match.trace.add_to(match_cmd, true);
  match_cmd->callback([&] { action = [&] { return match.run(); }; });

  EvalCmd eval;
  auto *eval_cmd = app.add_subcommand("eval", "Evaluate MAE and accuracy on labeled traces");
  eval_cmd->add_option("--db", eval.db_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--manifest", eval.manifest, "Labeled test manifest")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--metric", eval.metric)->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Report JSON")->required();
  eval.trace.add_to(eval_cmd, true);
  eval_cmd->callback([&] { action = [&] { return eval.run(); }; });

  SweepCmd sweep;
  auto *sweep_cmd = app.add_subcommand("sweep", "Mean inter-position distance versus threshold");
  sweep_cmd->add_option("--manifest", sweep.manifest, "Training manifest")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--fractions", sweep.fractions, "start:stop:step or a,b,c")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Sweep CSV")->required();
  sweep.trace.add_to(sweep_cmd, false);
  sweep_cmd->callback([&] { action = [&] { return sweep.run(); }; });

  CompareCmd compare;
  auto *compare_cmd = app.add_subcommand("compare-metrics", "Evaluate under several metrics");
  compare_cmd->add_option("--db", compare.db_path)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--manifest", compare.manifest)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--metrics", compare.metrics, "Comma-separated metric names")
      ->capture_default_str();
  compare_cmd->add_option("--out", compare.out, "Comparison JSON")->required();
  compare.trace.add_to(compare_cmd, true);
  compare_cmd->callback([&] { action = [&] { return compare.run(); }; });

  TemporalCmd temporal;
  auto *temporal_cmd =
      app.add_subcommand("temporal", "Accuracy versus number of ancestor sets over sessions");
  temporal_cmd->add_option("--sessions-root", temporal.root,
                           "Directory holding session_<n>/{train,test}.csv")
      ->required()
      ->check(CLI::ExistingDirectory);
  temporal_cmd->add_option("--threshold", temporal.threshold)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  temporal_cmd->add_option("--metric", temporal.metric)->capture_default_str();
  temporal_cmd->add_option("--out", temporal.out, "Temporal CSV")->required();
  temporal.trace.add_to(temporal_cmd, true);
  temporal_cmd->callback([&] { action = [&] { return temporal.run(); }; });

  BaselineCmd baseline;
  auto *baseline_cmd =
      app.add_subcommand("baseline", "Raw-amplitude centroid matching (cosine or pearson)");
  baseline_cmd->add_option("--train", baseline.train_manifest)
      ->required()
      ->check(CLI::ExistingFile);
  baseline_cmd->add_option("--test", baseline.test_manifest)->required()->check(CLI::ExistingFile);
  baseline_cmd->add_option("--kind", baseline.kind)->capture_default_str();
  baseline_cmd->add_option("--out", baseline.out, "Report JSON")->required();
  baseline.trace.add_to(baseline_cmd, true);
  baseline_cmd->callback([&] { action = [&] { return baseline.run(); }; });

  SynthCmd synth;
  auto *synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic CSI dataset");
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();
  synth_cmd->add_option("--positions", synth.cfg.positions)->capture_default_str();
  synth_cmd->add_option("--subcarriers", synth.cfg.subcarriers)->capture_default_str();
  synth_cmd->add_option("--train-packets", synth.train_packets)->capture_default_str();
  synth_cmd->add_option("--test-packets", synth.test_packets)->capture_default_str();
  synth_cmd->add_option("--lo", synth.cfg.amplitude_lo, "Lowest profile amplitude")
      ->capture_default_str();
  synth_cmd->add_option("--hi", synth.cfg.amplitude_hi, "Highest profile amplitude")
      ->capture_default_str();
  synth_cmd->add_option("--separation", synth.cfg.profile_separation)->capture_default_str();
  synth_cmd->add_option("--noise", synth.cfg.noise_sigma, "Gaussian noise sigma")
      ->capture_default_str();
  synth_cmd->add_option("--burst-rate", synth.cfg.burst_rate)->capture_default_str();
  synth_cmd->add_option("--burst-magnitude", synth.cfg.burst_magnitude)->capture_default_str();
  synth_cmd->add_option("--drift", synth.cfg.drift_sigma, "Per-session drift sigma")
      ->capture_default_str();
  synth_cmd->add_option("--sessions", synth.sessions)->capture_default_str();
  synth_cmd->add_option("--seed", synth.cfg.seed, "Overridden by BICSI_SEED when set")
      ->capture_default_str();
  synth_cmd->add_flag("--force", synth.force, "Write into a non-empty directory");
  synth_cmd->callback([&] { action = [&] { return synth.run(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
