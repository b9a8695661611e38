#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "safeml/classifiers.hpp"
#include "safeml/datasets.hpp"
#include "safeml/error.hpp"
#include "safeml/harness.hpp"
#include "safeml/monitor.hpp"
#include "safeml/serialization.hpp"

namespace safeml::cli {
namespace {

namespace fs = std::filesystem;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// Column header padded to the width of fixed() values.
std::string right_aligned(std::string_view id, std::size_t width = 8) {
  return std::string(width - std::min(width - 1, id.size()), ' ') + std::string(id);
}

std::string fixed(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, what + " must be a non-negative integer, got '" + text + "'");
  }
  return value;
}

// --seed wins, then SAFEML_SEED, then 0.
std::uint64_t resolve_seed(const std::string& flag) {
  if (!flag.empty()) return parse_u64(flag, "--seed");
  if (const char* env = std::getenv("SAFEML_SEED"); env != nullptr && *env != '\0') {
    return parse_u64(env, "SAFEML_SEED");
  }
  return 0;
}

std::size_t positive_count(long long value, const std::string& what, long long minimum = 1) {
  if (value < minimum) {
    throw Error(ErrorCode::InvalidCount, what + " must be at least " + std::to_string(minimum) + ", got " +
                                             std::to_string(value));
  }
  return static_cast<std::size_t>(value);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else if (c != ' ') {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

Algorithm algorithm_from(const std::string& name) {
  const auto a = parse_algorithm(name);
  if (!a) throw Error(ErrorCode::UnknownAlgorithm, "unknown algorithm '" + name + "' (lda, gnb, knn, cart, rf)");
  return *a;
}

std::vector<Algorithm> algorithms_from(const std::string& list) {
  if (list == "all") return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<Algorithm> out;
  for (const auto& name : split_list(list)) out.push_back(algorithm_from(name));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no classifiers selected");
  return out;
}

Measure measure_from(const std::string& name) {
  const auto m = parse_measure(name);
  if (!m) throw Error(ErrorCode::InvalidArgument, "unknown measure '" + name + "' (KSD, Kuiper, ADD, WD, WAD)");
  return *m;
}

// Each entry is MEASURE=VALUE.
KappaOverrides kappa_from(const std::vector<std::string>& specs) {
  KappaOverrides out;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "--kappa expects MEASURE=VALUE, got '" + spec + "'");
    }
    const Measure m = measure_from(spec.substr(0, eq));
    const auto value = parse_finite_cell(spec.substr(eq + 1));
    if (!value || *value < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "kappa for " + spec.substr(0, eq) + " must be a finite value >= 0");
    }
    out[index_of(m)] = *value;
  }
  return out;
}

struct HyperFlags {
  int k = Hyperparameters{}.knn_k;
  int max_depth = Hyperparameters{}.cart_max_depth;
  int min_leaf = Hyperparameters{}.cart_min_leaf;
  int trees = Hyperparameters{}.rf_trees;

  void attach(CLI::App* app) {
    app->add_option("--k", k, "KNN neighbours")->capture_default_str();
    app->add_option("--max-depth", max_depth, "CART maximum depth")->capture_default_str();
    app->add_option("--min-leaf", min_leaf, "CART minimum samples per leaf")->capture_default_str();
    app->add_option("--trees", trees, "Random forest size")->capture_default_str();
  }

  Hyperparameters resolve(std::uint64_t seed) const {
    if (k < 1 || max_depth < 1 || min_leaf < 1 || trees < 1) {
      throw Error(ErrorCode::InvalidArgument, "--k, --max-depth, --min-leaf and --trees must be positive");
    }
    Hyperparameters h;
    h.knn_k = k;
    h.cart_max_depth = max_depth;
    h.cart_min_leaf = min_leaf;
    h.rf_trees = trees;
    h.seed = seed;
    return h;
  }
};

CsvLoadResult load_reporting(const fs::path& path, const CsvLoadOptions& options, std::ostream& err) {
  CsvLoadResult r = load_csv(path, options);
  err << path.string() << ": " << r.data.size() << " rows loaded, " << r.rows_dropped << " dropped, "
      << r.data.dim() << " features, " << r.data.num_classes() << " classes\n";
  if (!r.skipped_columns.empty()) {
    err << "  skipped non-numeric columns:";
    for (const auto& c : r.skipped_columns) err << ' ' << c;
    err << '\n';
  }
  return r;
}

// A generated benchmark or a labelled CSV file, shared by bench and iterate.
struct DataSource {
  std::string dataset = "xor";
  std::string data_path;
  std::string label = "label";
  std::string features;
  long long samples = static_cast<long long>(kDefaultBenchmarkSize);
  std::optional<double> noise;

  void attach(CLI::App* app) {
    app->add_option("--dataset", dataset, "Generated benchmark: xor, spiral or circle")->capture_default_str();
    app->add_option("--data", data_path, "Labelled CSV file instead of a generated benchmark");
    app->add_option("--label", label, "Label column of --data")->capture_default_str();
    app->add_option("--features", features, "Comma-separated feature columns of --data (default: all numeric)");
    app->add_option("--samples", samples, "Generated dataset size")->capture_default_str();
    app->add_option("--noise", noise, "Generator noise (default depends on the dataset)");
  }

  std::pair<LabeledDataset, std::string> load(std::uint64_t seed, std::ostream& err) const {
    if (!data_path.empty()) {
      CsvLoadOptions options;
      options.label_column = label;
      options.feature_columns = split_list(features);
      auto r = load_reporting(data_path, options, err);
      return {std::move(r.data), fs::path(data_path).stem().string()};
    }
    return {generate(dataset, positive_count(samples, "--samples"), noise, seed), dataset};
  }
};

void print_paths(std::ostream& err, const std::vector<fs::path>& paths) {
  for (const auto& p : paths) err << "wrote " << p.string() << '\n';
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + p.string() + "': " + ec.message());
  return p;
}

// --- generate -----------------------------------------------------------------

struct GenerateCmd {
  std::string dataset;
  long long n = 400;
  std::optional<double> noise;
  std::string seed;
  std::string out_path;

  void attach(CLI::App* app) {
    app->add_option("dataset", dataset, "xor, spiral or circle")->required();
    app->add_option("--n", n, "Number of samples")->capture_default_str();
    app->add_option("--noise", noise, "Noise level (default depends on the dataset)");
    app->add_option("--seed", seed, "Seed (falls back to SAFEML_SEED, then 0)");
    app->add_option("--out,-o", out_path, "Output CSV (default: stdout)");
  }

  int run(Streams& io) const {
    if (n < 0) throw Error(ErrorCode::InvalidCount, "--n must be non-negative");
    const auto data = generate(dataset, static_cast<std::size_t>(n), noise, resolve_seed(seed));
    if (out_path.empty()) {
      write_csv(io.out, data);
    } else {
      write_csv(fs::path(out_path), data);
      io.err << "wrote " << data.size() << " samples to " << out_path << '\n';
    }
    return kExitOk;
  }
};

// --- train --------------------------------------------------------------------

struct TrainCmd {
  std::string data_path;
  std::string label = "label";
  std::string features;
  std::string algorithm = "knn";
  HyperFlags hyper;
  std::vector<std::string> kappa;
  std::string seed;
  std::string out_path;

  void attach(CLI::App* app) {
    app->add_option("--data", data_path, "Labelled training CSV")->required();
    app->add_option("--label", label, "Label column")->capture_default_str();
    app->add_option("--features", features, "Comma-separated feature columns (default: all numeric)");
    app->add_option("--algorithm,-a", algorithm, "lda, gnb, knn, cart or rf")->capture_default_str();
    hyper.attach(app);
    app->add_option("--kappa", kappa, "Distance-to-accuracy slope override, MEASURE=VALUE (repeatable)");
    app->add_option("--seed", seed, "Seed for randomized classifiers (falls back to SAFEML_SEED, then 0)");
    app->add_option("--out,-o", out_path, "Profile JSON to write")->required();
  }

  int run(Streams& io) const {
    const Algorithm algo = algorithm_from(algorithm);
    const KappaOverrides overrides = kappa_from(kappa);
    const Hyperparameters h = hyper.resolve(resolve_seed(seed));
    CsvLoadOptions options;
    options.label_column = label;
    options.feature_columns = split_list(features);
    const CsvLoadResult loaded = load_reporting(data_path, options, io.err);

    ScalerParams scaler = fit_scaler(loaded.data);
    const LabeledDataset scaled = apply_scaler(scaler, loaded.data);
    TrainedModel model = fit(algo, h, scaled);
    const Kpis kpis = confusion_and_kpis(scaled.labels, model.predict(scaled.features), scaled.num_classes());
    TrainingProfile profile = build_profile(scaled, std::move(model), std::move(scaler), overrides);
    save_profile(out_path, profile);

    io.out << "algorithm " << to_string(algo) << ", " << profile.num_classes() << " classes, " << profile.dim()
           << " features, " << scaled.size() << " samples\n";
    io.out << "training accuracy " << fixed(kpis.accuracy) << ", kappa " << fixed(kpis.kappa) << '\n';
    io.err << "wrote profile " << out_path << '\n';
    return kExitOk;
  }
};

// --- monitor ------------------------------------------------------------------

struct MonitorCmd {
  std::string profile_path;
  std::string field = "-";
  long long buffer = static_cast<long long>(MonitorConfig{}.buffer_size);
  double tau_high = MonitorConfig{}.tau_high;
  double tau_low = MonitorConfig{}.tau_low;
  std::string measure = "KSD";
  std::vector<std::string> kappa;
  std::string predictions_path;

  void attach(CLI::App* app) {
    app->add_option("--profile,-p", profile_path, "Profile JSON written by train")->required();
    app->add_option("--field,-f", field, "Field CSV with the profile's feature columns, or - for stdin")
        ->capture_default_str();
    app->add_option("--buffer,-n", buffer, "Samples per evaluated buffer")->capture_default_str();
    app->add_option("--tau-high", tau_high, "Estimated accuracy at or above which the model is trusted")
        ->capture_default_str();
    app->add_option("--tau-low", tau_low, "Estimated accuracy below which the monitor asks for intervention")
        ->capture_default_str();
    app->add_option("--measure,-m", measure, "Measure driving the verdict: KSD, Kuiper, ADD, WD or WAD")
        ->capture_default_str();
    app->add_option("--kappa", kappa, "Distance-to-accuracy slope override, MEASURE=VALUE (repeatable)");
    app->add_option("--predictions", predictions_path,
                    "CSV of per-sample predictions with the trust state in force when each was made");
  }

  int run(Streams& io) const {
    MonitorConfig config;
    config.buffer_size = positive_count(buffer, "--buffer");
    config.tau_high = tau_high;
    config.tau_low = tau_low;
    config.primary_measure = measure_from(measure);
    config.kappa_overrides = kappa_from(kappa);
    auto profile = std::make_shared<const TrainingProfile>(load_profile(profile_path));
    Monitor monitor(profile, config);

    std::ifstream file;
    std::istream* in = &io.in;
    if (field != "-") {
      file.open(field, std::ios::binary);
      if (!file) throw Error(ErrorCode::Io, "cannot open '" + field + "'");
      in = &file;
    }
    const std::string source = field == "-" ? std::string("stdin") : field;

    std::string line;
    if (!std::getline(*in, line)) throw Error(ErrorCode::MalformedCsv, source + ": missing header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    std::vector<std::size_t> columns;
    for (const auto& name : profile->feature_names) {
      std::size_t col = header.size();
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) col = i;
      }
      if (col == header.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    source + ": field data lacks the profile's feature column '" + name + "'");
      }
      columns.push_back(col);
    }

    std::ofstream predictions;
    if (!predictions_path.empty()) {
      predictions.open(predictions_path, std::ios::binary);
      if (!predictions) throw Error(ErrorCode::Io, "cannot write '" + predictions_path + "'");
      predictions << "sample,prediction,trust\n";
    }
    // Predictions pass through immediately, flagged with the latest verdict.
    MonitorState trust = MonitorState::Buffering;

    MonitorState worst = MonitorState::Trusted;
    std::size_t verdicts = 0;
    std::size_t skipped = 0;
    std::size_t line_no = 1;
    std::vector<double> sample(columns.size());
    while (std::getline(*in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto cells = split_csv_line(line);
      if (cells.size() != header.size()) {
        throw Error(ErrorCode::MalformedCsv, source + ": line " + std::to_string(line_no) + ": expected " +
                                                 std::to_string(header.size()) + " fields, found " +
                                                 std::to_string(cells.size()));
      }
      bool usable = true;
      for (std::size_t j = 0; j < columns.size() && usable; ++j) {
        const auto v = parse_finite_cell(cells[columns[j]]);
        usable = v.has_value();
        if (usable) sample[j] = *v;
      }
      if (!usable) {
        ++skipped;
        continue;
      }
      const MonitorVerdict v = monitor.observe(sample);
      if (predictions.is_open()) {
        const auto label = static_cast<std::size_t>(monitor.last_prediction());
        predictions << v.samples_seen << ',' << profile->class_names[label] << ',' << to_string(trust) << '\n';
      }
      if (!v.evaluation) continue;
      trust = v.state;
      ++verdicts;
      io.out << verdict_to_json_line(v, *profile) << '\n';
      io.out.flush();
      io.err << "samples " << v.samples_seen << ": " << to_string(v.state) << " (estimated "
             << to_string(config.primary_measure) << " accuracy "
             << fixed(v.estimated_accuracy(config.primary_measure), 4) << ")\n";
      if (v.state == MonitorState::Intervene) worst = MonitorState::Intervene;
    }
    if (in->bad()) throw Error(ErrorCode::Io, source + ": read failed");
    if (predictions.is_open() && !predictions.flush()) {
      throw Error(ErrorCode::Io, "write to '" + predictions_path + "' failed");
    }

    if (skipped > 0) io.err << "skipped " << skipped << " rows with missing or non-finite feature values\n";
    if (monitor.occupancy() > 0 || monitor.samples_seen() == 0) {
      const MonitorVerdict pending = monitor.snapshot();
      io.out << verdict_to_json_line(pending, *profile) << '\n';
      io.err << "warning: field data ended with " << pending.buffer_occupancy << " of " << pending.buffer_target
             << " samples buffered; no verdict for them\n";
    }
    if (verdicts == 0) io.err << "warning: no buffer was evaluated\n";
    return worst == MonitorState::Intervene ? kExitIntervene : kExitOk;
  }
};

// --- bench --------------------------------------------------------------------

struct BenchCmd {
  DataSource source;
  std::string cv = "kfold:10";
  std::string classifiers = "all";
  HyperFlags hyper;
  std::vector<std::string> kappa;
  std::string seed;
  std::string out_dir = ".";

  void attach(CLI::App* app) {
    source.attach(app);
    app->add_option("--cv", cv, "kfold:<k> or holdout:<ratio>")->capture_default_str();
    app->add_option("--classifiers", classifiers, "Comma-separated list or 'all'")->capture_default_str();
    hyper.attach(app);
    app->add_option("--kappa", kappa, "Distance-to-accuracy slope override, MEASURE=VALUE (repeatable)");
    app->add_option("--seed", seed, "Seed for data, folds and models (falls back to SAFEML_SEED, then 0)");
    app->add_option("--out-dir", out_dir, "Directory for report files")->capture_default_str();
  }

  int run(Streams& io) const {
    const std::uint64_t s = resolve_seed(seed);
    BenchmarkConfig config;
    config.classifiers = algorithms_from(classifiers);
    config.cv = CvScheme::parse(cv);
    config.hyper = hyper.resolve(s);
    config.kappa = kappa_from(kappa);
    config.seed = s;
    const fs::path dir = ensure_dir(out_dir);
    const auto [data, name] = source.load(s, io.err);
    const BenchmarkResult result = run_benchmark(data, config);

    io.out << "classifier      MTA      ATA";
    for (Measure m : kAllMeasures) io.out << ' ' << right_aligned(to_string(m));
    io.out << "       BD\n";
    for (const auto& row : result.summary) {
      std::string id(to_string(row.classifier));
      io.out << id << std::string(10 - id.size(), ' ') << ' ' << fixed(row.min_true_accuracy) << ' '
             << fixed(row.average_true_accuracy);
      for (double v : row.mean_estimated) io.out << ' ' << fixed(v);
      io.out << ' ' << (row.mean_bhattacharyya ? fixed(*row.mean_bhattacharyya) : std::string("     n/a")) << '\n';
    }
    print_paths(io.err, write_benchmark_reports(dir, name, s, result, config));
    return kExitOk;
  }
};

// --- iterate ------------------------------------------------------------------

struct IterateCmd {
  DataSource source;
  long long iterations = 100;
  std::string classifier = "knn";
  double ratio = 0.7;
  std::optional<double> shift;
  HyperFlags hyper;
  std::vector<std::string> kappa;
  std::string seed;
  std::string out_dir = ".";

  void attach(CLI::App* app) {
    source.attach(app);
    app->add_option("--n", iterations, "Number of hold-out iterations")->capture_default_str();
    app->add_option("--classifier,-a", classifier, "lda, gnb, knn, cart or rf")->capture_default_str();
    app->add_option("--ratio", ratio, "Training fraction per iteration")->capture_default_str();
    app->add_option("--shift", shift, "Add this offset to every test feature in odd-numbered iterations");
    hyper.attach(app);
    app->add_option("--kappa", kappa, "Distance-to-accuracy slope override, MEASURE=VALUE (repeatable)");
    app->add_option("--seed", seed, "Master seed (falls back to SAFEML_SEED, then 0)");
    app->add_option("--out-dir", out_dir, "Directory for report files")->capture_default_str();
  }

  int run(Streams& io) const {
    const std::uint64_t s = resolve_seed(seed);
    HoldoutConfig config;
    config.classifier = algorithm_from(classifier);
    config.iterations = positive_count(iterations, "--n");
    config.ratio = ratio;
    config.hyper = hyper.resolve(s);
    config.kappa = kappa_from(kappa);
    config.seed = s;
    if (shift) {
      if (!std::isfinite(*shift)) throw Error(ErrorCode::InvalidArgument, "--shift must be finite");
      const double delta = *shift;
      config.shift = [delta](LabeledDataset& test, std::size_t i) {
        if (i % 2 == 0) return false;
        shift_features(test, delta);
        return true;
      };
    }
    const fs::path dir = ensure_dir(out_dir);
    const auto [data, name] = source.load(s, io.err);
    const HoldoutStudy study = iterate_holdout(data, config);

    io.out << "measure        min         q1     median         q3        max\n";
    for (Measure m : kAllMeasures) {
      const auto& q = study.distance_quartiles[index_of(m)];
      std::string id(to_string(m));
      io.out << id << std::string(7 - id.size(), ' ');
      for (double v : {q.min, q.q1, q.median, q.q3, q.max}) io.out << ' ' << fixed(v, 7);
      io.out << '\n';
    }
    print_paths(io.err, write_holdout_reports(dir, name, s, study, config));
    return kExitOk;
  }
};

// --- correlate ----------------------------------------------------------------

struct CorrelateCmd {
  std::string input;
  std::string dataset;
  std::string seed;
  std::string out_dir = ".";

  void attach(CLI::App* app) {
    app->add_option("--input,-i", input, "iterate-records or trace CSV")->required();
    app->add_option("--dataset", dataset, "Dataset name for report file names (default: from the input file name)");
    app->add_option("--seed", seed,
                    "Seed for report file names (default: from the input file name, then SAFEML_SEED, then 0)");
    app->add_option("--out-dir", out_dir, "Directory for report files")->capture_default_str();
  }

  int run(Streams& io) const {
    const std::uint64_t s = resolve_seed(seed);
    const fs::path dir = ensure_dir(out_dir);
    const CorrelationReport report = correlation_from_csv(input);
    io.out << "measure  r vs " << report.target << "   p-value      n\n";
    for (Measure m : kAllMeasures) {
      const auto& c = report.versus_target[index_of(m)];
      std::string id(to_string(m));
      io.out << id << std::string(7 - id.size(), ' ') << "  " << fixed(c.r, 4) << "  " << fixed(c.p_value, 6) << "  "
             << c.n << '\n';
    }
    if (report.ordinal_caveat) {
      io.err << "note: class ids were treated as ordinal numbers; r depends on the label encoding\n";
    }
    std::string name = dataset.empty() ? fs::path(input).stem().string() : dataset;
    std::uint64_t report_seed = s;
    // <experiment>_<dataset>_<seed> inputs keep their dataset name and seed.
    const std::string stem = fs::path(input).stem().string();
    const auto first = stem.find('_');
    const auto last = stem.rfind('_');
    if (first != std::string::npos && last > first + 1 && last + 1 < stem.size()) {
      const std::string tail = stem.substr(last + 1);
      std::uint64_t parsed = 0;
      const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), parsed);
      if (ec == std::errc() && ptr == tail.data() + tail.size()) {
        if (dataset.empty()) name = stem.substr(first + 1, last - first - 1);
        const char* env = std::getenv("SAFEML_SEED");
        if (seed.empty() && (env == nullptr || *env == '\0')) report_seed = parsed;
      }
    }
    print_paths(io.err, write_correlation_reports(dir, name, report_seed, report));
    return kExitOk;
  }
};

// --- trace --------------------------------------------------------------------

struct TraceCmd {
  std::string data_path;
  std::string label = "label";
  std::string features;
  std::string reference_path;
  long long window = 1500;
  long long samples = 20000;
  long long switch_at = 10000;
  long long dim = 4;
  double shift = 2.0;
  std::string seed;
  std::string out_dir = ".";

  void attach(CLI::App* app) {
    app->add_option("--data", data_path, "Stream CSV in arrival order (default: synthetic two-regime stream)");
    app->add_option("--label", label, "Label column of --data and --reference")->capture_default_str();
    app->add_option("--features", features, "Comma-separated feature columns (default: all numeric)");
    app->add_option("--reference", reference_path, "Reference CSV (default: the stream's first window)");
    app->add_option("--window,-w", window, "Window size in samples")->capture_default_str();
    app->add_option("--samples", samples, "Synthetic stream length")->capture_default_str();
    app->add_option("--switch-at", switch_at, "Synthetic regime switch index")->capture_default_str();
    app->add_option("--dim", dim, "Synthetic stream dimension")->capture_default_str();
    app->add_option("--shift", shift, "Synthetic mean shift after the switch")->capture_default_str();
    app->add_option("--seed", seed, "Seed for the synthetic stream (falls back to SAFEML_SEED, then 0)");
    app->add_option("--out-dir", out_dir, "Directory for report files")->capture_default_str();
  }

  int run(Streams& io) const {
    const std::uint64_t s = resolve_seed(seed);
    const std::size_t w = positive_count(window, "--window");
    CsvLoadOptions options;
    options.label_column = label;
    options.feature_columns = split_list(features);

    std::vector<StreamRecord> stream;
    std::string name = "regime";
    if (!data_path.empty()) {
      stream = to_stream(load_reporting(data_path, options, io.err).data);
      name = fs::path(data_path).stem().string();
    } else {
      if (switch_at < 0) throw Error(ErrorCode::InvalidCount, "--switch-at must be non-negative");
      stream = gen_regime_stream(positive_count(samples, "--samples"), positive_count(dim, "--dim"),
                                 static_cast<std::size_t>(switch_at), shift, s);
    }
    std::optional<Eigen::MatrixXd> reference;
    if (!reference_path.empty()) {
      CsvLoadOptions ref_options = options;
      if (ref_options.feature_columns.empty() && !data_path.empty()) {
        ref_options.feature_columns = load_csv(data_path, options).data.feature_names;
      }
      reference = load_reporting(reference_path, ref_options, io.err).data.features;
    }
    const fs::path dir = ensure_dir(out_dir);
    const auto trace = sliding_window_trace(stream, w, reference);

    io.out << "window    start  label";
    for (Measure m : kAllMeasures) io.out << ' ' << right_aligned(to_string(m));
    io.out << '\n';
    for (const auto& t : trace) {
      char head[64];
      std::snprintf(head, sizeof head, "%6zu %8zu %6s", t.window, t.start,
                    t.dominant_label ? std::to_string(*t.dominant_label).c_str() : "-");
      io.out << head;
      for (double v : t.distance) io.out << ' ' << fixed(v);
      io.out << '\n';
    }
    print_paths(io.err, write_trace_reports(dir, name, s, trace, w));
    return kExitOk;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical distance monitoring for deployed classifiers"};
  app.name("safeml");
  app.require_subcommand(1);

  GenerateCmd generate_cmd;
  TrainCmd train_cmd;
  MonitorCmd monitor_cmd;
  BenchCmd bench_cmd;
  IterateCmd iterate_cmd;
  CorrelateCmd correlate_cmd;
  TraceCmd trace_cmd;

  auto* generate_app = app.add_subcommand("generate", "Write a synthetic benchmark dataset as CSV");
  generate_cmd.attach(generate_app);
  auto* train_app = app.add_subcommand("train", "Fit a classifier and freeze its training profile");
  train_cmd.attach(train_app);
  auto* monitor_app = app.add_subcommand("monitor", "Stream field samples through a profile and emit verdicts");
  monitor_cmd.attach(monitor_app);
  auto* bench_app = app.add_subcommand("bench", "Cross-validated estimated vs true accuracy table");
  bench_cmd.attach(bench_app);
  auto* iterate_app = app.add_subcommand("iterate", "Repeated random hold-out study with box-plot summaries");
  iterate_cmd.attach(iterate_app);
  auto* correlate_app = app.add_subcommand("correlate", "Pearson correlation of distances from a report CSV");
  correlate_cmd.attach(correlate_app);
  auto* trace_app = app.add_subcommand("trace", "Windowed distances of a stream against a reference");
  trace_cmd.attach(trace_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  Streams io{in, out, err};
  try {
    if (generate_app->parsed()) return generate_cmd.run(io);
    if (train_app->parsed()) return train_cmd.run(io);
    if (monitor_app->parsed()) return monitor_cmd.run(io);
    if (bench_app->parsed()) return bench_cmd.run(io);
    if (iterate_app->parsed()) return iterate_cmd.run(io);
    if (correlate_app->parsed()) return correlate_cmd.run(io);
    if (trace_app->parsed()) return trace_cmd.run(io);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitInputError : kExitInternalError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace safeml::cli
