#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "safeml/classifiers.hpp"
#include "safeml/datasets.hpp"
#include "safeml/monitor.hpp"
#include "safeml/stats.hpp"

namespace safeml {

// Evaluation protocol: cross-validated benchmark tables, repeated hold-out
// studies, correlation analysis and windowed traces. Every experiment is a
// pure function of its inputs and master seed; per-fold and per-iteration
// randomness comes from derive_seed(seed, index).

inline constexpr std::size_t kDefaultBenchmarkSize = 2000;

inline constexpr std::array<Algorithm, 5> kAllAlgorithms = {Algorithm::LDA, Algorithm::GNB, Algorithm::KNN,
                                                            Algorithm::CART, Algorithm::RF};

struct CvScheme {
  enum class Kind { KFold, Holdout };
  Kind kind = Kind::KFold;
  std::size_t k = 10;
  double ratio = 0.8;

  /// "kfold:<k>" or "holdout:<ratio>". Throws InvalidArgument.
  static CvScheme parse(std::string_view text);
  std::string to_string() const;
};

/// Outcome of one train/test evaluation. distance and estimated come from
/// treating the test split as an unlabelled field buffer.
struct BenchmarkRecord {
  Algorithm classifier = Algorithm::LDA;
  std::size_t index = 0;  // fold or iteration
  std::uint64_t seed = 0;
  MeasureArray distance{};
  MeasureArray estimated{};
  double true_accuracy = 0.0;
  double kappa = 0.0;
  std::optional<double> bhattacharyya;
  bool shifted = false;
};

/// Fits the scaler and model on train, scores the raw test split, and runs
/// evaluate_buffer on the scaled test split as a single buffer.
BenchmarkRecord evaluate_split(const LabeledDataset& train, const LabeledDataset& test, Algorithm classifier,
                               const Hyperparameters& hyper, const KappaOverrides& kappa = {});

struct BenchmarkConfig {
  std::vector<Algorithm> classifiers{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  CvScheme cv;
  Hyperparameters hyper;
  KappaOverrides kappa;
  std::uint64_t seed = 0;
};

struct ClassifierSummary {
  Algorithm classifier = Algorithm::LDA;
  std::size_t runs = 0;
  double min_true_accuracy = 0.0;      // MTA
  double average_true_accuracy = 0.0;  // ATA
  double max_true_accuracy = 0.0;
  double mean_kappa = 0.0;
  MeasureArray mean_estimated{};
  std::optional<double> mean_bhattacharyya;
};

struct BenchmarkResult {
  std::vector<BenchmarkRecord> records;    // classifier-major, then fold
  std::vector<ClassifierSummary> summary;  // one per classifier, config order
};

BenchmarkResult run_benchmark(const LabeledDataset& data, const BenchmarkConfig& config);

/// Per-classifier summary of the given records, in order of first appearance.
std::vector<ClassifierSummary> summarize_records(std::span<const BenchmarkRecord> records);

struct DifferenceRow {
  Algorithm classifier = Algorithm::LDA;
  MeasureArray difference{};  // |mean estimate - MTA|
  std::optional<double> bhattacharyya;
};

std::vector<DifferenceRow> difference_table(std::span<const BenchmarkRecord> records);

/// Modifies a raw test split in place; returns whether the iteration counts
/// as shifted.
using FieldShift = std::function<bool(LabeledDataset& test, std::size_t iteration)>;

/// Adds delta to every feature value.
void shift_features(LabeledDataset& data, double delta);

struct HoldoutConfig {
  Algorithm classifier = Algorithm::KNN;
  std::size_t iterations = 100;
  double ratio = 0.7;
  Hyperparameters hyper;
  KappaOverrides kappa;
  std::uint64_t seed = 0;
  FieldShift shift;
};

struct HoldoutStudy {
  std::vector<BenchmarkRecord> records;
  std::array<FiveNumberSummary, kMeasureCount> distance_quartiles{};
};

HoldoutStudy iterate_holdout(const LabeledDataset& data, const HoldoutConfig& config);

struct TraceRecord {
  std::size_t window = 0;
  std::size_t start = 0;  // stream index of the window's first sample
  std::optional<ClassId> dominant_label;
  MeasureArray distance{};  // mean over features
};

/// Tumbling windows of `window` samples compared against a reference set.
/// Without an explicit reference the first window is the reference and is
/// not reported. All windows are min-max scaled with the reference's range.
/// Throws StreamTooShort when the stream holds fewer than 2 * window samples.
std::vector<TraceRecord> sliding_window_trace(std::span<const StreamRecord> stream, std::size_t window,
                                              const std::optional<Eigen::MatrixXd>& reference = std::nullopt);

struct CorrelationReport {
  std::string target;  // "true_accuracy" or "class_label"
  std::array<CorrelationResult, kMeasureCount> versus_target{};
  std::array<std::array<double, kMeasureCount>, kMeasureCount> between_measures{};
  /// Set when class ids were treated as ordinal numbers.
  bool ordinal_caveat = false;
};

/// distances[i] is paired with target[i]. Throws DegenerateInput for fewer
/// than three points or constant series.
CorrelationReport correlation_report(std::span<const MeasureArray> distances, std::span<const double> target,
                                     std::string target_name, bool ordinal_caveat);
CorrelationReport correlation_report(std::span<const BenchmarkRecord> records);
/// Windows without a dominant label are skipped.
CorrelationReport correlation_report(std::span<const TraceRecord> trace);

struct DriftPoint {
  double delta = 0.0;  // shift in multiples of the training standard deviation
  std::size_t repeat = 0;
  BenchmarkRecord record;
};

/// Hold-out runs whose test split is shifted by delta * sigma per feature,
/// sigma being the training split's standard deviation. Data for repeat r is
/// produced by make_data(derive_seed(seed, r)).
std::vector<DriftPoint> drift_sweep(const std::function<LabeledDataset(std::uint64_t)>& make_data,
                                    std::span<const double> deltas, std::size_t repeats, Algorithm classifier,
                                    double ratio, const Hyperparameters& hyper, std::uint64_t seed);

// --- Reports ----------------------------------------------------------------
// Files are named <experiment>_<dataset>_<seed>.{csv,json}; see docs/formats.md.

std::string report_stem(std::string_view experiment, std::string_view dataset, std::uint64_t seed);

/// Writes bench_*.csv (summary table), diff_*.csv (difference table) and bench_*.json.
std::vector<std::filesystem::path> write_benchmark_reports(const std::filesystem::path& dir,
                                                           std::string_view dataset, std::uint64_t seed,
                                                           const BenchmarkResult& result,
                                                           const BenchmarkConfig& config);

/// Writes iterate_*.csv (quartiles), iterate-records_*.csv and iterate_*.json.
std::vector<std::filesystem::path> write_holdout_reports(const std::filesystem::path& dir, std::string_view dataset,
                                                         std::uint64_t seed, const HoldoutStudy& study,
                                                         const HoldoutConfig& config);

/// Writes trace_*.csv and trace_*.json.
std::vector<std::filesystem::path> write_trace_reports(const std::filesystem::path& dir, std::string_view dataset,
                                                       std::uint64_t seed, std::span<const TraceRecord> trace,
                                                       std::size_t window);

/// Writes correlate_*.csv and correlate_*.json.
std::vector<std::filesystem::path> write_correlation_reports(const std::filesystem::path& dir,
                                                             std::string_view dataset, std::uint64_t seed,
                                                             const CorrelationReport& report);

/// Reads an iterate-records or trace CSV back for correlation analysis.
CorrelationReport correlation_from_csv(const std::filesystem::path& path);

}  // namespace safeml
