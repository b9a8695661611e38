#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "safeml/labeled_dataset.hpp"

namespace safeml {

// --- Synthetic benchmarks -----------------------------------------------------

inline constexpr double kDefaultXorNoise = 0.02;
inline constexpr double kDefaultSpiralNoise = 0.05;
inline constexpr double kDefaultCircleNoise = 0.05;

/// Quadrant XOR rule: class 1 iff the coordinates have strictly opposite signs.
ClassId xor_label(double x1, double x2) noexcept;

/// Points uniform on [-1, 1]^2, labelled by xor_label, then jittered by N(0, noise^2).
LabeledDataset gen_xor(std::size_t n, double noise, std::uint64_t seed);

/// Two Archimedean arms r = t / (2 pi), t uniform on [0, 3 pi], the second arm
/// rotated by pi. Classes alternate row by row.
LabeledDataset gen_spiral(std::size_t n, double noise, std::uint64_t seed);

/// Class 0 uniform in the disc r <= 0.5, class 1 uniform in the annulus
/// 0.7 <= r <= 1; the radius is jittered by N(0, noise^2). Classes alternate.
LabeledDataset gen_circle(std::size_t n, double noise, std::uint64_t seed);

/// Benchmark generator by name ("xor", "spiral", "circle"); nullopt noise picks the default.
LabeledDataset generate(const std::string& name, std::size_t n, std::optional<double> noise,
                        std::uint64_t seed);

// --- CSV ----------------------------------------------------------------------

struct CsvLoadOptions {
  std::string label_column = "Label";
  /// Explicit feature columns; when empty every column whose cells are all
  /// numeric (or NaN/Infinity/blank) is used.
  std::vector<std::string> feature_columns;
};

struct CsvLoadResult {
  LabeledDataset data;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  /// Auto-detected columns that were skipped because they hold text.
  std::vector<std::string> skipped_columns;
};

/// Parses comma-separated flow records with a mandatory header row.
///
/// Surrounding whitespace is trimmed from every cell. Rows with a NaN,
/// Infinity, blank or otherwise non-numeric feature cell are dropped and
/// counted. Text labels map to ids in order of first appearance; when every
/// label is an integer literal the ids follow ascending numeric order instead.
CsvLoadResult load_csv(std::istream& in, const CsvLoadOptions& options);
CsvLoadResult load_csv(const std::filesystem::path& path, const CsvLoadOptions& options);

/// Writes feature columns plus a trailing label column holding class names.
/// Values use 17 significant digits, so load_csv reproduces them bit for bit.
void write_csv(std::ostream& out, const LabeledDataset& data, const std::string& label_column = "label");
void write_csv(const std::filesystem::path& path, const LabeledDataset& data,
               const std::string& label_column = "label");

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

/// The cell's value when it is a finite number, using the same rules as load_csv.
std::optional<double> parse_finite_cell(const std::string& cell);

// --- Scaling ------------------------------------------------------------------

inline constexpr double kFieldClampLow = -0.5;
inline constexpr double kFieldClampHigh = 1.5;

struct ScalerParams {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(min.size()); }
};

ScalerParams fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& train);
inline ScalerParams fit_scaler(const LabeledDataset& train) { return fit_scaler(train.features); }

/// Min-max scaling to the training range, clamped to [-0.5, 1.5]; constant
/// training features map to 0.5.
Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::Ref<const Eigen::MatrixXd>& rows);
LabeledDataset apply_scaler(const ScalerParams& params, const LabeledDataset& data);
void apply_scaler_inplace(const ScalerParams& params, std::span<double> sample);

// --- Splitting ----------------------------------------------------------------

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, first round(ratio * n) indices train.
Split split_holdout(std::size_t n, double ratio, std::uint64_t seed);

/// k contiguous folds of a seeded shuffle; fold sizes differ by at most one.
std::vector<Split> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

std::pair<LabeledDataset, LabeledDataset> split_holdout(const LabeledDataset& data, double ratio,
                                                        std::uint64_t seed);

// --- Streams --------------------------------------------------------------------

struct StreamRecord {
  std::size_t index = 0;
  std::vector<double> features;
  std::optional<ClassId> true_label;
};

/// Rows of a dataset in order, as a labelled stream.
std::vector<StreamRecord> to_stream(const LabeledDataset& data);

/// Two-regime Gaussian stream: samples before switch_at come from N(0, I),
/// the rest from N(shift, I). Labels record the regime.
std::vector<StreamRecord> gen_regime_stream(std::size_t n, std::size_t dim, std::size_t switch_at,
                                            double shift, std::uint64_t seed);

}  // namespace safeml
