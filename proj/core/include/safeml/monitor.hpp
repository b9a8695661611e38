#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "safeml/classifiers.hpp"
#include "safeml/datasets.hpp"
#include "safeml/distances.hpp"
#include "safeml/ecdf.hpp"
#include "safeml/stats.hpp"

namespace safeml {

/// One value per Measure, indexed by index_of(Measure).
using MeasureArray = std::array<double, kMeasureCount>;
using KappaOverrides = std::array<std::optional<double>, kMeasureCount>;

/// Distance-to-accuracy slopes: 1 for KSD, Kuiper and WD; 0.5 for ADD and WAD.
MeasureArray default_kappa() noexcept;

/// Frozen statistical fingerprint of the (scaled) training data.
struct TrainingProfile {
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<std::vector<Ecdf>> ecdfs;  // [class][feature]
  std::vector<GaussianSummary> summaries;
  std::vector<double> priors;
  ScalerParams scaler;
  TrainedModel model;
  MeasureArray kappa = default_kappa();
  /// Columns picked from the source file, recorded for reports.
  std::vector<std::string> source_columns;

  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::size_t dim() const noexcept { return feature_names.size(); }
  const Ecdf& ecdf(ClassId cls, std::size_t feature) const {
    return ecdfs[static_cast<std::size_t>(cls)][feature];
  }
};

/// train must already be scaled with `scaler`. Every class needs >= 2 samples.
TrainingProfile build_profile(const LabeledDataset& train, TrainedModel model, ScalerParams scaler,
                              const KappaOverrides& kappa_overrides = {});

struct MonitorConfig {
  std::size_t buffer_size = 500;
  double tau_high = 0.9;
  double tau_low = 0.7;
  Measure primary_measure = Measure::KSD;
  KappaOverrides kappa_overrides = {};

  /// Throws InvalidArgument unless 0 <= tau_low <= tau_high <= 1 and buffer_size >= 10.
  void validate() const;
};

enum class MonitorState { Buffering, Trusted, Intervene };

std::string_view to_string(MonitorState s) noexcept;

struct ClassDistances {
  ClassId cls = 0;
  std::size_t count = 0;                 // buffer samples predicted as cls
  std::vector<DistanceSet> per_feature;  // length d
  MeasureArray aggregate{};              // mean over features
  std::optional<double> bhattacharyya_p_correct;
};

struct DistanceReport {
  std::vector<ClassDistances> classes;  // predicted classes present, ascending id
  MeasureArray overall{};               // buffer-frequency weighted mean of aggregates
  std::vector<ClassId> absent_classes;  // trained classes never predicted in the buffer

  std::size_t entry_count() const noexcept;
};

struct BufferEvaluation {
  MeasureArray estimated_accuracy{};
  MeasureArray kappa{};
  std::optional<double> bhattacharyya_p_correct;
  DistanceReport report;
};

struct MonitorVerdict {
  MonitorState state = MonitorState::Buffering;
  std::size_t samples_seen = 0;
  std::size_t buffer_occupancy = 0;
  std::size_t buffer_target = 0;
  std::optional<BufferEvaluation> evaluation;  // absent while still filling

  double estimated_accuracy(Measure m) const { return evaluation->estimated_accuracy[index_of(m)]; }
};

/// Compares the buffer (already scaled, one row per sample) with the profile,
/// splitting it by the model's predicted class. State follows the primary
/// measure's estimated accuracy: >= tau_high Trusted, < tau_low Intervene,
/// otherwise Buffering (the caller keeps collecting).
MonitorVerdict evaluate_buffer(const TrainingProfile& profile, const MonitorConfig& config,
                               const Eigen::Ref<const Eigen::MatrixXd>& buffer,
                               std::span<const ClassId> predicted);

/// Runtime loop around evaluate_buffer with a tumbling buffer. Not thread-safe;
/// the profile it points to may be shared freely.
class Monitor {
 public:
  Monitor(std::shared_ptr<const TrainingProfile> profile, MonitorConfig config);

  /// Scales and classifies one raw sample, then appends it to the buffer.
  MonitorVerdict observe(std::span<const double> raw_sample);

  /// The current buffering state without adding a sample.
  MonitorVerdict snapshot() const;

  std::size_t occupancy() const noexcept { return predicted_.size(); }
  std::size_t samples_seen() const noexcept { return samples_seen_; }
  ClassId last_prediction() const noexcept { return last_prediction_; }
  const TrainingProfile& profile() const noexcept { return *profile_; }
  const MonitorConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const TrainingProfile> profile_;
  MonitorConfig config_;
  std::vector<double> buffer_;  // row-major, occupancy x d
  std::vector<ClassId> predicted_;
  std::size_t target_;
  std::size_t samples_seen_ = 0;
  ClassId last_prediction_ = 0;
};

}  // namespace safeml
