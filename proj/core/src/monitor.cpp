#include "safeml/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "safeml/error.hpp"
#include "safeml/error_bound.hpp"

namespace safeml {

MeasureArray default_kappa() noexcept { return {1.0, 1.0, 0.5, 1.0, 0.5}; }

std::string_view to_string(MonitorState s) noexcept {
  switch (s) {
    case MonitorState::Buffering: return "Buffering";
    case MonitorState::Trusted: return "Trusted";
    case MonitorState::Intervene: return "Intervene";
  }
  return "?";
}

std::size_t DistanceReport::entry_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.per_feature.size() * kMeasureCount;
  return n;
}

namespace {

MeasureArray resolve_kappa(const MeasureArray& base, const KappaOverrides& overrides) {
  MeasureArray out = base;
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    if (overrides[i]) {
      if (!(*overrides[i] >= 0.0) || !std::isfinite(*overrides[i])) {
        throw Error(ErrorCode::InvalidArgument, "kappa must be a finite value >= 0");
      }
      out[i] = *overrides[i];
    }
  }
  return out;
}

std::vector<double> column_values(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const std::vector<Eigen::Index>& members, Eigen::Index col) {
  std::vector<double> out;
  out.reserve(members.size());
  for (Eigen::Index r : members) out.push_back(rows(r, col));
  return out;
}

Eigen::MatrixXd gather_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                            const std::vector<Eigen::Index>& members) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(members.size()), rows.cols());
  for (std::size_t i = 0; i < members.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows.row(members[i]);
  return out;
}

}  // namespace

TrainingProfile build_profile(const LabeledDataset& train, TrainedModel model, ScalerParams scaler,
                              const KappaOverrides& kappa_overrides) {
  train.validate();
  if (scaler.dim() != train.dim() || model.dim() != train.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "scaler, model and training data disagree on dimension");
  }
  const auto counts = train.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 2) {
      throw Error(ErrorCode::InsufficientClassSamples,
                  "class '" + train.class_names[k] + "' has fewer than two training samples");
    }
  }

  std::vector<std::vector<Eigen::Index>> members(train.num_classes());
  for (std::size_t i = 0; i < train.size(); ++i) {
    members[static_cast<std::size_t>(train.labels[i])].push_back(static_cast<Eigen::Index>(i));
  }

  TrainingProfile p{.feature_names = train.feature_names,
                    .class_names = train.class_names,
                    .ecdfs = {},
                    .summaries = {},
                    .priors = {},
                    .scaler = std::move(scaler),
                    .model = std::move(model),
                    .kappa = resolve_kappa(default_kappa(), kappa_overrides),
                    .source_columns = train.feature_names};
  for (std::size_t k = 0; k < train.num_classes(); ++k) {
    std::vector<Ecdf> per_feature;
    per_feature.reserve(train.dim());
    for (std::size_t f = 0; f < train.dim(); ++f) {
      per_feature.emplace_back(column_values(train.features, members[k], static_cast<Eigen::Index>(f)));
    }
    p.ecdfs.push_back(std::move(per_feature));
    p.summaries.push_back(summarize(gather_rows(train.features, members[k])));
    p.priors.push_back(static_cast<double>(counts[k]) / static_cast<double>(train.size()));
  }
  return p;
}

void MonitorConfig::validate() const {
  if (!(tau_low >= 0.0 && tau_low <= tau_high && tau_high <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "thresholds must satisfy 0 <= tau_low <= tau_high <= 1");
  }
  if (buffer_size < 10) {
    throw Error(ErrorCode::InvalidArgument, "buffer size must be at least 10");
  }
}

MonitorVerdict evaluate_buffer(const TrainingProfile& profile, const MonitorConfig& config,
                               const Eigen::Ref<const Eigen::MatrixXd>& buffer,
                               std::span<const ClassId> predicted) {
  config.validate();
  if (static_cast<std::size_t>(buffer.cols()) != profile.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "buffer dimension differs from the profile");
  }
  if (static_cast<std::size_t>(buffer.rows()) != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "buffer rows and predicted labels differ in count");
  }
  if (predicted.size() < config.buffer_size) {
    throw Error(ErrorCode::InvalidArgument, "buffer holds fewer samples than the configured size");
  }

  const std::size_t k = profile.num_classes();
  std::vector<std::vector<Eigen::Index>> members(k);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || static_cast<std::size_t>(predicted[i]) >= k) {
      throw Error(ErrorCode::InvalidArgument, "predicted label outside the profile's classes");
    }
    members[static_cast<std::size_t>(predicted[i])].push_back(static_cast<Eigen::Index>(i));
  }

  BufferEvaluation eval;
  eval.kappa = resolve_kappa(profile.kappa, config.kappa_overrides);
  auto& report = eval.report;
  const double total = static_cast<double>(predicted.size());
  double bd_sum = 0.0;
  double bd_weight = 0.0;

  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].empty()) {
      report.absent_classes.push_back(static_cast<ClassId>(c));
      continue;
    }
    ClassDistances entry;
    entry.cls = static_cast<ClassId>(c);
    entry.count = members[c].size();
    entry.aggregate.fill(0.0);
    for (std::size_t f = 0; f < profile.dim(); ++f) {
      const Ecdf field(column_values(buffer, members[c], static_cast<Eigen::Index>(f)));
      const DistanceSet d = all_distances(profile.ecdf(entry.cls, f), field);
      for (std::size_t m = 0; m < kMeasureCount; ++m) entry.aggregate[m] += d[m].value;
      entry.per_feature.push_back(d);
    }
    for (double& v : entry.aggregate) v /= static_cast<double>(profile.dim());

    const double weight = static_cast<double>(entry.count) / total;
    for (std::size_t m = 0; m < kMeasureCount; ++m) report.overall[m] += weight * entry.aggregate[m];

    if (entry.count >= 2) {
      // Training class vs. the same predicted class in the field, equal priors.
      BoundInput in{0.5, 0.5, profile.summaries[c], summarize(gather_rows(buffer, members[c])), 0.5};
      entry.bhattacharyya_p_correct = bhattacharyya(std::move(in)).p_correct;
      bd_sum += static_cast<double>(entry.count) * *entry.bhattacharyya_p_correct;
      bd_weight += static_cast<double>(entry.count);
    }
    report.classes.push_back(std::move(entry));
  }
  if (bd_weight > 0.0) eval.bhattacharyya_p_correct = bd_sum / bd_weight;

  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    eval.estimated_accuracy[m] = std::clamp(1.0 - eval.kappa[m] * report.overall[m], 0.0, 1.0);
  }

  MonitorVerdict verdict;
  const double primary = eval.estimated_accuracy[index_of(config.primary_measure)];
  if (primary >= config.tau_high) {
    verdict.state = MonitorState::Trusted;
  } else if (primary < config.tau_low) {
    verdict.state = MonitorState::Intervene;
  } else {
    verdict.state = MonitorState::Buffering;
  }
  verdict.samples_seen = predicted.size();
  verdict.buffer_occupancy = predicted.size();
  verdict.buffer_target = config.buffer_size;
  verdict.evaluation = std::move(eval);
  return verdict;
}

Monitor::Monitor(std::shared_ptr<const TrainingProfile> profile, MonitorConfig config)
    : profile_(std::move(profile)), config_(std::move(config)), target_(config_.buffer_size) {
  if (!profile_) {
    throw Error(ErrorCode::InvalidArgument, "monitor needs a training profile");
  }
  config_.validate();
}

MonitorVerdict Monitor::snapshot() const {
  MonitorVerdict v;
  v.state = MonitorState::Buffering;
  v.samples_seen = samples_seen_;
  v.buffer_occupancy = occupancy();
  v.buffer_target = target_;
  return v;
}

MonitorVerdict Monitor::observe(std::span<const double> raw_sample) {
  const std::size_t d = profile_->dim();
  if (raw_sample.size() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "sample has " + std::to_string(raw_sample.size()) + " features, profile expects " +
                    std::to_string(d));
  }
  for (double v : raw_sample) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "field sample is not finite");
  }
  std::vector<double> scaled(raw_sample.begin(), raw_sample.end());
  apply_scaler_inplace(profile_->scaler, scaled);
  last_prediction_ = profile_->model.predict_one(scaled);
  buffer_.insert(buffer_.end(), scaled.begin(), scaled.end());
  predicted_.push_back(last_prediction_);
  ++samples_seen_;

  if (occupancy() < target_) return snapshot();

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> rows(buffer_.data(), static_cast<Eigen::Index>(occupancy()),
                                        static_cast<Eigen::Index>(d));
  MonitorConfig cfg = config_;
  cfg.buffer_size = target_;
  MonitorVerdict verdict = evaluate_buffer(*profile_, cfg, rows, predicted_);
  verdict.samples_seen = samples_seen_;
  if (verdict.state == MonitorState::Buffering) {
    // Inconclusive: keep the samples and wait for another N.
    target_ += config_.buffer_size;
    verdict.buffer_target = target_;
  } else {
    buffer_.clear();
    predicted_.clear();
    target_ = config_.buffer_size;
  }
  return verdict;
}

}  // namespace safeml
