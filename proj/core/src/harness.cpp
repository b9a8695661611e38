#include "safeml/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <string>

#include "safeml/error.hpp"
#include "safeml/random.hpp"

namespace safeml {

CvScheme CvScheme::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? std::string{} : std::string(text.substr(colon + 1));
  CvScheme cv;
  try {
    std::size_t used = 0;
    if (kind == "kfold") {
      cv.kind = Kind::KFold;
      if (!arg.empty()) {
        const long k = std::stol(arg, &used);
        if (used != arg.size() || k < 2) throw std::invalid_argument("k");
        cv.k = static_cast<std::size_t>(k);
      }
      return cv;
    }
    if (kind == "holdout") {
      cv.kind = Kind::Holdout;
      if (!arg.empty()) {
        cv.ratio = std::stod(arg, &used);
        if (used != arg.size() || !(cv.ratio > 0.0 && cv.ratio < 1.0)) throw std::invalid_argument("ratio");
      }
      return cv;
    }
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::InvalidArgument,
              "cross-validation scheme must be kfold:<k >= 2> or holdout:<ratio in (0,1)>, got '" +
                  std::string(text) + "'");
}

std::string CvScheme::to_string() const {
  if (kind == Kind::KFold) return "kfold:" + std::to_string(k);
  char buf[32];
  std::snprintf(buf, sizeof buf, "holdout:%g", ratio);
  return buf;
}

BenchmarkRecord evaluate_split(const LabeledDataset& train, const LabeledDataset& test, Algorithm classifier,
                               const Hyperparameters& hyper, const KappaOverrides& kappa) {
  if (test.size() < 10) {
    throw Error(ErrorCode::InvalidSplit, "test split needs at least 10 samples to act as a field buffer");
  }
  ScalerParams scaler = fit_scaler(train);
  const LabeledDataset train_scaled = apply_scaler(scaler, train);
  const Eigen::MatrixXd test_scaled = apply_scaler(scaler, test.features);

  TrainedModel model = fit(classifier, hyper, train_scaled);
  const auto predicted = model.predict(test_scaled);
  const Kpis kpis = confusion_and_kpis(test.labels, predicted, train.num_classes());

  const TrainingProfile profile = build_profile(train_scaled, std::move(model), std::move(scaler), kappa);
  MonitorConfig config;
  config.buffer_size = test.size();
  const MonitorVerdict verdict = evaluate_buffer(profile, config, test_scaled, predicted);
  const BufferEvaluation& eval = *verdict.evaluation;

  BenchmarkRecord r;
  r.classifier = classifier;
  r.seed = hyper.seed;
  r.distance = eval.report.overall;
  r.estimated = eval.estimated_accuracy;
  r.true_accuracy = kpis.accuracy;
  r.kappa = kpis.kappa;
  r.bhattacharyya = eval.bhattacharyya_p_correct;
  return r;
}

BenchmarkResult run_benchmark(const LabeledDataset& data, const BenchmarkConfig& config) {
  data.validate();
  std::vector<Split> splits;
  if (config.cv.kind == CvScheme::Kind::KFold) {
    splits = kfold(data.size(), config.cv.k, config.seed);
  } else {
    splits.push_back(split_holdout(data.size(), config.cv.ratio, config.seed));
  }

  BenchmarkResult result;
  for (Algorithm algorithm : config.classifiers) {
    for (std::size_t f = 0; f < splits.size(); ++f) {
      Hyperparameters hyper = config.hyper;
      hyper.seed = derive_seed(config.seed, f);
      BenchmarkRecord r = evaluate_split(data.subset(splits[f].train), data.subset(splits[f].test), algorithm,
                                         hyper, config.kappa);
      r.index = f;
      result.records.push_back(std::move(r));
    }
  }
  result.summary = summarize_records(result.records);
  return result;
}

std::vector<ClassifierSummary> summarize_records(std::span<const BenchmarkRecord> records) {
  std::vector<ClassifierSummary> out;
  std::vector<std::size_t> bd_runs;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.classifier == r.classifier; });
    if (it == out.end()) {
      ClassifierSummary s;
      s.classifier = r.classifier;
      s.min_true_accuracy = r.true_accuracy;
      s.max_true_accuracy = r.true_accuracy;
      out.push_back(s);
      bd_runs.push_back(0);
      it = std::prev(out.end());
    }
    auto& s = *it;
    ++s.runs;
    s.min_true_accuracy = std::min(s.min_true_accuracy, r.true_accuracy);
    s.max_true_accuracy = std::max(s.max_true_accuracy, r.true_accuracy);
    s.average_true_accuracy += r.true_accuracy;
    s.mean_kappa += r.kappa;
    for (std::size_t m = 0; m < kMeasureCount; ++m) s.mean_estimated[m] += r.estimated[m];
    if (r.bhattacharyya) {
      s.mean_bhattacharyya = s.mean_bhattacharyya.value_or(0.0) + *r.bhattacharyya;
      ++bd_runs[static_cast<std::size_t>(it - out.begin())];
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& s = out[i];
    const auto n = static_cast<double>(s.runs);
    s.average_true_accuracy /= n;
    s.mean_kappa /= n;
    for (double& v : s.mean_estimated) v /= n;
    if (s.mean_bhattacharyya) *s.mean_bhattacharyya /= static_cast<double>(bd_runs[i]);
  }
  return out;
}

std::vector<DifferenceRow> difference_table(std::span<const BenchmarkRecord> records) {
  std::vector<DifferenceRow> rows;
  for (const auto& s : summarize_records(records)) {
    DifferenceRow row;
    row.classifier = s.classifier;
    for (std::size_t m = 0; m < kMeasureCount; ++m) {
      row.difference[m] = std::abs(s.mean_estimated[m] - s.min_true_accuracy);
    }
    if (s.mean_bhattacharyya) row.bhattacharyya = std::abs(*s.mean_bhattacharyya - s.min_true_accuracy);
    rows.push_back(row);
  }
  return rows;
}

void shift_features(LabeledDataset& data, double delta) { data.features.array() += delta; }

HoldoutStudy iterate_holdout(const LabeledDataset& data, const HoldoutConfig& config) {
  if (config.iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "hold-out study needs at least one iteration");
  }
  data.validate();
  HoldoutStudy study;
  for (std::size_t i = 0; i < config.iterations; ++i) {
    const std::uint64_t seed = derive_seed(config.seed, i);
    auto [train, test] = split_holdout(data, config.ratio, seed);
    const bool shifted = config.shift ? config.shift(test, i) : false;
    Hyperparameters hyper = config.hyper;
    hyper.seed = seed;
    BenchmarkRecord r = evaluate_split(train, test, config.classifier, hyper, config.kappa);
    r.index = i;
    r.shifted = shifted;
    study.records.push_back(std::move(r));
  }
  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    std::vector<double> column;
    column.reserve(study.records.size());
    for (const auto& r : study.records) column.push_back(r.distance[m]);
    study.distance_quartiles[m] = five_number_summary(column);
  }
  return study;
}

namespace {

Eigen::MatrixXd stack_rows(std::span<const StreamRecord> records, std::size_t dim) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].features.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "stream record " + std::to_string(records[i].index) + " has " +
                                                    std::to_string(records[i].features.size()) +
                                                    " features, expected " + std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = records[i].features[j];
    }
  }
  return out;
}

std::vector<Ecdf> column_ecdfs(const Eigen::MatrixXd& rows) {
  std::vector<Ecdf> out;
  out.reserve(static_cast<std::size_t>(rows.cols()));
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const Eigen::VectorXd col = rows.col(j);
    out.emplace_back(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
  }
  return out;
}

std::optional<ClassId> dominant_label(std::span<const StreamRecord> window) {
  std::map<ClassId, std::size_t> counts;
  for (const auto& r : window) {
    if (r.true_label) ++counts[*r.true_label];
  }
  std::optional<ClassId> best;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

std::vector<TraceRecord> sliding_window_trace(std::span<const StreamRecord> stream, std::size_t window,
                                              const std::optional<Eigen::MatrixXd>& reference) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "window size must be positive");
  if (stream.size() < 2 * window) {
    throw Error(ErrorCode::StreamTooShort, "stream of " + std::to_string(stream.size()) +
                                               " samples is shorter than twice the window (" +
                                               std::to_string(window) + ")");
  }
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].index <= stream[i - 1].index) {
      throw Error(ErrorCode::InvalidArgument, "stream indices must be strictly increasing");
    }
  }
  const std::size_t dim = stream.front().features.size();
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "stream records have no features");

  std::size_t first = 0;
  Eigen::MatrixXd ref;
  if (reference) {
    if (static_cast<std::size_t>(reference->cols()) != dim) {
      throw Error(ErrorCode::DimensionMismatch, "reference set dimension differs from the stream");
    }
    if (reference->rows() < 1) throw Error(ErrorCode::EmptySample, "reference set is empty");
    ref = *reference;
  } else {
    ref = stack_rows(stream.first(window), dim);
    first = window;
  }
  const ScalerParams scaler = fit_scaler(ref);
  const auto ref_ecdfs = column_ecdfs(apply_scaler(scaler, ref));

  std::vector<TraceRecord> trace;
  for (std::size_t start = first; start + window <= stream.size(); start += window) {
    const auto slice = stream.subspan(start, window);
    const auto ecdfs = column_ecdfs(apply_scaler(scaler, stack_rows(slice, dim)));
    TraceRecord rec;
    rec.window = trace.size();
    rec.start = slice.front().index;
    rec.dominant_label = dominant_label(slice);
    for (std::size_t f = 0; f < dim; ++f) {
      const auto d = all_distances(ref_ecdfs[f], ecdfs[f]);
      for (std::size_t m = 0; m < kMeasureCount; ++m) rec.distance[m] += d[m].value;
    }
    for (double& v : rec.distance) v /= static_cast<double>(dim);
    trace.push_back(rec);
  }
  return trace;
}

CorrelationReport correlation_report(std::span<const MeasureArray> distances, std::span<const double> target,
                                     std::string target_name, bool ordinal_caveat) {
  if (distances.size() != target.size()) {
    throw Error(ErrorCode::DegenerateInput, "distance and target series differ in length");
  }
  std::array<std::vector<double>, kMeasureCount> columns;
  for (const auto& row : distances) {
    for (std::size_t m = 0; m < kMeasureCount; ++m) columns[m].push_back(row[m]);
  }
  CorrelationReport report;
  report.target = std::move(target_name);
  report.ordinal_caveat = ordinal_caveat;
  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    report.versus_target[m] = pearson(columns[m], target);
    report.between_measures[m][m] = 1.0;
    for (std::size_t o = 0; o < m; ++o) {
      const double r = pearson(columns[m], columns[o]).r;
      report.between_measures[m][o] = r;
      report.between_measures[o][m] = r;
    }
  }
  return report;
}

CorrelationReport correlation_report(std::span<const BenchmarkRecord> records) {
  std::vector<MeasureArray> distances;
  std::vector<double> accuracy;
  for (const auto& r : records) {
    distances.push_back(r.distance);
    accuracy.push_back(r.true_accuracy);
  }
  return correlation_report(distances, accuracy, "true_accuracy", false);
}

CorrelationReport correlation_report(std::span<const TraceRecord> trace) {
  std::vector<MeasureArray> distances;
  std::vector<double> labels;
  for (const auto& r : trace) {
    if (!r.dominant_label) continue;
    distances.push_back(r.distance);
    labels.push_back(static_cast<double>(*r.dominant_label));
  }
  return correlation_report(distances, labels, "class_label", true);
}

std::vector<DriftPoint> drift_sweep(const std::function<LabeledDataset(std::uint64_t)>& make_data,
                                    std::span<const double> deltas, std::size_t repeats, Algorithm classifier,
                                    double ratio, const Hyperparameters& hyper, std::uint64_t seed) {
  std::vector<DriftPoint> points;
  for (std::size_t r = 0; r < repeats; ++r) {
    const std::uint64_t rseed = derive_seed(seed, r);
    const LabeledDataset data = make_data(rseed);
    const auto [train, test] = split_holdout(data, ratio, rseed);
    const auto summary = summarize(train.features);
    const Eigen::RowVectorXd sigma = summary.cov.diagonal().cwiseSqrt().transpose();
    Hyperparameters h = hyper;
    h.seed = rseed;
    for (double delta : deltas) {
      LabeledDataset shifted = test;
      shifted.features.rowwise() += delta * sigma;
      DriftPoint p;
      p.delta = delta;
      p.repeat = r;
      p.record = evaluate_split(train, shifted, classifier, h);
      p.record.index = r;
      p.record.shifted = delta != 0.0;
      points.push_back(std::move(p));
    }
  }
  return points;
}

}  // namespace safeml
