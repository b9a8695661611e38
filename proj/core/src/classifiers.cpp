#include "safeml/classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "safeml/error.hpp"
#include "safeml/error_bound.hpp"

namespace safeml {

// ---------------------------------------------------------------------------
// LabeledDataset

void LabeledDataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature rows and labels differ in count");
  }
  if (feature_names.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "feature name count does not match columns");
  }
  if (class_names.empty()) {
    throw Error(ErrorCode::InvalidArgument, "dataset has no classes");
  }
  for (ClassId y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes()) {
      throw Error(ErrorCode::InvalidArgument, "label outside 0..K-1");
    }
  }
  if (!features.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "dataset contains non-finite feature values");
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  out.feature_names = feature_names;
  out.class_names = class_names;
  return out;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (ClassId y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::LDA: return "LDA";
    case Algorithm::GNB: return "GNB";
    case Algorithm::KNN: return "KNN";
    case Algorithm::CART: return "CART";
    case Algorithm::RF: return "RF";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Algorithm a : {Algorithm::LDA, Algorithm::GNB, Algorithm::KNN, Algorithm::CART, Algorithm::RF}) {
    if (to_string(a) == upper) return a;
  }
  return std::nullopt;
}

namespace {

template <typename Scores>
ClassId argmax_lowest(const Scores& scores, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return static_cast<ClassId>(best);
}

void require_class_samples(const LabeledDataset& train, std::size_t minimum, std::string_view who) {
  const auto counts = train.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < minimum) {
      throw Error(ErrorCode::InsufficientClassSamples,
                  std::string(who) + " needs at least " + std::to_string(minimum) +
                      " samples of class '" + train.class_names[k] + "'");
    }
  }
}

Eigen::VectorXd class_priors(const LabeledDataset& train) {
  const auto counts = train.class_counts();
  Eigen::VectorXd priors(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    priors[static_cast<Eigen::Index>(k)] =
        static_cast<double>(counts[k]) / static_cast<double>(train.size());
  }
  return priors;
}

Eigen::MatrixXd class_means(const LabeledDataset& train) {
  const auto counts = train.class_counts();
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(train.num_classes()),
                                                train.features.cols());
  for (std::size_t i = 0; i < train.size(); ++i) {
    means.row(train.labels[i]) += train.features.row(static_cast<Eigen::Index>(i));
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    means.row(static_cast<Eigen::Index>(k)) /= static_cast<double>(counts[k]);
  }
  return means;
}

LdaParams fit_lda(const LabeledDataset& train) {
  require_class_samples(train, 2, "LDA");
  LdaParams p;
  p.priors = class_priors(train);
  p.means = class_means(train);
  const Eigen::Index d = train.features.cols();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Eigen::RowVectorXd centered =
        train.features.row(static_cast<Eigen::Index>(i)) - p.means.row(train.labels[i]);
    scatter.noalias() += centered.transpose() * centered;
  }
  const double dof = static_cast<double>(train.size() - train.num_classes());
  scatter /= dof > 0 ? dof : 1.0;
  p.pooled_cov = regularized_covariance(0.5 * (scatter + scatter.transpose()));
  return p;
}

GnbParams fit_gnb(const LabeledDataset& train, double variance_floor) {
  require_class_samples(train, 2, "Gaussian naive Bayes");
  GnbParams p;
  p.priors = class_priors(train);
  p.means = class_means(train);
  p.variances = Eigen::MatrixXd::Zero(p.means.rows(), p.means.cols());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Eigen::RowVectorXd centered =
        train.features.row(static_cast<Eigen::Index>(i)) - p.means.row(train.labels[i]);
    p.variances.row(train.labels[i]) += centered.array().square().matrix();
  }
  const auto counts = train.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    auto row = p.variances.row(static_cast<Eigen::Index>(k));
    row /= static_cast<double>(counts[k]);
    row = row.array().max(variance_floor).matrix();
  }
  return p;
}

// --- CART -------------------------------------------------------------------

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& data, const Hyperparameters& hyper)
      : data_(data), max_depth_(hyper.cart_max_depth), min_leaf_(std::max(1, hyper.cart_min_leaf)) {
    params_.num_classes = static_cast<int>(data.num_classes());
    params_.dim = static_cast<int>(data.dim());
  }

  CartParams build(std::vector<std::size_t> rows) {
    params_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(params_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(params_.nodes.size());
    params_.nodes.emplace_back();
    auto counts = count_classes(rows);
    const std::size_t nonzero = static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
    params_.nodes[static_cast<std::size_t>(id)].class_counts = counts;

    const auto n = rows.size();
    if (depth >= max_depth_ || nonzero <= 1 || n < 2 * static_cast<std::size_t>(min_leaf_)) {
      return id;
    }
    const Split split = best_split(rows, counts);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (data_.features(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = params_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> count_classes(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> counts(data_.num_classes(), 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(data_.labels[r])];
    return counts;
  }

  // Weighted Gini impurity n_l*G_l + n_r*G_r from integer class counts, so
  // equal splits compare equal regardless of class id order.
  static double weighted_gini(std::int64_t nl, std::int64_t sq_l, std::int64_t nr, std::int64_t sq_r) {
    return (static_cast<double>(nl) - static_cast<double>(sq_l) / static_cast<double>(nl)) +
           (static_cast<double>(nr) - static_cast<double>(sq_r) / static_cast<double>(nr));
  }

  Split best_split(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& total) const {
    Split best;
    const auto n = static_cast<std::int64_t>(rows.size());
    std::int64_t total_sq = 0;
    for (std::size_t c : total) total_sq += static_cast<std::int64_t>(c * c);

    std::vector<std::size_t> order(rows);
    std::vector<std::int64_t> left_counts(total.size());
    for (int f = 0; f < params_.dim; ++f) {
      const auto value = [&](std::size_t r) { return data_.features(static_cast<Eigen::Index>(r), f); };
      std::copy(rows.begin(), rows.end(), order.begin());
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = value(a);
        const double vb = value(b);
        return va < vb || (va == vb && a < b);
      });
      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::int64_t sq_l = 0;
      std::int64_t sq_r = total_sq;
      for (std::int64_t i = 0; i + 1 < n; ++i) {
        const auto k = static_cast<std::size_t>(data_.labels[order[static_cast<std::size_t>(i)]]);
        const std::int64_t cl = left_counts[k];
        const auto cr = static_cast<std::int64_t>(total[k]) - cl;
        sq_l += 2 * cl + 1;
        sq_r -= 2 * cr - 1;
        ++left_counts[k];

        const std::int64_t nl = i + 1;
        const std::int64_t nr = n - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double v = value(order[static_cast<std::size_t>(i)]);
        const double v_next = value(order[static_cast<std::size_t>(i + 1)]);
        if (!(v < v_next)) continue;
        const double impurity = weighted_gini(nl, sq_l, nr, sq_r);
        if (impurity < best.impurity) {
          double mid = v + 0.5 * (v_next - v);
          if (!(mid < v_next)) mid = v;
          best = {f, mid, impurity};
        }
      }
    }
    return best;
  }

  const LabeledDataset& data_;
  int max_depth_;
  int min_leaf_;
  CartParams params_;
};

CartParams fit_cart(const LabeledDataset& train, const Hyperparameters& hyper) {
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return TreeBuilder(train, hyper).build(std::move(rows));
}

ForestParams fit_forest(const LabeledDataset& train, const Hyperparameters& hyper) {
  if (hyper.rf_trees < 1) {
    throw Error(ErrorCode::InvalidArgument, "random forest needs at least one tree");
  }
  ForestParams p;
  p.num_classes = static_cast<int>(train.num_classes());
  p.dim = static_cast<int>(train.dim());
  std::mt19937_64 rng(hyper.seed);
  std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
  TreeBuilder builder(train, hyper);
  for (int t = 0; t < hyper.rf_trees; ++t) {
    std::vector<std::size_t> rows(train.size());
    for (auto& r : rows) r = pick(rng);
    p.trees.push_back(builder.build(std::move(rows)));
  }
  return p;
}

ClassId predict_tree(const CartParams& tree, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  std::size_t node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& n = tree.nodes[node];
    node = static_cast<std::size_t>(x[n.feature] <= n.threshold ? n.left : n.right);
  }
  const auto& counts = tree.nodes[node].class_counts;
  return argmax_lowest(counts, counts.size());
}

struct ShapeVisitor {
  std::size_t dim = 0;
  std::size_t classes = 0;
  void operator()(const LdaParams& p) {
    dim = static_cast<std::size_t>(p.means.cols());
    classes = static_cast<std::size_t>(p.means.rows());
  }
  void operator()(const GnbParams& p) {
    dim = static_cast<std::size_t>(p.means.cols());
    classes = static_cast<std::size_t>(p.means.rows());
  }
  void operator()(const KnnParams& p) {
    dim = static_cast<std::size_t>(p.points.cols());
    classes = static_cast<std::size_t>(p.num_classes);
  }
  void operator()(const CartParams& p) {
    dim = static_cast<std::size_t>(p.dim);
    classes = static_cast<std::size_t>(p.num_classes);
  }
  void operator()(const ForestParams& p) {
    dim = static_cast<std::size_t>(p.dim);
    classes = static_cast<std::size_t>(p.num_classes);
  }
};

}  // namespace

TrainedModel::TrainedModel(ModelParams params) : params_(std::move(params)) {
  ShapeVisitor shape;
  std::visit(shape, params_);
  dim_ = shape.dim;
  num_classes_ = shape.classes;
  if (const auto* lda = std::get_if<LdaParams>(&params_)) {
    Eigen::LLT<Eigen::MatrixXd> llt(lda->pooled_cov);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularCovariance, "LDA pooled covariance is not positive definite");
    }
    lda_coef_ = llt.solve(lda->means.transpose()).transpose();  // K x d
    lda_intercept_.resize(lda->means.rows());
    for (Eigen::Index k = 0; k < lda->means.rows(); ++k) {
      lda_intercept_[k] = -0.5 * lda_coef_.row(k).dot(lda->means.row(k)) + std::log(lda->priors[k]);
    }
  }
  if (const auto* knn = std::get_if<KnnParams>(&params_)) {
    if (knn->k < 1 || knn->points.rows() == 0) {
      throw Error(ErrorCode::InvalidArgument, "KNN needs k >= 1 and a non-empty training set");
    }
  }
}

Algorithm TrainedModel::algorithm() const noexcept {
  return static_cast<Algorithm>(params_.index());
}

ClassId TrainedModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  struct Predictor {
    const TrainedModel& self;
    const Eigen::Ref<const Eigen::RowVectorXd>& x;

    ClassId operator()(const LdaParams&) const {
      const Eigen::VectorXd scores = self.lda_coef_ * x.transpose() + self.lda_intercept_;
      return argmax_lowest(scores, static_cast<std::size_t>(scores.size()));
    }
    ClassId operator()(const GnbParams& p) const {
      std::vector<double> scores(static_cast<std::size_t>(p.means.rows()));
      for (Eigen::Index k = 0; k < p.means.rows(); ++k) {
        const auto var = p.variances.row(k).array();
        const auto diff = x.array() - p.means.row(k).array();
        scores[static_cast<std::size_t>(k)] =
            std::log(p.priors[k]) - 0.5 * ((diff.square() / var) + var.log()).sum();
      }
      return argmax_lowest(scores, scores.size());
    }
    ClassId operator()(const KnnParams& p) const {
      const auto n = static_cast<std::size_t>(p.points.rows());
      std::vector<std::pair<double, std::size_t>> dist(n);
      for (std::size_t i = 0; i < n; ++i) {
        dist[i] = {(p.points.row(static_cast<Eigen::Index>(i)) - x).squaredNorm(), i};
      }
      const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(p.k), n);
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
      std::vector<std::size_t> votes(static_cast<std::size_t>(p.num_classes), 0);
      for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(p.labels[dist[i].second])];
      return argmax_lowest(votes, votes.size());
    }
    ClassId operator()(const CartParams& p) const { return predict_tree(p, x); }
    ClassId operator()(const ForestParams& p) const {
      std::vector<std::size_t> votes(static_cast<std::size_t>(p.num_classes), 0);
      for (const auto& tree : p.trees) ++votes[static_cast<std::size_t>(predict_tree(tree, x))];
      return argmax_lowest(votes, votes.size());
    }
  };
  return std::visit(Predictor{*this, x}, params_);
}

std::vector<ClassId> TrainedModel::predict(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "model expects " + std::to_string(dim_) + " features, got " + std::to_string(rows.cols()));
  }
  if (!rows.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "prediction input contains non-finite values");
  }
  std::vector<ClassId> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = predict_row(rows.row(i));
  }
  return out;
}

ClassId TrainedModel::predict_one(std::span<const double> sample) const {
  const Eigen::Map<const Eigen::RowVectorXd> row(sample.data(), static_cast<Eigen::Index>(sample.size()));
  return predict(row).front();
}

TrainedModel fit(Algorithm algorithm, const Hyperparameters& hyper, const LabeledDataset& train) {
  train.validate();
  if (train.size() == 0) {
    throw Error(ErrorCode::InsufficientSamples, "cannot fit on an empty dataset");
  }
  switch (algorithm) {
    case Algorithm::LDA: return TrainedModel(fit_lda(train));
    case Algorithm::GNB: return TrainedModel(fit_gnb(train, hyper.gnb_variance_floor));
    case Algorithm::KNN:
      return TrainedModel(KnnParams{train.features, train.labels, hyper.knn_k,
                                    static_cast<int>(train.num_classes())});
    case Algorithm::CART: return TrainedModel(fit_cart(train, hyper));
    case Algorithm::RF: return TrainedModel(fit_forest(train, hyper));
  }
  throw Error(ErrorCode::UnknownAlgorithm, "unknown classifier id");
}

// ---------------------------------------------------------------------------

std::size_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

bool ConfusionMatrix::is_diagonal() const noexcept {
  for (std::size_t i = 0; i < num_classes; ++i) {
    for (std::size_t j = 0; j < num_classes; ++j) {
      if (i != j && at(i, j) != 0) return false;
    }
  }
  return true;
}

Kpis kpis_from_confusion(const ConfusionMatrix& confusion) {
  const std::size_t k = confusion.num_classes;
  const double total = static_cast<double>(confusion.total());
  if (total == 0.0) {
    throw Error(ErrorCode::InsufficientSamples, "confusion matrix is empty");
  }
  double diag = 0.0;
  double expected = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    diag += static_cast<double>(confusion.at(i, i));
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      row += static_cast<double>(confusion.at(i, j));
      col += static_cast<double>(confusion.at(j, i));
    }
    expected += (row / total) * (col / total);
  }
  Kpis out;
  out.confusion = confusion;
  out.accuracy = diag / total;
  if (expected >= 1.0) {
    // Both raters used one class only; agreement is then perfect or impossible.
    out.kappa = out.accuracy == 1.0 ? 1.0 : 0.0;
  } else {
    out.kappa = (out.accuracy - expected) / (1.0 - expected);
  }
  return out;
}

Kpis confusion_and_kpis(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                        std::optional<std::size_t> num_classes) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  }
  if (truth.empty()) {
    throw Error(ErrorCode::LengthMismatch, "no labels to compare");
  }
  ClassId largest = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0) {
      throw Error(ErrorCode::InvalidArgument, "negative class id");
    }
    largest = std::max({largest, truth[i], predicted[i]});
  }
  const std::size_t k = num_classes.value_or(static_cast<std::size_t>(largest) + 1);
  if (static_cast<std::size_t>(largest) >= k) {
    throw Error(ErrorCode::InvalidArgument, "class id exceeds the declared class count");
  }
  ConfusionMatrix cm{k, std::vector<std::size_t>(k * k, 0)};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++cm.counts[static_cast<std::size_t>(truth[i]) * k + static_cast<std::size_t>(predicted[i])];
  }
  return kpis_from_confusion(cm);
}

}  // namespace safeml
