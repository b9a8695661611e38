#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "safeml/labeled_dataset.hpp"

namespace safeml {

enum class Algorithm { LDA, GNB, KNN, CART, RF };

std::string_view to_string(Algorithm a) noexcept;
/// Accepts the canonical names case-insensitively ("lda", "gnb", "knn", "cart", "rf").
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

struct Hyperparameters {
  int knn_k = 5;
  int cart_max_depth = 12;
  int cart_min_leaf = 2;
  int rf_trees = 25;
  std::uint64_t seed = 0;
  double gnb_variance_floor = 1e-9;
};

struct LdaParams {
  Eigen::MatrixXd means;       // K x d
  Eigen::MatrixXd pooled_cov;  // d x d, already regularized
  Eigen::VectorXd priors;      // K
};

struct GnbParams {
  Eigen::MatrixXd means;      // K x d
  Eigen::MatrixXd variances;  // K x d, floored
  Eigen::VectorXd priors;     // K
};

struct KnnParams {
  Eigen::MatrixXd points;
  std::vector<ClassId> labels;
  int k = 5;
  int num_classes = 0;
};

struct CartNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::size_t> class_counts;
};

struct CartParams {
  std::vector<CartNode> nodes;  // nodes[0] is the root
  int num_classes = 0;
  int dim = 0;
};

struct ForestParams {
  std::vector<CartParams> trees;
  int num_classes = 0;
  int dim = 0;
};

using ModelParams = std::variant<LdaParams, GnbParams, KnnParams, CartParams, ForestParams>;

/// Immutable fitted classifier. Prediction ties always resolve to the lowest class id.
class TrainedModel {
 public:
  explicit TrainedModel(ModelParams params);

  Algorithm algorithm() const noexcept;
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  const ModelParams& params() const noexcept { return params_; }

  /// One label per row. Throws DimensionMismatch if the column count differs.
  std::vector<ClassId> predict(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;
  ClassId predict_one(std::span<const double> sample) const;

 private:
  ClassId predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;

  ModelParams params_;
  std::size_t dim_ = 0;
  std::size_t num_classes_ = 0;
  // LDA linear discriminants, derived from params_ at construction.
  Eigen::MatrixXd lda_coef_;
  Eigen::VectorXd lda_intercept_;
};

TrainedModel fit(Algorithm algorithm, const Hyperparameters& hyper, const LabeledDataset& train);

struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::size_t> counts;  // row-major, rows = truth, cols = predicted

  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * num_classes + predicted];
  }
  std::size_t total() const noexcept;
  bool is_diagonal() const noexcept;
};

struct Kpis {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double kappa = 0.0;
};

/// Cohen's kappa and accuracy. num_classes defaults to 1 + the largest label seen.
Kpis confusion_and_kpis(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                        std::optional<std::size_t> num_classes = std::nullopt);

Kpis kpis_from_confusion(const ConfusionMatrix& confusion);

}  // namespace safeml
