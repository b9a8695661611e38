#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace safeml {

using ClassId = int;

/// Feature matrix (one row per sample) with dense class ids 0..K-1.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<ClassId> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  std::size_t num_classes() const noexcept { return class_names.size(); }

  /// Throws if shapes disagree, a label is out of range, or a value is not finite.
  void validate() const;

  /// Rows in the given order; names are carried over unchanged.
  LabeledDataset subset(std::span<const std::size_t> rows) const;

  /// Per-class sample counts, length num_classes().
  std::vector<std::size_t> class_counts() const;
};

}  // namespace safeml
