#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drf {

using Rng = std::mt19937_64;

// Immutable after load: a dense N x n feature matrix stored row-major, with
// class indices in [0, n_classes).
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t n_features, std::vector<double> values, std::vector<int> labels,
          std::vector<std::string> class_names, std::vector<std::string> feature_names);

  std::size_t rows() const { return labels_.size(); }
  std::size_t features() const { return n_features_; }
  int n_classes() const { return static_cast<int>(class_names_.size()); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_features_, n_features_};
  }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_features_ + j]; }
  int label(std::size_t i) const { return labels_[i]; }

  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  // Row subset in the given order; duplicates allowed.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::size_t n_features_ = 0;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  std::vector<std::string> feature_names_;
};

// Sentinel for load_dataset: use the right-most column as the label.
inline constexpr std::string_view kLastColumn = "last";

struct LoadOptions {
  std::string label_column{kLastColumn};
  // Pre-seeded class table (e.g. from a model or training file). Labels not
  // in the table are appended in first-appearance order.
  std::vector<std::string> known_classes;
  // When false the file has no label column and every label is 0.
  bool has_labels = true;
};

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_dataset(std::string_view text, const LoadOptions& options = {});

// Ordered multiset of row indices (bootstrap semantics).
using SampleIndexSet = std::vector<std::size_t>;
// Sorted distinct column indices.
using FeatureSubset = std::vector<std::size_t>;

SampleIndexSet all_indices(std::size_t n);

// Uniform with-replacement resample of the same cardinality.
SampleIndexSet bootstrap(std::span<const std::size_t> source, Rng& rng);

FeatureSubset sample_feature_subset(std::size_t n_features, std::size_t mtry, Rng& rng);

// round(sqrt(n)), floored at 1.
std::size_t default_mtry(std::size_t n_features);

// Stream derivation: independent 64-bit seeds from (parent, index) pairs.
std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index);

}  // namespace drf
