#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drf/data.hpp"
#include "drf/tree.hpp"

namespace drf {

struct ForestConfig {
  TreeConfig tree;
  std::size_t n_trees = 50;
  std::uint64_t master_seed = 20211016;
};

struct Forest {
  std::vector<TrainedTree> trees;
  ForestConfig config;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;

  std::size_t n_features() const { return feature_names.size(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }
};

// Worker count from DRF_WORKERS, else hardware concurrency (at least 1).
std::size_t default_workers();

// Tree i uses the stream mix_seed(master_seed, i). Standard variants grow
// from a root bootstrap of all rows; double variants from all rows. Trees
// are gathered in index order, so the result does not depend on `workers`.
Forest train_forest(const Dataset& dataset, const ForestConfig& config, std::size_t workers = 0);

// Per-class vote counts over the trees (sums to the tree count).
std::vector<std::size_t> vote_counts(const Forest& forest, std::span<const double> sample);

// Majority vote, lowest class index on ties.
int predict_forest(const Forest& forest, std::span<const double> sample);

struct Evaluation {
  double accuracy = 0.0;
  std::vector<int> predictions;
};

Evaluation evaluate(const Forest& forest, const Dataset& dataset);

// Index of the largest entry, lowest index on ties.
std::size_t argmax_lowest(std::span<const std::size_t> counts);

}  // namespace drf
