#include "drf/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "drf/error.hpp"

namespace drf {

std::size_t default_workers() {
  if (const char* env = std::getenv("DRF_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Forest train_forest(const Dataset& dataset, const ForestConfig& config, std::size_t workers) {
  if (config.n_trees < 1) throw std::invalid_argument("forest needs at least one tree");
  config.tree.validate();
  if (workers == 0) workers = default_workers();
  workers = std::min(workers, config.n_trees);

  Forest forest;
  forest.config = config;
  forest.class_names = dataset.class_names();
  forest.feature_names = dataset.feature_names();
  forest.trees.resize(config.n_trees);

  const bool double_variant = is_double(config.tree.variant);
  const auto all = all_indices(dataset.rows());

  auto grow_one = [&](std::size_t i) {
    const std::uint64_t tree_seed = mix_seed(config.master_seed, i);
    if (double_variant) {
      forest.trees[i] = grow_tree(dataset, all, config.tree, tree_seed);
    } else {
      Rng root_rng(mix_seed(tree_seed, 0));
      const auto bag = bootstrap(all, root_rng);
      forest.trees[i] = grow_tree(dataset, bag, config.tree, tree_seed);
    }
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < config.n_trees; ++i) grow_one(i);
    return forest;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < config.n_trees; i = next++) {
        try {
          grow_one(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return forest;
}

std::size_t argmax_lowest(std::span<const std::size_t> counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<std::size_t> vote_counts(const Forest& forest, std::span<const double> sample) {
  if (sample.size() != forest.n_features())
    throw DimensionError("sample has " + std::to_string(sample.size()) + " features, model expects " +
                         std::to_string(forest.n_features()));
  std::vector<std::size_t> votes(static_cast<std::size_t>(forest.n_classes()), 0);
  for (const auto& tree : forest.trees) ++votes[static_cast<std::size_t>(predict_tree(tree, sample))];
  return votes;
}

int predict_forest(const Forest& forest, std::span<const double> sample) {
  return static_cast<int>(argmax_lowest(vote_counts(forest, sample)));
}

Evaluation evaluate(const Forest& forest, const Dataset& dataset) {
  if (dataset.features() != forest.n_features())
    throw DimensionError("dataset has " + std::to_string(dataset.features()) + " features, model expects " +
                         std::to_string(forest.n_features()));
  Evaluation out;
  out.predictions.reserve(dataset.rows());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    const int p = predict_forest(forest, dataset.row(i));
    out.predictions.push_back(p);
    if (p == dataset.label(i)) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.rows());
  return out;
}

}  // namespace drf
