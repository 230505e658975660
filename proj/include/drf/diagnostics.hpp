#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drf/forest.hpp"
#include "drf/linalg.hpp"

namespace drf {

// ---------------------------------------------------------------------------
// Kappa-error diversity

// Cohen's κ from a T x T coincidence matrix of joint proportions, with
// pr(e) = Σ_k rowsum_k · colsum_k. Returns 1 when pr(e) = 1.
double kappa_from_coincidence(const linalg::Matrix& coincidence);

// κ between two prediction vectors. Throws std::invalid_argument on a length
// mismatch or empty input.
double kappa(std::span<const int> predictions_i, std::span<const int> predictions_j, int n_classes);

struct CoincidencePoint {
  std::size_t tree_i = 0;
  std::size_t tree_j = 0;  // tree_i < tree_j
  double kappa = 0.0;
  double avg_error = 0.0;  // (E_i + E_j) / 2
};

struct KappaErrorDiagram {
  std::vector<CoincidencePoint> points;  // L(L-1)/2, ordered by (i, j)
  double centroid_kappa = 0.0;
  double centroid_error = 0.0;
};

// predictions[t][s]: class predicted by tree t for test sample s.
std::vector<std::vector<int>> tree_predictions(const Forest& forest, const Dataset& dataset);

KappaErrorDiagram kappa_error_diagram(const Forest& forest, const Dataset& test);

// CSV with header `tree_i,tree_j,kappa,avg_error` and a final
// `centroid,,<kappa>,<error>` row.
std::string format_kappa_csv(const KappaErrorDiagram& diagram);
KappaErrorDiagram parse_kappa_csv(std::string_view text);

// ---------------------------------------------------------------------------
// Bias-variance under 0-1 loss, noise folded into the bias term.

struct BiasVarianceReport {
  double bias_sq = 0.0;
  double variance = 0.0;
  double error = 0.0;  // mean 0-1 loss over models and test points
  std::size_t repeats = 0;
};

// model_predictions[r][s]: class predicted by model r for test sample s.
BiasVarianceReport bias_variance_from_predictions(std::span<const std::vector<int>> model_predictions,
                                                  std::span<const int> truth, int n_classes);

// Trains `repeats` forests on bootstrap replicates of `train`, evaluates each
// on the fixed `test` partition and decomposes the error.
BiasVarianceReport bias_variance(const Dataset& train, const Dataset& test, const ForestConfig& config,
                                 std::size_t repeats, std::uint64_t seed, std::size_t workers = 0);

// Flat `key=value` lines: bias_sq, variance, error, repeats.
std::string format_bias_variance(const BiasVarianceReport& report);
BiasVarianceReport parse_bias_variance(std::string_view text);

// ---------------------------------------------------------------------------
// Tree size

struct NodeProfile {
  std::vector<std::size_t> node_counts;
  std::vector<std::size_t> depths;
  double mean_nodes = 0.0;
  std::size_t min_nodes = 0;
  std::size_t max_nodes = 0;
  double mean_depth = 0.0;
  std::size_t min_depth = 0;
  std::size_t max_depth = 0;
};

NodeProfile node_profile(const Forest& forest);

}  // namespace drf
