#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "drf/data.hpp"
#include "drf/linalg.hpp"

namespace drf {

using linalg::Matrix;

// Node-local view: rows are the (possibly bootstrapped) node samples, columns
// are the candidate features in FeatureSubset order.
struct NodeSample {
  Matrix x;
  std::vector<int> y;
  int n_classes = 0;
};

NodeSample gather(const Dataset& data, std::span<const std::size_t> rows, std::span<const std::size_t> features);

std::vector<std::size_t> class_counts(std::span<const int> labels, int n_classes);

// 1 - Σ p_k². Throws std::invalid_argument on an empty node.
double gini_impurity(std::span<const std::size_t> counts);

// Weighted child Gini of a boolean partition.
double partition_impurity(std::span<const int> labels, std::span<const char> goes_left, int n_classes);

// ---------------------------------------------------------------------------
// Split rules

struct AxisRule {
  std::size_t feature = 0;
  double threshold = 0.0;
};

enum class Routing { proximity, bisector };

struct ObliqueRule {
  FeatureSubset features;
  // Clustering planes xᵀw - b = 0 with unit-norm w.
  std::vector<double> w_pos;
  double b_pos = 0.0;
  std::vector<double> w_neg;
  double b_neg = 0.0;
  Routing routing = Routing::proximity;
  // Chosen angle bisector (bisector routing only): left iff xᵀw - b <= 0.
  std::vector<double> w_bisector;
  double b_bisector = 0.0;
};

enum class RotationKind { pca, lda };

struct RotationRule {
  FeatureSubset features;
  Matrix rotation;  // m x m, columns are directions
  std::size_t rotated_feature = 0;
  double threshold = 0.0;
  RotationKind kind = RotationKind::pca;
};

using SplitRule = std::variant<AxisRule, ObliqueRule, RotationRule>;

// Routing on a full feature vector.
bool goes_left(const SplitRule& rule, std::span<const double> sample);

// Same decision given only the values of the rule's own feature subset, in
// subset order. Split search and prediction share this path.
bool goes_left_local(const ObliqueRule& rule, std::span<const double> local);
double rotated_value(const Matrix& rotation, std::size_t column, std::span<const double> local);

struct SplitOutcome {
  SplitRule rule;
  double impurity = 0.0;  // weighted child Gini on the search sample
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  bool fallback_used = false;
};

// ---------------------------------------------------------------------------
// Axis-parallel search

struct AxisCandidate {
  std::size_t column = 0;  // local column in the node sample
  double threshold = 0.0;
  double impurity = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

// Exhaustive search over every column and every midpoint between consecutive
// distinct values; left iff value <= threshold. Ties keep the lowest column
// and the lowest threshold. nullopt when every column is constant.
std::optional<AxisCandidate> best_axis_split(const Matrix& x, std::span<const int> y, int n_classes);

std::optional<SplitOutcome> axis_split(const NodeSample& node, std::span<const std::size_t> features);

// ---------------------------------------------------------------------------
// Class grouping

struct ClassGaussian {
  std::vector<double> mean;
  Matrix covariance;
  std::size_t count = 0;
};

// Per-class mean and unbiased covariance, regularized by ε·I with
// ε = reg_eps · max(mean diagonal, 1). Only classes present appear.
std::map<int, ClassGaussian> class_gaussians(const Matrix& x, std::span<const int> y, double reg_eps = 1e-6);

// Bhattacharyya distance between two Gaussians, evaluated in log space.
double bhattacharyya(const ClassGaussian& g1, const ClassGaussian& g2);

struct BinaryGrouping {
  std::vector<int> positive;
  std::vector<int> negative;
};

// Seeds the two groups with the most distant pair (lowest-index pair on
// ties); every other class joins the nearer seed, strict < for positive.
BinaryGrouping group_classes(const std::map<int, ClassGaussian>& gaussians);

// ---------------------------------------------------------------------------
// Oblique (MPSVM) splits

enum class MpsvmRegularization { tikhonov, parallel, nullspace };

struct SplitOptions {
  Routing routing = Routing::proximity;
  double tikhonov_scale = 1e-4;  // δ = scale · trace(H) / dim(H)
  double covariance_eps = 1e-6;
};

// P = [A -e]ᵀ[A -e] and Q = [B -e]ᵀ[B -e] for the positive / negative rows.
struct MpsvmMatrices {
  Matrix p;
  Matrix q;
};
MpsvmMatrices mpsvm_matrices(const NodeSample& node, const BinaryGrouping& grouping);

// Two clustering planes and a routing rule. Rank deficiency is handled per
// `reg`; a degenerate plane or a one-sided partition falls back to the best
// axis split on the same features. nullopt if nothing separates the node.
std::optional<SplitOutcome> mpsvm_split(const NodeSample& node, std::span<const std::size_t> features,
                                        const BinaryGrouping& grouping, MpsvmRegularization reg,
                                        const SplitOptions& options = {});

// ---------------------------------------------------------------------------
// Rotation splits

struct Directions {
  Matrix rotation;              // columns, descending by eigenvalue
  std::vector<double> values;   // matching eigenvalues
};

// Eigenvectors of the total scatter matrix. nullopt for constant data.
std::optional<Directions> pca_directions(const Matrix& x);

struct LdaDirections : Directions {
  Matrix within;   // S_w as used (regularized when Cholesky failed)
  Matrix between;  // S_b
};

// Generalized eigenvectors of S_b v = λ S_w v, unit-normalized.
std::optional<LdaDirections> lda_directions(const Matrix& x, std::span<const int> y, int n_classes,
                                            double tikhonov_scale = 1e-4);

// Rotates the node sample, then runs the axis search in the rotated space.
std::optional<SplitOutcome> pca_rotation_split(const NodeSample& node, std::span<const std::size_t> features);
std::optional<SplitOutcome> lda_rotation_split(const NodeSample& node, std::span<const std::size_t> features,
                                               const SplitOptions& options = {});

Matrix rotate(const Matrix& x, const Matrix& rotation);

}  // namespace drf
