#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drf/data.hpp"
#include "drf/split.hpp"

namespace drf {

enum class Variant {
  raf,
  draf,
  mpraf_t,
  mpraf_p,
  mpraf_n,
  mpdraf_t,
  mpdraf_p,
  mpdraf_n,
  raf_pca,
  raf_lda,
  draf_pca,
  draf_lda,
};

inline constexpr std::array<Variant, 12> kAllVariants = {
    Variant::raf,      Variant::mpraf_t,  Variant::mpraf_p,  Variant::mpraf_n,
    Variant::raf_pca,  Variant::raf_lda,  Variant::draf,     Variant::mpdraf_t,
    Variant::mpdraf_p, Variant::mpdraf_n, Variant::draf_pca, Variant::draf_lda,
};

enum class SplitFamily { axis, mpsvm, pca, lda };

std::string_view variant_name(Variant v);
// Throws UnknownVariantError listing the valid names.
Variant parse_variant(std::string_view name);
std::string valid_variant_list();

bool is_double(Variant v);
SplitFamily split_family(Variant v);
MpsvmRegularization mpsvm_regularization(Variant v);
// raf <-> draf, mpraf-t <-> mpdraf-t, ...
Variant counterpart(Variant v);

// Axis fallback scope for the axis-parallel-regularized oblique variants.
enum class FallbackScope { node, subtree };

struct TreeConfig {
  Variant variant = Variant::raf;
  std::optional<std::size_t> mtry;  // nullopt: round(sqrt(n))
  std::size_t minleaf = 1;
  double node_bootstrap_fraction = 0.1;
  std::size_t max_depth = 10000;
  Routing routing = Routing::proximity;
  FallbackScope fallback = FallbackScope::node;
  double tikhonov_scale = 1e-4;
  double covariance_eps = 1e-6;

  void validate() const;
  std::size_t resolved_mtry(std::size_t n_features) const;
};

struct InternalNode {
  SplitRule rule;
  std::size_t left = 0;
  std::size_t right = 0;
};

struct LeafNode {
  std::vector<double> distribution;  // class proportions, sums to 1
  int predicted_class = 0;           // lowest-index argmax
};

using TreeNode = std::variant<InternalNode, LeafNode>;

// Flat pre-order node array; nodes[0] is the root.
struct TrainedTree {
  std::vector<TreeNode> nodes;
  std::size_t node_count = 0;
  std::size_t depth = 0;
  std::size_t n_features = 0;
  std::uint64_t seed = 0;

  const LeafNode& leaf_for(std::span<const double> sample) const;
};

// Grows one tree over `root_indices`. Each node draws from its own stream,
// derived from its parent's seed and its side, so a node's randomness
// depends only on its position in the tree.
TrainedTree grow_tree(const Dataset& dataset, std::span<const std::size_t> root_indices, const TreeConfig& config,
                      std::uint64_t seed);

// Throws DimensionError when the sample width differs from `n_features`.
int predict_tree(const TrainedTree& tree, std::span<const double> sample);

}  // namespace drf
