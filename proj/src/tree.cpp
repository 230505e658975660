#include "drf/tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "drf/error.hpp"

namespace drf {

namespace {

struct VariantInfo {
  Variant variant;
  std::string_view name;
  bool is_double;
  SplitFamily family;
  MpsvmRegularization reg;
  Variant counterpart;
};

constexpr VariantInfo kVariantTable[] = {
    {Variant::raf, "raf", false, SplitFamily::axis, MpsvmRegularization::parallel, Variant::draf},
    {Variant::draf, "draf", true, SplitFamily::axis, MpsvmRegularization::parallel, Variant::raf},
    {Variant::mpraf_t, "mpraf-t", false, SplitFamily::mpsvm, MpsvmRegularization::tikhonov, Variant::mpdraf_t},
    {Variant::mpraf_p, "mpraf-p", false, SplitFamily::mpsvm, MpsvmRegularization::parallel, Variant::mpdraf_p},
    {Variant::mpraf_n, "mpraf-n", false, SplitFamily::mpsvm, MpsvmRegularization::nullspace, Variant::mpdraf_n},
    {Variant::mpdraf_t, "mpdraf-t", true, SplitFamily::mpsvm, MpsvmRegularization::tikhonov, Variant::mpraf_t},
    {Variant::mpdraf_p, "mpdraf-p", true, SplitFamily::mpsvm, MpsvmRegularization::parallel, Variant::mpraf_p},
    {Variant::mpdraf_n, "mpdraf-n", true, SplitFamily::mpsvm, MpsvmRegularization::nullspace, Variant::mpraf_n},
    {Variant::raf_pca, "raf-pca", false, SplitFamily::pca, MpsvmRegularization::parallel, Variant::draf_pca},
    {Variant::raf_lda, "raf-lda", false, SplitFamily::lda, MpsvmRegularization::parallel, Variant::draf_lda},
    {Variant::draf_pca, "draf-pca", true, SplitFamily::pca, MpsvmRegularization::parallel, Variant::raf_pca},
    {Variant::draf_lda, "draf-lda", true, SplitFamily::lda, MpsvmRegularization::parallel, Variant::raf_lda},
};

const VariantInfo& info(Variant v) {
  for (const auto& e : kVariantTable)
    if (e.variant == v) return e;
  throw UnknownVariantError("unknown variant enumerator");
}

}  // namespace

std::string_view variant_name(Variant v) { return info(v).name; }

std::string valid_variant_list() {
  std::string out;
  for (Variant v : kAllVariants) {
    if (!out.empty()) out += ", ";
    out += variant_name(v);
  }
  return out;
}

Variant parse_variant(std::string_view name) {
  for (const auto& e : kVariantTable)
    if (e.name == name) return e.variant;
  throw UnknownVariantError("unknown variant '" + std::string(name) + "'; valid variants: " + valid_variant_list());
}

bool is_double(Variant v) { return info(v).is_double; }
SplitFamily split_family(Variant v) { return info(v).family; }
MpsvmRegularization mpsvm_regularization(Variant v) { return info(v).reg; }
Variant counterpart(Variant v) { return info(v).counterpart; }

void TreeConfig::validate() const {
  if (minleaf < 1) throw std::invalid_argument("minleaf must be >= 1");
  if (!(node_bootstrap_fraction > 0.0 && node_bootstrap_fraction <= 1.0))
    throw std::invalid_argument("node_bootstrap_fraction must lie in (0, 1]");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (mtry && *mtry < 1) throw std::invalid_argument("mtry must be >= 1");
}

std::size_t TreeConfig::resolved_mtry(std::size_t n_features) const {
  return std::min(mtry.value_or(default_mtry(n_features)), n_features);
}

const LeafNode& TrainedTree::leaf_for(std::span<const double> sample) const {
  if (sample.size() != n_features)
    throw DimensionError("sample has " + std::to_string(sample.size()) + " features, tree expects " +
                         std::to_string(n_features));
  std::size_t at = 0;
  while (const auto* internal = std::get_if<InternalNode>(&nodes[at]))
    at = goes_left(internal->rule, sample) ? internal->left : internal->right;
  return std::get<LeafNode>(nodes[at]);
}

int predict_tree(const TrainedTree& tree, std::span<const double> sample) {
  return tree.leaf_for(sample).predicted_class;
}

namespace {

struct PendingNode {
  std::vector<std::size_t> indices;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
  std::size_t parent = 0;
  bool is_left = false;
  bool axis_only = false;
};

LeafNode make_leaf(const std::vector<std::size_t>& counts, std::size_t total) {
  LeafNode leaf;
  leaf.distribution.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    leaf.distribution[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  leaf.predicted_class = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  return leaf;
}

std::optional<SplitOutcome> find_split(const NodeSample& node, std::span<const std::size_t> features,
                                       const TreeConfig& config, bool axis_only) {
  const SplitFamily family = split_family(config.variant);
  if (axis_only || family == SplitFamily::axis) return axis_split(node, features);

  SplitOptions options{config.routing, config.tikhonov_scale, config.covariance_eps};
  try {
    switch (family) {
      case SplitFamily::mpsvm: {
        auto grouping = group_classes(class_gaussians(node.x, node.y, config.covariance_eps));
        return mpsvm_split(node, features, grouping, mpsvm_regularization(config.variant), options);
      }
      case SplitFamily::pca:
        return pca_rotation_split(node, features);
      case SplitFamily::lda:
        return lda_rotation_split(node, features, options);
      case SplitFamily::axis:
        break;
    }
  } catch (const LinalgError&) {
    auto o = axis_split(node, features);
    if (o) o->fallback_used = true;
    return o;
  }
  return axis_split(node, features);
}

}  // namespace

TrainedTree grow_tree(const Dataset& dataset, std::span<const std::size_t> root_indices, const TreeConfig& config,
                      std::uint64_t seed) {
  config.validate();
  if (root_indices.empty()) throw std::invalid_argument("grow_tree: empty root sample");

  TrainedTree tree;
  tree.seed = seed;
  tree.n_features = dataset.features();
  const std::size_t mtry = config.resolved_mtry(dataset.features());
  const double bootstrap_floor = static_cast<double>(dataset.rows()) * config.node_bootstrap_fraction;
  const bool double_variant = is_double(config.variant);

  std::vector<PendingNode> stack;
  stack.push_back({std::vector<std::size_t>(root_indices.begin(), root_indices.end()), 0, seed, 0, false, false});

  while (!stack.empty()) {
    PendingNode task = std::move(stack.back());
    stack.pop_back();

    const std::size_t self = tree.nodes.size();
    if (self > 0) {
      auto& parent = std::get<InternalNode>(tree.nodes[task.parent]);
      (task.is_left ? parent.left : parent.right) = self;
    }
    tree.depth = std::max(tree.depth, task.depth);

    std::vector<std::size_t> counts(static_cast<std::size_t>(dataset.n_classes()), 0);
    for (std::size_t i : task.indices) ++counts[static_cast<std::size_t>(dataset.label(i))];
    const auto present = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
    const std::size_t size = task.indices.size();

    auto emit_leaf = [&]() { tree.nodes.emplace_back(make_leaf(counts, size)); };

    if (present <= 1 || size <= config.minleaf || task.depth >= config.max_depth) {
      emit_leaf();
      continue;
    }

    Rng rng(task.seed);
    std::vector<std::size_t> search_rows;
    if (double_variant && static_cast<double>(size) > bootstrap_floor) {
      search_rows = bootstrap(task.indices, rng);
    } else {
      search_rows = task.indices;
    }
    const FeatureSubset features = sample_feature_subset(dataset.features(), mtry, rng);
    const NodeSample node = gather(dataset, search_rows, features);

    const auto node_counts = class_counts(node.y, node.n_classes);
    const bool searchable = std::count_if(node_counts.begin(), node_counts.end(), [](std::size_t c) { return c > 0; }) >= 2;
    auto outcome = searchable ? find_split(node, features, config, task.axis_only) : std::nullopt;
    if (!outcome) {
      emit_leaf();
      continue;
    }

    // Route the original node samples, not the bootstrap copies.
    std::vector<std::size_t> left, right;
    for (std::size_t i : task.indices) (goes_left(outcome->rule, dataset.row(i)) ? left : right).push_back(i);
    if (left.empty() || right.empty()) {
      emit_leaf();
      continue;
    }

    const bool child_axis_only = task.axis_only || (outcome->fallback_used && config.fallback == FallbackScope::subtree &&
                                                    split_family(config.variant) == SplitFamily::mpsvm);
    tree.nodes.emplace_back(InternalNode{std::move(outcome->rule), 0, 0});
    stack.push_back({std::move(right), task.depth + 1, mix_seed(task.seed, 2), self, false, child_axis_only});
    stack.push_back({std::move(left), task.depth + 1, mix_seed(task.seed, 1), self, true, child_axis_only});
  }
  tree.node_count = tree.nodes.size();
  return tree;
}

}  // namespace drf
