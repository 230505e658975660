#include "drf/model_io.hpp"

#include <fstream>
#include <sstream>

#include "drf/error.hpp"

namespace drf {

using nlohmann::json;

std::string_view routing_name(Routing r) { return r == Routing::bisector ? "bisector" : "proximity"; }

Routing parse_routing(std::string_view name) {
  if (name == "proximity") return Routing::proximity;
  if (name == "bisector") return Routing::bisector;
  throw std::invalid_argument("unknown routing '" + std::string(name) + "' (proximity, bisector)");
}

std::string_view fallback_name(FallbackScope f) { return f == FallbackScope::subtree ? "subtree" : "node"; }

FallbackScope parse_fallback(std::string_view name) {
  if (name == "node") return FallbackScope::node;
  if (name == "subtree") return FallbackScope::subtree;
  throw std::invalid_argument("unknown fallback scope '" + std::string(name) + "' (node, subtree)");
}

namespace {

json rule_to_json(const SplitRule& rule) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AxisRule>) {
          return {{"type", "axis"}, {"feature", r.feature}, {"threshold", r.threshold}};
        } else if constexpr (std::is_same_v<T, ObliqueRule>) {
          json j = {{"type", "oblique"},   {"features", r.features}, {"w_pos", r.w_pos},
                    {"b_pos", r.b_pos},    {"w_neg", r.w_neg},       {"b_neg", r.b_neg},
                    {"routing", routing_name(r.routing)}};
          if (r.routing == Routing::bisector) {
            j["w_bisector"] = r.w_bisector;
            j["b_bisector"] = r.b_bisector;
          }
          return j;
        } else {
          json rows = json::array();
          for (std::size_t i = 0; i < r.rotation.rows(); ++i) {
            auto row = r.rotation.row(i);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
          }
          return {{"type", "rotation"},
                  {"kind", r.kind == RotationKind::pca ? "pca" : "lda"},
                  {"features", r.features},
                  {"rotation", rows},
                  {"rotated_feature", r.rotated_feature},
                  {"threshold", r.threshold}};
        }
      },
      rule);
}

void check_features(const FeatureSubset& features, std::size_t n_features) {
  for (std::size_t f : features)
    if (f >= n_features) throw ModelError("feature index out of range in model");
}

SplitRule rule_from_json(const json& j, std::size_t n_features) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "axis") {
    AxisRule r{j.at("feature").get<std::size_t>(), j.at("threshold").get<double>()};
    if (r.feature >= n_features) throw ModelError("feature index out of range in model");
    return r;
  }
  if (type == "oblique") {
    ObliqueRule r;
    r.features = j.at("features").get<FeatureSubset>();
    r.w_pos = j.at("w_pos").get<std::vector<double>>();
    r.b_pos = j.at("b_pos").get<double>();
    r.w_neg = j.at("w_neg").get<std::vector<double>>();
    r.b_neg = j.at("b_neg").get<double>();
    r.routing = parse_routing(j.at("routing").get<std::string>());
    if (r.routing == Routing::bisector) {
      r.w_bisector = j.at("w_bisector").get<std::vector<double>>();
      r.b_bisector = j.at("b_bisector").get<double>();
      if (r.w_bisector.size() != r.features.size()) throw ModelError("bisector width mismatch");
    }
    check_features(r.features, n_features);
    if (r.w_pos.size() != r.features.size() || r.w_neg.size() != r.features.size())
      throw ModelError("oblique plane width mismatch");
    return r;
  }
  if (type == "rotation") {
    RotationRule r;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "pca" && kind != "lda") throw ModelError("unknown rotation kind '" + kind + "'");
    r.kind = kind == "pca" ? RotationKind::pca : RotationKind::lda;
    r.features = j.at("features").get<FeatureSubset>();
    check_features(r.features, n_features);
    const auto rows = j.at("rotation").get<std::vector<std::vector<double>>>();
    const std::size_t m = r.features.size();
    if (rows.size() != m) throw ModelError("rotation matrix size mismatch");
    r.rotation = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      if (rows[i].size() != m) throw ModelError("rotation matrix size mismatch");
      for (std::size_t k = 0; k < m; ++k) r.rotation(i, k) = rows[i][k];
    }
    r.rotated_feature = j.at("rotated_feature").get<std::size_t>();
    if (r.rotated_feature >= m) throw ModelError("rotated feature out of range");
    r.threshold = j.at("threshold").get<double>();
    return r;
  }
  throw ModelError("unknown split type '" + type + "'");
}

json tree_to_json(const TrainedTree& tree) {
  json nodes = json::array();
  for (const auto& node : tree.nodes) {
    if (const auto* leaf = std::get_if<LeafNode>(&node)) {
      nodes.push_back({{"type", "leaf"}, {"distribution", leaf->distribution}, {"class", leaf->predicted_class}});
    } else {
      const auto& internal = std::get<InternalNode>(node);
      json j = rule_to_json(internal.rule);
      j["left"] = internal.left;
      j["right"] = internal.right;
      nodes.push_back(std::move(j));
    }
  }
  return {{"seed", tree.seed}, {"node_count", tree.node_count}, {"depth", tree.depth}, {"nodes", std::move(nodes)}};
}

TrainedTree tree_from_json(const json& j, std::size_t n_features, int n_classes) {
  TrainedTree tree;
  tree.seed = j.at("seed").get<std::uint64_t>();
  tree.depth = j.at("depth").get<std::size_t>();
  tree.n_features = n_features;
  const auto& nodes = j.at("nodes");
  if (!nodes.is_array() || nodes.empty()) throw ModelError("tree has no nodes");
  for (const auto& n : nodes) {
    if (n.at("type").get<std::string>() == "leaf") {
      LeafNode leaf{n.at("distribution").get<std::vector<double>>(), n.at("class").get<int>()};
      if (leaf.distribution.size() != static_cast<std::size_t>(n_classes) || leaf.predicted_class < 0 ||
          leaf.predicted_class >= n_classes)
        throw ModelError("leaf does not match the class table");
      tree.nodes.emplace_back(std::move(leaf));
    } else {
      InternalNode internal{rule_from_json(n, n_features), n.at("left").get<std::size_t>(),
                            n.at("right").get<std::size_t>()};
      tree.nodes.emplace_back(std::move(internal));
    }
  }
  // Children always follow their parent in pre-order.
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (const auto* internal = std::get_if<InternalNode>(&tree.nodes[i])) {
      if (internal->left <= i || internal->right <= i || internal->left >= tree.nodes.size() ||
          internal->right >= tree.nodes.size())
        throw ModelError("invalid child index in tree");
    }
  }
  tree.node_count = tree.nodes.size();
  if (j.at("node_count").get<std::size_t>() != tree.node_count) throw ModelError("node_count mismatch");
  return tree;
}

}  // namespace

json model_to_json(const Forest& forest) {
  const TreeConfig& t = forest.config.tree;
  json config = {{"n_trees", forest.config.n_trees},
                 {"master_seed", forest.config.master_seed},
                 {"mtry", t.mtry ? json(*t.mtry) : json(nullptr)},
                 {"minleaf", t.minleaf},
                 {"node_bootstrap_fraction", t.node_bootstrap_fraction},
                 {"max_depth", t.max_depth},
                 {"routing", routing_name(t.routing)},
                 {"fallback", fallback_name(t.fallback)},
                 {"tikhonov_scale", t.tikhonov_scale},
                 {"covariance_eps", t.covariance_eps}};
  json trees = json::array();
  for (const auto& tree : forest.trees) trees.push_back(tree_to_json(tree));
  return {{"format_version", kModelFormatVersion},
          {"variant", variant_name(t.variant)},
          {"config", std::move(config)},
          {"class_names", forest.class_names},
          {"feature_names", forest.feature_names},
          {"trees", std::move(trees)}};
}

Forest model_from_json(const json& doc) {
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw ModelError("unsupported model format_version " + std::to_string(version));
    Forest forest;
    const auto& c = doc.at("config");
    TreeConfig& t = forest.config.tree;
    t.variant = parse_variant(doc.at("variant").get<std::string>());
    forest.config.n_trees = c.at("n_trees").get<std::size_t>();
    forest.config.master_seed = c.at("master_seed").get<std::uint64_t>();
    if (!c.at("mtry").is_null()) t.mtry = c.at("mtry").get<std::size_t>();
    t.minleaf = c.at("minleaf").get<std::size_t>();
    t.node_bootstrap_fraction = c.at("node_bootstrap_fraction").get<double>();
    t.max_depth = c.at("max_depth").get<std::size_t>();
    t.routing = parse_routing(c.at("routing").get<std::string>());
    t.fallback = parse_fallback(c.at("fallback").get<std::string>());
    t.tikhonov_scale = c.at("tikhonov_scale").get<double>();
    t.covariance_eps = c.at("covariance_eps").get<double>();
    forest.class_names = doc.at("class_names").get<std::vector<std::string>>();
    forest.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    if (forest.class_names.empty() || forest.feature_names.empty())
      throw ModelError("model has an empty class or feature table");
    for (const auto& tj : doc.at("trees"))
      forest.trees.push_back(tree_from_json(tj, forest.n_features(), forest.n_classes()));
    if (forest.trees.size() != forest.config.n_trees) throw ModelError("tree count does not match n_trees");
    return forest;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  } catch (const UnknownVariantError& e) {
    throw ModelError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(e.what());
  }
}

std::string serialize_model(const Forest& forest) { return model_to_json(forest).dump() + "\n"; }

Forest deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("model is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

void save_model(const std::filesystem::path& path, const Forest& forest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
  out << serialize_model(forest);
  if (!out.flush()) throw std::ios_base::failure("write to '" + path.string() + "' failed");
}

Forest load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace drf
