#include "drf/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "drf/error.hpp"

namespace drf {

double kappa_from_coincidence(const linalg::Matrix& c) {
  const std::size_t t = c.rows();
  double pr_a = 0.0, pr_e = 0.0;
  for (std::size_t k = 0; k < t; ++k) {
    pr_a += c(k, k);
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < t; ++j) {
      row += c(k, j);
      col += c(j, k);
    }
    pr_e += row * col;
  }
  if (pr_e >= 1.0) return 1.0;
  return (pr_a - pr_e) / (1.0 - pr_e);
}

double kappa(std::span<const int> a, std::span<const int> b, int n_classes) {
  if (a.size() != b.size()) throw std::invalid_argument("kappa: prediction vectors differ in length");
  if (a.empty()) throw std::invalid_argument("kappa: empty prediction vectors");
  // Integer counts keep κ exactly symmetric and make the pr(e) = 1 test exact.
  const auto classes = static_cast<std::size_t>(n_classes);
  std::vector<std::uint64_t> rows(classes, 0), cols(classes, 0);
  std::uint64_t agree = 0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    ++rows[static_cast<std::size_t>(a[s])];
    ++cols[static_cast<std::size_t>(b[s])];
    if (a[s] == b[s]) ++agree;
  }
  const auto n = static_cast<std::uint64_t>(a.size());
  std::uint64_t chance = 0;
  for (std::size_t k = 0; k < classes; ++k) chance += rows[k] * cols[k];
  const std::uint64_t n2 = n * n;
  if (chance == n2) return 1.0;
  return (static_cast<double>(agree * n) - static_cast<double>(chance)) / static_cast<double>(n2 - chance);
}

std::vector<std::vector<int>> tree_predictions(const Forest& forest, const Dataset& dataset) {
  if (dataset.features() != forest.n_features())
    throw DimensionError("dataset has " + std::to_string(dataset.features()) + " features, model expects " +
                         std::to_string(forest.n_features()));
  std::vector<std::vector<int>> out(forest.trees.size(), std::vector<int>(dataset.rows()));
  for (std::size_t t = 0; t < forest.trees.size(); ++t)
    for (std::size_t s = 0; s < dataset.rows(); ++s) out[t][s] = predict_tree(forest.trees[t], dataset.row(s));
  return out;
}

KappaErrorDiagram kappa_error_diagram(const Forest& forest, const Dataset& test) {
  if (forest.trees.size() < 2) throw std::invalid_argument("kappa-error diagram needs at least two trees");
  const auto preds = tree_predictions(forest, test);
  const int n_classes = std::max(forest.n_classes(), test.n_classes());

  std::vector<double> errors(preds.size());
  for (std::size_t t = 0; t < preds.size(); ++t) {
    std::size_t wrong = 0;
    for (std::size_t s = 0; s < test.rows(); ++s) wrong += preds[t][s] != test.label(s);
    errors[t] = static_cast<double>(wrong) / static_cast<double>(test.rows());
  }

  KappaErrorDiagram d;
  d.points.reserve(preds.size() * (preds.size() - 1) / 2);
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t j = i + 1; j < preds.size(); ++j) {
      d.points.push_back({i, j, kappa(preds[i], preds[j], n_classes), 0.5 * (errors[i] + errors[j])});
      d.centroid_kappa += d.points.back().kappa;
      d.centroid_error += d.points.back().avg_error;
    }
  d.centroid_kappa /= static_cast<double>(d.points.size());
  d.centroid_error /= static_cast<double>(d.points.size());
  return d;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double to_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("malformed number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = line.find(sep, start)) != std::string_view::npos; start = pos + 1)
    out.push_back(line.substr(start, pos - start));
  out.push_back(line.substr(start));
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

std::string format_kappa_csv(const KappaErrorDiagram& d) {
  std::string out = "tree_i,tree_j,kappa,avg_error\n";
  for (const auto& p : d.points)
    out += std::to_string(p.tree_i) + "," + std::to_string(p.tree_j) + "," + fmt(p.kappa) + "," + fmt(p.avg_error) + "\n";
  out += "centroid,," + fmt(d.centroid_kappa) + "," + fmt(d.centroid_error) + "\n";
  return out;
}

KappaErrorDiagram parse_kappa_csv(std::string_view text) {
  auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "tree_i,tree_j,kappa,avg_error")
    throw DataError("kappa CSV: missing or unexpected header");
  KappaErrorDiagram d;
  bool have_centroid = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split(lines[i], ',');
    if (f.size() != 4) throw DataError("kappa CSV: expected 4 fields");
    if (f[0] == "centroid") {
      d.centroid_kappa = to_double(f[2]);
      d.centroid_error = to_double(f[3]);
      have_centroid = true;
      continue;
    }
    d.points.push_back({static_cast<std::size_t>(to_double(f[0])), static_cast<std::size_t>(to_double(f[1])),
                        to_double(f[2]), to_double(f[3])});
  }
  if (!have_centroid) throw DataError("kappa CSV: missing centroid row");
  return d;
}

// ---------------------------------------------------------------------------

BiasVarianceReport bias_variance_from_predictions(std::span<const std::vector<int>> model_predictions,
                                                  std::span<const int> truth, int n_classes) {
  if (model_predictions.size() < 2) throw std::invalid_argument("bias-variance needs at least two models");
  if (truth.empty()) throw std::invalid_argument("bias-variance: empty test set");
  const auto classes = static_cast<std::size_t>(n_classes);
  const double t = static_cast<double>(model_predictions.size());

  BiasVarianceReport r;
  r.repeats = model_predictions.size();
  // Integer votes keep the unanimous and evenly split cases exact.
  std::vector<std::size_t> votes(classes);
  std::size_t wrong = 0;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& preds : model_predictions) {
      if (preds.size() != truth.size()) throw std::invalid_argument("bias-variance: prediction length mismatch");
      ++votes[static_cast<std::size_t>(preds[s])];
      wrong += preds[s] != truth[s];
    }
    double bias = 0.0, agreement = 0.0;
    for (std::size_t y = 0; y < classes; ++y) {
      const double p_model = static_cast<double>(votes[y]) / t;
      const double p_target = static_cast<int>(y) == truth[s] ? 1.0 : 0.0;
      bias += (p_target - p_model) * (p_target - p_model);
      agreement += p_model * p_model;
    }
    r.bias_sq += 0.5 * bias;
    r.variance += 0.5 * (1.0 - agreement);
  }
  const double m = static_cast<double>(truth.size());
  r.bias_sq /= m;
  r.variance = std::max(r.variance / m, 0.0);
  r.error = static_cast<double>(wrong) / (m * t);
  return r;
}

BiasVarianceReport bias_variance(const Dataset& train, const Dataset& test, const ForestConfig& config,
                                 std::size_t repeats, std::uint64_t seed, std::size_t workers) {
  if (repeats < 2) throw std::invalid_argument("bias-variance needs repeats >= 2");
  if (test.features() != train.features())
    throw DimensionError("test set feature count differs from the training pool");
  const auto all = all_indices(train.rows());
  std::vector<std::vector<int>> predictions;
  predictions.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    const std::uint64_t replicate_seed = mix_seed(seed, r);
    Rng rng(mix_seed(replicate_seed, 0));
    const Dataset replicate = train.subset(bootstrap(all, rng));
    ForestConfig c = config;
    c.master_seed = mix_seed(replicate_seed, 1);
    predictions.push_back(evaluate(train_forest(replicate, c, workers), test).predictions);
  }
  return bias_variance_from_predictions(predictions, test.labels(), std::max(train.n_classes(), test.n_classes()));
}

std::string format_bias_variance(const BiasVarianceReport& r) {
  return "bias_sq=" + fmt(r.bias_sq) + "\nvariance=" + fmt(r.variance) + "\nerror=" + fmt(r.error) +
         "\nrepeats=" + std::to_string(r.repeats) + "\n";
}

BiasVarianceReport parse_bias_variance(std::string_view text) {
  BiasVarianceReport r;
  int seen = 0;
  for (auto line : lines_of(text)) {
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError("bias-variance report: expected key=value");
    auto key = line.substr(0, eq);
    auto value = to_double(line.substr(eq + 1));
    if (key == "bias_sq") {
      r.bias_sq = value;
    } else if (key == "variance") {
      r.variance = value;
    } else if (key == "error") {
      r.error = value;
    } else if (key == "repeats") {
      r.repeats = static_cast<std::size_t>(value);
    } else {
      throw DataError("bias-variance report: unknown key '" + std::string(key) + "'");
    }
    ++seen;
  }
  if (seen != 4) throw DataError("bias-variance report: expected 4 keys");
  return r;
}

// ---------------------------------------------------------------------------

NodeProfile node_profile(const Forest& forest) {
  NodeProfile p;
  if (forest.trees.empty()) return p;
  for (const auto& t : forest.trees) {
    p.node_counts.push_back(t.node_count);
    p.depths.push_back(t.depth);
  }
  const double l = static_cast<double>(forest.trees.size());
  p.mean_nodes = std::accumulate(p.node_counts.begin(), p.node_counts.end(), 0.0) / l;
  p.mean_depth = std::accumulate(p.depths.begin(), p.depths.end(), 0.0) / l;
  auto [nmin, nmax] = std::minmax_element(p.node_counts.begin(), p.node_counts.end());
  auto [dmin, dmax] = std::minmax_element(p.depths.begin(), p.depths.end());
  p.min_nodes = *nmin;
  p.max_nodes = *nmax;
  p.min_depth = *dmin;
  p.max_depth = *dmax;
  return p;
}

}  // namespace drf
