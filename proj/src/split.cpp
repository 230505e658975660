#include "drf/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "drf/error.hpp"

namespace drf {

NodeSample gather(const Dataset& data, std::span<const std::size_t> rows, std::span<const std::size_t> features) {
  NodeSample node;
  node.x = Matrix(rows.size(), features.size());
  node.y.reserve(rows.size());
  node.n_classes = data.n_classes();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) node.x(i, j) = data.at(rows[i], features[j]);
    node.y.push_back(data.label(rows[i]));
  }
  return node;
}

std::vector<std::size_t> class_counts(std::span<const int> labels, int n_classes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

double gini_impurity(std::span<const std::size_t> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) throw std::invalid_argument("gini_impurity: empty node");
  double sumsq = 0.0;
  for (std::size_t c : counts) sumsq += static_cast<double>(c) * static_cast<double>(c);
  return 1.0 - sumsq / (total * total);
}

double partition_impurity(std::span<const int> labels, std::span<const char> goes_left, int n_classes) {
  std::vector<std::size_t> left(static_cast<std::size_t>(n_classes), 0), right(left);
  std::size_t nl = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (goes_left[i]) {
      ++left[static_cast<std::size_t>(labels[i])];
      ++nl;
    } else {
      ++right[static_cast<std::size_t>(labels[i])];
    }
  }
  const std::size_t nr = labels.size() - nl;
  const double n = static_cast<double>(labels.size());
  double out = 0.0;
  if (nl > 0) out += static_cast<double>(nl) / n * gini_impurity(left);
  if (nr > 0) out += static_cast<double>(nr) / n * gini_impurity(right);
  return out;
}

// ---------------------------------------------------------------------------

double rotated_value(const Matrix& rotation, std::size_t column, std::span<const double> local) {
  double z = 0.0;
  for (std::size_t j = 0; j < local.size(); ++j) z += local[j] * rotation(j, column);
  return z;
}

bool goes_left_local(const ObliqueRule& rule, std::span<const double> local) {
  if (rule.routing == Routing::bisector) {
    return linalg::dot(local, rule.w_bisector) - rule.b_bisector <= 0.0;
  }
  const double d_pos = std::abs(linalg::dot(local, rule.w_pos) - rule.b_pos);
  const double d_neg = std::abs(linalg::dot(local, rule.w_neg) - rule.b_neg);
  return d_pos <= d_neg;
}

namespace {

std::vector<double> local_values(std::span<const std::size_t> features, std::span<const double> sample) {
  std::vector<double> out(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) out[j] = sample[features[j]];
  return out;
}

struct LeftRightCounts {
  std::size_t left = 0;
  std::size_t right = 0;
};

LeftRightCounts count_sides(std::span<const char> goes_left) {
  LeftRightCounts c;
  for (char g : goes_left) (g ? c.left : c.right)++;
  return c;
}

}  // namespace

bool goes_left(const SplitRule& rule, std::span<const double> sample) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AxisRule>) {
          return sample[r.feature] <= r.threshold;
        } else if constexpr (std::is_same_v<T, ObliqueRule>) {
          return goes_left_local(r, local_values(r.features, sample));
        } else {
          return rotated_value(r.rotation, r.rotated_feature, local_values(r.features, sample)) <= r.threshold;
        }
      },
      rule);
}

// ---------------------------------------------------------------------------

std::optional<AxisCandidate> best_axis_split(const Matrix& x, std::span<const int> y, int n_classes) {
  const std::size_t n = x.rows();
  if (n < 2) return std::nullopt;
  const auto total = class_counts(y, n_classes);
  double total_sumsq = 0.0;
  for (std::size_t c : total) total_sumsq += static_cast<double>(c) * static_cast<double>(c);

  std::optional<AxisCandidate> best;
  std::vector<std::size_t> order(n);
  std::vector<double> left(total.size());
  for (std::size_t col = 0; col < x.cols(); ++col) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, col) < x(b, col); });
    std::fill(left.begin(), left.end(), 0.0);
    double sumsq_left = 0.0;
    double sumsq_right = total_sumsq;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto k = static_cast<std::size_t>(y[order[i]]);
      const double right_k = static_cast<double>(total[k]) - left[k];
      sumsq_left += 2.0 * left[k] + 1.0;
      sumsq_right -= 2.0 * right_k - 1.0;
      left[k] += 1.0;

      const double lo = x(order[i], col);
      const double hi = x(order[i + 1], col);
      if (!(lo < hi)) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = static_cast<double>(n - i - 1);
      // Σ_child n_c (1 - Σ p²) / n
      const double impurity = ((nl - sumsq_left / nl) + (nr - sumsq_right / nr)) / static_cast<double>(n);
      if (!best || impurity < best->impurity) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = AxisCandidate{col, threshold, std::max(impurity, 0.0), i + 1, n - i - 1};
      }
    }
  }
  return best;
}

std::optional<SplitOutcome> axis_split(const NodeSample& node, std::span<const std::size_t> features) {
  auto cand = best_axis_split(node.x, node.y, node.n_classes);
  if (!cand) return std::nullopt;
  return SplitOutcome{AxisRule{features[cand->column], cand->threshold}, cand->impurity, cand->left_count,
                      cand->right_count, false};
}

// ---------------------------------------------------------------------------

std::map<int, ClassGaussian> class_gaussians(const Matrix& x, std::span<const int> y, double reg_eps) {
  const std::size_t m = x.cols();
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);

  std::map<int, ClassGaussian> out;
  for (const auto& [cls, rows] : members) {
    ClassGaussian g;
    g.count = rows.size();
    g.mean.assign(m, 0.0);
    for (std::size_t r : rows)
      for (std::size_t j = 0; j < m; ++j) g.mean[j] += x(r, j);
    for (double& v : g.mean) v /= static_cast<double>(rows.size());

    g.covariance = Matrix(m, m);
    for (std::size_t r : rows)
      for (std::size_t a = 0; a < m; ++a) {
        const double da = x(r, a) - g.mean[a];
        for (std::size_t b = a; b < m; ++b) g.covariance(a, b) += da * (x(r, b) - g.mean[b]);
      }
    const double denom = static_cast<double>(std::max<std::size_t>(rows.size() - 1, 1));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) {
        g.covariance(a, b) /= denom;
        g.covariance(b, a) = g.covariance(a, b);
      }
    const double eps = reg_eps * std::max(g.covariance.trace() / static_cast<double>(m), 1.0);
    for (std::size_t a = 0; a < m; ++a) g.covariance(a, a) += eps;
    out.emplace(cls, std::move(g));
  }
  return out;
}

double bhattacharyya(const ClassGaussian& g1, const ClassGaussian& g2) {
  const Matrix avg = 0.5 * (g1.covariance + g2.covariance);
  auto lower = linalg::cholesky(avg);
  if (!lower) throw LinalgError("bhattacharyya: average covariance is singular");
  std::vector<double> diff(g1.mean.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = g2.mean[j] - g1.mean[j];
  const double mahalanobis = linalg::dot(diff, linalg::cholesky_solve(*lower, diff));

  double log_det_avg = 0.0;
  for (std::size_t i = 0; i < lower->rows(); ++i) log_det_avg += 2.0 * std::log((*lower)(i, i));
  const double log_det_1 = linalg::log_det_psd(g1.covariance);
  const double log_det_2 = linalg::log_det_psd(g2.covariance);

  const double value = mahalanobis / 8.0 + 0.5 * (log_det_avg - 0.5 * (log_det_1 + log_det_2));
  return std::max(value, 0.0);
}

BinaryGrouping group_classes(const std::map<int, ClassGaussian>& gaussians) {
  if (gaussians.size() < 2) throw std::invalid_argument("group_classes: need at least two classes");
  std::vector<int> classes;
  std::vector<const ClassGaussian*> models;
  for (const auto& [cls, g] : gaussians) {
    classes.push_back(cls);
    models.push_back(&g);
  }
  if (classes.size() == 2) return {{classes[0]}, {classes[1]}};

  const std::size_t c = classes.size();
  Matrix dist(c, c);
  std::size_t seed_p = 0, seed_n = 1;
  double best = -1.0;
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t k = j + 1; k < c; ++k) {
      const double d = bhattacharyya(*models[j], *models[k]);
      dist(j, k) = dist(k, j) = d;
      if (d > best) {
        best = d;
        seed_p = j;
        seed_n = k;
      }
    }

  BinaryGrouping out;
  for (std::size_t k = 0; k < c; ++k) {
    if (k == seed_p) {
      out.positive.push_back(classes[k]);
    } else if (k == seed_n) {
      out.negative.push_back(classes[k]);
    } else if (dist(k, seed_p) < dist(k, seed_n)) {
      out.positive.push_back(classes[k]);
    } else {
      out.negative.push_back(classes[k]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

MpsvmMatrices mpsvm_matrices(const NodeSample& node, const BinaryGrouping& grouping) {
  const std::size_t m = node.x.cols();
  std::vector<char> positive(static_cast<std::size_t>(node.n_classes), 0);
  for (int c : grouping.positive) positive[static_cast<std::size_t>(c)] = 1;

  MpsvmMatrices out{Matrix(m + 1, m + 1), Matrix(m + 1, m + 1)};
  std::vector<double> augmented(m + 1);
  for (std::size_t i = 0; i < node.x.rows(); ++i) {
    auto row = node.x.row(i);
    std::copy(row.begin(), row.end(), augmented.begin());
    augmented[m] = -1.0;
    Matrix& target = positive[static_cast<std::size_t>(node.y[i])] ? out.p : out.q;
    for (std::size_t a = 0; a <= m; ++a)
      for (std::size_t b = a; b <= m; ++b) target(a, b) += augmented[a] * augmented[b];
  }
  for (Matrix* mat : {&out.p, &out.q})
    for (std::size_t a = 0; a <= m; ++a)
      for (std::size_t b = 0; b < a; ++b) (*mat)(a, b) = (*mat)(b, a);
  return out;
}

namespace {

struct Plane {
  std::vector<double> w;
  double b = 0.0;
};

// Splits r = [w; b] and scales it so ‖w‖ = 1; nullopt if w vanishes.
std::optional<Plane> to_plane(std::span<const double> r) {
  const std::size_t m = r.size() - 1;
  Plane p{std::vector<double>(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(m)), r[m]};
  const double wn = linalg::norm2(p.w);
  if (!(wn > 1e-12 * linalg::norm2(r))) return std::nullopt;
  for (double& v : p.w) v /= wn;
  p.b /= wn;
  return p;
}

std::vector<char> route_all(const ObliqueRule& rule, const Matrix& x) {
  std::vector<char> left(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) left[i] = goes_left_local(rule, x.row(i)) ? 1 : 0;
  return left;
}

}  // namespace

std::optional<SplitOutcome> mpsvm_split(const NodeSample& node, std::span<const std::size_t> features,
                                        const BinaryGrouping& grouping, MpsvmRegularization reg,
                                        const SplitOptions& options) {
  if (grouping.positive.empty() || grouping.negative.empty())
    throw std::invalid_argument("mpsvm_split: a class group is empty");

  auto fallback = [&]() {
    auto o = axis_split(node, features);
    if (o) o->fallback_used = true;
    return o;
  };

  const auto [p, q] = mpsvm_matrices(node, grouping);
  linalg::Regularization lreg;
  switch (reg) {
    case MpsvmRegularization::parallel:
      if (!linalg::cholesky(p) || !linalg::cholesky(q)) return fallback();
      lreg = linalg::Regularization::none();
      break;
    case MpsvmRegularization::tikhonov:
      lreg = linalg::Regularization::tikhonov_relative(options.tikhonov_scale);
      break;
    case MpsvmRegularization::nullspace:
      lreg = linalg::Regularization::nullspace();
      break;
  }

  linalg::RayleighPair planes;
  try {
    planes = linalg::solve_generalized_rayleigh(p, q, lreg);
  } catch (const LinalgError&) {
    return fallback();
  }
  auto plane_pos = to_plane(planes.min.vector);
  auto plane_neg = to_plane(planes.max.vector);
  if (!plane_pos || !plane_neg) return fallback();

  ObliqueRule rule;
  rule.features.assign(features.begin(), features.end());
  rule.w_pos = plane_pos->w;
  rule.b_pos = plane_pos->b;
  rule.w_neg = plane_neg->w;
  rule.b_neg = plane_neg->b;
  rule.routing = options.routing;

  std::vector<char> left;
  if (options.routing == Routing::bisector) {
    // Both angle bisectors; keep the purer valid one (first on ties).
    std::optional<double> best_impurity;
    for (double sign : {1.0, -1.0}) {
      std::vector<double> r(rule.w_pos.size() + 1);
      for (std::size_t j = 0; j < rule.w_pos.size(); ++j) r[j] = rule.w_pos[j] + sign * rule.w_neg[j];
      r.back() = rule.b_pos + sign * rule.b_neg;
      auto bis = to_plane(r);
      if (!bis) continue;
      ObliqueRule trial = rule;
      trial.w_bisector = bis->w;
      trial.b_bisector = bis->b;
      auto trial_left = route_all(trial, node.x);
      auto sides = count_sides(trial_left);
      if (sides.left == 0 || sides.right == 0) continue;
      const double imp = partition_impurity(node.y, trial_left, node.n_classes);
      if (!best_impurity || imp < *best_impurity) {
        best_impurity = imp;
        rule.w_bisector = trial.w_bisector;
        rule.b_bisector = trial.b_bisector;
        left = std::move(trial_left);
      }
    }
    if (!best_impurity) return fallback();
  } else {
    left = route_all(rule, node.x);
  }

  auto sides = count_sides(left);
  if (sides.left == 0 || sides.right == 0) return fallback();
  const double impurity = partition_impurity(node.y, left, node.n_classes);
  return SplitOutcome{std::move(rule), impurity, sides.left, sides.right, false};
}

// ---------------------------------------------------------------------------

Matrix rotate(const Matrix& x, const Matrix& rotation) {
  Matrix z(x.rows(), rotation.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < rotation.cols(); ++k) z(i, k) = rotated_value(rotation, k, x.row(i));
  return z;
}

namespace {

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
  for (double& v : mean) v /= static_cast<double>(x.rows());
  return mean;
}

void add_outer(Matrix& target, std::span<const double> v, double weight = 1.0) {
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = 0; b < v.size(); ++b) target(a, b) += weight * v[a] * v[b];
}

Directions descending(std::vector<linalg::EigenPair> pairs, std::size_t m) {
  std::reverse(pairs.begin(), pairs.end());
  Directions d{Matrix(m, m), {}};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    d.values.push_back(pairs[k].value);
    for (std::size_t j = 0; j < m; ++j) d.rotation(j, k) = pairs[k].vector[j];
  }
  return d;
}

std::optional<SplitOutcome> rotation_outcome(const NodeSample& node, std::span<const std::size_t> features,
                                             Matrix rotation, RotationKind kind) {
  const Matrix z = rotate(node.x, rotation);
  auto cand = best_axis_split(z, node.y, node.n_classes);
  if (!cand) return std::nullopt;
  RotationRule rule{FeatureSubset(features.begin(), features.end()), std::move(rotation), cand->column,
                    cand->threshold, kind};
  return SplitOutcome{std::move(rule), cand->impurity, cand->left_count, cand->right_count, false};
}

}  // namespace

std::optional<Directions> pca_directions(const Matrix& x) {
  const std::size_t m = x.cols();
  if (x.rows() == 0) return std::nullopt;
  const auto mean = column_means(x);
  Matrix scatter(m, m);
  std::vector<double> centered(m);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) centered[j] = x(i, j) - mean[j];
    add_outer(scatter, centered);
  }
  if (!(scatter.trace() > 0.0)) return std::nullopt;
  return descending(linalg::sym_eig(scatter), m);
}

std::optional<LdaDirections> lda_directions(const Matrix& x, std::span<const int> y, int n_classes,
                                            double tikhonov_scale) {
  const std::size_t m = x.cols();
  if (x.rows() == 0) return std::nullopt;
  const auto mean = column_means(x);

  std::vector<std::vector<double>> class_mean(static_cast<std::size_t>(n_classes), std::vector<double>(m, 0.0));
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto k = static_cast<std::size_t>(y[i]);
    ++counts[k];
    for (std::size_t j = 0; j < m; ++j) class_mean[k][j] += x(i, j);
  }
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] > 0)
      for (double& v : class_mean[k]) v /= static_cast<double>(counts[k]);

  Matrix within(m, m), between(m, m);
  std::vector<double> d(m);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto k = static_cast<std::size_t>(y[i]);
    for (std::size_t j = 0; j < m; ++j) d[j] = x(i, j) - class_mean[k][j];
    add_outer(within, d);
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    for (std::size_t j = 0; j < m; ++j) d[j] = class_mean[k][j] - mean[j];
    add_outer(between, d, static_cast<double>(counts[k]));
  }
  within = linalg::symmetrize(within);
  between = linalg::symmetrize(between);
  const double total_trace = within.trace() + between.trace();
  if (!(total_trace > 0.0)) return std::nullopt;

  if (!linalg::cholesky(within)) {
    double base = within.trace() / static_cast<double>(m);
    if (!(base > 0.0)) base = total_trace / static_cast<double>(m);
    const double delta = tikhonov_scale * base;
    within = within + delta * Matrix::identity(m);
    if (!linalg::cholesky(within)) return std::nullopt;
  }
  LdaDirections out;
  static_cast<Directions&>(out) = descending(linalg::generalized_sym_eig(between, within), m);
  out.within = std::move(within);
  out.between = std::move(between);
  return out;
}

std::optional<SplitOutcome> pca_rotation_split(const NodeSample& node, std::span<const std::size_t> features) {
  auto dirs = pca_directions(node.x);
  if (!dirs) return std::nullopt;
  return rotation_outcome(node, features, std::move(dirs->rotation), RotationKind::pca);
}

std::optional<SplitOutcome> lda_rotation_split(const NodeSample& node, std::span<const std::size_t> features,
                                               const SplitOptions& options) {
  auto dirs = lda_directions(node.x, node.y, node.n_classes, options.tikhonov_scale);
  if (!dirs) return std::nullopt;
  return rotation_outcome(node, features, std::move(dirs->rotation), RotationKind::lda);
}

}  // namespace drf
