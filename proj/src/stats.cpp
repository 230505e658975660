#include "drf/stats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "drf/error.hpp"

namespace drf::stats {

RankTable rank_accuracies(const linalg::Matrix& table, std::vector<std::string> model_names, bool higher_is_better) {
  const std::size_t n = table.rows(), k = table.cols();
  if (n < 2 || k < 2) throw StatsError("ranking needs at least 2 datasets and 2 models");
  if (model_names.empty()) {
    for (std::size_t j = 0; j < k; ++j) model_names.push_back("m" + std::to_string(j));
  }
  if (model_names.size() != k) throw StatsError("model name count does not match table width");

  RankTable out{std::move(model_names), linalg::Matrix(n, k), std::vector<double>(k, 0.0)};
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      if (!std::isfinite(table(i, j))) throw StatsError("non-finite entry in accuracy table");
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return higher_is_better ? table(i, a) > table(i, b) : table(i, a) < table(i, b);
    });
    for (std::size_t start = 0; start < k;) {
      std::size_t end = start + 1;
      while (end < k && table(i, order[end]) == table(i, order[start])) ++end;
      const double rank = 0.5 * static_cast<double>(start + 1 + end);
      for (std::size_t p = start; p < end; ++p) out.ranks(i, order[p]) = rank;
      start = end;
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) out.avg_ranks[j] += out.ranks(i, j);
    out.avg_ranks[j] /= static_cast<double>(n);
  }
  return out;
}

FriedmanResult friedman(const std::vector<double>& avg_ranks, std::size_t n_datasets) {
  const std::size_t k = avg_ranks.size();
  if (k < 2 || n_datasets < 2) throw StatsError("Friedman test needs K >= 2 and N >= 2");
  const double kd = static_cast<double>(k), nd = static_cast<double>(n_datasets);
  double sum_sq = 0.0;
  for (double r : avg_ranks) sum_sq += r * r;
  FriedmanResult out;
  out.chi2_f = std::max(0.0, 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0));
  out.df1 = k - 1;
  out.df2 = (k - 1) * (n_datasets - 1);
  const double denom = nd * (kd - 1.0) - out.chi2_f;
  if (denom > 1e-12 * nd * kd) out.f_f = (nd - 1.0) * out.chi2_f / denom;
  return out;
}

FriedmanResult friedman(const RankTable& table) { return friedman(table.avg_ranks, table.ranks.rows()); }

double nemenyi_cd(std::size_t k, std::size_t n, double q_alpha) {
  if (k < 2 || n < 2) throw StatsError("critical difference needs K >= 2 and N >= 2");
  if (!(q_alpha > 0.0)) throw StatsError("q_alpha must be positive");
  const double kd = static_cast<double>(k);
  return q_alpha * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

double q_alpha_005(std::size_t k) {
  static constexpr std::array<double, 19> table = {1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031,
                                                   3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391,
                                                   3.426, 3.458, 3.489, 3.517, 3.544};
  if (k < 2 || k > 20) throw StatsError("no built-in q_alpha for K=" + std::to_string(k) + " (supported 2..20)");
  return table[k - 2];
}

std::vector<std::vector<bool>> pairwise_significance(const std::vector<double>& avg_ranks, double cd) {
  const std::size_t k = avg_ranks.size();
  std::vector<std::vector<bool>> flags(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) flags[i][j] = flags[j][i] = std::abs(avg_ranks[i] - avg_ranks[j]) >= cd;
  return flags;
}

TestReport compare(const std::vector<double>& avg_ranks, std::size_t n_datasets, std::vector<std::string> model_names,
                   std::optional<double> q_alpha) {
  const std::size_t k = avg_ranks.size();
  if (model_names.empty()) {
    for (std::size_t j = 0; j < k; ++j) model_names.push_back("m" + std::to_string(j));
  }
  if (model_names.size() != k) throw StatsError("model name count does not match rank vector");
  TestReport r;
  r.model_names = std::move(model_names);
  r.avg_ranks = avg_ranks;
  r.n_datasets = n_datasets;
  r.friedman = friedman(avg_ranks, n_datasets);
  r.q_alpha = q_alpha ? *q_alpha : q_alpha_005(k);
  r.cd = nemenyi_cd(k, n_datasets, r.q_alpha);
  r.pairwise_significant = pairwise_significance(avg_ranks, r.cd);
  return r;
}

nlohmann::json report_to_json(const TestReport& r) {
  nlohmann::json pairwise = nlohmann::json::array();
  for (const auto& row : r.pairwise_significant) pairwise.push_back(std::vector<bool>(row.begin(), row.end()));
  return {{"models", r.model_names},
          {"avg_ranks", r.avg_ranks},
          {"n_datasets", r.n_datasets},
          {"chi2_f", r.friedman.chi2_f},
          {"f_f", r.friedman.f_f ? nlohmann::json(*r.friedman.f_f) : nlohmann::json(nullptr)},
          {"df1", r.friedman.df1},
          {"df2", r.friedman.df2},
          {"q_alpha", r.q_alpha},
          {"cd", r.cd},
          {"pairwise_significant", std::move(pairwise)}};
}

double sign_test_threshold(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
  const double nd = static_cast<double>(n);
  return nd / 2.0 + z * std::sqrt(nd) / 2.0;
}

SignTestResult sign_test(long wins, long ties, long losses, double alpha) {
  if (wins < 0 || ties < 0 || losses < 0) throw std::invalid_argument("sign test counts must be non-negative");
  const long n = wins + ties + losses;
  if (n < 1) throw std::invalid_argument("sign test needs at least one dataset");
  SignTestResult r;
  r.threshold = sign_test_threshold(static_cast<std::size_t>(n), alpha);
  r.adjusted_wins = static_cast<std::size_t>(wins + ties / 2);
  r.adjusted_losses = static_cast<std::size_t>(losses + ties / 2);
  if (static_cast<double>(r.adjusted_wins) >= r.threshold) {
    r.outcome = SignOutcome::row_better;
  } else if (static_cast<double>(r.adjusted_losses) >= r.threshold) {
    r.outcome = SignOutcome::column_better;
  }
  return r;
}

std::string_view outcome_name(SignOutcome outcome) {
  switch (outcome) {
    case SignOutcome::row_better: return "row significantly better";
    case SignOutcome::column_better: return "column significantly better";
    default: return "no significant difference";
  }
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = line.find(',', start)) != std::string_view::npos; start = pos + 1)
    out.emplace_back(line.substr(start, pos - start));
  out.emplace_back(line.substr(start));
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace

AccuracyTable parse_accuracy_table(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.size() < 2) throw StatsError("accuracy table needs a header and at least one row");

  AccuracyTable t;
  auto header = split_fields(lines.front());
  const bool labelled = !header.empty() && header.front() == "dataset";
  t.model_names.assign(header.begin() + (labelled ? 1 : 0), header.end());
  if (t.model_names.empty()) throw StatsError("accuracy table has no model columns");
  const std::size_t k = t.model_names.size();
  t.values = linalg::Matrix(lines.size() - 1, k);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_fields(lines[i]);
    if (fields.size() != header.size())
      throw StatsError("accuracy table row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(header.size()));
    t.dataset_names.push_back(labelled ? fields.front() : "row" + std::to_string(i));
    for (std::size_t j = 0; j < k; ++j) {
      const auto& cell = fields[j + (labelled ? 1 : 0)];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw StatsError("accuracy table row " + std::to_string(i) + ": malformed value '" + cell + "'");
      t.values(i - 1, j) = v;
    }
  }
  return t;
}

std::string format_accuracy_table(const AccuracyTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "dataset";
  for (const auto& m : t.model_names) os << ',' << m;
  os << '\n';
  for (std::size_t i = 0; i < t.values.rows(); ++i) {
    os << t.dataset_names.at(i);
    for (std::size_t j = 0; j < t.values.cols(); ++j) os << ',' << t.values(i, j);
    os << '\n';
  }
  return os.str();
}

}  // namespace drf::stats
