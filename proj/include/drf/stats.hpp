#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drf/linalg.hpp"
#include "json.hpp"

namespace drf::stats {

struct RankTable {
  std::vector<std::string> model_names;
  linalg::Matrix ranks;  // N x K, fractional on ties
  std::vector<double> avg_ranks;
};

// Rank 1 is the best model on each row; ties share the average rank.
RankTable rank_accuracies(const linalg::Matrix& table, std::vector<std::string> model_names,
                          bool higher_is_better = true);

struct FriedmanResult {
  double chi2_f = 0.0;
  // Empty when chi2_f = N(K-1), where the F denominator vanishes.
  std::optional<double> f_f;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
};

FriedmanResult friedman(const std::vector<double>& avg_ranks, std::size_t n_datasets);
FriedmanResult friedman(const RankTable& table);

double nemenyi_cd(std::size_t k, std::size_t n, double q_alpha);

// Studentized range quantile over √2 at α = 0.05, K = 2..20.
double q_alpha_005(std::size_t k);

// flags[i][j] = |R_i − R_j| ≥ cd, diagonal false.
std::vector<std::vector<bool>> pairwise_significance(const std::vector<double>& avg_ranks, double cd);

struct TestReport {
  std::vector<std::string> model_names;
  std::vector<double> avg_ranks;
  std::size_t n_datasets = 0;
  FriedmanResult friedman;
  double q_alpha = 0.0;
  double cd = 0.0;
  std::vector<std::vector<bool>> pairwise_significant;
};

// q_alpha defaults to the built-in table for K.
TestReport compare(const std::vector<double>& avg_ranks, std::size_t n_datasets,
                   std::vector<std::string> model_names = {}, std::optional<double> q_alpha = std::nullopt);

nlohmann::json report_to_json(const TestReport& report);

enum class SignOutcome { row_better, column_better, no_difference };

struct SignTestResult {
  SignOutcome outcome = SignOutcome::no_difference;
  double threshold = 0.0;
  std::size_t adjusted_wins = 0;
  std::size_t adjusted_losses = 0;
};

// Ties are split evenly, one dropped when odd. Throws std::invalid_argument
// on negative counts or an empty record.
SignTestResult sign_test(long wins, long ties, long losses, double alpha = 0.05);
// Wins needed out of n for significance: n/2 + z·√n/2.
double sign_test_threshold(std::size_t n, double alpha = 0.05);

std::string_view outcome_name(SignOutcome outcome);

// Accuracy matrix: header of model names, one row per dataset. A leading
// `dataset` column is kept as row labels.
struct AccuracyTable {
  std::vector<std::string> dataset_names;
  std::vector<std::string> model_names;
  linalg::Matrix values;
};

AccuracyTable parse_accuracy_table(std::string_view text);
std::string format_accuracy_table(const AccuracyTable& table);

}  // namespace drf::stats
