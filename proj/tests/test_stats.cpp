#include <cmath>
#include <random>

#include "doctest.h"
#include "drf/error.hpp"
#include "drf/stats.hpp"

using namespace drf::stats;
using drf::linalg::Matrix;

namespace {

const std::vector<double> kAccuracyRanks{6.99, 6.81, 6.48, 8, 7.31, 6.12, 6.27, 6.38, 5.45, 7.3, 5.84, 5.04};
const std::vector<double> kBiasRanks{7, 3.02, 8.52, 4.37, 7.96, 3.55, 9.73, 5.9, 10.03, 5.5, 8.42, 4.01};

}  // namespace

TEST_CASE("ranking") {
  const Matrix t{{0.9, 0.8, 0.7}, {0.9, 0.9, 0.7}, {0.5, 0.5, 0.5}};
  const auto r = rank_accuracies(t, {"a", "b", "c"});
  CHECK(r.ranks(0, 0) == 1.0);
  CHECK(r.ranks(0, 2) == 3.0);
  CHECK(r.ranks(1, 0) == 1.5);
  CHECK(r.ranks(1, 1) == 1.5);
  CHECK(r.ranks(1, 2) == 3.0);
  CHECK(r.ranks(2, 1) == 2.0);
  CHECK(r.avg_ranks[2] == doctest::Approx(8.0 / 3.0));

  const auto low = rank_accuracies(t, {"a", "b", "c"}, false);
  CHECK(low.ranks(0, 2) == 1.0);

  CHECK_THROWS_AS(rank_accuracies(Matrix{{0.1, 0.2}}, {}), drf::StatsError);
  CHECK_THROWS_AS(rank_accuracies(t, {"a"}), drf::StatsError);
}

TEST_CASE("rank rows always sum to K(K+1)/2") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> acc(0, 5);
  Matrix t(40, 7);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 7; ++j) t(i, j) = acc(rng) / 5.0;
  const auto r = rank_accuracies(t, {});
  for (std::size_t i = 0; i < 40; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 7; ++j) s += r.ranks(i, j);
    CHECK(std::abs(s - 28.0) <= 1e-9);
  }
}

TEST_CASE("Friedman regression on a 12-model accuracy rank vector") {
  const auto f = friedman(kAccuracyRanks, 121);
  CHECK(std::abs(f.chi2_f - 71.0559) <= 5e-3);
  REQUIRE(f.f_f);
  CHECK(std::abs(*f.f_f - 6.7675) <= 5e-3);
  CHECK(f.df1 == 11);
  CHECK(f.df2 == 1320);
}

TEST_CASE("Friedman regression on a 12-model bias rank vector") {
  CHECK(std::abs(friedman(kBiasRanks, 121).chi2_f - 615.0719) <= 0.5);
}

TEST_CASE("Friedman degenerate cases") {
  const Matrix same{{0.5, 0.5, 0.5}, {0.7, 0.7, 0.7}};
  const auto r = rank_accuracies(same, {});
  CHECK(friedman(r).chi2_f == 0.0);
  REQUIRE(friedman(r).f_f);
  CHECK(*friedman(r).f_f == 0.0);

  // every dataset ranks the models identically: chi2 = N(K-1), F undefined
  const Matrix consistent{{0.9, 0.8, 0.7}, {0.9, 0.8, 0.7}, {0.9, 0.8, 0.7}};
  const auto f = friedman(rank_accuracies(consistent, {}));
  CHECK(f.chi2_f == doctest::Approx(6.0));
  CHECK_FALSE(f.f_f);
}

TEST_CASE("Friedman is invariant under a consistent column relabeling") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u;
  Matrix t(15, 5);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 5; ++j) t(i, j) = u(rng);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  Matrix p(15, 5);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 5; ++j) p(i, j) = t(i, perm[j]);
  CHECK(friedman(rank_accuracies(t, {})).chi2_f == doctest::Approx(friedman(rank_accuracies(p, {})).chi2_f));
}

TEST_CASE("Nemenyi critical difference") {
  CHECK(std::abs(nemenyi_cd(12, 121, 3.268) - 1.5149) <= 1e-4);
  CHECK(nemenyi_cd(2, 6, std::sqrt(12.0)) == doctest::Approx(std::sqrt(2.0)));
  double previous = INFINITY;
  for (std::size_t n = 2; n < 200; n += 7) {
    const double cd = nemenyi_cd(12, n, 3.268);
    CHECK(cd < previous);
    previous = cd;
  }
  CHECK(q_alpha_005(12) == 3.268);
  CHECK(q_alpha_005(2) == 1.96);
  CHECK_THROWS_AS(q_alpha_005(21), drf::StatsError);
  CHECK_THROWS_AS(nemenyi_cd(1, 10, 2.0), drf::StatsError);
}

TEST_CASE("pairwise significance is symmetric with an empty diagonal") {
  const auto r = compare(kAccuracyRanks, 121);
  CHECK(r.q_alpha == 3.268);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK_FALSE(r.pairwise_significant[i][i]);
    for (std::size_t j = 0; j < 12; ++j) CHECK(r.pairwise_significant[i][j] == r.pairwise_significant[j][i]);
  }
  // RaF (8.00) vs DRaF-LDA (5.04) differ by far more than the CD
  CHECK(r.pairwise_significant[3][11]);
  CHECK_FALSE(r.pairwise_significant[0][1]);

  const auto j = report_to_json(r);
  CHECK(j.at("cd").get<double>() == r.cd);
  CHECK(j.at("pairwise_significant").size() == 12);
}

TEST_CASE("sign test") {
  CHECK(std::abs(sign_test_threshold(121) - 71.28) <= 5e-3);
  const auto sig = sign_test(69, 11, 41);
  CHECK(sig.adjusted_wins == 74);
  CHECK(sig.outcome == SignOutcome::row_better);
  CHECK(sign_test(41, 11, 69).outcome == SignOutcome::column_better);
  CHECK(sign_test(56, 14, 51).outcome == SignOutcome::no_difference);
  CHECK(sign_test(60, 0, 60).outcome == SignOutcome::no_difference);
  CHECK_THROWS_AS(sign_test(-1, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(sign_test(0, 0, 0), std::invalid_argument);

  for (long w = 0; w <= 30; ++w)
    for (long t = 0; w + t <= 30; ++t) {
      const long l = 30 - w - t;
      const bool a = sign_test(w, t, l).outcome == SignOutcome::row_better;
      const bool b = sign_test(l, t, w).outcome == SignOutcome::row_better;
      CHECK_FALSE((a && b));
    }
}

TEST_CASE("accuracy table text format") {
  const auto t = parse_accuracy_table("dataset,raf,draf\niris,0.9,0.95\nwine,0.8,0.85\n");
  CHECK(t.model_names == std::vector<std::string>{"raf", "draf"});
  CHECK(t.dataset_names == std::vector<std::string>{"iris", "wine"});
  CHECK(t.values(1, 1) == 0.85);
  CHECK(parse_accuracy_table(format_accuracy_table(t)).values == t.values);

  const auto bare = parse_accuracy_table("a,b\n1,2\n3,4\n");
  CHECK(bare.model_names == std::vector<std::string>{"a", "b"});
  CHECK(bare.values(1, 0) == 3.0);

  CHECK_THROWS_AS(parse_accuracy_table("a,b\n1\n"), drf::StatsError);
  CHECK_THROWS_AS(parse_accuracy_table("a,b\n1,x\n"), drf::StatsError);
  CHECK_THROWS_AS(parse_accuracy_table("a,b\n"), drf::StatsError);
}
