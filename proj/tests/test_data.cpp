#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "drf/data.hpp"
#include "drf/error.hpp"

using namespace drf;

TEST_CASE("labels map to indices in first-appearance order") {
  const auto d = parse_dataset("x,y,label\n1,2,a\n3,4,b\n5,6,a\n7,8,b\n");
  CHECK(d.rows() == 4);
  CHECK(d.features() == 2);
  CHECK(d.n_classes() == 2);
  CHECK(d.labels() == std::vector<int>{0, 1, 0, 1});
  CHECK(d.class_names() == std::vector<std::string>{"a", "b"});
  CHECK(d.feature_names() == std::vector<std::string>{"x", "y"});
  CHECK(d.at(2, 1) == 6.0);
}

TEST_CASE("label column chosen by name") {
  LoadOptions opts;
  opts.label_column = "k";
  const auto d = parse_dataset("k,x\nb,1\na,2\n", opts);
  CHECK(d.features() == 1);
  CHECK(d.class_names() == std::vector<std::string>{"b", "a"});
  CHECK(d.at(1, 0) == 2.0);

  opts.label_column = "missing";
  CHECK_THROWS_AS(parse_dataset("k,x\nb,1\n", opts), DataError);
}

TEST_CASE("known classes fix the mapping of a second file") {
  LoadOptions opts;
  opts.known_classes = {"b", "a"};
  const auto d = parse_dataset("x,c\n1,a\n2,b\n3,z\n", opts);
  CHECK(d.labels() == std::vector<int>{1, 0, 2});
  CHECK(d.class_names() == std::vector<std::string>{"b", "a", "z"});
}

TEST_CASE("non-numeric cells are rejected with their position") {
  try {
    parse_dataset("x,y,c\n1,2,a\n3,NaN,b\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()) == "non-numeric feature cell at row 2, column 2");
  }
  CHECK_THROWS_AS(parse_dataset("x,c\ninf,a\n"), DataError);
  CHECK_THROWS_AS(parse_dataset("x,c\nabc,a\n"), DataError);
}

TEST_CASE("empty and malformed inputs") {
  CHECK_THROWS_AS(parse_dataset(""), DataError);
  CHECK_THROWS_AS(parse_dataset("x,c\n"), DataError);
  CHECK_THROWS_AS(parse_dataset("c\na\n"), DataError);  // label column only
  CHECK_THROWS_AS(parse_dataset("x,c\n1,a,3\n"), DataError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv"), DataError);
}

TEST_CASE("unlabelled files") {
  LoadOptions opts;
  opts.has_labels = false;
  opts.known_classes = {"p", "q"};
  const auto d = parse_dataset("x,y\n1,2\n3,4\n", opts);
  CHECK(d.features() == 2);
  CHECK(d.rows() == 2);
}

TEST_CASE("iris fixture shape") {
  const auto d = load_dataset(FIXTURE_DIR "/iris.csv");
  CHECK(d.rows() == 150);
  CHECK(d.features() == 4);
  CHECK(d.n_classes() == 3);
}

TEST_CASE("label mapping round-trips through the class table") {
  const auto d = load_dataset(FIXTURE_DIR "/wine.csv");
  LoadOptions opts;
  opts.known_classes = d.class_names();
  const auto again = load_dataset(FIXTURE_DIR "/wine.csv", opts);
  CHECK(again.class_names() == d.class_names());
  CHECK(again.labels() == d.labels());
}

TEST_CASE("bootstrap") {
  Rng rng(1);
  SUBCASE("singleton is forced") {
    const SampleIndexSet src{7};
    CHECK(bootstrap(src, rng) == SampleIndexSet{7});
  }
  SUBCASE("empty source throws") { CHECK_THROWS_AS(bootstrap(SampleIndexSet{}, rng), std::invalid_argument); }
  SUBCASE("distinct fraction near 1 - 1/e") {
    const auto src = all_indices(1000);
    double total = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto b = bootstrap(src, rng);
      CHECK(b.size() == src.size());
      total += static_cast<double>(std::set<std::size_t>(b.begin(), b.end()).size()) / 1000.0;
    }
    CHECK(std::abs(total / 100.0 - (1.0 - std::exp(-1.0))) < 0.05);
  }
  SUBCASE("same seed, same draw") {
    const auto src = all_indices(50);
    Rng a(99), b(99);
    CHECK(bootstrap(src, a) == bootstrap(src, b));
  }
  SUBCASE("draws come from the source") {
    const SampleIndexSet src{3, 9, 11};
    for (auto i : bootstrap(src, rng)) CHECK((i == 3 || i == 9 || i == 11));
  }
}

TEST_CASE("feature subsets") {
  Rng rng(5);
  CHECK(sample_feature_subset(4, 4, rng) == FeatureSubset{0, 1, 2, 3});
  CHECK(sample_feature_subset(4, 10, rng).size() == 4);

  const auto s = sample_feature_subset(100, 10, rng);
  CHECK(s.size() == 10);
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 10);
  CHECK(std::all_of(s.begin(), s.end(), [](std::size_t i) { return i < 100; }));

  CHECK(default_mtry(9) == 3);
  CHECK(default_mtry(1) == 1);
  CHECK(default_mtry(13) == 4);
  CHECK(default_mtry(30) == 5);
  CHECK(sample_feature_subset(9, default_mtry(9), rng).size() == 3);
}

TEST_CASE("single-feature draws are uniform") {
  Rng rng(17);
  std::vector<int> freq(10, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) ++freq[sample_feature_subset(10, 1, rng).front()];
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (int f : freq) CHECK(std::abs(f - draws * 0.1) <= 3 * sigma);
}

TEST_CASE("seed mixing separates streams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(42, 3) == mix_seed(42, 3));
}
