#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drf/diagnostics.hpp"
#include "drf/forest.hpp"
#include "drf/linalg.hpp"
#include "drf/split.hpp"
#include "drf/stats.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace drf;
using linalg::Matrix;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

const std::vector<double> kAccuracyRanks{6.99, 6.81, 6.48, 8, 7.31, 6.12, 6.27, 6.38, 5.45, 7.3, 5.84, 5.04};
const std::vector<double> kBiasRanks{7, 3.02, 8.52, 4.37, 7.96, 3.55, 9.73, 5.9, 10.03, 5.5, 8.42, 4.01};

const std::vector<std::string> kFixtures{"iris", "wine", "breast_cancer", "oblique", "multiclass", "moons"};
constexpr int kSeeds = 5;
constexpr std::size_t kTrees = 50;

struct Split {
  Dataset train, test;
};

Split load_split(const std::string& name) {
  const std::string base = std::string(FIXTURE_DIR) + "/" + name;
  Split s;
  s.train = load_dataset(base + "_train.csv");
  LoadOptions opts;
  opts.known_classes = s.train.class_names();
  s.test = load_dataset(base + "_test.csv", opts);
  return s;
}

ForestConfig config_for(Variant v, std::uint64_t seed, std::size_t trees = kTrees, std::size_t minleaf = 1) {
  ForestConfig c;
  c.tree.variant = v;
  c.tree.minleaf = minleaf;
  c.n_trees = trees;
  c.master_seed = seed;
  return c;
}

double mean_nodes(const Forest& f) { return node_profile(f).mean_nodes; }

// Accuracy on the test rows of always predicting the training majority class.
double majority_baseline(const Split& s) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(s.train.n_classes()), 0);
  for (int y : s.train.labels()) ++counts[static_cast<std::size_t>(y)];
  const int majority = static_cast<int>(argmax_lowest(counts));
  std::size_t hits = 0;
  for (int y : s.test.labels()) hits += y == majority;
  return static_cast<double>(hits) / static_cast<double>(s.test.rows());
}

struct Run {
  double accuracy = 0.0;
  double nodes = 0.0;
  double seconds = 0.0;
};

// results[fixture][variant][seed]
using Grid = std::map<std::string, std::map<Variant, std::vector<Run>>>;

Grid run_grid(const std::map<std::string, Split>& splits) {
  Grid grid;
  for (const auto& name : kFixtures) {
    const auto& s = splits.at(name);
    for (auto v : kAllVariants)
      for (int seed = 1; seed <= kSeeds; ++seed) {
        const auto t0 = Clock::now();
        const auto forest = train_forest(s.train, config_for(v, static_cast<std::uint64_t>(seed)), default_workers());
        const double secs = seconds_since(t0);
        grid[name][v].push_back({evaluate(forest, s.test).accuracy, mean_nodes(forest), secs});
      }
  }
  return grid;
}

Matrix random_spd(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n + 2, n);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = g(rng);
  Matrix s = linalg::gram(a);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.05;
  return s;
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "timing.csv")
      out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

}  // namespace

int main() {
  criterion("friedman-regression", [] {
    const auto t0 = Clock::now();
    const auto r = stats::compare(kAccuracyRanks, 121, {}, 3.268);
    const double secs = seconds_since(t0);
    const bool ok = std::abs(r.friedman.chi2_f - 71.0559) <= 5e-3 && r.friedman.f_f &&
                    std::abs(*r.friedman.f_f - 6.7675) <= 5e-3 && std::abs(r.cd - 1.5149) <= 1e-4 && secs < 1.0;
    return Verdict{ok, "chi2_f=" + fmt(r.friedman.chi2_f) + " f_f=" + (r.friedman.f_f ? fmt(*r.friedman.f_f) : "none") +
                           " cd=" + fmt(r.cd) + " t=" + fmt(secs, 6) + "s"};
  });

  criterion("bias-rank-regression", [] {
    const auto t0 = Clock::now();
    const double chi2 = stats::friedman(kBiasRanks, 121).chi2_f;
    const double secs = seconds_since(t0);
    return Verdict{std::abs(chi2 - 615.0719) <= 0.5 && secs < 1.0, "chi2_f=" + fmt(chi2) + " t=" + fmt(secs, 6) + "s"};
  });

  criterion("sign-test-regression", [] {
    const auto t0 = Clock::now();
    const double threshold = stats::sign_test_threshold(121);
    const auto a = stats::sign_test(69, 11, 41);
    const auto b = stats::sign_test(56, 14, 51);
    const double secs = seconds_since(t0);
    const bool ok = fmt(threshold, 2) == "71.28" && a.outcome == stats::SignOutcome::row_better &&
                    b.outcome == stats::SignOutcome::no_difference && secs < 1.0;
    return Verdict{ok, "threshold=" + fmt(threshold, 2) + " [69,11,41]=" + std::string(stats::outcome_name(a.outcome)) +
                           " [56,14,51]=" + std::string(stats::outcome_name(b.outcome))};
  });

  std::map<std::string, Split> splits;
  for (const auto& name : kFixtures) splits.emplace(name, load_split(name));
  Grid grid;
  const auto grid_t0 = Clock::now();
  try {
    grid = run_grid(splits);
  } catch (const std::exception& e) {
    std::printf("grid training failed: %s\n", e.what());
  }
  std::printf("trained %zu fixtures x 12 variants x %d seeds at L=%zu in %.1f s\n", grid.size(), kSeeds, kTrees,
              seconds_since(grid_t0));

  criterion("fixture-accuracy", [&] {
    std::ostringstream detail;
    bool ok = grid.size() == kFixtures.size();
    double slowest = 0.0;
    for (const auto& name : kFixtures) {
      const double base = majority_baseline(splits.at(name));
      for (auto v : kAllVariants)
        for (const auto& r : grid[name][v]) {
          slowest = std::max(slowest, r.seconds);
          if (r.accuracy < base || r.seconds >= 60.0) {
            ok = false;
            detail << " " << name << "/" << variant_name(v) << "=" << fmt(r.accuracy, 3) << "<" << fmt(base, 3);
          }
        }
    }
    const auto& oblique = grid["oblique"];
    auto mean_acc = [&](Variant v) {
      double s = 0.0;
      for (const auto& r : oblique.at(v)) s += r.accuracy;
      return s / kSeeds;
    };
    const double raf = mean_acc(Variant::raf);
    Variant best = Variant::raf;
    double best_acc = -1.0;
    for (auto v : kAllVariants)
      if (split_family(v) != SplitFamily::axis && mean_acc(v) > best_acc) {
        best = v;
        best_acc = mean_acc(v);
      }
    const double gain = best_acc - raf;
    ok = ok && gain >= 0.03;
    return Verdict{ok, "slowest forest " + fmt(slowest, 2) + "s; oblique raf=" + fmt(raf) + " best " +
                           std::string(variant_name(best)) + "=" + fmt(best_acc) + " gain=" + fmt(100 * gain, 2) +
                           " points" + detail.str()};
  });

  criterion("double-node-counts", [&] {
    std::ostringstream detail;
    bool ok = grid.size() == kFixtures.size();
    int worst = kSeeds;
    for (const auto& name : kFixtures)
      for (auto v : kAllVariants) {
        if (is_double(v)) continue;
        const auto& standard = grid[name][v];
        const auto& dbl = grid[name][counterpart(v)];
        int wins = 0;
        for (int s = 0; s < kSeeds; ++s) wins += dbl[s].nodes >= standard[s].nodes;
        worst = std::min(worst, wins);
        if (wins < 4) {
          ok = false;
          detail << " " << name << "/" << variant_name(v) << "=" << wins << "/" << kSeeds;
        }
      }
    return Verdict{ok, "minimum seeds with double >= standard: " + std::to_string(worst) + "/" +
                           std::to_string(kSeeds) + detail.str()};
  });

  criterion("minleaf-monotonicity", [&] {
    std::ostringstream detail;
    bool ok = true;
    int checked = 0;
    for (const auto& name : kFixtures)
      for (auto v : kAllVariants)
        for (int seed = 1; seed <= kSeeds; ++seed) {
          double previous = INFINITY;
          for (std::size_t minleaf = 1; minleaf <= 3; ++minleaf) {
            const double nodes =
                minleaf == 1 ? grid[name][v][static_cast<std::size_t>(seed - 1)].nodes
                             : mean_nodes(train_forest(splits.at(name).train,
                                                       config_for(v, static_cast<std::uint64_t>(seed), kTrees, minleaf),
                                                       default_workers()));
            if (nodes > previous) {
              ok = false;
              detail << " " << name << "/" << variant_name(v) << "/seed" << seed << "/minleaf" << minleaf;
            }
            previous = nodes;
          }
          ++checked;
        }
    return Verdict{ok, std::to_string(checked) + " fixture/variant/seed sweeps" + detail.str()};
  });

  criterion("oracle-equivalence", [] {
    std::mt19937_64 rng(2024);
    int axis_ok = 0;
    for (int t = 0; t < 100; ++t) {
      const auto node = oracle::random_node(rng, 60, 5);
      const auto cand = best_axis_split(node.x, node.y, node.n_classes);
      const auto brute = oracle::brute_force_axis(node.x, node.y, node.n_classes);
      if (cand.has_value() == brute.found &&
          (!brute.found || (std::abs(cand->impurity - brute.impurity) <= 1e-12 && cand->column == brute.column &&
                            cand->threshold == brute.threshold)))
        ++axis_ok;
    }

    int rayleigh_ok = 0;
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 5);
      const Matrix p = random_spd(n, rng), q = random_spd(n, rng);
      const double best = linalg::solve_generalized_rayleigh(p, q, linalg::Regularization::none()).min.value;
      double sampled = INFINITY;
      std::vector<double> u(n);
      for (int s = 0; s < 100000; ++s) {
        for (auto& x : u) x = g(rng);
        sampled = std::min(sampled, linalg::rayleigh_quotient(p, q, u));
      }
      rayleigh_ok += best <= sampled * (1 + 1e-12);
    }

    const ClassGaussian unit0{{0.0}, Matrix{{1}}, 10};
    const ClassGaussian unit2{{2.0}, Matrix{{1}}, 10};
    const ClassGaussian wide0{{0.0}, Matrix{{9}}, 10};
    const double b1 = bhattacharyya(unit0, unit2), b2 = bhattacharyya(unit0, wide0);
    const bool bhat_ok = std::abs(b1 - 0.5) <= 1e-10 && std::abs(b2 - 0.5 * std::log(5.0 / 3.0)) <= 1e-10;

    return Verdict{axis_ok == 100 && rayleigh_ok == 50 && bhat_ok,
                   "axis " + std::to_string(axis_ok) + "/100, rayleigh " + std::to_string(rayleigh_ok) +
                       "/50, bhattacharyya " + fmt(b1, 12) + " " + fmt(b2, 12)};
  });

  criterion("kappa-suite", [&] {
    const std::vector<int> a{0, 1, 2, 1, 0, 2, 2};
    const bool self = kappa(a, a, 3) == 1.0;
    const std::vector<int> p{0, 0, 1, 1}, q{0, 1, 0, 1};
    const bool independent = kappa(p, q, 2) == 0.0;

    const auto& s = splits.at("iris");
    const auto diagram = kappa_error_diagram(train_forest(s.train, config_for(Variant::raf, 1), default_workers()), s.test);

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> cls(0, 3);
    int symmetric = 0;
    for (int t = 0; t < 100; ++t) {
      std::vector<int> x(50), y(50);
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = cls(rng);
        y[i] = rng() % 2 ? x[i] : cls(rng);
      }
      symmetric += kappa(x, y, 4) == kappa(y, x, 4);
    }
    return Verdict{self && independent && diagram.points.size() == 1225 && symmetric == 100,
                   "self=" + std::string(self ? "1" : "!=1") + " independence=" + fmt(kappa(p, q, 2)) +
                       " points=" + std::to_string(diagram.points.size()) + " symmetric=" + std::to_string(symmetric) +
                       "/100"};
  });

  criterion("bias-variance-suite", [] {
    const std::vector<int> truth{0, 1, 1, 0, 1};
    const auto correct = bias_variance_from_predictions(std::vector<std::vector<int>>(10, truth), truth, 2);
    std::vector<std::vector<int>> split;
    for (int m = 0; m < 10; ++m) {
      auto p = truth;
      if (m % 2)
        for (int& y : p) y = 1 - y;
      split.push_back(p);
    }
    const auto half = bias_variance_from_predictions(split, truth, 2);

    std::mt19937_64 rng(5);
    int bounded = 0, total = 0;
    for (int t = 0; t < 200; ++t) {
      const int c = 2 + static_cast<int>(rng() % 5);
      std::uniform_int_distribution<int> cls(0, c - 1);
      std::vector<int> y(1);
      y[0] = cls(rng);
      std::vector<std::vector<int>> preds(2 + rng() % 20, std::vector<int>(1));
      for (auto& pr : preds) pr[0] = cls(rng);
      const auto r = bias_variance_from_predictions(preds, y, c);
      bounded += r.bias_sq >= 0.0 && r.variance >= 0.0 && r.bias_sq + r.variance <= 1.0;
      ++total;
    }
    const bool ok = correct.bias_sq == 0.0 && correct.variance == 0.0 && half.bias_sq == 0.25 &&
                    half.variance == 0.25 && bounded == total;
    return Verdict{ok, "correct=(" + fmt(correct.bias_sq) + "," + fmt(correct.variance) + ") split=(" +
                           fmt(half.bias_sq) + "," + fmt(half.variance) + ") bounded " + std::to_string(bounded) +
                           "/" + std::to_string(total)};
  });

  criterion("benchmark-determinism", [] {
    const fs::path root = fs::temp_directory_path() / ("drf_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    nlohmann::json manifest;
    for (const auto& name : kFixtures)
      manifest["datasets"].push_back({{"name", name},
                                      {"train", std::string(FIXTURE_DIR) + "/" + name + "_train.csv"},
                                      {"test", std::string(FIXTURE_DIR) + "/" + name + "_test.csv"}});
    for (auto v : kAllVariants) manifest["variants"].push_back(std::string(variant_name(v)));
    manifest["config"] = {{"trees", 10}, {"seed", 99}};
    manifest["save_models"] = true;
    std::ofstream(root / "manifest.json") << manifest.dump(2);

    const std::string base = std::string(DRF_BINARY) + " benchmark --manifest " + (root / "manifest.json").string();
    const int c1 = shell(base + " --workers 1 --out " + (root / "a").string() + " >/dev/null");
    const int c2 = shell(base + " --workers 3 --out " + (root / "b").string() + " >/dev/null");
    if (c1 != 0 || c2 != 0) return Verdict{false, "benchmark exit codes " + std::to_string(c1) + "," + std::to_string(c2)};
    const auto a = tree_contents(root / "a"), b = tree_contents(root / "b");
    std::size_t models = 0;
    for (const auto& [k, _] : a) models += k.rfind("models", 0) == 0;
    const bool ok = a == b && models == kFixtures.size() * kAllVariants.size();
    fs::remove_all(root);
    return Verdict{ok, std::to_string(a.size()) + " files compared (" + std::to_string(models) +
                           " models), workers 1 vs 3: " + (a == b ? "identical" : "differ")};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
