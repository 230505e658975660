#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "drf/data.hpp"
#include "drf/diagnostics.hpp"
#include "drf/error.hpp"
#include "drf/forest.hpp"
#include "drf/model_io.hpp"
#include "drf/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kUnknownVariant = 3,
  kDataError = 4,
  kWriteError = 5,
  kDimensionMismatch = 6,
  kModelError = 7,
  kTooFewTrees = 8,
  kBenchmarkFailed = 9,
  kStatsError = 10,
};

struct TooFewTrees : drf::Error {
  using drf::Error::Error;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw drf::DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw std::ios_base::failure("write to '" + path.string() + "' failed");
}

// Writes to `path`, or standard output when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text(path, text);
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string exact(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Options shared by every command that trains forests.
struct ForestFlags {
  std::string variant;
  std::size_t trees = 50;
  std::optional<std::size_t> mtry;
  std::size_t minleaf = 1;
  std::uint64_t seed = drf::ForestConfig{}.master_seed;
  std::string routing = "proximity";
  std::string fallback = "node";
  std::size_t workers = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--variant", variant, "Forest variant (" + drf::valid_variant_list() + ")")->required();
    cmd->add_option("--trees", trees, "Ensemble size L")->capture_default_str();
    cmd->add_option("--mtry", mtry, "Features per node (default round(sqrt(n)))");
    cmd->add_option("--minleaf", minleaf, "Largest node size that is made a leaf")->capture_default_str();
    cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
    cmd->add_option("--routing", routing, "Oblique routing: proximity or bisector")->capture_default_str();
    cmd->add_option("--fallback", fallback, "Axis fallback scope: node or subtree")->capture_default_str();
    cmd->add_option("--workers", workers, "Tree-level worker threads (0: DRF_WORKERS or all cores)");
  }

  drf::ForestConfig config() const {
    drf::ForestConfig c;
    c.tree.variant = drf::parse_variant(variant);
    c.tree.mtry = mtry;
    c.tree.minleaf = minleaf;
    c.tree.routing = drf::parse_routing(routing);
    c.tree.fallback = drf::parse_fallback(fallback);
    c.n_trees = trees;
    c.master_seed = seed;
    c.tree.validate();
    return c;
  }
};

double mean_nodes(const drf::Forest& forest) { return drf::node_profile(forest).mean_nodes; }

// Loads `path` against a trained model. A file with exactly the model's
// feature count has no label column; one extra column is the label.
drf::Dataset load_for_model(const fs::path& path, const drf::Forest& forest, const std::string& label_column,
                            bool require_labels) {
  const std::string text = read_text(path);
  const std::string header = text.substr(0, text.find('\n'));
  const std::size_t columns = header.empty() ? 0 : static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  if (columns == 0) throw drf::DataError("empty dataset: missing header row");

  drf::LoadOptions opts;
  opts.known_classes = forest.class_names;
  opts.label_column = label_column;
  if (label_column == drf::kLastColumn) {
    if (columns == forest.n_features()) {
      opts.has_labels = false;
    } else if (columns != forest.n_features() + 1) {
      throw drf::DimensionError("data has " + std::to_string(columns) + " columns, model expects " +
                                std::to_string(forest.n_features()) + " features (plus an optional label)");
    }
  }
  if (require_labels && !opts.has_labels) throw drf::DataError("evaluation needs a label column");
  drf::Dataset d = drf::parse_dataset(text, opts);
  if (d.features() != forest.n_features())
    throw drf::DimensionError("data has " + std::to_string(d.features()) + " features, model expects " +
                              std::to_string(forest.n_features()));
  return d;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string out = "model.json";
  std::string label_column{drf::kLastColumn};
  ForestFlags forest;
};

int run_train(const TrainArgs& a) {
  const auto config = a.forest.config();
  drf::LoadOptions opts;
  opts.label_column = a.label_column;
  const auto data = drf::load_dataset(a.data, opts);

  const auto start = std::chrono::steady_clock::now();
  const auto forest = drf::train_forest(data, config, a.forest.workers);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double accuracy = drf::evaluate(forest, data).accuracy;
  drf::save_model(a.out, forest);

  std::cout << "variant=" << drf::variant_name(config.tree.variant) << " trees=" << config.n_trees
            << " train_accuracy=" << fixed(accuracy, 6) << " mean_nodes=" << fixed(mean_nodes(forest), 2)
            << " wall_time_s=" << fixed(seconds, 3) << " model=" << a.out << "\n";
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string label_column{drf::kLastColumn};
};

int run_predict(const PredictArgs& a) {
  const auto forest = drf::load_model(a.model);
  const auto data = load_for_model(a.data, forest, a.label_column, false);
  const auto predictions = drf::evaluate(forest, data).predictions;
  std::string text = "row_index,predicted_label\n";
  for (std::size_t i = 0; i < predictions.size(); ++i)
    text += std::to_string(i) + "," + forest.class_names[static_cast<std::size_t>(predictions[i])] + "\n";
  emit(a.out, text);
  return kOk;
}

int run_evaluate(const PredictArgs& a) {
  const auto forest = drf::load_model(a.model);
  const auto data = load_for_model(a.data, forest, a.label_column, true);
  const auto result = drf::evaluate(forest, data);

  // Rows: actual class, columns: predicted class. Classes unseen in training
  // appear as extra rows.
  const auto& names = data.class_names();
  const std::size_t c = names.size();
  std::vector<std::vector<std::size_t>> confusion(c, std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < data.rows(); ++i)
    ++confusion[static_cast<std::size_t>(data.label(i))][static_cast<std::size_t>(result.predictions[i])];

  std::string text = "accuracy=" + exact(result.accuracy) + "\nrows=" + std::to_string(data.rows()) + "\n";
  text += "actual\\predicted";
  for (std::size_t k = 0; k < static_cast<std::size_t>(forest.n_classes()); ++k) text += "," + names[k];
  text += "\n";
  for (std::size_t a_row = 0; a_row < c; ++a_row) {
    text += names[a_row];
    for (std::size_t k = 0; k < static_cast<std::size_t>(forest.n_classes()); ++k)
      text += "," + std::to_string(confusion[a_row][k]);
    text += "\n";
  }
  emit(a.out, text);
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchmarkArgs {
  std::string manifest;
  std::string out;
  std::size_t workers = 0;
};

struct BenchmarkDataset {
  std::string name;
  fs::path train;
  fs::path test;
};

int run_benchmark(const BenchmarkArgs& a) {
  json m;
  try {
    m = json::parse(read_text(a.manifest));
  } catch (const json::exception& e) {
    throw drf::DataError(std::string("manifest is not valid JSON: ") + e.what());
  }

  const fs::path base = fs::path(a.manifest).parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  std::vector<BenchmarkDataset> datasets;
  std::vector<drf::Variant> variants;
  drf::ForestConfig config;
  fs::path out_dir;
  bool save_models = false;
  try {
    for (const auto& d : m.at("datasets"))
      datasets.push_back({d.at("name").get<std::string>(), resolve(d.at("train").get<std::string>()),
                          resolve(d.at("test").get<std::string>())});
    for (const auto& v : m.at("variants")) variants.push_back(drf::parse_variant(v.get<std::string>()));
    const json c = m.value("config", json::object());
    config.n_trees = c.value("trees", config.n_trees);
    config.master_seed = c.value("seed", config.master_seed);
    if (c.contains("mtry") && !c.at("mtry").is_null()) config.tree.mtry = c.at("mtry").get<std::size_t>();
    config.tree.minleaf = c.value("minleaf", config.tree.minleaf);
    config.tree.routing = drf::parse_routing(c.value("routing", std::string("proximity")));
    config.tree.fallback = drf::parse_fallback(c.value("fallback", std::string("node")));
    config.tree.validate();
    save_models = m.value("save_models", false);
    out_dir = a.out.empty() ? resolve(m.value("output", std::string("benchmark_out"))) : fs::path(a.out);
  } catch (const json::exception& e) {
    throw drf::DataError(std::string("malformed manifest: ") + e.what());
  }
  if (datasets.empty() || variants.empty()) throw drf::DataError("manifest needs at least one dataset and variant");
  for (std::size_t i = 0; i < datasets.size(); ++i)
    for (std::size_t j = i + 1; j < datasets.size(); ++j)
      if (datasets[i].name == datasets[j].name) throw drf::DataError("duplicate dataset name '" + datasets[i].name + "'");

  std::error_code ec;
  fs::create_directories(out_dir / "models", ec);
  if (ec) throw std::ios_base::failure("cannot create '" + out_dir.string() + "': " + ec.message());

  const std::size_t k = variants.size();
  std::vector<std::string> names;
  for (auto v : variants) names.emplace_back(drf::variant_name(v));

  std::vector<std::string> done;
  std::vector<std::vector<double>> accuracy, nodes, timing;
  std::string failures;

  for (const auto& ds : datasets) {
    std::vector<double> acc(k), nod(k), tim(k);
    bool ok = true;
    try {
      drf::LoadOptions opts;
      const auto train = drf::load_dataset(ds.train, opts);
      opts.known_classes = train.class_names();
      const auto test = drf::load_dataset(ds.test, opts);
      if (test.features() != train.features())
        throw drf::DimensionError("train and test feature counts differ");
      for (std::size_t j = 0; j < k; ++j) {
        auto c = config;
        c.tree.variant = variants[j];
        const auto start = std::chrono::steady_clock::now();
        const auto forest = drf::train_forest(train, c, a.workers);
        tim[j] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        acc[j] = drf::evaluate(forest, test).accuracy;
        nod[j] = mean_nodes(forest);
        if (save_models) drf::save_model(out_dir / "models" / (ds.name + "__" + names[j] + ".json"), forest);
        std::cout << ds.name << " " << names[j] << " accuracy=" << fixed(acc[j], 4)
                  << " mean_nodes=" << fixed(nod[j], 1) << " time_s=" << fixed(tim[j], 2) << "\n";
      }
    } catch (const std::exception& e) {
      ok = false;
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      std::replace(msg.begin(), msg.end(), ',', ';');
      failures += ds.name + "," + msg + "\n";
      std::cerr << "benchmark: dataset '" << ds.name << "' failed: " << e.what() << "\n";
    }
    if (ok) {
      done.push_back(ds.name);
      accuracy.push_back(acc);
      nodes.push_back(nod);
      timing.push_back(tim);
    }
  }

  auto matrix_csv = [&](const std::vector<std::vector<double>>& rows) {
    drf::stats::AccuracyTable t;
    t.dataset_names = done;
    t.model_names = names;
    t.values = drf::linalg::Matrix(rows.size(), k);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < k; ++j) t.values(i, j) = rows[i][j];
    return t;
  };
  const auto acc_table = matrix_csv(accuracy);
  write_text(out_dir / "accuracy.csv", drf::stats::format_accuracy_table(acc_table));
  write_text(out_dir / "nodes.csv", drf::stats::format_accuracy_table(matrix_csv(nodes)));
  write_text(out_dir / "timing.csv", drf::stats::format_accuracy_table(matrix_csv(timing)));

  std::string summary = "model,avg_rank,avg_accuracy,mean_nodes\n";
  std::vector<double> ranks(k, 0.0);
  if (done.size() >= 2 && k >= 2) ranks = drf::stats::rank_accuracies(acc_table.values, names).avg_ranks;
  for (std::size_t j = 0; j < k; ++j) {
    double a_sum = 0.0, n_sum = 0.0;
    for (std::size_t i = 0; i < done.size(); ++i) {
      a_sum += accuracy[i][j];
      n_sum += nodes[i][j];
    }
    const double n = std::max<double>(1.0, static_cast<double>(done.size()));
    summary += names[j] + "," + (done.size() >= 2 && k >= 2 ? exact(ranks[j]) : std::string()) + "," +
               exact(a_sum / n) + "," + exact(n_sum / n) + "\n";
  }
  write_text(out_dir / "summary.csv", summary);
  write_text(out_dir / "failures.csv", "dataset,error\n" + failures);
  return failures.empty() ? kOk : kBenchmarkFailed;
}

// ---------------------------------------------------------------------------

struct KappaArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string label_column{drf::kLastColumn};
};

int run_kappa(const KappaArgs& a) {
  const auto forest = drf::load_model(a.model);
  if (forest.trees.size() < 2)
    throw TooFewTrees("kappa-error diagram needs at least 2 trees, model has " + std::to_string(forest.trees.size()));
  const auto test = load_for_model(a.data, forest, a.label_column, true);
  const auto diagram = drf::kappa_error_diagram(forest, test);
  emit(a.out, drf::format_kappa_csv(diagram));
  if (!a.out.empty())
    std::cout << "pairs=" << diagram.points.size() << " centroid_kappa=" << fixed(diagram.centroid_kappa, 4)
              << " centroid_error=" << fixed(diagram.centroid_error, 4) << "\n";
  return kOk;
}

struct BiasVarArgs {
  std::string train;
  std::string test;
  std::string out;
  std::size_t repeats = 10;
  ForestFlags forest;
};

int run_biasvar(const BiasVarArgs& a) {
  const auto config = a.forest.config();
  if (a.repeats < 2) throw std::invalid_argument("--repeats must be >= 2");
  drf::LoadOptions opts;
  const auto train = drf::load_dataset(a.train, opts);
  opts.known_classes = train.class_names();
  const auto test = drf::load_dataset(a.test, opts);
  const auto report = drf::bias_variance(train, test, config, a.repeats, config.master_seed, a.forest.workers);
  emit(a.out, drf::format_bias_variance(report));
  return kOk;
}

struct NodesArgs {
  std::vector<std::string> models;
  std::string out;
};

int run_nodes(const NodesArgs& a) {
  std::string text = "model,variant,trees,mean_nodes,min_nodes,max_nodes,mean_depth,min_depth,max_depth\n";
  for (const auto& path : a.models) {
    const auto forest = drf::load_model(path);
    const auto p = drf::node_profile(forest);
    text += fs::path(path).filename().string() + "," + std::string(drf::variant_name(forest.config.tree.variant)) +
            "," + std::to_string(forest.trees.size()) + "," + exact(p.mean_nodes) + "," + std::to_string(p.min_nodes) +
            "," + std::to_string(p.max_nodes) + "," + exact(p.mean_depth) + "," + std::to_string(p.min_depth) + "," +
            std::to_string(p.max_depth) + "\n";
  }
  emit(a.out, text);
  return kOk;
}

// ---------------------------------------------------------------------------

struct RankArgs {
  std::string table;
  std::vector<double> avg_ranks;
  std::size_t n = 0;
  std::optional<double> q;
  bool lower_is_better = false;
  std::string out;
};

drf::stats::TestReport build_report(const RankArgs& a) {
  if (!a.table.empty()) {
    const auto t = drf::stats::parse_accuracy_table(read_text(a.table));
    const auto ranks = drf::stats::rank_accuracies(t.values, t.model_names, !a.lower_is_better);
    return drf::stats::compare(ranks.avg_ranks, t.values.rows(), ranks.model_names, a.q);
  }
  if (a.avg_ranks.empty() || a.n == 0) throw std::invalid_argument("give --table, or --avg-ranks with --n");
  return drf::stats::compare(a.avg_ranks, a.n, {}, a.q);
}

int run_friedman(const RankArgs& a) {
  const auto r = build_report(a);
  emit(a.out, drf::stats::report_to_json(r).dump(2) + "\n");
  if (!a.out.empty()) {
    std::cout << "chi2_f=" << fixed(r.friedman.chi2_f, 4) << " f_f="
              << (r.friedman.f_f ? fixed(*r.friedman.f_f, 4) : std::string("undefined")) << " df=("
              << r.friedman.df1 << "," << r.friedman.df2 << ")\n";
  }
  return kOk;
}

int run_nemenyi(const RankArgs& a) {
  const auto r = build_report(a);
  std::string text = "cd=" + exact(r.cd) + "\nq_alpha=" + exact(r.q_alpha) + "\n";
  text += "model";
  for (const auto& m : r.model_names) text += "," + m;
  text += "\n";
  for (std::size_t i = 0; i < r.model_names.size(); ++i) {
    text += r.model_names[i];
    for (std::size_t j = 0; j < r.model_names.size(); ++j) text += r.pairwise_significant[i][j] ? ",1" : ",0";
    text += "\n";
  }
  emit(a.out, text);
  return kOk;
}

struct SignArgs {
  long wins = 0;
  long ties = 0;
  long losses = 0;
  std::optional<long> n;
  double alpha = 0.05;
};

int run_signtest(const SignArgs& a) {
  if (a.n && *a.n != a.wins + a.ties + a.losses)
    throw std::invalid_argument("--n must equal wins + ties + losses");
  const auto r = drf::stats::sign_test(a.wins, a.ties, a.losses, a.alpha);
  std::cout << "threshold=" << fixed(r.threshold, 2) << "\nadjusted_wins=" << r.adjusted_wins
            << "\nadjusted_losses=" << r.adjusted_losses << "\noutcome=" << drf::stats::outcome_name(r.outcome) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oblique and rotation double random forests"};
  app.require_subcommand(1);
  std::function<int()> action;

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a forest and save the model");
  train_cmd->add_option("--data", train.data, "Training CSV")->required();
  train_cmd->add_option("--out", train.out, "Model output path")->capture_default_str();
  train_cmd->add_option("--label-column", train.label_column, "Label column name")->capture_default_str();
  train.forest.attach(train_cmd);
  train_cmd->callback([&] { action = [&] { return run_train(train); }; });

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels for a CSV");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy and confusion matrix on a labelled CSV");
  for (auto* cmd : {predict_cmd, evaluate_cmd}) {
    cmd->add_option("--model", predict.model, "Model file")->required();
    cmd->add_option("--data", predict.data, "Data CSV")->required();
    cmd->add_option("--out", predict.out, "Output path (default stdout)");
    cmd->add_option("--label-column", predict.label_column, "Label column name")->capture_default_str();
  }
  predict_cmd->callback([&] { action = [&] { return run_predict(predict); }; });
  evaluate_cmd->callback([&] { action = [&] { return run_evaluate(predict); }; });

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run every variant on every dataset of a manifest");
  bench_cmd->add_option("--manifest", bench.manifest, "Benchmark manifest (JSON)")->required();
  bench_cmd->add_option("--out", bench.out, "Output directory (overrides the manifest)");
  bench_cmd->add_option("--workers", bench.workers, "Tree-level worker threads");
  bench_cmd->callback([&] { action = [&] { return run_benchmark(bench); }; });

  auto* diagnose_cmd = app.add_subcommand("diagnose", "Diversity, bias-variance and tree-size diagnostics");
  diagnose_cmd->require_subcommand(1);

  KappaArgs kappa;
  auto* kappa_cmd = diagnose_cmd->add_subcommand("kappa", "Pairwise kappa-error diagram");
  kappa_cmd->add_option("--model", kappa.model, "Model file")->required();
  kappa_cmd->add_option("--data", kappa.data, "Labelled test CSV")->required();
  kappa_cmd->add_option("--out", kappa.out, "Output CSV (default stdout)");
  kappa_cmd->add_option("--label-column", kappa.label_column, "Label column name")->capture_default_str();
  kappa_cmd->callback([&] { action = [&] { return run_kappa(kappa); }; });

  BiasVarArgs biasvar;
  auto* biasvar_cmd = diagnose_cmd->add_subcommand("biasvar", "0-1 loss bias-variance decomposition");
  biasvar_cmd->add_option("--train", biasvar.train, "Training pool CSV")->required();
  biasvar_cmd->add_option("--test", biasvar.test, "Test CSV")->required();
  biasvar_cmd->add_option("--repeats", biasvar.repeats, "Bootstrap replicates")->capture_default_str();
  biasvar_cmd->add_option("--out", biasvar.out, "Output path (default stdout)");
  biasvar.forest.attach(biasvar_cmd);
  biasvar_cmd->callback([&] { action = [&] { return run_biasvar(biasvar); }; });

  NodesArgs nodes;
  auto* nodes_cmd = diagnose_cmd->add_subcommand("nodes", "Node-count profile of one or more models");
  nodes_cmd->add_option("--model", nodes.models, "Model file (repeatable)")->required();
  nodes_cmd->add_option("--out", nodes.out, "Output CSV (default stdout)");
  nodes_cmd->callback([&] { action = [&] { return run_nodes(nodes); }; });

  auto* stats_cmd = app.add_subcommand("stats", "Friedman, Nemenyi and sign tests");
  stats_cmd->require_subcommand(1);
  RankArgs ranks;
  auto* friedman_cmd = stats_cmd->add_subcommand("friedman", "Friedman test with Nemenyi critical difference");
  auto* nemenyi_cmd = stats_cmd->add_subcommand("nemenyi", "Nemenyi pairwise significance matrix");
  for (auto* cmd : {friedman_cmd, nemenyi_cmd}) {
    cmd->add_option("--table", ranks.table, "Accuracy CSV (rows datasets, columns models)");
    cmd->add_option("--avg-ranks", ranks.avg_ranks, "Comma-separated average ranks")->delimiter(',');
    cmd->add_option("--n", ranks.n, "Number of datasets (with --avg-ranks)");
    cmd->add_option("--q", ranks.q, "Studentized range critical value (default built-in, alpha=0.05)");
    cmd->add_flag("--lower-is-better", ranks.lower_is_better, "Table entries are errors, not accuracies");
    cmd->add_option("--out", ranks.out, "Output path (default stdout)");
  }
  friedman_cmd->callback([&] { action = [&] { return run_friedman(ranks); }; });
  nemenyi_cmd->callback([&] { action = [&] { return run_nemenyi(ranks); }; });

  SignArgs sign;
  auto* sign_cmd = stats_cmd->add_subcommand("signtest", "Win-tie-loss sign test");
  sign_cmd->add_option("--wins", sign.wins)->required();
  sign_cmd->add_option("--ties", sign.ties)->required();
  sign_cmd->add_option("--losses", sign.losses)->required();
  sign_cmd->add_option("--n", sign.n, "Dataset count (checked against the record)");
  sign_cmd->add_option("--alpha", sign.alpha)->capture_default_str();
  sign_cmd->callback([&] { action = [&] { return run_signtest(sign); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const drf::UnknownVariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnknownVariant;
  } catch (const drf::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDimensionMismatch;
  } catch (const drf::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const drf::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const TooFewTrees& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTooFewTrees;
  } catch (const drf::StatsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStatsError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kWriteError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
