#include "drf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "drf/error.hpp"

namespace drf {

Dataset::Dataset(std::size_t n_features, std::vector<double> values, std::vector<int> labels,
                 std::vector<std::string> class_names, std::vector<std::string> feature_names)
    : n_features_(n_features),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      feature_names_(std::move(feature_names)) {
  if (n_features_ == 0) throw DataError("dataset has no feature columns");
  if (labels_.empty()) throw DataError("empty dataset");
  if (values_.size() != labels_.size() * n_features_)
    throw DataError("feature matrix size does not match row count");
  for (int y : labels_) {
    if (y < 0 || y >= n_classes()) throw DataError("label index out of range");
  }
  if (feature_names_.empty()) {
    for (std::size_t j = 0; j < n_features_; ++j) feature_names_.push_back("f" + std::to_string(j));
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> values;
  std::vector<int> labels;
  values.reserve(indices.size() * n_features_);
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return Dataset(n_features_, std::move(values), std::move(labels), class_names_, feature_names_);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_finite(std::string_view cell, double& value) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

}  // namespace

Dataset parse_dataset(std::string_view text, const LoadOptions& options) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!trim(line).empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty()) throw DataError("empty dataset: missing header row");

  auto header = split_fields(lines.front());
  std::size_t label_col = header.size();
  if (options.has_labels) {
    if (options.label_column == kLastColumn) {
      label_col = header.size() - 1;
    } else {
      auto it = std::find(header.begin(), header.end(), options.label_column);
      if (it == header.end())
        throw DataError("label column '" + options.label_column + "' not found in header");
      label_col = static_cast<std::size_t>(it - header.begin());
    }
  }

  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != label_col) feature_names.emplace_back(header[j]);
  }
  if (feature_names.empty()) throw DataError("dataset has no feature columns");

  std::vector<std::string> classes = options.known_classes;
  std::unordered_map<std::string, int> class_index;
  for (std::size_t k = 0; k < classes.size(); ++k) class_index.emplace(classes[k], static_cast<int>(k));

  std::vector<double> values;
  std::vector<int> labels;
  values.reserve((lines.size() - 1) * feature_names.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = split_fields(lines[r]);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << "row " << r << " has " << fields.size() << " cells, expected " << header.size();
      throw DataError(msg.str());
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label_col) continue;
      double v = 0.0;
      if (!parse_finite(fields[j], v)) {
        std::ostringstream msg;
        msg << "non-numeric feature cell at row " << r << ", column " << (j + 1);
        throw DataError(msg.str());
      }
      values.push_back(v);
    }
    if (options.has_labels) {
      std::string name(fields[label_col]);
      if (name.empty()) throw DataError("empty label cell at row " + std::to_string(r));
      auto [it, inserted] = class_index.emplace(name, static_cast<int>(classes.size()));
      if (inserted) classes.push_back(name);
      labels.push_back(it->second);
    } else {
      labels.push_back(0);
    }
  }
  if (labels.empty()) throw DataError("empty dataset: header but no rows");
  if (classes.empty()) classes.push_back("0");
  const std::size_t n_features = feature_names.size();
  return Dataset(n_features, std::move(values), std::move(labels), std::move(classes), std::move(feature_names));
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), options);
}

SampleIndexSet all_indices(std::size_t n) {
  SampleIndexSet out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

SampleIndexSet bootstrap(std::span<const std::size_t> source, Rng& rng) {
  if (source.empty()) throw std::invalid_argument("bootstrap: empty source");
  std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
  SampleIndexSet out(source.size());
  for (auto& v : out) v = source[pick(rng)];
  return out;
}

FeatureSubset sample_feature_subset(std::size_t n_features, std::size_t mtry, Rng& rng) {
  if (n_features == 0 || mtry == 0) throw std::invalid_argument("sample_feature_subset: n and mtry must be >= 1");
  auto pool = all_indices(n_features);
  FeatureSubset out;
  out.reserve(std::min(mtry, n_features));
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), mtry, rng);
  return out;
}

std::size_t default_mtry(std::size_t n_features) {
  auto m = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(m, 1);
}

std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index) {
  // splitmix64 finalizer over a combined state.
  std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace drf
