// SPDX-License-Identifier: Apache-2.0
#include "sepred/data.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sepred/jsonio.hpp"

namespace sepred {

std::string to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Chromatin: return "chromatin";
    case FeatureGroup::Tf: return "tf";
    case FeatureGroup::Motif: return "motif";
    case FeatureGroup::Sequence: return "sequence";
  }
  return "?";
}

FeatureGroup group_from_string(const std::string& name) {
  if (name == "chromatin") return FeatureGroup::Chromatin;
  if (name == "tf") return FeatureGroup::Tf;
  if (name == "motif") return FeatureGroup::Motif;
  if (name == "sequence") return FeatureGroup::Sequence;
  throw SchemaError("unknown feature group: '" + name + "'");
}

std::string to_string(FeatureCategory c) {
  return c == FeatureCategory::Genomic ? "genomic" : "epigenomic";
}

FeatureCategory category_from_string(const std::string& name) {
  if (name == "genomic") return FeatureCategory::Genomic;
  if (name == "epigenomic") return FeatureCategory::Epigenomic;
  throw SchemaError("unknown feature category: '" + name + "'");
}

std::string to_string(CategorySelector s) {
  switch (s) {
    case CategorySelector::All: return "all";
    case CategorySelector::Genomic: return "genomic";
    case CategorySelector::Epigenomic: return "epigenomic";
  }
  return "?";
}

CategorySelector selector_from_string(const std::string& name) {
  if (name == "all" || name == "both") return CategorySelector::All;
  if (name == "genomic") return CategorySelector::Genomic;
  if (name == "epigenomic") return CategorySelector::Epigenomic;
  throw ConfigError("unknown feature category: '" + name +
                    "' (expected all, genomic, or epigenomic)");
}

FeatureManifest::FeatureManifest(std::vector<FeatureInfo> features,
                                 std::map<FeatureGroup, FeatureCategory> categories)
    : features_(std::move(features)), categories_(std::move(categories)) {
  if (features_.empty()) throw SchemaError("manifest: no features");
  std::vector<std::string> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw SchemaError("manifest: empty feature name");
    names.push_back(f.name);
    if (categories_.find(f.group) == categories_.end()) {
      throw SchemaError("manifest: group '" + to_string(f.group) +
                        "' has no category mapping");
    }
  }
  std::sort(names.begin(), names.end());
  auto dup = std::adjacent_find(names.begin(), names.end());
  if (dup != names.end()) {
    throw SchemaError("manifest: duplicate feature name '" + *dup + "'");
  }
}

FeatureManifest FeatureManifest::default_manifest() {
  auto padded = [](const char* prefix, std::size_t i) {
    std::ostringstream name;
    name << prefix << '_' << (i < 10 ? "0" : "") << i;
    return name.str();
  };
  std::vector<FeatureInfo> features;
  for (std::size_t i = 1; i <= 20; ++i)
    features.push_back({padded("chromatin", i), FeatureGroup::Chromatin});
  for (std::size_t i = 1; i <= 11; ++i) features.push_back({padded("tf", i), FeatureGroup::Tf});
  for (std::size_t i = 1; i <= 11; ++i)
    features.push_back({padded("motif", i), FeatureGroup::Motif});
  for (std::size_t i = 1; i <= 3; ++i)
    features.push_back({padded("sequence", i), FeatureGroup::Sequence});
  return FeatureManifest(std::move(features),
                         {{FeatureGroup::Chromatin, FeatureCategory::Epigenomic},
                          {FeatureGroup::Tf, FeatureCategory::Epigenomic},
                          {FeatureGroup::Motif, FeatureCategory::Genomic},
                          {FeatureGroup::Sequence, FeatureCategory::Genomic}});
}

FeatureCategory FeatureManifest::category_of(FeatureGroup g) const {
  auto it = categories_.find(g);
  if (it == categories_.end()) {
    throw SchemaError("manifest: group '" + to_string(g) + "' has no category mapping");
  }
  return it->second;
}

FeatureCategory FeatureManifest::category_of_column(std::size_t column) const {
  if (column >= features_.size()) {
    throw ContractError("manifest: column " + std::to_string(column) + " out of range");
  }
  return category_of(features_[column].group);
}

std::vector<std::size_t> FeatureManifest::columns_for(CategorySelector s) const {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (s == CategorySelector::All ||
        (s == CategorySelector::Genomic &&
         category_of_column(i) == FeatureCategory::Genomic) ||
        (s == CategorySelector::Epigenomic &&
         category_of_column(i) == FeatureCategory::Epigenomic)) {
      cols.push_back(i);
    }
  }
  return cols;
}

FeatureManifest FeatureManifest::restricted_to(const std::vector<std::size_t>& columns) const {
  std::vector<FeatureInfo> kept;
  for (std::size_t c : columns) {
    if (c >= features_.size()) {
      throw ContractError("manifest: column " + std::to_string(c) + " out of range");
    }
    kept.push_back(features_[c]);
  }
  return FeatureManifest(std::move(kept), categories_);
}

std::string FeatureManifest::to_json() const {
  nlohmann::json doc;
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : features_) {
    features.push_back({{"name", f.name}, {"group", to_string(f.group)}});
  }
  doc["features"] = std::move(features);
  nlohmann::json categories;
  for (const auto& [group, category] : categories_) {
    categories[to_string(group)] = to_string(category);
  }
  doc["categories"] = std::move(categories);
  return dump_json(doc);
}

void FeatureManifest::save_json(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << to_json() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureManifest FeatureManifest::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  try {
    std::vector<FeatureInfo> features;
    for (const auto& f : doc.at("features")) {
      features.push_back(
          {f.at("name").get<std::string>(), group_from_string(f.at("group"))});
    }
    std::map<FeatureGroup, FeatureCategory> categories;
    for (const auto& [group, category] : doc.at("categories").items()) {
      categories[group_from_string(group)] =
          category_from_string(category.get<std::string>());
    }
    return FeatureManifest(std::move(features), std::move(categories));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  }
}

FeatureManifest FeatureManifest::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column +
                     "': not a finite number: '" + cell + "'");
  }
  return value;
}

std::string canonical_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const FeatureManifest& manifest) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_line(line);
  const auto& features = manifest.features();
  const std::size_t expected = features.size() + 1;
  for (std::size_t i = 0; i < std::min(header.size(), features.size()); ++i) {
    if (header[i] != features[i].name) {
      throw SchemaError(path.string() + ": header column " + std::to_string(i + 1) +
                        " is '" + header[i] + "', expected '" + features[i].name + "'");
    }
  }
  if (header.size() < expected) {
    const std::string missing =
        header.size() < features.size() ? features[header.size()].name : "label";
    throw SchemaError(path.string() + ": missing column '" + missing + "'");
  }
  if (header[features.size()] != "label") {
    throw SchemaError(path.string() + ": last column is '" + header[features.size()] +
                      "', expected 'label'");
  }
  if (header.size() > expected) {
    throw SchemaError(path.string() + ": unexpected extra column '" + header[expected] +
                      "'");
  }

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != expected) {
      throw ParseError(path.string() + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(expected));
    }
    for (std::size_t c = 0; c < features.size(); ++c) {
      values.push_back(parse_cell(cells[c], row, features[c].name));
    }
    const double label = parse_cell(cells[features.size()], row, "label");
    if (label != 0.0 && label != 1.0) {
      throw ParseError("row " + std::to_string(row) + ": label must be 0 or 1, got '" +
                       cells[features.size()] + "'");
    }
    labels.push_back(static_cast<int>(label));
  }
  Tensor x({labels.size(), features.size()}, std::move(values));
  return Dataset{std::move(x), std::move(labels), manifest};
}

std::string to_csv(const Dataset& ds) {
  std::string out;
  const auto& features = ds.manifest.features();
  for (const auto& f : features) {
    out += f.name;
    out += ',';
  }
  out += "label\n";
  for (std::size_t i = 0; i < ds.sample_count(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      out += canonical_double(ds.x(i, j));
      out += ',';
    }
    out += std::to_string(ds.y[i]);
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << to_csv(ds);
  if (!out) throw IoError("write failed: " + path.string());
}

Dataset select_features(const Dataset& ds, CategorySelector category) {
  const auto cols = ds.manifest.columns_for(category);
  if (cols.empty()) {
    throw ConfigError("no features in category '" + to_string(category) +
                      "' under this manifest");
  }
  Tensor x({ds.sample_count(), cols.size()});
  for (std::size_t i = 0; i < ds.sample_count(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) x(i, j) = ds.x(i, cols[j]);
  }
  return Dataset{std::move(x), ds.y, ds.manifest.restricted_to(cols)};
}

Standardizer Standardizer::fit(const Dataset& ds) {
  const std::size_t n = ds.sample_count();
  if (n < 2) throw ContractError("standardizer: needs at least 2 rows to fit");
  const std::size_t f = ds.x.dim(1);
  Standardizer out;
  out.means_.assign(f, 0.0);
  out.stddevs_.assign(f, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) out.means_[j] += ds.x(i, j);
  for (double& m : out.means_) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const double d = ds.x(i, j) - out.means_[j];
      out.stddevs_[j] += d * d;
    }
  }
  for (double& s : out.stddevs_) s = std::max(std::sqrt(s / static_cast<double>(n)), 1e-8);
  return out;
}

Dataset Standardizer::apply(const Dataset& ds) const {
  if (ds.x.dim(1) != means_.size()) {
    throw ShapeError("standardizer: fitted on " + std::to_string(means_.size()) +
                     " features, dataset has " + std::to_string(ds.x.dim(1)));
  }
  Dataset out{Tensor(ds.x.shape()), ds.y, ds.manifest};
  for (std::size_t i = 0; i < ds.sample_count(); ++i) {
    for (std::size_t j = 0; j < means_.size(); ++j) {
      out.x(i, j) = (ds.x(i, j) - means_[j]) / stddevs_[j];
    }
  }
  return out;
}

void SynthConfig::validate() const {
  if (n_per_class == 0) throw ConfigError("n_per_class must be a positive integer");
  if (separation < 0.0) throw ConfigError("separation must be nonnegative");
  if (!(noise_stddev > 0.0)) throw ConfigError("noise_stddev must be positive");
}

Dataset gen_synthetic(const SynthConfig& config) {
  config.validate();
  const FeatureManifest manifest = FeatureManifest::default_manifest();
  const std::size_t f = manifest.feature_count();
  const auto signal_cols = manifest.columns_for(config.signal_category);
  std::vector<bool> is_signal(f, false);
  for (std::size_t c : signal_cols) is_signal[c] = true;

  // Per signal feature, class means sit `separation` noise-stddevs apart.
  const double half_gap = 0.5 * config.separation * config.noise_stddev;

  SeededRng rng(config.seed);
  const std::size_t n = 2 * config.n_per_class;
  Tensor x({n, f});
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i < config.n_per_class ? 0 : 1;
    y[i] = label;
    const double sign = label == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < f; ++j) {
      const double mean = is_signal[j] ? sign * half_gap : 0.0;
      x(i, j) = mean + config.noise_stddev * rng.next_gaussian();
    }
  }
  return Dataset{std::move(x), std::move(y), manifest};
}

std::string dataset_fingerprint(const Dataset& ds) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  auto mix = [&hash](const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= p[i];
      hash *= 0x100000001b3ull;
    }
  };
  for (const auto& f : ds.manifest.features()) {
    mix(f.name.data(), f.name.size());
    mix(";", 1);
  }
  for (double v : ds.x.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    mix(&bits, sizeof(bits));
  }
  for (int label : ds.y) {
    const auto b = static_cast<unsigned char>(label);
    mix(&b, 1);
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

}  // namespace sepred
