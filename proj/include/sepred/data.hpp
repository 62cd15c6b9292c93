// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sepred/tensor.hpp"

namespace sepred {

enum class FeatureGroup { Chromatin, Tf, Motif, Sequence };
enum class FeatureCategory { Genomic, Epigenomic };

/// Column selector used by feature ablation; All keeps every column.
enum class CategorySelector { All, Genomic, Epigenomic };

std::string to_string(FeatureGroup g);
FeatureGroup group_from_string(const std::string& name);
std::string to_string(FeatureCategory c);
FeatureCategory category_from_string(const std::string& name);
std::string to_string(CategorySelector s);
CategorySelector selector_from_string(const std::string& name);

struct FeatureInfo {
  std::string name;
  FeatureGroup group;
  bool operator==(const FeatureInfo&) const = default;
};

/// Ordered feature schema plus the group -> category map. The default
/// manifest has 45 features (20 chromatin, 11 TF, 11 motif, 3 sequence)
/// with motif and sequence mapped to genomic, chromatin and TF to
/// epigenomic.
class FeatureManifest {
public:
  FeatureManifest(std::vector<FeatureInfo> features,
                  std::map<FeatureGroup, FeatureCategory> categories);

  static FeatureManifest default_manifest();

  /// {"features": [{"name", "group"}...], "categories": {group: category}}
  static FeatureManifest load_json(const std::filesystem::path& path);
  static FeatureManifest from_json(const std::string& text);
  void save_json(const std::filesystem::path& path) const;
  std::string to_json() const;

  const std::vector<FeatureInfo>& features() const { return features_; }
  std::size_t feature_count() const { return features_.size(); }
  FeatureCategory category_of(FeatureGroup g) const;
  FeatureCategory category_of_column(std::size_t column) const;

  /// Column indices whose category matches the selector, in schema order.
  std::vector<std::size_t> columns_for(CategorySelector s) const;

  FeatureManifest restricted_to(const std::vector<std::size_t>& columns) const;

  bool operator==(const FeatureManifest&) const = default;

private:
  std::vector<FeatureInfo> features_;
  std::map<FeatureGroup, FeatureCategory> categories_;
};

/// Labeled feature matrix; y holds 0/1 with 1 = positive class.
struct Dataset {
  Tensor x;  // N x F
  std::vector<int> y;
  FeatureManifest manifest = FeatureManifest::default_manifest();

  std::size_t sample_count() const { return y.size(); }
  std::size_t feature_count() const { return manifest.feature_count(); }
};

/// Reads the CSV schema: header row of the manifest's feature names in
/// order plus a final "label" column, then one sample per row. Labels must
/// be 0 or 1; every cell must be finite.
Dataset load_csv(const std::filesystem::path& path, const FeatureManifest& manifest);

/// Canonical CSV rendering; floats use shortest round-trip formatting so
/// write -> load -> write is byte-identical.
std::string to_csv(const Dataset& ds);
void write_csv(const std::filesystem::path& path, const Dataset& ds);

/// Column-filtered copy preserving row order and labels.
Dataset select_features(const Dataset& ds, CategorySelector category);

/// Per-feature z-score transform, fitted on training rows only. Standard
/// deviations are floored at 1e-8 so constant features map to 0.
class Standardizer {
public:
  static Standardizer fit(const Dataset& ds);  // requires N >= 2
  Dataset apply(const Dataset& ds) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stddevs() const { return stddevs_; }

private:
  std::vector<double> means_;
  std::vector<double> stddevs_;
};

/// Synthetic 45-feature dataset against the default manifest. Features in
/// the signal category get class-conditional Gaussian means a fixed
/// standardized distance apart (separation, in noise_stddev units, per
/// feature); every other feature is pure noise. All means carries the
/// signal on every column.
struct SynthConfig {
  std::size_t n_per_class = 500;
  double separation = 4.0;
  CategorySelector signal_category = CategorySelector::All;
  double noise_stddev = 1.0;
  std::uint64_t seed = 42;

  void validate() const;
};

Dataset gen_synthetic(const SynthConfig& config);

/// FNV-1a 64 over feature names, values, and labels; 16 hex digits.
std::string dataset_fingerprint(const Dataset& ds);

}  // namespace sepred
