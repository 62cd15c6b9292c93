// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepred/data.hpp"
#include "sepred/metrics.hpp"
#include "sepred/model.hpp"

namespace sepred {

/// Disjoint covering fold assignment; per fold and class, counts differ
/// from the perfect proportion by at most one.
struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // per-sample fold index in [0, k)

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;

  bool operator==(const FoldPlan&) const = default;
};

/// Within each class, sample indices are shuffled by seed and dealt
/// round-robin into k folds. The deal start rotates by each class's
/// remainder so fold sizes stay within one of each other overall, not just
/// per class. Every class needs at least k samples.
FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

struct CvMeta {
  ModelVariant variant = ModelVariant::Dpnn;
  CategorySelector category = CategorySelector::All;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::string dataset_fingerprint;
};

struct CvReport {
  std::vector<FoldMetrics> rows;  // one per fold, fold order
  FoldMetrics average;            // unweighted arithmetic mean per column
  CvMeta meta;
};

/// One fold at a time: fit the standardizer on the k-1 training folds,
/// train a fresh model seeded with seed XOR fold_index, evaluate on the
/// held-out fold. Loss is the held-out fold's mean cross-entropy.
CvReport cross_validate(const Dataset& ds, const ModelSpec& spec, std::size_t k,
                        std::uint64_t seed,
                        CategorySelector category = CategorySelector::All);

/// cross_validate against a precomputed plan, so ablation grids share
/// identical fold assignments across cells.
CvReport cross_validate_with_plan(const Dataset& ds, const ModelSpec& spec,
                                  const FoldPlan& plan, std::uint64_t seed,
                                  CategorySelector category);

struct AblationCell {
  ModelVariant variant;
  CategorySelector category;
  CvReport report;
};

struct AblationReport {
  std::vector<AblationCell> cells;  // variant-major, category-minor order
  FoldPlan plan;                    // shared across every cell

  const CvReport* find(ModelVariant variant, CategorySelector category) const;
};

/// One cross-validation per (variant, category) cell, all cells paired on
/// the same fold plan and per-fold seeds.
AblationReport ablate(const Dataset& ds, const ModelSpec& base_spec,
                      const std::vector<CategorySelector>& categories,
                      const std::vector<ModelVariant>& variants, std::size_t k,
                      std::uint64_t seed);

}  // namespace sepred
