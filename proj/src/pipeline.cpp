// SPDX-License-Identifier: Apache-2.0
#include "sepred/pipeline.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>

namespace sepred {

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be at least 2");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < ds.sample_count(); ++i) {
    by_class[static_cast<std::size_t>(ds.y[i])].push_back(i);
  }
  for (int label = 0; label < 2; ++label) {
    if (by_class[label].size() < k) {
      throw ContractError("stratified_kfold: class " + std::to_string(label) + " has " +
                          std::to_string(by_class[label].size()) +
                          " samples, fewer than k=" + std::to_string(k));
    }
  }

  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(ds.sample_count(), 0);
  SeededRng rng(seed);
  std::size_t offset = 0;
  for (int label = 0; label < 2; ++label) {
    auto& indices = by_class[label];
    rng.shuffle(indices);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      plan.assignments[indices[i]] = (offset + i) % k;
    }
    // Rotate the deal start so class remainders land on different folds.
    offset = (offset + indices.size()) % k;
  }
  return plan;
}

namespace {

Dataset gather_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Tensor x({rows.size(), ds.x.dim(1)});
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < ds.x.dim(1); ++j) x(i, j) = ds.x(rows[i], j);
    y[i] = ds.y[rows[i]];
  }
  return Dataset{std::move(x), std::move(y), ds.manifest};
}

FoldMetrics evaluate_fold(const TrainedModel& model, const Dataset& test) {
  const Tensor probs = forward(model, test.x);
  FoldMetrics fm;
  fm.loss = cross_entropy(probs, onehot_labels(test.y));
  const auto cm = classification_metrics(confusion(probs, test.y));
  fm.accuracy = cm.accuracy;
  fm.precision = cm.precision;
  fm.recall = cm.recall;
  fm.f1 = cm.f1;
  fm.degenerate = cm.degenerate;
  std::vector<double> scores(test.sample_count());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = probs(i, 1);
  fm.auc = auc(scores, test.y);
  return fm;
}

// Re-throws preserving the concrete error type so exit-code mapping and
// callers' catch clauses still see the original class.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix) {
  const std::string msg = prefix + ": " + e.what();
  if (dynamic_cast<const ShapeError*>(&e)) throw ShapeError(msg);
  if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
  if (dynamic_cast<const ParseError*>(&e)) throw ParseError(msg);
  if (dynamic_cast<const SchemaError*>(&e)) throw SchemaError(msg);
  if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
  throw ContractError(msg);
}

FoldMetrics column_means(const std::vector<FoldMetrics>& rows) {
  FoldMetrics avg;
  for (const auto& r : rows) {
    avg.loss += r.loss;
    avg.accuracy += r.accuracy;
    avg.precision += r.precision;
    avg.recall += r.recall;
    avg.f1 += r.f1;
    avg.auc += r.auc;
    avg.degenerate = avg.degenerate || r.degenerate;
  }
  const auto n = static_cast<double>(rows.size());
  avg.loss /= n;
  avg.accuracy /= n;
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  avg.auc /= n;
  return avg;
}

}  // namespace

CvReport cross_validate_with_plan(const Dataset& ds, const ModelSpec& spec,
                                  const FoldPlan& plan, std::uint64_t seed,
                                  CategorySelector category) {
  if (plan.assignments.size() != ds.sample_count()) {
    throw ContractError("cross_validate: fold plan covers " +
                        std::to_string(plan.assignments.size()) + " samples, dataset has " +
                        std::to_string(ds.sample_count()));
  }
  CvReport report;
  report.meta = CvMeta{spec.variant, category, seed, plan.k, dataset_fingerprint(ds)};
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    try {
      const Dataset train_raw = gather_rows(ds, plan.train_indices(fold));
      const Dataset test_raw = gather_rows(ds, plan.test_indices(fold));
      const Standardizer standardizer = Standardizer::fit(train_raw);
      const Dataset train_set = standardizer.apply(train_raw);
      const Dataset test_set = standardizer.apply(test_raw);
      SeededRng fold_rng = SeededRng(seed).split(fold);
      const TrainResult result = train(spec, train_set.x, train_set.y, fold_rng);
      report.rows.push_back(evaluate_fold(result.model, test_set));
    } catch (const Error& e) {
      rethrow_with_context(e, "fold " + std::to_string(fold));
    }
  }
  report.average = column_means(report.rows);
  return report;
}

CvReport cross_validate(const Dataset& ds, const ModelSpec& spec, std::size_t k,
                        std::uint64_t seed, CategorySelector category) {
  return cross_validate_with_plan(ds, spec, stratified_kfold(ds, k, seed), seed, category);
}

const CvReport* AblationReport::find(ModelVariant variant,
                                     CategorySelector category) const {
  for (const auto& cell : cells) {
    if (cell.variant == variant && cell.category == category) return &cell.report;
  }
  return nullptr;
}

AblationReport ablate(const Dataset& ds, const ModelSpec& base_spec,
                      const std::vector<CategorySelector>& categories,
                      const std::vector<ModelVariant>& variants, std::size_t k,
                      std::uint64_t seed) {
  if (categories.empty() || variants.empty()) {
    throw ConfigError("ablate: need at least one category and one variant");
  }
  AblationReport report;
  report.plan = stratified_kfold(ds, k, seed);
  for (ModelVariant variant : variants) {
    for (CategorySelector category : categories) {
      ModelSpec spec = base_spec;
      spec.variant = variant;
      try {
        const Dataset cell_ds = select_features(ds, category);
        report.cells.push_back(
            {variant, category,
             cross_validate_with_plan(cell_ds, spec, report.plan, seed, category)});
      } catch (const Error& e) {
        rethrow_with_context(e, "cell " + to_string(variant) + "/" + to_string(category));
      }
    }
  }
  return report;
}

}  // namespace sepred
