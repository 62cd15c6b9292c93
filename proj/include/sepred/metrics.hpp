// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "sepred/tensor.hpp"

namespace sepred {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

/// Thresholds two-class probability rows: predicted positive iff the
/// positive-class probability (column 1) is >= threshold.
Confusion confusion(const Tensor& probs, const std::vector<int>& labels,
                    double threshold = 0.5);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // a zero-division guard fired
};

/// accuracy=(tp+tn)/total, precision=tp/(tp+fp), recall=tp/(tp+fn),
/// f1=2pr/(p+r); each guarded ratio is 0 when its denominator is 0, and
/// the degenerate flag records that a guard fired.
ClassificationMetrics classification_metrics(const Confusion& c);

/// Probability that a uniformly random positive outscores a uniformly
/// random negative, ties counting one half (Mann-Whitney, average ranks).
/// Needs at least one label of each class.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// One row of a cross-validation report: the six table columns.
struct FoldMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  bool degenerate = false;
};

}  // namespace sepred
