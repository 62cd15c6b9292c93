// SPDX-License-Identifier: Apache-2.0
#include "sepred/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sepred {

Confusion confusion(const Tensor& probs, const std::vector<int>& labels,
                    double threshold) {
  if (probs.rank() != 2 || probs.dim(1) != 2) {
    throw ShapeError("confusion: probs must be Bx2, got " + probs.shape_string());
  }
  if (probs.dim(0) != labels.size()) {
    throw ShapeError("confusion: " + std::to_string(probs.dim(0)) + " rows vs " +
                     std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ContractError("confusion: empty input");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ContractError("confusion: threshold must be in (0,1)");
  }
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = probs(i, 1) >= threshold;
    const bool actual = labels[i] == 1;
    if (predicted && actual) ++c.tp;
    else if (predicted && !actual) ++c.fp;
    else if (!predicted && actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ClassificationMetrics classification_metrics(const Confusion& c) {
  if (c.total() == 0) throw ContractError("classification_metrics: empty confusion");
  ClassificationMetrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) {
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  } else {
    m.degenerate = true;
  }
  if (c.tp + c.fn > 0) {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  } else {
    m.degenerate = true;
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.degenerate = true;
  }
  return m;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("auc: " + std::to_string(scores.size()) + " scores vs " +
                     std::to_string(labels.size()) + " labels");
  }
  std::size_t n_pos = 0;
  for (int label : labels) {
    if (label == 1) ++n_pos;
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0) throw ContractError("auc: no positive labels in input");
  if (n_neg == 0) throw ContractError("auc: no negative labels in input");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average 1-based ranks over tied runs; rank sums stay exact in doubles.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += avg_rank;
    }
    i = j;
  }
  const double u = positive_rank_sum -
                   0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace sepred
