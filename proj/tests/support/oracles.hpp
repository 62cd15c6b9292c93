// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

// Naive reference implementations used as test oracles. These stay
// independent of the library code paths they check: plain nested loops
// over nested vectors.
namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t m = a.size();
  const std::size_t k = b.size();
  const std::size_t n = b.empty() ? 0 : b[0].size();
  Mat c(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t kk = 0; kk < k; ++kk) {
        c[i][j] += a[i][kk] * b[kk][j];
      }
    }
  }
  return c;
}

// input [L][Cin], kernels [F][K][Cin], bias [F] -> [L-K+1][F],
// sliding-window dot products, no kernel flip.
inline Mat conv1d(const Mat& input, const std::vector<Mat>& kernels,
                  const std::vector<double>& bias) {
  const std::size_t len = input.size();
  const std::size_t filters = kernels.size();
  const std::size_t width = kernels[0].size();
  const std::size_t cin = input[0].size();
  const std::size_t out_len = len - width + 1;
  Mat out(out_len, std::vector<double>(filters, 0.0));
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t f = 0; f < filters; ++f) {
      double acc = bias[f];
      for (std::size_t k = 0; k < width; ++k) {
        for (std::size_t c = 0; c < cin; ++c) {
          acc += input[t + k][c] * kernels[f][k][c];
        }
      }
      out[t][f] = acc;
    }
  }
  return out;
}

// Exhaustive positive x negative pair count, ties worth one half.
inline double auc_paircount(const std::vector<double>& scores,
                            const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace oracle
