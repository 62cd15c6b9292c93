// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sepred/tensor.hpp"

namespace sepred {

/// c[i][j] = sum_k a[i][k] * b[k][j]; a is MxK, b is KxN.
Tensor matmul(const Tensor& a, const Tensor& b);

/// 2-D transpose.
Tensor transpose(const Tensor& a);

/// 1-D cross-correlation, stride 1, valid padding:
///   out[t][f] = bias[f] + sum_{k,c} input[t+k][c] * kernels[f][k][c]
/// input is LxCin, kernels FxKxCin, bias F; output (L-K+1)xF.
/// No kernel flip is applied.
Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias);

struct Conv1dGrads {
  Tensor input;
  Tensor kernels;
  Tensor bias;
};

/// Gradients of sum(upstream * conv1d_forward(input, kernels, bias))
/// with respect to input, kernels, and bias. upstream is (L-K+1)xF.
Conv1dGrads conv1d_backward(const Tensor& input, const Tensor& kernels,
                            const Tensor& upstream);

/// max(0, x) elementwise.
Tensor relu(const Tensor& x);

/// 1 where x > 0, else 0. The subgradient at exactly 0 is taken as 0.
Tensor relu_grad(const Tensor& x);

/// Row-wise softmax over NxC logits, C >= 2, stabilized by per-row max
/// subtraction. Rows of the result sum to 1 within 1e-12.
Tensor softmax(const Tensor& logits);

}  // namespace sepred
