// SPDX-License-Identifier: Apache-2.0
#include "sepred/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sepred {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

void require_rank(const Tensor& t, std::size_t rank, const char* op, const char* arg) {
  if (t.rank() != rank) {
    std::ostringstream msg;
    msg << op << ": " << arg << " must have rank " << rank << ", got shape "
        << t.shape_string();
    throw ShapeError(msg.str());
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    std::ostringstream msg;
    msg << "tensor: shape " << shape_string() << " expects " << shape_product(shape_)
        << " values, got " << data_.size();
    throw ShapeError(msg.str());
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("tensor: axis " + std::to_string(axis) + " out of range for shape " +
                     shape_string());
  }
  return shape_[axis];
}

std::string Tensor::shape_string() const {
  std::string out;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(shape_[i]);
  }
  return out.empty() ? "scalar" : out;
}

std::uint64_t SeededRng::next_u64() {
  // splitmix64, Steele et al.; fixed so streams are portable.
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double SeededRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

std::size_t SeededRng::next_below(std::size_t n) {
  if (n == 0) throw ContractError("rng: next_below(0)");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return static_cast<std::size_t>(x % bound);
}

double SeededRng::next_gaussian() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul", "lhs");
  require_rank(b, 2, "matmul", "rhs");
  if (a.dim(1) != b.dim(0)) {
    std::ostringstream msg;
    msg << "matmul: inner dimensions disagree: lhs " << a.shape_string() << ", rhs "
        << b.shape_string();
    throw ShapeError(msg.str());
  }
  const std::size_t m = a.dim(0), kk = a.dim(1), n = b.dim(1);
  Tensor c({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kk; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  require_rank(a, 2, "transpose", "input");
  Tensor t({a.dim(1), a.dim(0)});
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t j = 0; j < a.dim(1); ++j) t(j, i) = a(i, j);
  return t;
}

Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
  require_rank(input, 2, "conv1d", "input");
  require_rank(kernels, 3, "conv1d", "kernels");
  require_rank(bias, 1, "conv1d", "bias");
  const std::size_t len = input.dim(0), cin = input.dim(1);
  const std::size_t filters = kernels.dim(0), width = kernels.dim(1);
  if (kernels.dim(2) != cin) {
    throw ShapeError("conv1d: kernel channels " + std::to_string(kernels.dim(2)) +
                     " do not match input channels " + std::to_string(cin));
  }
  if (bias.dim(0) != filters) {
    throw ShapeError("conv1d: bias length " + std::to_string(bias.dim(0)) +
                     " does not match filter count " + std::to_string(filters));
  }
  if (width > len) {
    throw ShapeError("conv1d: kernel width " + std::to_string(width) +
                     " exceeds input length " + std::to_string(len));
  }
  const std::size_t out_len = len - width + 1;
  Tensor out({out_len, filters});
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t f = 0; f < filters; ++f) {
      double acc = bias(f);
      for (std::size_t k = 0; k < width; ++k)
        for (std::size_t c = 0; c < cin; ++c) acc += input(t + k, c) * kernels(f, k, c);
      out(t, f) = acc;
    }
  }
  return out;
}

Conv1dGrads conv1d_backward(const Tensor& input, const Tensor& kernels,
                            const Tensor& upstream) {
  require_rank(input, 2, "conv1d_backward", "input");
  require_rank(kernels, 3, "conv1d_backward", "kernels");
  require_rank(upstream, 2, "conv1d_backward", "upstream");
  const std::size_t len = input.dim(0), cin = input.dim(1);
  const std::size_t filters = kernels.dim(0), width = kernels.dim(1);
  if (kernels.dim(2) != cin) {
    throw ShapeError("conv1d_backward: kernel channels " + std::to_string(kernels.dim(2)) +
                     " do not match input channels " + std::to_string(cin));
  }
  if (width > len) {
    throw ShapeError("conv1d_backward: kernel width " + std::to_string(width) +
                     " exceeds input length " + std::to_string(len));
  }
  const std::size_t out_len = len - width + 1;
  if (upstream.dim(0) != out_len || upstream.dim(1) != filters) {
    throw ShapeError("conv1d_backward: upstream shape " + upstream.shape_string() +
                     " does not match expected " + std::to_string(out_len) + "x" +
                     std::to_string(filters));
  }

  Conv1dGrads g{Tensor({len, cin}), Tensor({filters, width, cin}), Tensor({filters})};
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t f = 0; f < filters; ++f) {
      const double up = upstream(t, f);
      g.bias(f) += up;
      for (std::size_t k = 0; k < width; ++k) {
        for (std::size_t c = 0; c < cin; ++c) {
          g.kernels(f, k, c) += up * input(t + k, c);
          g.input(t + k, c) += up * kernels(f, k, c);
        }
      }
    }
  }
  return g;
}

Tensor relu(const Tensor& x) {
  Tensor out(x.shape());
  auto src = x.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
  return out;
}

Tensor relu_grad(const Tensor& x) {
  Tensor out(x.shape());
  auto src = x.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0 ? 1.0 : 0.0;
  return out;
}

Tensor softmax(const Tensor& logits) {
  require_rank(logits, 2, "softmax", "logits");
  const std::size_t n = logits.dim(0), classes = logits.dim(1);
  if (classes < 2) {
    throw ShapeError("softmax: needs at least 2 classes, got " + std::to_string(classes));
  }
  Tensor out({n, classes});
  for (std::size_t i = 0; i < n; ++i) {
    double mx = logits(i, 0);
    for (std::size_t j = 1; j < classes; ++j) mx = std::max(mx, logits(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < classes; ++j) {
      const double e = std::exp(logits(i, j) - mx);
      out(i, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < classes; ++j) out(i, j) /= sum;
  }
  return out;
}

}  // namespace sepred
