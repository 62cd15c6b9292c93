// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sepred/errors.hpp"

namespace sepred {

/// Dense row-major tensor of 64-bit floats. The shape is fixed at
/// construction; product(shape) always equals the flat data length.
class Tensor {
public:
  Tensor() = default;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> shape);

  /// Adopts `data` as the row-major contents; sizes must agree.
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i) { return data_[i]; }
  double operator()(std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  /// "3x4x2" style rendering for error messages.
  std::string shape_string() const;

private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// Deterministic splitmix64 generator. Equal seeds give equal streams on
/// every platform. split(stream) derives the sub-generator seeded with
/// seed XOR stream, the rule used for per-fold training seeds.
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53 random bits.
  double next_unit();

  double next_uniform(double lo, double hi);

  /// Uniform in [0, n), unbiased via rejection.
  std::size_t next_below(std::size_t n);

  /// Standard normal via Box-Muller (one draw consumes two uniforms).
  double next_gaussian();

  SeededRng split(std::uint64_t stream) const { return SeededRng(seed_ ^ stream); }

  /// Fisher-Yates shuffle driven by this stream.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[next_below(i)]);
    }
  }

private:
  std::uint64_t seed_ = 0;
  std::uint64_t state_ = 0;
};

}  // namespace sepred
