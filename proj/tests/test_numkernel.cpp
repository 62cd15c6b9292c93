// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sepred/numkernel.hpp"
#include "support/oracles.hpp"

using namespace sepred;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, SeededRng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.next_uniform(lo, hi);
  return t;
}

oracle::Mat as_mat(const Tensor& t) {
  oracle::Mat m(t.dim(0), std::vector<double>(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j) m[i][j] = t(i, j);
  return m;
}

}  // namespace

TEST_CASE("tensor enforces shape/data agreement") {
  CHECK_NOTHROW(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  CHECK_THROWS_AS(Tensor({2, 3}, {1, 2, 3}), ShapeError);
  Tensor z({2, 2});
  for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("matmul identity and zero cases") {
  SeededRng rng(7);
  Tensor a = random_tensor({3, 3}, rng);
  Tensor eye({3, 3});
  for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
  Tensor prod = matmul(a, eye);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(prod.values()[i] == a.values()[i]);

  Tensor b = random_tensor({2, 4}, rng);
  Tensor zero({4, 3});
  Tensor z = matmul(b, zero);
  CHECK(z.shape() == std::vector<std::size_t>{2, 3});
  for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("matmul matches the naive triple-loop oracle") {
  SeededRng rng(12345);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 2}, rng);
  const auto expected = oracle::matmul(as_mat(a), as_mat(b));
  const Tensor got = matmul(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(got(i, j) - expected[i][j]) <= 1e-12);
}

TEST_CASE("matmul rejects mismatched inner dimensions, naming both shapes") {
  Tensor a({3, 4});
  Tensor b({5, 2});
  CHECK_THROWS_WITH_AS(matmul(a, b),
                       "matmul: inner dimensions disagree: lhs 3x4, rhs 5x2", ShapeError);
}

TEST_CASE("matmul is associative on random triples") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SeededRng rng(seed);
    Tensor a = random_tensor({4, 3}, rng);
    Tensor b = random_tensor({3, 5}, rng);
    Tensor c = random_tensor({5, 2}, rng);
    Tensor left = matmul(matmul(a, b), c);
    Tensor right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) {
      const double l = left.values()[i], r = right.values()[i];
      CHECK(std::abs(l - r) <= 1e-9 * std::max({1.0, std::abs(l), std::abs(r)}));
    }
  }
}

TEST_CASE("conv1d identity kernel reproduces the input") {
  SeededRng rng(3);
  Tensor input = random_tensor({6, 1}, rng);
  Tensor kernel({1, 1, 1}, {1.0});
  Tensor bias({1});
  Tensor out = conv1d_forward(input, kernel, bias);
  REQUIRE(out.shape() == std::vector<std::size_t>{6, 1});
  for (std::size_t i = 0; i < 6; ++i) CHECK(out(i, 0) == input(i, 0));
}

TEST_CASE("conv1d zero kernels emit the bias everywhere") {
  SeededRng rng(4);
  Tensor input = random_tensor({5, 2}, rng);
  Tensor kernels({3, 2, 2});
  Tensor bias({3}, {0.25, -1.5, 2.0});
  Tensor out = conv1d_forward(input, kernels, bias);
  REQUIRE(out.shape() == std::vector<std::size_t>{4, 3});
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t f = 0; f < 3; ++f) CHECK(out(t, f) == bias(f));
}

TEST_CASE("conv1d sliding-window example [1,2,3] * [1,0,-1] = [-2]") {
  Tensor input({3, 1}, {1.0, 2.0, 3.0});
  Tensor kernel({1, 3, 1}, {1.0, 0.0, -1.0});
  Tensor bias({1});
  Tensor out = conv1d_forward(input, kernel, bias);
  REQUIRE(out.shape() == std::vector<std::size_t>{1, 1});
  CHECK(out(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("conv1d rejects kernels wider than the input") {
  Tensor input({2, 1});
  Tensor kernel({1, 3, 1});
  Tensor bias({1});
  CHECK_THROWS_AS(conv1d_forward(input, kernel, bias), ShapeError);
}

TEST_CASE("conv1d K=1 identity filter bank reproduces multi-channel input exactly") {
  SeededRng rng(11);
  const std::size_t cin = 3;
  Tensor input = random_tensor({7, cin}, rng);
  Tensor kernels({cin, 1, cin});
  for (std::size_t f = 0; f < cin; ++f) kernels(f, 0, f) = 1.0;
  Tensor bias({cin});
  Tensor out = conv1d_forward(input, kernels, bias);
  REQUIRE(out.same_shape(input));
  for (std::size_t i = 0; i < input.size(); ++i)
    CHECK(out.values()[i] == input.values()[i]);
}

TEST_CASE("conv1d matches the naive oracle on random shapes") {
  SeededRng shape_rng(99);
  for (int round = 0; round < 50; ++round) {
    const std::size_t width = 1 + shape_rng.next_below(5);
    const std::size_t len = width + shape_rng.next_below(12);
    const std::size_t cin = 1 + shape_rng.next_below(3);
    const std::size_t filters = 1 + shape_rng.next_below(4);
    SeededRng rng(1000 + static_cast<std::uint64_t>(round));
    Tensor input = random_tensor({len, cin}, rng);
    Tensor kernels = random_tensor({filters, width, cin}, rng);
    Tensor bias = random_tensor({filters}, rng);

    std::vector<oracle::Mat> oracle_kernels(filters,
                                            oracle::Mat(width, std::vector<double>(cin)));
    for (std::size_t f = 0; f < filters; ++f)
      for (std::size_t k = 0; k < width; ++k)
        for (std::size_t c = 0; c < cin; ++c) oracle_kernels[f][k][c] = kernels(f, k, c);
    std::vector<double> oracle_bias(bias.values().begin(), bias.values().end());

    const auto expected = oracle::conv1d(as_mat(input), oracle_kernels, oracle_bias);
    const Tensor got = conv1d_forward(input, kernels, bias);
    REQUIRE(got.dim(0) == len - width + 1);
    REQUIRE(got.dim(1) == filters);
    for (std::size_t t = 0; t < got.dim(0); ++t)
      for (std::size_t f = 0; f < filters; ++f)
        CHECK(std::abs(got(t, f) - expected[t][f]) <= 1e-12);
  }
}

TEST_CASE("conv1d_backward zero upstream gives zero gradients") {
  SeededRng rng(5);
  Tensor input = random_tensor({5, 2}, rng);
  Tensor kernels = random_tensor({2, 3, 2}, rng);
  Tensor upstream({3, 2});
  const auto grads = conv1d_backward(input, kernels, upstream);
  for (double v : grads.input.values()) CHECK(v == 0.0);
  for (double v : grads.kernels.values()) CHECK(v == 0.0);
  for (double v : grads.bias.values()) CHECK(v == 0.0);
}

namespace {

// Central finite differences of sum(upstream * conv1d_forward(...)) with
// respect to one flattened argument slot.
double conv_objective(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                      const Tensor& upstream) {
  const Tensor out = conv1d_forward(input, kernels, bias);
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i)
    total += out.values()[i] * upstream.values()[i];
  return total;
}

void check_conv_backward_fd(std::uint64_t seed) {
  SeededRng rng(seed);
  const std::size_t width = 1 + rng.next_below(3);
  const std::size_t len = width + rng.next_below(5);
  const std::size_t cin = 1 + rng.next_below(2);
  const std::size_t filters = 1 + rng.next_below(3);
  Tensor input = random_tensor({len, cin}, rng);
  Tensor kernels = random_tensor({filters, width, cin}, rng);
  Tensor bias = random_tensor({filters}, rng);
  Tensor upstream = random_tensor({len - width + 1, filters}, rng);

  const auto grads = conv1d_backward(input, kernels, upstream);
  const double eps = 1e-5;
  auto check_block = [&](Tensor& block, const Tensor& grad) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double saved = block.values()[i];
      block.values()[i] = saved + eps;
      const double hi = conv_objective(input, kernels, bias, upstream);
      block.values()[i] = saved - eps;
      const double lo = conv_objective(input, kernels, bias, upstream);
      block.values()[i] = saved;
      const double numeric = (hi - lo) / (2.0 * eps);
      const double analytic = grad.values()[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max({1.0, std::abs(analytic), std::abs(numeric)});
      CHECK(rel < 1e-6);
    }
  };
  check_block(input, grads.input);
  check_block(kernels, grads.kernels);
  check_block(bias, grads.bias);
}

}  // namespace

TEST_CASE("conv1d_backward matches finite differences on 20 random instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) check_conv_backward_fd(seed);
}

TEST_CASE("conv1d_backward single-window case reduces to upstream-scaled input") {
  SeededRng rng(17);
  const std::size_t len = 4, cin = 2, filters = 3;
  Tensor input = random_tensor({len, cin}, rng);
  Tensor kernels = random_tensor({filters, len, cin}, rng);  // K == L
  Tensor upstream = random_tensor({1, filters}, rng);
  const auto grads = conv1d_backward(input, kernels, upstream);
  for (std::size_t f = 0; f < filters; ++f)
    for (std::size_t k = 0; k < len; ++k)
      for (std::size_t c = 0; c < cin; ++c)
        CHECK(grads.kernels(f, k, c) ==
              doctest::Approx(upstream(0, f) * input(k, c)).epsilon(1e-12));
}

TEST_CASE("conv1d_backward rejects inconsistent upstream shape") {
  Tensor input({5, 1});
  Tensor kernels({2, 3, 1});
  Tensor upstream({2, 2});  // should be 3x2
  CHECK_THROWS_AS(conv1d_backward(input, kernels, upstream), ShapeError);
}

TEST_CASE("relu and relu_grad sign cases") {
  Tensor x({3}, {-1.0, 0.0, 2.0});
  Tensor r = relu(x);
  CHECK(r(0) == 0.0);
  CHECK(r(1) == 0.0);
  CHECK(r(2) == 2.0);
  Tensor g = relu_grad(x);
  CHECK(g(0) == 0.0);
  CHECK(g(1) == 0.0);  // subgradient at exactly 0 is 0
  CHECK(g(2) == 1.0);
}

TEST_CASE("relu(x) + relu(-x) == |x|") {
  SeededRng rng(23);
  Tensor x = random_tensor({64}, rng, -3.0, 3.0);
  Tensor nx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) nx(i) = -x(i);
  Tensor a = relu(x), b = relu(nx);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(a(i) + b(i) == std::abs(x(i)));
}

TEST_CASE("softmax closed-form rows") {
  Tensor logits({2, 2}, {0.0, 0.0, 0.0, std::log(3.0)});
  Tensor p = softmax(logits);
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p(1, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p(1, 1) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("softmax is shift invariant within 1e-12") {
  SeededRng rng(31);
  Tensor logits = random_tensor({8, 4}, rng, -5.0, 5.0);
  Tensor shifted(logits.shape());
  for (std::size_t i = 0; i < logits.size(); ++i)
    shifted.values()[i] = logits.values()[i] + 1000.0;
  Tensor a = softmax(logits), b = softmax(shifted);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a.values()[i] - b.values()[i]) <= 1e-12);
}

TEST_CASE("softmax rows sum to 1 within 1e-12 up to magnitude 1e3") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededRng rng(seed);
    Tensor logits = random_tensor({16, 3}, rng, -1e3, 1e3);
    Tensor p = softmax(logits);
    for (std::size_t i = 0; i < p.dim(0); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < p.dim(1); ++j) {
        CHECK(p(i, j) >= 0.0);
        sum += p(i, j);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("softmax requires at least two classes") {
  CHECK_THROWS_AS(softmax(Tensor({3, 1})), ShapeError);
}

TEST_CASE("equal seeds give equal streams for 10^4 draws") {
  SeededRng a(987654321), b(987654321);
  for (int i = 0; i < 10000; ++i) CHECK(a.next_u64() == b.next_u64());
  SeededRng c(1), d(2);
  bool all_equal = true;
  for (int i = 0; i < 100; ++i) all_equal = all_equal && (c.next_u64() == d.next_u64());
  CHECK_FALSE(all_equal);
}

TEST_CASE("rng split derives the seed-xor-stream sub-generator") {
  SeededRng base(40);
  SeededRng split = base.split(2);
  SeededRng direct(40 ^ 2);
  for (int i = 0; i < 100; ++i) CHECK(split.next_u64() == direct.next_u64());
}

TEST_CASE("rng shuffle is a seed-deterministic permutation") {
  std::vector<int> v1(50), v2(50);
  for (int i = 0; i < 50; ++i) v1[i] = v2[i] = i;
  SeededRng a(5), b(5);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  std::vector<int> sorted = v1;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("rng uniforms stay inside their interval") {
  SeededRng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
  }
}
