#include <gtest/gtest.h>

#include <random>

#include "cellgraph/mlr.hpp"
#include "cellgraph/numeric.hpp"

using namespace cellgraph;
using namespace cellgraph::numeric;

TEST(Numeric, DotAndMatmul) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(dot(a, b), 35.0);

  const auto x = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  const auto w = DenseMatrix::from_rows({{1, 0, 2}, {0, 1, 3}});
  DenseMatrix out;
  matmul(x, w, out);
  EXPECT_EQ(out, DenseMatrix::from_rows({{1, 2, 8}, {3, 4, 18}}));

  DenseMatrix dx;
  matmul_transposed(out, w, dx);  // out * w^T
  EXPECT_EQ(dx, DenseMatrix::from_rows({{17, 26}, {39, 58}}));

  EXPECT_THROW(DenseMatrix::from_rows({{1, 2}, {3}}), Error);
}

TEST(Numeric, MlpForwardHandComputed) {
  MlpParams p;
  p.layers.push_back(Layer{DenseMatrix::from_rows({{1, -1}, {2, 1}}), {0.5, -0.5}, Activation::ReLU});
  p.layers.push_back(Layer{DenseMatrix::from_rows({{3}, {-2}}), {1.0}, Activation::Identity});
  // x = [1, 1] -> pre = [3.5, -0.5] -> relu [3.5, 0] -> 3*3.5 + 1 = 11.5
  const std::vector<double> x{1, 1};
  EXPECT_DOUBLE_EQ(mlp_forward(p, x)[0], 11.5);
  const std::vector<double> bad{1, 2, 3};
  EXPECT_THROW(mlp_forward(p, bad), Error);
}

TEST(Numeric, MlpGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const std::vector<std::size_t> widths{6, 5, 2};
  MlpParams p = make_mlp(4, widths, Activation::Identity, rng);
  for (auto& l : p.layers)
    for (auto& b : l.bias) b = 0.1;
  DenseMatrix x(3, 4);
  std::normal_distribution<double> n(0, 1);
  for (auto& v : x.values) v = n(rng);
  // loss = sum of outputs weighted by fixed coefficients
  const std::vector<double> coeff{0.3, -1.2, 0.7, 0.5, -0.4, 1.1};
  auto loss = [&](const MlpParams& q) {
    const auto y = mlp_forward(q, x);
    double s = 0;
    for (std::size_t i = 0; i < y.values.size(); ++i) s += coeff[i] * y.values[i];
    return s;
  };
  MlpTape tape;
  mlp_forward(p, x, &tape);
  DenseMatrix dy(3, 2);
  dy.values = coeff;
  MlpParams grads = p.zeros_like();
  mlp_backward(p, tape, dy, grads);

  std::vector<double> flat, analytic;
  p.for_each_param([&](double v) { flat.push_back(v); });
  grads.for_each_param([&](double v) { analytic.push_back(v); });
  auto f = [&](std::span<const double> theta) {
    MlpParams q = p;
    std::size_t i = 0;
    q.for_each_param([&](double& v) { v = theta[i++]; });
    return loss(q);
  };
  EXPECT_LT(grad_check(f, flat, analytic, 1e-6, 1e-7), 1e-6);
}

TEST(Numeric, GlorotInitBoundsAndShapes) {
  std::mt19937_64 rng(9);
  const std::vector<std::size_t> widths{32, 1};
  const auto p = make_mlp(10, widths, Activation::Identity, rng);
  ASSERT_EQ(p.layers.size(), 2u);
  EXPECT_EQ(p.in_dim(), 10u);
  EXPECT_EQ(p.out_dim(), 1u);
  EXPECT_EQ(p.layers[0].activation, Activation::ReLU);
  EXPECT_EQ(p.layers[1].activation, Activation::Identity);
  EXPECT_EQ(p.param_count(), 10u * 32 + 32 + 32 + 1);
  const double bound = std::sqrt(6.0 / 42.0);
  for (double w : p.layers[0].weight.values) EXPECT_LE(std::abs(w), bound);
  for (double b : p.layers[0].bias) EXPECT_EQ(b, 0.0);
}

TEST(Numeric, AdamFirstStepMovesByLearningRate) {
  std::vector<double> params{1.0, -2.0, 0.5};
  const std::vector<double> grads{0.3, -4.0, 0.0};
  AdamState st;
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  adam_update(params, grads, st, cfg);
  // bias-corrected first step is lr * g / (|g| + eps')
  EXPECT_NEAR(params[0], 1.0 - 0.01, 1e-9);
  EXPECT_NEAR(params[1], -2.0 + 0.01, 1e-9);
  EXPECT_DOUBLE_EQ(params[2], 0.5);
  EXPECT_EQ(st.step, 1);
}

TEST(Numeric, AdamZeroLearningRateIsNoop) {
  std::vector<double> params{1.0, 2.0};
  const auto before = params;
  AdamState st;
  AdamConfig cfg;
  cfg.learning_rate = 0.0;
  for (int i = 0; i < 5; ++i) adam_update(params, std::vector<double>{1.0, -1.0}, st, cfg);
  EXPECT_EQ(params, before);
}

TEST(Numeric, RelativeErrorFloor) {
  EXPECT_NEAR(relative_error(1.0, 1.1), 0.1 / 1.1, 1e-15);
  EXPECT_DOUBLE_EQ(relative_error(0.0, 1e-12, 1e-10), 1e-2);
  EXPECT_EQ(relative_error(0.0, 0.0), 0.0);
}

TEST(Numeric, CholeskySolve) {
  auto a = DenseMatrix::from_rows({{4, 2, 0.4}, {2, 5, 1}, {0.4, 1, 3}});
  const auto orig = a;
  ASSERT_TRUE(mlr::cholesky(a));
  const std::vector<double> x_true{1.0, -2.0, 0.5};
  std::vector<double> b(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i] += orig(i, j) * x_true[j];
  const auto x = mlr::cholesky_solve(a, b);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(x[i], x_true[i], 1e-12);
}

TEST(Numeric, CholeskyRejectsSingular) {
  auto a = DenseMatrix::from_rows({{1, 1}, {1, 1}});
  EXPECT_FALSE(mlr::cholesky(a));
  auto b = DenseMatrix::from_rows({{1, 0}, {0, -1}});
  EXPECT_FALSE(mlr::cholesky(b));
}
