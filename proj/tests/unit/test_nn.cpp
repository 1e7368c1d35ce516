#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "ucgan/nn/gradcheck.hpp"
#include "ucgan/nn/ops.hpp"
#include "ucgan/nn/parameters.hpp"

using namespace ucgan;
using namespace ucgan::nn;
using ucgan::testing::away_from_zero;
using ucgan::testing::random_tensor;

namespace {

// Direct 6-nested-loop cross-correlation with zero padding.
std::vector<double> conv_oracle(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>& b,
                                int stride, int pad) {
  const auto xs = x.shape(), ws = w.shape();
  const long k = static_cast<long>(ws.h);
  const long oh = (static_cast<long>(xs.h) + 2 * pad - k) / stride + 1;
  const long ow = (static_cast<long>(xs.w) + 2 * pad - k) / stride + 1;
  std::vector<double> out;
  for (std::size_t n = 0; n < xs.n; ++n)
    for (std::size_t co = 0; co < ws.n; ++co)
      for (long oy = 0; oy < oh; ++oy)
        for (long ox = 0; ox < ow; ++ox) {
          double acc = b.defined() ? b.data()[co] : 0.0;
          for (std::size_t ci = 0; ci < ws.c; ++ci)
            for (long ky = 0; ky < k; ++ky)
              for (long kx = 0; kx < k; ++kx) {
                const long iy = oy * stride - pad + ky, ix = ox * stride - pad + kx;
                if (iy < 0 || ix < 0 || iy >= long(xs.h) || ix >= long(xs.w)) continue;
                acc += x.at(n, ci, iy, ix) * w.at(co, ci, ky, kx);
              }
          out.push_back(acc);
        }
  return out;
}

double check(const std::function<Tensor<double>()>& loss, std::vector<std::pair<std::string, Tensor<double>>> leaves) {
  GradCheckOptions opt;
  opt.step = 1e-3;
  return check_gradient(loss, std::move(leaves), opt).worst_relative_error();
}

// Fixed random projection turns any tensor into a scalar loss with non-trivial upstream grads.
Tensor<double> project(const Tensor<double>& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto r = random_tensor<double>(t.shape(), rng);
  return sum(mul(t, r));
}

}  // namespace

TEST(Conv2d, BoxSumOfOnes) {
  Tensor<double> x(Shape{1, 1, 3, 3}, 1.0), w(Shape{1, 1, 3, 3}, 1.0), b(Shape{1, 1, 1, 1}, 0.0);
  auto y = conv2d(x, w, b, 1, 1);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 3, 3}));
  EXPECT_EQ(y.at(0, 0, 1, 1), 9.0);
  EXPECT_EQ(y.at(0, 0, 0, 0), 4.0);
  EXPECT_EQ(y.at(0, 0, 2, 2), 4.0);
  EXPECT_EQ(y.at(0, 0, 0, 1), 6.0);
}

TEST(Conv2d, IdentityKernelIsExactIdentity) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_tensor<float>(Shape{2, 3, 7, 5}, rng, -100, 100);
    Tensor<float> w(Shape{3, 3, 3, 3}, 0.0f);
    for (std::size_t c = 0; c < 3; ++c) w.mutable_data()[Shape{3, 3, 3, 3}.offset(c, c, 1, 1)] = 1.0f;
    auto y = conv2d(x, w, Tensor<float>(), 1, 1);
    ASSERT_EQ(y.shape(), x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) ASSERT_EQ(y.data()[i], x.data()[i]);
  }
}

TEST(Conv2d, MatchesNestedLoopOracle) {
  std::mt19937_64 rng(2);
  struct Case { Shape x; Shape w; int stride, pad; };
  const Case cases[] = {{{1, 2, 4, 4}, {3, 2, 3, 3}, 2, 0}, {{1, 2, 4, 4}, {3, 2, 3, 3}, 2, 1},
                        {{2, 3, 9, 7}, {4, 3, 4, 4}, 2, 1}, {{1, 5, 6, 6}, {2, 5, 1, 1}, 1, 0},
                        {{2, 2, 8, 8}, {3, 2, 4, 4}, 1, 1}};
  for (const auto& c : cases) {
    auto x = random_tensor<double>(c.x, rng), w = random_tensor<double>(c.w, rng);
    auto b = random_tensor<double>(Shape{c.w.n, 1, 1, 1}, rng);
    auto y = conv2d(x, w, b, c.stride, c.pad);
    const auto ref = conv_oracle(x, w, b, c.stride, c.pad);
    ASSERT_EQ(y.numel(), ref.size());
    EXPECT_EQ(y.shape().h, (c.x.h + 2 * c.pad - c.w.h) / c.stride + 1);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-6);
  }
  // float path against the same oracle
  auto x = random_tensor<double>(Shape{1, 2, 4, 4}, rng), w = random_tensor<double>(Shape{3, 2, 3, 3}, rng);
  auto yf = conv2d(x.cast<float>(), w.cast<float>(), Tensor<float>(), 2, 0);
  const auto ref = conv_oracle(x, w, Tensor<double>(), 2, 0);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(yf.data()[i], ref[i], 1e-6);
}

TEST(Conv2d, ShapeErrorsNameTheAxis) {
  Tensor<double> x(Shape{1, 2, 4, 4}), w(Shape{3, 3, 3, 3});
  try {
    conv2d(x, w, Tensor<double>(), 1, 1);
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("channel"), std::string::npos) << e.what();
  }
  Tensor<double> w2(Shape{3, 2, 3, 3}), b(Shape{2, 1, 1, 1});
  EXPECT_THROW(conv2d(x, w2, b, 1, 1), DimensionError);
}

TEST(InstanceNorm, ConstantChannelGivesZeros) {
  Tensor<double> x(Shape{1, 2, 3, 3}, 7.5);
  auto y = instance_norm(x);
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(InstanceNorm, UnitStatistics) {
  Tensor<double> x(Shape{1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  auto y = instance_norm(x, 0.0);
  double m = 0, v = 0;
  for (double e : y.data()) m += e / 4;
  for (double e : y.data()) v += (e - m) * (e - m) / 4;
  EXPECT_NEAR(m, 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(v), 1.0, 1e-12);
}

TEST(InstanceNorm, RandomSliceStatistics) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_tensor<double>(Shape{2, 3, 5, 5}, rng, -3, 5);
    const double eps = 1e-5;
    auto y = instance_norm(x, eps);
    for (std::size_t n = 0; n < 2; ++n)
      for (std::size_t c = 0; c < 3; ++c) {
        double mx = 0, vx = 0, my = 0, vy = 0;
        for (std::size_t i = 0; i < 25; ++i) mx += x.at(n, c, i / 5, i % 5) / 25;
        for (std::size_t i = 0; i < 25; ++i) vx += std::pow(x.at(n, c, i / 5, i % 5) - mx, 2) / 25;
        for (std::size_t i = 0; i < 25; ++i) my += y.at(n, c, i / 5, i % 5) / 25;
        for (std::size_t i = 0; i < 25; ++i) vy += std::pow(y.at(n, c, i / 5, i % 5) - my, 2) / 25;
        EXPECT_LT(std::abs(my), 1e-6);
        EXPECT_NEAR(vy, vx / (vx + eps), 1e-4);
      }
  }
}

TEST(InstanceNorm, RejectsSinglePixelPlane) {
  EXPECT_THROW(instance_norm(Tensor<double>(Shape{1, 1, 1, 1})), DimensionError);
}

TEST(Activations, ScalarValues) {
  Tensor<double> x(Shape{1, 1, 1, 3}, std::vector<double>{-1, 0, 2});
  auto r = relu(x), l = leaky_relu(x, 0.2), s = sigmoid(x);
  EXPECT_EQ(r.data()[0], 0.0);
  EXPECT_EQ(r.data()[2], 2.0);
  EXPECT_DOUBLE_EQ(l.data()[0], -0.2);
  EXPECT_EQ(l.data()[2], 2.0);
  EXPECT_EQ(s.data()[1], 0.5);
  EXPECT_DOUBLE_EQ(leaky_relu(x).data()[0], -0.2);
}

TEST(Activations, ReluSubgradientAtZeroIsZero) {
  Tensor<double> x(Shape{1, 1, 1, 1}, 0.0, true);
  backward(sum(relu(x)));
  EXPECT_EQ(x.grad()[0], 0.0);
}

TEST(GlobalAvgPool, Values) {
  Tensor<double> c(Shape{1, 1, 3, 3}, 4.25);
  EXPECT_EQ(global_avg_pool(c).item(), 4.25);
  Tensor<double> x(Shape{1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(global_avg_pool(x).item(), 2.5);
  std::mt19937_64 rng(4);
  auto r = random_tensor<double>(Shape{3, 4, 6, 5}, rng);
  auto g = global_avg_pool(r);
  EXPECT_EQ(g.shape(), (Shape{3, 4, 1, 1}));
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t c2 = 0; c2 < 4; ++c2) {
      double m = 0;
      for (std::size_t y = 0; y < 6; ++y)
        for (std::size_t xx = 0; xx < 5; ++xx) m += r.at(n, c2, y, xx);
      EXPECT_NEAR(g.at(n, c2, 0, 0), m / 30, 1e-7);
    }
}

TEST(ChannelMax, IdentityFirstTieAndOracle) {
  std::mt19937_64 rng(5);
  auto one = random_tensor<double>(Shape{2, 1, 4, 4}, rng);
  auto m1 = channel_max(one);
  for (std::size_t i = 0; i < one.numel(); ++i) EXPECT_EQ(m1.data()[i], one.data()[i]);

  Tensor<double> p(Shape{1, 4, 1, 1}, std::vector<double>{3, -1, 7, 7}, true);
  auto mp = channel_max(p);
  EXPECT_EQ(mp.item(), 7.0);
  backward(sum(mp));
  EXPECT_EQ(p.grad()[0], 0.0);
  EXPECT_EQ(p.grad()[1], 0.0);
  EXPECT_EQ(p.grad()[2], 1.0);
  EXPECT_EQ(p.grad()[3], 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_tensor<double>(Shape{1, 4, 8, 8}, rng, -5, 5);
    auto m = channel_max(x);
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t xx = 0; xx < 8; ++xx) {
        double best = x.at(0, 0, y, xx);
        for (std::size_t c = 1; c < 4; ++c) best = std::max(best, x.at(0, c, y, xx));
        EXPECT_EQ(m.at(0, 0, y, xx), best);
        for (std::size_t c = 0; c < 4; ++c) EXPECT_GE(m.at(0, 0, y, xx), x.at(0, c, y, xx));
      }
  }
}

TEST(Reductions, ScalarExamples) {
  std::mt19937_64 rng(6);
  auto x = random_tensor<double>(Shape{1, 2, 3, 3}, rng);
  EXPECT_EQ(l1_mean(x, x).item(), 0.0);
  EXPECT_EQ(sq_mean(Tensor<double>(Shape{1, 1, 4, 4}, 1.0), 1.0).item(), 0.0);
  Tensor<double> a(Shape{1, 1, 1, 2}, std::vector<double>{1, 2}), b(Shape{1, 1, 1, 2}, std::vector<double>{3, 5});
  EXPECT_EQ(l1_mean(a, b).item(), 2.5);
  EXPECT_THROW(l1_mean(a, Tensor<double>(Shape{1, 1, 2, 1})), DimensionError);
  EXPECT_THROW(add(a, Tensor<double>(Shape{1, 2, 1, 2})), DimensionError);
  EXPECT_THROW(concat_channels(a, Tensor<double>(Shape{1, 1, 1, 3})), DimensionError);
  auto cat = concat_channels(x, x);
  EXPECT_EQ(cat.shape(), (Shape{1, 4, 3, 3}));
}

TEST(Backward, SumGivesOnes) {
  std::mt19937_64 rng(7);
  auto x = random_tensor<double>(Shape{2, 3, 4, 5}, rng, -1, 1, true);
  backward(sum(x));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, SquareDerivative) {
  Tensor<double> x(Shape{1, 1, 1, 1}, 2.0, true);
  backward(sq_mean(x, 0.0));
  EXPECT_EQ(x.grad()[0], 4.0);
}

TEST(Backward, NonScalarLossIsContractError) {
  Tensor<double> x(Shape{1, 1, 2, 2}, 1.0, true);
  EXPECT_THROW(backward(relu(x)), ContractError);
}

TEST(Backward, AccumulationIsLinear) {
  std::mt19937_64 rng(8);
  auto x = random_tensor<double>(Shape{1, 2, 5, 5}, rng, -1, 1, true);
  auto w = random_tensor<double>(Shape{2, 2, 3, 3}, rng, -1, 1, true);
  auto l1 = [&] { return sq_mean(conv2d(x, w, Tensor<double>(), 1, 1), 0.5); };
  auto l2 = [&] { return l1_mean(relu(x), sigmoid(x)); };
  backward(l1());
  backward(l2());
  const std::vector<double> gx(x.grad().begin(), x.grad().end()), gw(w.grad().begin(), w.grad().end());
  x.zero_grad();
  w.zero_grad();
  backward(add(l1(), l2()));
  for (std::size_t i = 0; i < gx.size(); ++i) EXPECT_NEAR(x.grad()[i], gx[i], 1e-12);
  for (std::size_t i = 0; i < gw.size(); ++i) EXPECT_NEAR(w.grad()[i], gw[i], 1e-12);
}

TEST(Backward, EveryReachableTensorGetsGrad) {
  std::mt19937_64 rng(9);
  auto x = random_tensor<double>(Shape{1, 1, 3, 3}, rng, -1, 1, true);
  auto h = sigmoid(x);
  auto loss = mean(h);
  backward(loss);
  EXPECT_TRUE(h.has_grad());
  EXPECT_TRUE(x.has_grad());
}

TEST(Backward, NoGradGuardRecordsNothing) {
  Tensor<double> x(Shape{1, 1, 2, 2}, 1.0, true);
  NoGradGuard guard;
  auto y = relu(x);
  EXPECT_FALSE(y.requires_grad());
}

// Finite-difference oracle for every primitive (64-bit, h = 1e-3, rel < 1e-4).
TEST(GradCheck, Conv2d) {
  std::mt19937_64 rng(10);
  auto x = random_tensor<double>(Shape{2, 3, 6, 5}, rng, -1, 1, true);
  auto w = random_tensor<double>(Shape{4, 3, 3, 3}, rng, -1, 1, true);
  auto b = random_tensor<double>(Shape{4, 1, 1, 1}, rng, -1, 1, true);
  for (int stride : {1, 2}) {
    EXPECT_LT(check([&] { return project(conv2d(x, w, b, stride, 1), 11); }, {{"x", x}, {"w", w}, {"b", b}}), 1e-4);
  }
  auto w4 = random_tensor<double>(Shape{2, 3, 4, 4}, rng, -1, 1, true);
  EXPECT_LT(check([&] { return project(conv2d(x, w4, Tensor<double>(), 2, 1), 12); }, {{"x", x}, {"w", w4}}), 1e-4);
}

TEST(GradCheck, InstanceNorm) {
  std::mt19937_64 rng(11);
  auto x = random_tensor<double>(Shape{2, 3, 4, 4}, rng, -2, 2, true);
  EXPECT_LT(check([&] { return project(instance_norm(x), 13); }, {{"x", x}}), 1e-4);
}

TEST(GradCheck, Elementwise) {
  std::mt19937_64 rng(12);
  auto x = away_from_zero<double>(Shape{1, 2, 4, 4}, rng);
  x.set_requires_grad(true);
  auto y = random_tensor<double>(Shape{1, 2, 4, 4}, rng, -1, 1, true);
  auto s = random_tensor<double>(Shape{1, 2, 1, 1}, rng, -1, 1, true);
  EXPECT_LT(check([&] { return project(relu(x), 1); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return project(leaky_relu(x), 2); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return project(sigmoid(x), 3); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return project(nn::abs(x), 4); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return project(add(x, y), 5); }, {{"x", x}, {"y", y}}), 1e-4);
  EXPECT_LT(check([&] { return project(sub(x, y), 6); }, {{"x", x}, {"y", y}}), 1e-4);
  EXPECT_LT(check([&] { return project(mul(x, y), 7); }, {{"x", x}, {"y", y}}), 1e-4);
  EXPECT_LT(check([&] { return project(scale(add_scalar(x, 0.3), -1.7), 8); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return project(mul_channelwise(y, s), 9); }, {{"y", y}, {"s", s}}), 1e-4);
}

TEST(GradCheck, StructuralOps) {
  std::mt19937_64 rng(13);
  auto x = random_tensor<double>(Shape{2, 3, 4, 4}, rng, -1, 1, true);
  auto y = random_tensor<double>(Shape{2, 2, 4, 4}, rng, -1, 1, true);
  EXPECT_LT(check([&] { return project(global_avg_pool(x), 1); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return project(channel_mean(x), 2); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return project(concat_channels(x, y), 3); }, {{"x", x}, {"y", y}}), 1e-4);
  EXPECT_LT(check([&] { return project(gather_channels(x, {2, 0, 0, 1}), 4); }, {{"x", x}}), 1e-4);

  // channel_max away from ties: channel c offset by 3c keeps the argmax fixed under a step.
  std::vector<double> v(2 * 4 * 3 * 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> order = {2, 0, 3, 1};
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t i = 0; i < 9; ++i) v[(n * 4 + c) * 9 + i] = 3.0 * order[(c + i) % 4] + u(rng);
  Tensor<double> m(Shape{2, 4, 3, 3}, v, true);
  EXPECT_LT(check([&] { return project(channel_max(m), 5); }, {{"m", m}}), 1e-4);
}

TEST(GradCheck, Reductions) {
  std::mt19937_64 rng(14);
  auto x = away_from_zero<double>(Shape{1, 2, 3, 3}, rng);
  x.set_requires_grad(true);
  Tensor<double> zero(Shape{1, 2, 3, 3}, 0.0);
  auto y = random_tensor<double>(Shape{1, 2, 3, 3}, rng, 2, 3, true);
  EXPECT_LT(check([&] { return mean(x); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return sq_mean(x, 0.7); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return l1_mean(x, zero); }, {{"x", x}}), 1e-4);
  EXPECT_LT(check([&] { return l1_mean(x, y); }, {{"x", x}, {"y", y}}), 1e-4);
}

TEST(GradCheck, ReportsBrokenGradient) {
  // A deliberately wrong backward must be caught by the checker.
  auto x = Tensor<double>(Shape{1, 1, 1, 3}, std::vector<double>{0.3, -0.4, 0.9}, true);
  auto bad = [&] {
    std::vector<double> out = {x.data()[0] * x.data()[0] + x.data()[1] + x.data()[2]};
    return Tensor<double>::from_op(Shape{1, 1, 1, 1}, out, {x}, [xn = x.node_ptr()](detail::Node<double>& self) {
      auto g = xn->ensure_grad();
      for (auto& e : g) e += self.grad[0];
    });
  };
  EXPECT_GT(check(bad, {{"x", x}}), 1e-2);
}

TEST(Parameters, UniqueNames) {
  ParameterSet<float> ps;
  auto t = ps.add("G.a.weight", Tensor<float>(Shape{1, 1, 3, 3}));
  EXPECT_TRUE(t.requires_grad());
  EXPECT_THROW(ps.add("G.a.weight", Tensor<float>(Shape{1, 1, 1, 1})), ContractError);
  ps.add("G.a.bias", Tensor<float>(Shape{1, 1, 1, 1}));
  EXPECT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps.scalar_count(), 10u);
  EXPECT_TRUE(ps.contains("G.a.bias"));
}
