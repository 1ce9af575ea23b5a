#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mwgan/error.hpp"
#include "mwgan/nn/adam.hpp"
#include "mwgan/nn/bridge.hpp"
#include "mwgan/nn/conv.hpp"
#include "mwgan/nn/ops.hpp"
#include "mwgan/wavelet.hpp"
#include "testing.hpp"

using namespace mwgan;
using namespace mwgan::nn;
using mwgan::testing::grad_check;
using mwgan::testing::probe;
using mwgan::testing::random_tensor;

namespace {

constexpr double kTol = 1e-4;

// Naive same-padded dilated convolution.
Tensor reference_conv(const Tensor& x, const Tensor& w, const Tensor* b, int dil) {
  const int k = w.shape.h, r = k / 2;
  Tensor y(Shape{x.shape.n, w.shape.n, x.shape.h, x.shape.w});
  for (int n = 0; n < x.shape.n; ++n)
    for (int o = 0; o < w.shape.n; ++o)
      for (int i = 0; i < x.shape.h; ++i)
        for (int j = 0; j < x.shape.w; ++j) {
          double acc = b ? b->at(0, o, 0, 0) : 0.0;
          for (int c = 0; c < x.shape.c; ++c)
            for (int u = 0; u < k; ++u)
              for (int v = 0; v < k; ++v) {
                const int ii = i + (u - r) * dil, jj = j + (v - r) * dil;
                if (ii < 0 || jj < 0 || ii >= x.shape.h || jj >= x.shape.w) continue;
                acc += w.at(o, c, u, v) * x.at(n, c, ii, jj);
              }
          y.at(n, o, i, j) = acc;
        }
  return y;
}

double max_diff(const Tensor& a, const Tensor& b) {
  EXPECT_EQ(a.shape, b.shape);
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST(Ops, ConvMatchesReference) {
  std::mt19937_64 rng(1);
  for (int dil : {1, 2, 3}) {
    for (int k : {1, 3, 5}) {
      const Tensor x = random_tensor(Shape{2, 3, 7, 9}, rng);
      const Tensor w = random_tensor(Shape{4, 3, k, k}, rng);
      const Tensor b = random_tensor(Shape{1, 4, 1, 1}, rng);
      const auto y = conv2d(constant(x), constant(w), constant(b), dil);
      EXPECT_LT(max_diff(y->value, reference_conv(x, w, &b, dil)), 1e-12) << "k=" << k << " dil=" << dil;
      const auto y0 = conv2d(constant(x), constant(w), nullptr, dil);
      EXPECT_LT(max_diff(y0->value, reference_conv(x, w, nullptr, dil)), 1e-12);
    }
  }
}

TEST(Ops, ConvGradient) {
  std::mt19937_64 rng(2);
  auto x = parameter(random_tensor(Shape{2, 2, 6, 6}, rng));
  auto w = parameter(random_tensor(Shape{3, 2, 3, 3}, rng));
  auto b = parameter(random_tensor(Shape{1, 3, 1, 1}, rng));
  for (int dil : {1, 2}) {
    const auto r = grad_check([&] { return probe(conv2d(x, w, b, dil)); }, {x, w, b});
    EXPECT_TRUE(r.ok(kTol)) << r.rel_error << " (" << r.straddled << " straddled) " << r.worst;
  }
}

TEST(Ops, ElementwiseGradients) {
  std::mt19937_64 rng(3);
  auto a = parameter(random_tensor(Shape{2, 3, 4, 4}, rng));
  auto b = parameter(random_tensor(Shape{2, 3, 4, 4}, rng));
  auto c = parameter(random_tensor(Shape{2, 1, 4, 4}, rng));
  auto d = parameter(random_tensor(Shape{2, 4, 4, 4}, rng));
  const std::vector<std::pair<const char*, std::function<Var()>>> cases{
      {"leaky_relu", [&] { return probe(leaky_relu(a, 0.2)); }},
      {"add", [&] { return probe(add(a, b)); }},
      {"sub", [&] { return probe(sub(a, b)); }},
      {"scale", [&] { return probe(scale(a, -1.7)); }},
      {"add_scalar", [&] { return probe(add_scalar(a, 0.3)); }},
      {"scale_channels", [&] { return probe(scale_channels(a, {0.5, 2.0, -1.0})); }},
      {"concat", [&] { return probe(concat_channels({a, c, b})); }},
      {"slice", [&] { return probe(slice_channels(a, 1, 2)); }},
      {"avg_pool", [&] { return probe(avg_pool(a, 2)); }},
      {"upsample_nearest", [&] { return probe(upsample_nearest(a, 2)); }},
      {"repeat_channels", [&] { return probe(repeat_channels(c, 4)); }},
      {"upsample_bilinear2", [&] { return probe(upsample_bilinear2(a)); }},
      {"wpt", [&] { return probe(wpt(a, 2)); }},
      {"iwpt", [&] { return probe(iwpt(d, 1)); }},
      {"sqrt", [&] { return probe(nn::sqrt(add_scalar(sum_squares_per_sample(a), 0.1))); }},
      {"mean_all", [&] { return mean_all(sum_squares_per_sample(a)); }},
  };
  for (const auto& [name, f] : cases) {
    const auto r = grad_check(f, {a, b, c, d});
    EXPECT_TRUE(r.ok(kTol)) << r.rel_error << " (" << r.straddled << " straddled) " << name << ": " << r.worst;
  }
}

TEST(Ops, DetachBlocksGradient) {
  std::mt19937_64 rng(4);
  auto a = parameter(random_tensor(Shape{1, 1, 2, 2}, rng));
  a->zero_grad();
  backward(add(sum_all(a), sum_all(detach(scale(a, 3.0)))));
  for (double g : a->grad.data) EXPECT_DOUBLE_EQ(g, 1.0);
}

TEST(Ops, WptMatchesPlaneTransform) {
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor(Shape{2, 2, 8, 8}, rng);
  const auto y = wpt(constant(x), 2)->value;
  ASSERT_EQ(y.shape, (Shape{2, 32, 2, 2}));
  for (int n = 0; n < 2; ++n)
    for (int c = 0; c < 2; ++c) {
      const auto s = wpt_forward(to_plane(x, n, c), 2);
      for (int b = 0; b < 16; ++b) EXPECT_LT(to_plane(y, n, c * 16 + b).max_abs_diff(s.bands[b]), 1e-12);
    }
  const auto back = iwpt(constant(y), 2)->value;
  EXPECT_LT(max_diff(back, x), 1e-12);
}

TEST(Ops, WarpIntegerShiftAndIdentity) {
  std::mt19937_64 rng(6);
  const Tensor img = random_tensor(Shape{1, 1, 6, 6}, rng);
  Tensor flow(Shape{1, 2, 6, 6}, 0.0);
  EXPECT_LT(max_diff(warp(constant(img), constant(flow))->value, img), 1e-15);

  // u = +1 samples one column to the right.
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) flow.at(0, 0, i, j) = 1.0;
  const auto out = warp(constant(img), constant(flow))->value;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(out.at(0, 0, i, j), img.at(0, 0, i, j + 1), 1e-12);
    EXPECT_NEAR(out.at(0, 0, i, 5), img.at(0, 0, i, 5), 1e-12);  // clamped at the border
  }

  // fractional: v = 0.25 blends rows.
  Tensor f2(Shape{1, 2, 6, 6}, 0.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) f2.at(0, 1, i, j) = 0.25;
  const auto o2 = warp(constant(img), constant(f2))->value;
  EXPECT_NEAR(o2.at(0, 0, 2, 3), 0.75 * img.at(0, 0, 2, 3) + 0.25 * img.at(0, 0, 3, 3), 1e-12);
}

TEST(Ops, WarpGradient) {
  std::mt19937_64 rng(7);
  auto img = parameter(random_tensor(Shape{2, 1, 8, 8}, rng));
  auto flow = parameter(random_tensor(Shape{2, 2, 8, 8}, rng, -1.3, 1.3));
  const auto r = grad_check([&] { return probe(warp(img, flow)); }, {img, flow}, 1e-4, 64);
  EXPECT_TRUE(r.ok(kTol)) << r.rel_error << " (" << r.straddled << " straddled) " << r.worst;
}

TEST(Ops, ShapeErrors) {
  auto a = constant(Tensor(Shape{1, 2, 4, 4}));
  auto b = constant(Tensor(Shape{1, 3, 4, 4}));
  EXPECT_THROW(add(a, b), Error);
  EXPECT_THROW(wpt(constant(Tensor(Shape{1, 1, 6, 6})), 2), DivisibilityError);
  EXPECT_THROW(nn::sqrt(constant(Tensor(Shape{1, 1, 1, 1}, 0.0))), Error);
}

TEST(Adam, QuadraticBowl) {
  auto x = parameter(Tensor(Shape{1, 1, 1, 1}, 5.0));
  Adam opt({{"x", x}});
  int steps = 0;
  const double target = -1.5;
  for (; steps < 2000; ++steps) {
    opt.zero_grad();
    backward(sum_squares_per_sample(add_scalar(x, -target)));
    const double lr = 0.1 * std::pow(0.997, steps);
    opt.step(lr);
    if (std::abs(x->value.item() - target) < 1e-6) break;
  }
  EXPECT_LT(steps, 2000);
  EXPECT_NEAR(x->value.item(), target, 1e-6);
}

TEST(Adam, UntouchedParametersStayPut) {
  auto a = parameter(Tensor(Shape{1, 1, 1, 2}, 1.0));
  auto b = parameter(Tensor(Shape{1, 1, 1, 2}, 1.0));
  Adam opt({{"a", a}});
  opt.zero_grad();
  backward(sum_all(add(a, b)));
  opt.step(0.1);
  EXPECT_NE(a->value.data[0], 1.0);
  EXPECT_EQ(b->value.data[0], 1.0);
}

TEST(Conv, CloneIsDeep) {
  std::mt19937_64 rng(8);
  const Conv2d c = Conv2d::create(2, 3, 3, 1, 1.0, rng);
  const Conv2d d = c.clone();
  d.weight->value.data[0] += 1.0;
  EXPECT_NE(c.weight->value.data[0], d.weight->value.data[0]);
  const Conv2d z = Conv2d::create(2, 3, 3, 1, 1.0, rng, true);
  for (double v : z.weight->value.data) EXPECT_EQ(v, 0.0);
}
