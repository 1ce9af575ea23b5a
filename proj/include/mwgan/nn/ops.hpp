#pragma once

#include <random>
#include <vector>

#include "mwgan/nn/tensor.hpp"

namespace mwgan::nn {

// Same-padded, stride-1 2D convolution. weight is (Cout, Cin, k, k) with odd
// k; bias is (1, Cout, 1, 1) or null.
Var conv2d(const Var& x, const Var& weight, const Var& bias, int dilation = 1);

Var leaky_relu(const Var& x, double slope);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
// Multiplies channel c of every sample by factors[c].
Var scale_channels(const Var& a, const std::vector<double>& factors);

Var concat_channels(const std::vector<Var>& xs);
Var slice_channels(const Var& x, int start, int count);

// Gradient barrier: same value, no history.
Var detach(const Var& x);

// Channel-wise haar packet transform: (N, C, H, W) -> (N, C*4^level, H/2^level,
// W/2^level); the 4^level bands of input channel c occupy output channels
// [c*4^level, (c+1)*4^level) in canonical order.
Var wpt(const Var& x, int level);
Var iwpt(const Var& x, int level);

Var avg_pool(const Var& x, int factor);
Var upsample_nearest(const Var& x, int factor);
// Output channel c*times + r copies input channel c.
Var repeat_channels(const Var& x, int times);

// x2 bilinear resize with half-pixel centres and edge clamping.
Var upsample_bilinear2(const Var& x);

// Bilinear sampling of image (N,1,H,W) at (i + v, j + u) where flow is
// (N,2,H,W) with channel 0 = u (columns) and channel 1 = v (rows).
// Sample positions clamp to the border.
Var warp(const Var& image, const Var& flow);

// (N,C,H,W) -> (N,1,1,1) sum of squares per sample.
Var sum_squares_per_sample(const Var& x);
Var sqrt(const Var& x);
// Mean over every element, (1,1,1,1).
Var mean_all(const Var& x);
Var sum_all(const Var& x);

// He/Kaiming normal initialisation scaled by gain.
Tensor he_normal(Shape shape, int fan_in, double gain, std::mt19937_64& rng);

}  // namespace mwgan::nn
