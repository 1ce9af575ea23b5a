#pragma once

#include <random>
#include <string>

#include "mwgan/nn/ops.hpp"

namespace mwgan::nn {

// Convolution layer: owns its weight and bias leaves.
struct Conv2d {
  Var weight;
  Var bias;
  int dilation = 1;

  // He-normal weights scaled by gain, zero bias; zero_init zeroes both.
  static Conv2d create(int in_channels, int out_channels, int kernel, int dilation, double gain,
                       std::mt19937_64& rng, bool zero_init = false);

  Var operator()(const Var& x) const { return conv2d(x, weight, bias, dilation); }

  int in_channels() const { return weight->value.shape.c; }
  int out_channels() const { return weight->value.shape.n; }
  int kernel() const { return weight->value.shape.h; }

  void collect(const std::string& prefix, ParamList& out) const;
  Conv2d clone() const;
};

}  // namespace mwgan::nn
