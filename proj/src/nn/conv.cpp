#include "mwgan/nn/conv.hpp"

namespace mwgan::nn {

Conv2d Conv2d::create(int in_channels, int out_channels, int kernel, int dilation, double gain,
                      std::mt19937_64& rng, bool zero_init) {
  const Shape ws{out_channels, in_channels, kernel, kernel};
  Conv2d c;
  c.dilation = dilation;
  // Draw even when zeroing so that the rng stream does not depend on init flags.
  Tensor w = he_normal(ws, in_channels * kernel * kernel, gain, rng);
  if (zero_init) w = Tensor(ws, 0.0);
  c.weight = parameter(std::move(w));
  c.bias = parameter(Tensor(Shape{1, out_channels, 1, 1}, 0.0));
  return c;
}

void Conv2d::collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".weight", weight});
  out.push_back({prefix + ".bias", bias});
}

Conv2d Conv2d::clone() const {
  Conv2d c;
  c.dilation = dilation;
  c.weight = parameter(weight->value);
  c.bias = parameter(bias->value);
  return c;
}

}  // namespace mwgan::nn
