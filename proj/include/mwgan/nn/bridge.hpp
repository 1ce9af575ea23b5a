#pragma once

#include <vector>

#include "mwgan/nn/tensor.hpp"
#include "mwgan/plane.hpp"

namespace mwgan::nn {

// (1,1,H,W) copy of a plane.
Tensor to_tensor(const Plane& p);
// (B,1,H,W) stack of equally sized planes.
Tensor stack(const std::vector<const Plane*>& planes);
Plane to_plane(const Tensor& t, int n = 0, int c = 0);

}  // namespace mwgan::nn
