#include "mwgan/nn/bridge.hpp"

#include <algorithm>

#include "mwgan/error.hpp"

namespace mwgan::nn {

Tensor to_tensor(const Plane& p) { return Tensor(Shape{1, 1, p.rows(), p.cols()}, p.storage()); }

Tensor stack(const std::vector<const Plane*>& planes) {
  if (planes.empty()) throw StructureError("stack: no planes");
  const Plane& first = *planes.front();
  Tensor t(Shape{static_cast<int>(planes.size()), 1, first.rows(), first.cols()});
  auto out = t.data.begin();
  for (const Plane* p : planes) {
    if (!p->same_shape(first)) throw StructureError("stack: planes differ in shape");
    out = std::copy(p->storage().begin(), p->storage().end(), out);
  }
  return t;
}

Plane to_plane(const Tensor& t, int n, int c) {
  auto ch = t.channel(n, c);
  return Plane(t.shape.h, t.shape.w, std::vector<double>(ch.begin(), ch.end()));
}

}  // namespace mwgan::nn
