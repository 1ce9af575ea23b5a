#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mwgan::nn {

// NCHW extents.
struct Shape {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t numel() const noexcept {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0) : shape(s), data(s.numel(), fill) {}
  Tensor(Shape s, std::vector<double> d);

  std::size_t numel() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }

  double& at(int n, int c, int h, int w) {
    return data[((static_cast<std::size_t>(n) * shape.c + c) * shape.h + h) * shape.w + w];
  }
  double at(int n, int c, int h, int w) const {
    return data[((static_cast<std::size_t>(n) * shape.c + c) * shape.h + h) * shape.w + w];
  }

  // Contiguous h*w plane of sample n, channel c.
  std::span<double> channel(int n, int c) {
    return {data.data() + (static_cast<std::size_t>(n) * shape.c + c) * shape.plane(), shape.plane()};
  }
  std::span<const double> channel(int n, int c) const {
    return {data.data() + (static_cast<std::size_t>(n) * shape.c + c) * shape.plane(), shape.plane()};
  }

  double item() const;
  bool all_finite() const noexcept;
};

// A value in the computation graph. Leaves that require gradients are the
// trainable parameters; interior nodes carry the closure that pushes their
// gradient to their parents.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  // Gradient buffer, zero-allocated on first use.
  Tensor& grad_buffer();
  void zero_grad();
};

using Var = std::shared_ptr<Node>;

Var constant(Tensor t);
Var parameter(Tensor t);

// Builds an interior node. Parents and closure are dropped when no parent
// requires a gradient, so inference graphs hold no history.
Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backward_fn);

// Reverse-mode sweep from a single-element root; gradients accumulate into
// every reachable node that requires them.
void backward(const Var& root);

struct NamedParam {
  std::string name;
  Var var;
};

using ParamList = std::vector<NamedParam>;

}  // namespace mwgan::nn
