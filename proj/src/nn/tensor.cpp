#include "mwgan/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mwgan/error.hpp"

namespace mwgan::nn {

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
         std::to_string(w) + ")";
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(s), data(std::move(d)) {
  if (data.size() != shape.numel()) {
    throw StructureError("tensor data size " + std::to_string(data.size()) +
                         " does not match shape " + shape.str());
  }
}

double Tensor::item() const {
  if (data.size() != 1) throw StructureError("item() on tensor of shape " + shape.str());
  return data.front();
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

Tensor& Node::grad_buffer() {
  if (grad.shape != value.shape || grad.data.size() != value.data.size()) {
    grad = Tensor(value.shape, 0.0);
  }
  return grad;
}

void Node::zero_grad() {
  if (!grad.data.empty()) std::fill(grad.data.begin(), grad.data.end(), 0.0);
}

Var constant(Tensor t) {
  auto node = std::make_shared<Node>();
  node->value = std::move(t);
  return node;
}

Var parameter(Tensor t) {
  auto node = std::make_shared<Node>();
  node->value = std::move(t);
  node->requires_grad = true;
  return node;
}

Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad =
      std::any_of(parents.begin(), parents.end(), [](const Var& p) { return p && p->requires_grad; });
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward_fn = std::move(backward_fn);
  }
  return node;
}

void backward(const Var& root) {
  if (root->value.numel() != 1) {
    throw StructureError("backward() needs a single-element root, got " + root->value.shape.str());
  }
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p && p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad_buffer().data[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_fn && !node->grad.data.empty()) node->backward_fn(*node);
  }
}

}  // namespace mwgan::nn
