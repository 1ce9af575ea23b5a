#include "mwgan/nn/adam.hpp"

#include <cmath>

namespace mwgan::nn {

Adam::Adam(ParamList params, AdamConfig config) : params_(std::move(params)), config_(config) {
  for (const auto& p : params_) {
    m_.emplace_back(p.var->value.shape, 0.0);
    v_.emplace_back(p.var->value.shape, 0.0);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.var->zero_grad();
}

void Adam::step(double lr) {
  ++steps_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Node& node = *params_[k].var;
    if (node.grad.data.empty()) continue;
    auto& w = node.value.data;
    const auto& g = node.grad.data;
    auto& m = m_[k].data;
    auto& v = v_[k].data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      w[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + config_.eps);
    }
  }
}

}  // namespace mwgan::nn
