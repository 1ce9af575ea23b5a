#pragma once

#include <cstdint>

#include "mwgan/nn/tensor.hpp"

namespace mwgan::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer over a fixed parameter partition. Only the
// parameters handed to the constructor are ever written by step().
class Adam {
 public:
  explicit Adam(ParamList params, AdamConfig config = {});

  void zero_grad();
  void step(double lr);

  const ParamList& params() const noexcept { return params_; }
  std::int64_t steps() const noexcept { return steps_; }

  // Moment buffers, exposed for checkpointing.
  std::vector<Tensor>& first_moments() noexcept { return m_; }
  std::vector<Tensor>& second_moments() noexcept { return v_; }
  void set_steps(std::int64_t s) noexcept { steps_ = s; }

 private:
  ParamList params_;
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t steps_ = 0;
};

}  // namespace mwgan::nn
