#pragma once

#include <random>
#include <vector>

#include "mwgan/data.hpp"
#include "mwgan/model_config.hpp"
#include "mwgan/motion.hpp"
#include "mwgan/nn/conv.hpp"
#include "mwgan/wavelet.hpp"

namespace mwgan {

// Densely connected block with a local residual: each growth layer sees the
// concatenation of the block input and all earlier growth outputs, and a
// linear fusion conv maps everything back to the block width.
struct DenseBlock {
  std::vector<nn::Conv2d> growth;
  nn::Conv2d fuse;
};

// One trunk block. For WDRB the dense path runs on the one-level packet
// transform of the input (C -> 4C channels at half resolution) and returns
// through the inverse transform: out = x + s * IWPT(tail(DB...(WPT(x)))).
struct ResidualBlock {
  std::vector<DenseBlock> dense;
  nn::Conv2d tail;
};

// Wavelet reconstruction network: frames -> one-level WPT -> feature
// extraction -> K residual blocks -> four sub-band corrections added to the
// target's own sub-bands.
class Generator {
 public:
  Generator(const GeneratorConfig& config, int n_neighbors, std::mt19937_64& rng);

  Generator(Generator&&) noexcept = default;
  Generator& operator=(Generator&&) noexcept = default;
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  struct Output {
    nn::Var subbands;  // (B,4,H/2,W/2): WPT(V_t) + correction
    nn::Var frame;     // (B,1,H,W):   V_t + IWPT(correction)
  };

  // target (B,1,H,W); compensated: 2N tensors of the same shape.
  Output forward(const nn::Var& target, const std::vector<nn::Var>& compensated) const;

  // Shape-preserving residual block `index` applied to a (B,C,h,w) feature map.
  nn::Var block_forward(int index, const nn::Var& x) const;

  nn::ParamList params() const;
  const GeneratorConfig& config() const noexcept { return config_; }
  int n_neighbors() const noexcept { return n_neighbors_; }
  Generator clone() const;

 private:
  Generator() = default;

  nn::Var dense_forward(const DenseBlock& block, const nn::Var& x) const;

  GeneratorConfig config_;
  int n_neighbors_ = 1;
  nn::Conv2d in0_;
  nn::Conv2d in1_;
  std::vector<ResidualBlock> blocks_;
  nn::Conv2d trunk_;
  nn::Conv2d pre_head_;
  nn::Conv2d head_;
};

// Full enhancement graph for a batch: motion compensation, then the
// generator.
struct EnhanceOutput {
  nn::Var subbands;
  nn::Var frame;
  std::vector<nn::Var> compensated;
};

EnhanceOutput enhance_batch(const MotionNet& motion, const Generator& generator, const nn::Var& target,
                            const std::vector<nn::Var>& neighbors);

struct GeneratorResult {
  SubbandSet subbands;  // S^_t
  Frame enhanced;       // O^_t, unclamped
  std::vector<Frame> compensated;
};

// Inference on one window. Throws DivergenceError if the output is not finite.
GeneratorResult generator_forward(const ClipWindow& window, const Generator& generator,
                                  const MotionNet& motion);

}  // namespace mwgan
