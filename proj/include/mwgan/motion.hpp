#pragma once

#include <random>
#include <vector>

#include "mwgan/data.hpp"
#include "mwgan/model_config.hpp"
#include "mwgan/nn/conv.hpp"

namespace mwgan {

// Dense displacement: u along columns, v along rows, in pixels.
struct FlowField {
  Plane u;
  Plane v;
};

// Coarse-to-fine flow estimator. Pyramid level k works at 1/2^k resolution
// and sees the level-k packet sub-bands of the target and of the neighbour
// warped by the current estimate, so nothing is discarded on the way down.
// Each level refines the x2-upsampled, x2-scaled coarser flow with the
// residual predicted by a 7x7 -> 5x5 -> 3x3 convolution stack whose last
// layer starts at zero.
class MotionNet {
 public:
  MotionNet(const MotionConfig& config, std::mt19937_64& rng);

  MotionNet(MotionNet&&) noexcept = default;
  MotionNet& operator=(MotionNet&&) noexcept = default;
  MotionNet(const MotionNet&) = delete;
  MotionNet& operator=(const MotionNet&) = delete;

  // target/neighbor: (B,1,H,W); returns (B,2,H,W).
  nn::Var estimate_flow(const nn::Var& target, const nn::Var& neighbor) const;

  nn::ParamList params() const;
  const MotionConfig& config() const noexcept { return config_; }
  MotionNet clone() const;

 private:
  MotionNet() = default;

  struct Level {
    nn::Conv2d wide;    // 7x7
    nn::Conv2d middle;  // 5x5
    nn::Conv2d head;    // 3x3 -> 2 channels
  };
  MotionConfig config_;
  std::vector<Level> levels_;
};

// Warps each neighbour toward the target by its own estimated flow. Returns
// compensated neighbours in input order; flows (if requested) likewise.
std::vector<nn::Var> compensate(const MotionNet& net, const nn::Var& target,
                                const std::vector<nn::Var>& neighbors,
                                std::vector<nn::Var>* flows = nullptr);

// Frame-level wrappers (inference only).
FlowField estimate_flow(const Frame& target, const Frame& neighbor, const MotionNet& net);
Frame warp(const Frame& neighbor, const FlowField& flow);
std::vector<Frame> compensate_window(const ClipWindow& window, const MotionNet& net);

}  // namespace mwgan
