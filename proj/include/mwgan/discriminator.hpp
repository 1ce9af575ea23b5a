#pragma once

#include <random>
#include <vector>

#include "mwgan/model_config.hpp"
#include "mwgan/nn/conv.hpp"
#include "mwgan/plane.hpp"

namespace mwgan {

// One single-channel score map per pyramid level; map l is (H/2^l) x (W/2^l).
struct ScoreMapPyramid {
  std::vector<Plane> maps;
};

// Multi-level critic. Level 0 scores the frame itself; level l >= 1 scores
// the 4^l packet sub-bands of the frame stacked as channels. Each level is
// a stack of dilated 3x3 convolutions ending in a linear one-channel head.
// With use_wpt off, level l instead sees the 2^l mean-pooled frame
// replicated over 4^l channels.
class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig& config, std::mt19937_64& rng);

  Discriminator(Discriminator&&) noexcept = default;
  Discriminator& operator=(Discriminator&&) noexcept = default;
  Discriminator(const Discriminator&) = delete;
  Discriminator& operator=(const Discriminator&) = delete;

  // frame (B,1,H,W) -> L maps of (B,1,H>>l,W>>l).
  std::vector<nn::Var> forward(const nn::Var& frame) const;

  nn::ParamList params() const;
  const DiscriminatorConfig& config() const noexcept { return config_; }
  int levels() const noexcept { return config_.levels; }
  Discriminator clone() const;

 private:
  Discriminator() = default;

  struct Level {
    std::vector<nn::Conv2d> body;
    nn::Conv2d head;
  };
  DiscriminatorConfig config_;
  std::vector<Level> levels_;
};

ScoreMapPyramid discriminator_forward(const Plane& frame, const Discriminator& d);

}  // namespace mwgan
