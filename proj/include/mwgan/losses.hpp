#pragma once

#include <vector>

#include "mwgan/discriminator.hpp"
#include "mwgan/nn/tensor.hpp"
#include "mwgan/plane.hpp"
#include "mwgan/wavelet.hpp"

namespace mwgan {

struct LossConfig {
  double alpha = 10.0;
  double beta = 0.0;
  double eps_m = 1e-3;
  double eps_w = 1e-3;
  std::vector<double> subband_weights{1.0, 1.0, 1.0, 1.0};
  int level_count = 3;

  void validate() const;
};

// Graph versions. Inputs are batched (B,C,H,W); every loss is averaged over
// the batch and returned as a (1,1,1,1) node.

// (1/2N) sum_n sqrt(||comp_n - gt||^2 + eps_m^2).
nn::Var motion_loss(const std::vector<nn::Var>& compensated, const nn::Var& groundtruth,
                    const LossConfig& cfg);
// sqrt(sum_c w_c ||pred_c - target_c||^2 + eps_w^2) over band channels c.
nn::Var wavelet_loss(const nn::Var& predicted, const nn::Var& target, const LossConfig& cfg);
// Least-squares critic objective; maps are summed over pixels, not averaged.
nn::Var discriminator_loss(const std::vector<nn::Var>& real, const std::vector<nn::Var>& fake, int levels);
nn::Var adversarial_loss_g(const std::vector<nn::Var>& fake, int levels);
// ladv may be null for the stage-1 objective.
nn::Var generator_total_loss(const nn::Var& lw, const nn::Var& lm, const nn::Var& ladv, const LossConfig& cfg);

// Value versions on single frames.
double motion_loss(const std::vector<Frame>& compensated, const Frame& groundtruth, const LossConfig& cfg);
double wavelet_loss(const SubbandSet& predicted, const SubbandSet& target, const LossConfig& cfg);
double discriminator_loss(const ScoreMapPyramid& real, const ScoreMapPyramid& fake, int levels);
double adversarial_loss_g(const ScoreMapPyramid& fake, int levels);
// Throws DivergenceError when any component is not finite.
double generator_total_loss(double lw, double lm, double ladv, const LossConfig& cfg);

}  // namespace mwgan
