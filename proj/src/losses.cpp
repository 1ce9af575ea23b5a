#include "mwgan/losses.hpp"

#include <cmath>

#include "mwgan/error.hpp"
#include "mwgan/nn/bridge.hpp"
#include "mwgan/nn/ops.hpp"

namespace mwgan {

using nn::Var;

void LossConfig::validate() const {
  if (!(eps_m > 0.0) || !(eps_w > 0.0)) throw ArgumentError("Charbonnier epsilons must be positive");
  if (subband_weights.empty()) throw ArgumentError("subband weight vector is empty");
  for (double w : subband_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("subband weights must be finite and nonnegative");
  }
  if (level_count < 1) throw ArgumentError("level_count must be >= 1");
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0) {
    throw ArgumentError("alpha and beta must be finite and nonnegative");
  }
}

namespace {

// Batch mean of sqrt(||x_b||^2 + eps^2).
Var charbonnier(const Var& residual, double eps) {
  return nn::mean_all(nn::sqrt(nn::add_scalar(nn::sum_squares_per_sample(residual), eps * eps)));
}

// Batch mean of ||x_b||^2.
Var batch_energy(const Var& x) { return nn::mean_all(nn::sum_squares_per_sample(x)); }

void check_pyramid(const std::vector<Var>& maps, int levels, const char* which) {
  if (levels < 1) throw ArgumentError("level count must be >= 1");
  if (static_cast<int>(maps.size()) != levels) {
    throw ArgumentError(std::string(which) + " pyramid has " + std::to_string(maps.size()) +
                        " levels, expected " + std::to_string(levels));
  }
}

Var sum_terms(const std::vector<Var>& terms) {
  Var acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = nn::add(acc, terms[i]);
  return acc;
}

std::vector<Var> as_constants(const ScoreMapPyramid& p) {
  std::vector<Var> out;
  for (const auto& m : p.maps) out.push_back(nn::constant(nn::to_tensor(m)));
  return out;
}

nn::Tensor band_tensor(const SubbandSet& s) {
  s.validate();
  nn::Tensor t(nn::Shape{1, static_cast<int>(s.bands.size()), s.band_rows(), s.band_cols()});
  for (std::size_t c = 0; c < s.bands.size(); ++c) {
    const auto v = s.bands[c].values();
    std::copy(v.begin(), v.end(), t.channel(0, static_cast<int>(c)).begin());
  }
  return t;
}

}  // namespace

Var motion_loss(const std::vector<Var>& compensated, const Var& groundtruth, const LossConfig& cfg) {
  if (compensated.empty() || compensated.size() % 2 != 0) {
    throw ArgumentError("motion loss needs 2N >= 2 compensated frames, got " + std::to_string(compensated.size()));
  }
  if (!(cfg.eps_m > 0.0)) throw ArgumentError("eps_m must be positive");
  std::vector<Var> terms;
  for (const auto& c : compensated) {
    if (!(c->value.shape == groundtruth->value.shape)) {
      throw ArgumentError("motion loss: compensated " + c->value.shape.str() + " vs ground truth " +
                          groundtruth->value.shape.str());
    }
    terms.push_back(charbonnier(nn::sub(c, groundtruth), cfg.eps_m));
  }
  return nn::scale(sum_terms(terms), 1.0 / static_cast<double>(compensated.size()));
}

Var wavelet_loss(const Var& predicted, const Var& target, const LossConfig& cfg) {
  if (!(predicted->value.shape == target->value.shape)) {
    throw ArgumentError("wavelet loss: predicted " + predicted->value.shape.str() + " vs target " +
                        target->value.shape.str());
  }
  const int bands = predicted->value.shape.c;
  if (static_cast<int>(cfg.subband_weights.size()) != bands) {
    throw ArgumentError("wavelet loss: " + std::to_string(cfg.subband_weights.size()) + " weights for " +
                        std::to_string(bands) + " bands");
  }
  if (!(cfg.eps_w > 0.0)) throw ArgumentError("eps_w must be positive");
  std::vector<double> root(cfg.subband_weights.size());
  bool uniform = true;
  for (std::size_t i = 0; i < root.size(); ++i) {
    if (cfg.subband_weights[i] < 0.0) throw ArgumentError("subband weights must be nonnegative");
    root[i] = std::sqrt(cfg.subband_weights[i]);
    uniform = uniform && cfg.subband_weights[i] == 1.0;
  }
  Var r = nn::sub(predicted, target);
  if (!uniform) r = nn::scale_channels(r, root);
  return charbonnier(r, cfg.eps_w);
}

Var discriminator_loss(const std::vector<Var>& real, const std::vector<Var>& fake, int levels) {
  check_pyramid(real, levels, "real");
  check_pyramid(fake, levels, "fake");
  std::vector<Var> terms;
  for (int l = 0; l < levels; ++l) {
    if (!(real[l]->value.shape == fake[l]->value.shape)) {
      throw ArgumentError("discriminator loss: level " + std::to_string(l) + " real " + real[l]->value.shape.str() +
                          " vs fake " + fake[l]->value.shape.str());
    }
    terms.push_back(batch_energy(nn::add_scalar(real[l], -1.0)));
    terms.push_back(batch_energy(fake[l]));
  }
  return nn::scale(sum_terms(terms), 1.0 / (2.0 * levels));
}

Var adversarial_loss_g(const std::vector<Var>& fake, int levels) {
  check_pyramid(fake, levels, "fake");
  std::vector<Var> terms;
  for (const auto& m : fake) terms.push_back(batch_energy(nn::add_scalar(m, -1.0)));
  return nn::scale(sum_terms(terms), 1.0 / (2.0 * levels));
}

Var generator_total_loss(const Var& lw, const Var& lm, const Var& ladv, const LossConfig& cfg) {
  generator_total_loss(lw->value.item(), lm->value.item(), ladv ? ladv->value.item() : 0.0, cfg);
  Var total = nn::add(lw, nn::scale(lm, cfg.alpha));
  if (ladv && cfg.beta != 0.0) total = nn::add(total, nn::scale(ladv, cfg.beta));
  return total;
}

double motion_loss(const std::vector<Frame>& compensated, const Frame& groundtruth, const LossConfig& cfg) {
  std::vector<Var> comp;
  for (const auto& f : compensated) {
    if (!f.samples.same_shape(groundtruth.samples)) throw ArgumentError("motion loss: frame dimensions differ");
    comp.push_back(nn::constant(nn::to_tensor(f.samples)));
  }
  return motion_loss(comp, nn::constant(nn::to_tensor(groundtruth.samples)), cfg)->value.item();
}

double wavelet_loss(const SubbandSet& predicted, const SubbandSet& target, const LossConfig& cfg) {
  if (predicted.level != target.level || predicted.bands.size() != target.bands.size()) {
    throw ArgumentError("wavelet loss: sub-band sets differ in level or band count");
  }
  return wavelet_loss(nn::constant(band_tensor(predicted)), nn::constant(band_tensor(target)), cfg)->value.item();
}

double discriminator_loss(const ScoreMapPyramid& real, const ScoreMapPyramid& fake, int levels) {
  return discriminator_loss(as_constants(real), as_constants(fake), levels)->value.item();
}

double adversarial_loss_g(const ScoreMapPyramid& fake, int levels) {
  return adversarial_loss_g(as_constants(fake), levels)->value.item();
}

double generator_total_loss(double lw, double lm, double ladv, const LossConfig& cfg) {
  if (!std::isfinite(lw)) throw DivergenceError(-1, "l_w", lw);
  if (!std::isfinite(lm)) throw DivergenceError(-1, "l_m", lm);
  if (!std::isfinite(ladv)) throw DivergenceError(-1, "l_adv", ladv);
  return lw + cfg.alpha * lm + cfg.beta * ladv;
}

}  // namespace mwgan
