#include "mwgan/discriminator.hpp"

#include "mwgan/error.hpp"
#include "mwgan/nn/bridge.hpp"
#include "mwgan/wavelet.hpp"

namespace mwgan {

using nn::Conv2d;
using nn::Var;

Discriminator::Discriminator(const DiscriminatorConfig& config, std::mt19937_64& rng) : config_(config) {
  if (config.levels < 1) throw ArgumentError("discriminator needs at least one level");
  if (config.dilations.empty()) throw ArgumentError("discriminator needs at least one dilated conv per level");
  for (int l = 0; l < config.levels; ++l) {
    Level lv;
    int in = 1 << (2 * l);
    for (int d : config.dilations) {
      lv.body.push_back(Conv2d::create(in, config.channels, 3, d, 1.0, rng));
      in = config.channels;
    }
    lv.head = Conv2d::create(in, 1, 3, 1, 1.0, rng, config.zero_init_heads);
    levels_.push_back(std::move(lv));
  }
}

std::vector<Var> Discriminator::forward(const Var& frame) const {
  const nn::Shape s = frame->value.shape;
  if (s.c != 1) throw StructureError("discriminator expects single-channel frames, got " + s.str());
  check_divisible(s.h, s.w, config_.levels - 1);
  std::vector<Var> maps;
  for (int l = 0; l < config_.levels; ++l) {
    Var x = frame;
    if (l > 0) {
      x = config_.use_wpt ? nn::wpt(frame, l) : nn::repeat_channels(nn::avg_pool(frame, 1 << l), 1 << (2 * l));
    }
    for (const auto& conv : levels_[l].body) x = nn::leaky_relu(conv(x), config_.slope);
    maps.push_back(levels_[l].head(x));
  }
  return maps;
}

nn::ParamList Discriminator::params() const {
  nn::ParamList out;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const std::string p = "discriminator.level" + std::to_string(l);
    for (std::size_t i = 0; i < levels_[l].body.size(); ++i) levels_[l].body[i].collect(p + ".conv" + std::to_string(i), out);
    levels_[l].head.collect(p + ".head", out);
  }
  return out;
}

Discriminator Discriminator::clone() const {
  Discriminator d;
  d.config_ = config_;
  for (const auto& lv : levels_) {
    Level c;
    for (const auto& conv : lv.body) c.body.push_back(conv.clone());
    c.head = lv.head.clone();
    d.levels_.push_back(std::move(c));
  }
  return d;
}

ScoreMapPyramid discriminator_forward(const Plane& frame, const Discriminator& d) {
  const auto maps = d.forward(nn::constant(nn::to_tensor(frame)));
  ScoreMapPyramid out;
  for (const auto& m : maps) out.maps.push_back(nn::to_plane(m->value));
  return out;
}

}  // namespace mwgan
