#include "mwgan/generator.hpp"

#include <cmath>

#include "mwgan/error.hpp"
#include "mwgan/nn/bridge.hpp"

namespace mwgan {

using nn::Conv2d;
using nn::Var;

namespace {

// Width of the dense path inside a residual block of the given flavour.
int inner_channels(const GeneratorConfig& c) {
  return c.variant == BlockVariant::WDRB ? 4 * c.features : c.features;
}

}  // namespace

Generator::Generator(const GeneratorConfig& config, int n_neighbors, std::mt19937_64& rng)
    : config_(config), n_neighbors_(n_neighbors) {
  if (config.blocks < 1) throw ArgumentError("generator needs at least one residual block");
  if (n_neighbors < 1) throw ArgumentError("generator needs N >= 1");
  const int frames = 2 * n_neighbors + 1;
  const int f = config.features;
  in0_ = Conv2d::create(4 * frames, f, 3, 1, 1.0, rng);
  in1_ = Conv2d::create(f, f, 3, 1, 1.0, rng);
  const int inner = inner_channels(config);
  for (int b = 0; b < config.blocks; ++b) {
    ResidualBlock rb;
    for (int d = 0; d < config.dense_blocks; ++d) {
      DenseBlock db;
      int width = inner;
      for (int l = 0; l < config.dense_layers; ++l) {
        db.growth.push_back(Conv2d::create(width, config.growth, 3, 1, 0.5, rng));
        width += config.growth;
      }
      db.fuse = Conv2d::create(width, inner, 3, 1, 0.1, rng);
      rb.dense.push_back(std::move(db));
    }
    rb.tail = Conv2d::create(inner, inner, 3, 1, 0.1, rng, config.zero_init_tails);
    blocks_.push_back(std::move(rb));
  }
  trunk_ = Conv2d::create(f, f, 3, 1, 1.0, rng);
  pre_head_ = Conv2d::create(f, f, 3, 1, 1.0, rng);
  head_ = Conv2d::create(f, 4, 3, 1, 1.0, rng, /*zero_init=*/true);
}

Var Generator::dense_forward(const DenseBlock& block, const Var& x) const {
  std::vector<Var> feats{x};
  for (const auto& conv : block.growth) {
    feats.push_back(nn::leaky_relu(conv(nn::concat_channels(feats)), config_.slope));
  }
  return nn::add(x, nn::scale(block.fuse(nn::concat_channels(feats)), config_.residual_scale));
}

Var Generator::block_forward(int index, const Var& x) const {
  const ResidualBlock& rb = blocks_.at(static_cast<std::size_t>(index));
  const nn::Shape s = x->value.shape;
  if (config_.variant != BlockVariant::RRDB && (s.h % 2 != 0 || s.w % 2 != 0)) {
    throw StructureError("residual block needs even spatial extents, got " + s.str());
  }
  Var y;
  switch (config_.variant) {
    case BlockVariant::WDRB: y = nn::wpt(x, 1); break;
    case BlockVariant::RRDB: y = x; break;
    case BlockVariant::CNN: y = nn::avg_pool(x, 2); break;
  }
  for (const auto& db : rb.dense) y = dense_forward(db, y);
  y = rb.tail(y);
  switch (config_.variant) {
    case BlockVariant::WDRB: y = nn::iwpt(y, 1); break;
    case BlockVariant::RRDB: break;
    case BlockVariant::CNN: y = nn::upsample_nearest(y, 2); break;
  }
  return nn::add(x, nn::scale(y, config_.residual_scale));
}

Generator::Output Generator::forward(const Var& target, const std::vector<Var>& compensated) const {
  if (compensated.size() != static_cast<std::size_t>(2 * n_neighbors_)) {
    throw StructureError("generator expects " + std::to_string(2 * n_neighbors_) + " compensated frames, got " +
                         std::to_string(compensated.size()));
  }
  std::vector<Var> frames{target};
  frames.insert(frames.end(), compensated.begin(), compensated.end());
  const Var bands = nn::wpt(nn::concat_channels(frames), 1);

  const Var f0 = in1_(nn::leaky_relu(in0_(bands), config_.slope));
  Var t = f0;
  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) t = block_forward(b, t);
  t = nn::add(trunk_(t), f0);
  const Var correction = head_(nn::leaky_relu(pre_head_(t), config_.slope));

  Output out;
  out.subbands = nn::add(nn::wpt(target, 1), correction);
  out.frame = nn::add(target, nn::iwpt(correction, 1));
  return out;
}

nn::ParamList Generator::params() const {
  nn::ParamList out;
  in0_.collect("generator.in0", out);
  in1_.collect("generator.in1", out);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const std::string p = "generator.block" + std::to_string(b);
    for (std::size_t d = 0; d < blocks_[b].dense.size(); ++d) {
      const std::string q = p + ".dense" + std::to_string(d);
      for (std::size_t l = 0; l < blocks_[b].dense[d].growth.size(); ++l) {
        blocks_[b].dense[d].growth[l].collect(q + ".growth" + std::to_string(l), out);
      }
      blocks_[b].dense[d].fuse.collect(q + ".fuse", out);
    }
    blocks_[b].tail.collect(p + ".tail", out);
  }
  trunk_.collect("generator.trunk", out);
  pre_head_.collect("generator.pre_head", out);
  head_.collect("generator.head", out);
  return out;
}

Generator Generator::clone() const {
  Generator g;
  g.config_ = config_;
  g.n_neighbors_ = n_neighbors_;
  g.in0_ = in0_.clone();
  g.in1_ = in1_.clone();
  for (const auto& rb : blocks_) {
    ResidualBlock c;
    for (const auto& db : rb.dense) {
      DenseBlock d;
      for (const auto& conv : db.growth) d.growth.push_back(conv.clone());
      d.fuse = db.fuse.clone();
      c.dense.push_back(std::move(d));
    }
    c.tail = rb.tail.clone();
    g.blocks_.push_back(std::move(c));
  }
  g.trunk_ = trunk_.clone();
  g.pre_head_ = pre_head_.clone();
  g.head_ = head_.clone();
  return g;
}

EnhanceOutput enhance_batch(const MotionNet& motion, const Generator& generator, const Var& target,
                            const std::vector<Var>& neighbors) {
  EnhanceOutput out;
  out.compensated = compensate(motion, target, neighbors);
  auto g = generator.forward(target, out.compensated);
  out.subbands = std::move(g.subbands);
  out.frame = std::move(g.frame);
  return out;
}

GeneratorResult generator_forward(const ClipWindow& window, const Generator& generator, const MotionNet& motion) {
  window.validate();
  const Var target = nn::constant(nn::to_tensor(window.target.samples));
  std::vector<Var> neighbors;
  for (const auto& f : window.neighbors) neighbors.push_back(nn::constant(nn::to_tensor(f.samples)));
  const EnhanceOutput e = enhance_batch(motion, generator, target, neighbors);
  if (!e.frame->value.all_finite() || !e.subbands->value.all_finite()) {
    throw DivergenceError(0, "generator output", std::nan(""));
  }

  GeneratorResult r;
  r.subbands.level = 1;
  for (int c = 0; c < 4; ++c) r.subbands.bands.push_back(nn::to_plane(e.subbands->value, 0, c));
  r.enhanced = Frame{nn::to_plane(e.frame->value), window.target.seq_id, window.target.index, window.target.qp};
  for (std::size_t i = 0; i < e.compensated.size(); ++i) {
    const Frame& src = window.neighbors[i];
    r.compensated.push_back(Frame{nn::to_plane(e.compensated[i]->value), src.seq_id, src.index, src.qp});
  }
  return r;
}

}  // namespace mwgan
