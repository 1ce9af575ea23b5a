#include "mwgan/motion.hpp"

#include "mwgan/error.hpp"
#include "mwgan/nn/bridge.hpp"
#include "mwgan/wavelet.hpp"

namespace mwgan {

using nn::Var;

MotionNet::MotionNet(const MotionConfig& config, std::mt19937_64& rng) : config_(config) {
  if (config.levels < 1 || config.channels < 1) throw ArgumentError("motion net needs levels >= 1 and channels >= 1");
  if (!(config.flow_scale > 0.0)) throw ArgumentError("motion net needs a positive flow_scale");
  for (int k = 0; k < config.levels; ++k) {
    const int bands = 1 << (2 * k);
    const int in = 2 * bands + 2;
    Level lv{nn::Conv2d::create(in, config.channels, 7, 1, 1.0, rng),
             nn::Conv2d::create(config.channels, config.channels, 5, 1, 1.0, rng),
             nn::Conv2d::create(config.channels, 2, 3, 1, 1.0, rng, /*zero_init=*/true)};
    levels_.push_back(std::move(lv));
  }
}

Var MotionNet::estimate_flow(const Var& target, const Var& neighbor) const {
  const nn::Shape s = target->value.shape;
  if (!(s == neighbor->value.shape) || s.c != 1) {
    throw ArgumentError("estimate_flow: target " + s.str() + " and neighbour " + neighbor->value.shape.str() +
                        " must be matching single-channel frames");
  }
  const int coarsest = config_.levels - 1;
  check_divisible(s.h, s.w, coarsest);

  Var flow;
  for (int k = coarsest; k >= 0; --k) {
    Var up;
    if (k == coarsest) {
      up = nn::constant(nn::Tensor(nn::Shape{s.n, 2, s.h >> k, s.w >> k}, 0.0));
    } else {
      up = nn::scale(nn::upsample_bilinear2(flow), 2.0);
    }
    Var warped = neighbor;
    if (k != coarsest) {
      Var full = up;
      for (int j = 0; j < k; ++j) full = nn::scale(nn::upsample_bilinear2(full), 2.0);
      warped = nn::warp(neighbor, full);
    }
    const Var t_feat = k == 0 ? target : nn::wpt(target, k);
    const Var n_feat = k == 0 ? warped : nn::wpt(warped, k);
    const Level& lv = levels_[k];
    Var h = nn::concat_channels({t_feat, n_feat, up});
    h = nn::leaky_relu(lv.wide(h), config_.slope);
    h = nn::leaky_relu(lv.middle(h), config_.slope);
    flow = nn::add(up, nn::scale(lv.head(h), config_.flow_scale));
  }
  return flow;
}

nn::ParamList MotionNet::params() const {
  nn::ParamList out;
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const std::string p = "motion.level" + std::to_string(k);
    levels_[k].wide.collect(p + ".conv7", out);
    levels_[k].middle.collect(p + ".conv5", out);
    levels_[k].head.collect(p + ".head", out);
  }
  return out;
}

MotionNet MotionNet::clone() const {
  MotionNet m;
  m.config_ = config_;
  for (const auto& lv : levels_) m.levels_.push_back({lv.wide.clone(), lv.middle.clone(), lv.head.clone()});
  return m;
}

std::vector<Var> compensate(const MotionNet& net, const Var& target, const std::vector<Var>& neighbors,
                            std::vector<Var>* flows) {
  std::vector<Var> out;
  for (const auto& n : neighbors) {
    Var f = net.estimate_flow(target, n);
    out.push_back(nn::warp(n, f));
    if (flows) flows->push_back(std::move(f));
  }
  return out;
}

FlowField estimate_flow(const Frame& target, const Frame& neighbor, const MotionNet& net) {
  if (!target.samples.same_shape(neighbor.samples)) throw ArgumentError("estimate_flow: frame dimensions differ");
  const Var f = net.estimate_flow(nn::constant(nn::to_tensor(target.samples)),
                                  nn::constant(nn::to_tensor(neighbor.samples)));
  return {nn::to_plane(f->value, 0, 0), nn::to_plane(f->value, 0, 1)};
}

Frame warp(const Frame& neighbor, const FlowField& flow) {
  if (!flow.u.same_shape(neighbor.samples) || !flow.v.same_shape(neighbor.samples)) {
    throw ArgumentError("warp: flow and frame dimensions differ");
  }
  nn::Tensor ft(nn::Shape{1, 2, flow.u.rows(), flow.u.cols()});
  std::copy(flow.u.storage().begin(), flow.u.storage().end(), ft.channel(0, 0).begin());
  std::copy(flow.v.storage().begin(), flow.v.storage().end(), ft.channel(0, 1).begin());
  const Var out = nn::warp(nn::constant(nn::to_tensor(neighbor.samples)), nn::constant(std::move(ft)));
  return Frame{nn::to_plane(out->value), neighbor.seq_id, neighbor.index, neighbor.qp};
}

std::vector<Frame> compensate_window(const ClipWindow& window, const MotionNet& net) {
  window.validate();
  const Var target = nn::constant(nn::to_tensor(window.target.samples));
  std::vector<Var> neighbors;
  for (const auto& f : window.neighbors) neighbors.push_back(nn::constant(nn::to_tensor(f.samples)));
  const auto comp = compensate(net, target, neighbors);
  std::vector<Frame> out;
  for (std::size_t i = 0; i < comp.size(); ++i) {
    const Frame& src = window.neighbors[i];
    out.push_back(Frame{nn::to_plane(comp[i]->value), src.seq_id, src.index, src.qp});
  }
  return out;
}

}  // namespace mwgan
