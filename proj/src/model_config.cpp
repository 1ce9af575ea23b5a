#include "mwgan/model_config.hpp"

#include <algorithm>

#include "mwgan/error.hpp"

namespace mwgan {

std::string to_string(BlockVariant v) {
  switch (v) {
    case BlockVariant::WDRB: return "WDRB";
    case BlockVariant::RRDB: return "RRDB";
    case BlockVariant::CNN: return "CNN";
  }
  return "WDRB";
}

BlockVariant parse_block_variant(const std::string& s) {
  if (s == "WDRB") return BlockVariant::WDRB;
  if (s == "RRDB") return BlockVariant::RRDB;
  if (s == "CNN") return BlockVariant::CNN;
  throw ArgumentError("unknown block variant '" + s + "' (expected WDRB, RRDB or CNN)");
}

int ModelConfig::required_multiple() const {
  // Generator: input WPT plus the in-block halving of WDRB/CNN.
  int m = generator.variant == BlockVariant::RRDB ? 2 : 4;
  m = std::max(m, 1 << (motion.levels - 1));
  m = std::max(m, 1 << (discriminator.levels - 1));
  return m;
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw ArgumentError(std::string(name) + " must be >= 1");
  };
  positive(neighbors, "neighbors");
  positive(motion.levels, "motion.levels");
  positive(motion.channels, "motion.channels");
  if (!(motion.flow_scale > 0.0)) throw ArgumentError("motion.flow_scale must be positive");
  positive(generator.features, "generator.features");
  positive(generator.blocks, "generator.blocks");
  positive(generator.dense_blocks, "generator.dense_blocks");
  positive(generator.dense_layers, "generator.dense_layers");
  positive(generator.growth, "generator.growth");
  positive(discriminator.levels, "discriminator.levels");
  positive(discriminator.channels, "discriminator.channels");
  if (discriminator.dilations.empty()) throw ArgumentError("discriminator.dilations must not be empty");
  for (int d : discriminator.dilations) positive(d, "discriminator dilation");
}

ModelConfig desk_model_config() {
  ModelConfig c;
  c.motion.channels = 16;
  c.generator.features = 16;
  c.generator.blocks = 2;
  c.generator.dense_blocks = 2;
  c.generator.dense_layers = 2;
  c.generator.growth = 8;
  c.discriminator.channels = 16;
  return c;
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{
      {"neighbors", c.neighbors},
      {"motion",
       {{"levels", c.motion.levels},
        {"channels", c.motion.channels},
        {"slope", c.motion.slope},
        {"flow_scale", c.motion.flow_scale}}},
      {"generator",
       {{"features", c.generator.features},
        {"blocks", c.generator.blocks},
        {"dense_blocks", c.generator.dense_blocks},
        {"dense_layers", c.generator.dense_layers},
        {"growth", c.generator.growth},
        {"residual_scale", c.generator.residual_scale},
        {"slope", c.generator.slope},
        {"zero_init_tails", c.generator.zero_init_tails},
        {"variant", to_string(c.generator.variant)}}},
      {"discriminator",
       {{"levels", c.discriminator.levels},
        {"channels", c.discriminator.channels},
        {"dilations", c.discriminator.dilations},
        {"slope", c.discriminator.slope},
        {"use_wpt", c.discriminator.use_wpt},
        {"zero_init_heads", c.discriminator.zero_init_heads}}},
  };
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  j.at("neighbors").get_to(c.neighbors);
  const auto& m = j.at("motion");
  m.at("levels").get_to(c.motion.levels);
  m.at("channels").get_to(c.motion.channels);
  m.at("slope").get_to(c.motion.slope);
  m.at("flow_scale").get_to(c.motion.flow_scale);
  const auto& g = j.at("generator");
  g.at("features").get_to(c.generator.features);
  g.at("blocks").get_to(c.generator.blocks);
  g.at("dense_blocks").get_to(c.generator.dense_blocks);
  g.at("dense_layers").get_to(c.generator.dense_layers);
  g.at("growth").get_to(c.generator.growth);
  g.at("residual_scale").get_to(c.generator.residual_scale);
  g.at("slope").get_to(c.generator.slope);
  g.at("zero_init_tails").get_to(c.generator.zero_init_tails);
  c.generator.variant = parse_block_variant(g.at("variant").get<std::string>());
  const auto& d = j.at("discriminator");
  d.at("levels").get_to(c.discriminator.levels);
  d.at("channels").get_to(c.discriminator.channels);
  d.at("dilations").get_to(c.discriminator.dilations);
  d.at("slope").get_to(c.discriminator.slope);
  d.at("use_wpt").get_to(c.discriminator.use_wpt);
  d.at("zero_init_heads").get_to(c.discriminator.zero_init_heads);
}

}  // namespace mwgan
