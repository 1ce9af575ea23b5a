#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mwgan {

// Residual block flavour used by the generator trunk. WDRB runs its dense
// path on wavelet sub-bands; RRDB at full resolution; CNN swaps the packet
// transform pair for mean pooling and nearest upsampling.
enum class BlockVariant { WDRB, RRDB, CNN };

std::string to_string(BlockVariant v);
BlockVariant parse_block_variant(const std::string& s);

struct MotionConfig {
  int levels = 3;
  int channels = 32;
  double slope = 0.2;
  double flow_scale = 4.0;  // each level's head predicts flow / flow_scale
};

struct GeneratorConfig {
  int features = 64;
  int blocks = 4;           // K
  int dense_blocks = 3;     // per residual block
  int dense_layers = 3;     // growth layers per dense block
  int growth = 32;
  double residual_scale = 0.2;
  double slope = 0.2;
  bool zero_init_tails = true;
  BlockVariant variant = BlockVariant::WDRB;
};

struct DiscriminatorConfig {
  int levels = 3;
  int channels = 64;
  std::vector<int> dilations{1, 2, 4};
  double slope = 0.2;
  bool use_wpt = true;
  bool zero_init_heads = false;
};

struct ModelConfig {
  int neighbors = 1;  // N; the generator sees 2N + 1 frames
  MotionConfig motion;
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;

  // Smallest power of two every frame extent must be a multiple of.
  int required_multiple() const;
  void validate() const;
};

// Width/depth profile small enough to train on one CPU core in minutes.
ModelConfig desk_model_config();

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace mwgan
