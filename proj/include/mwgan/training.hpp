#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <istream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mwgan/data.hpp"
#include "mwgan/discriminator.hpp"
#include "mwgan/format.hpp"
#include "mwgan/generator.hpp"
#include "mwgan/losses.hpp"
#include "mwgan/model_config.hpp"
#include "mwgan/motion.hpp"
#include "mwgan/nn/adam.hpp"

namespace mwgan {

// Schedules are step decays: value(iter) = initial / factor^floor(iter / every).
struct StageConfig {
  int stage = 1;
  std::int64_t iterations = 300000;
  int batch_size = 32;
  int crop_size = 256;
  double lr_initial = 2e-4;
  double lr_decay_factor = 2.0;
  std::int64_t lr_decay_every = 100000;
  double alpha_initial = 10.0;
  double alpha_decay_factor = 10.0;
  std::int64_t alpha_decay_every = 50000;
  double beta = 0.0;
  std::uint64_t seed = 1;

  static StageConfig paper_stage1();
  static StageConfig paper_stage2();

  // Throws ConfigError on non-positive counts or rates, or beta != 0 in stage 1.
  void validate() const;
};

double learning_rate(const StageConfig& cfg, std::int64_t iteration);
double alpha_at(const StageConfig& cfg, std::int64_t iteration);

// Settings read from a training config file alongside the stage fields.
struct TrainConfigFile {
  StageConfig stage;
  std::string profile = "desk";  // "desk" or "paper" model widths
  std::int64_t checkpoint_every = 0;  // 0: only the final checkpoint
};

// "key = value" lines; '#' starts a comment. Unknown keys, duplicates and
// malformed values raise ConfigError with the 1-based line number.
TrainConfigFile parse_train_config(std::istream& in);
TrainConfigFile load_train_config(const std::filesystem::path& path);

// Echo of every stage field, one "key = value" line each, with values in
// shortest round-trip form (so 0.005 prints as 0.005).
std::string describe(const StageConfig& cfg);

ModelConfig model_profile(const std::string& name);

struct TrainState {
  ModelConfig model;
  int stage = 1;
  std::int64_t iteration = 0;
  std::unique_ptr<MotionNet> motion;
  std::unique_ptr<Generator> generator;
  std::unique_ptr<Discriminator> discriminator;  // stage 2 only
  std::unique_ptr<nn::Adam> opt_g;  // over generator and motion parameters
  std::unique_ptr<nn::Adam> opt_d;
  std::mt19937_64 rng;

  // Fresh stage-1 state; every weight and the sampling stream derive from seed.
  static TrainState create(const ModelConfig& model, std::uint64_t seed);

  // Generator then motion parameters, the order opt_g was built with.
  nn::ParamList generator_side_params() const;
};

// Converts a trained stage-1 state: keeps G and M, draws a fresh D and new
// optimizers, resets the iteration counter and reseeds the sampler.
TrainState begin_stage2(TrainState&& stage1, std::uint64_t seed);

struct TrainingSet {
  std::vector<ClipWindow> windows;  // every window carries its ground truth
  int n_neighbors = 1;
};

TrainingSet build_training_set(const std::vector<SequencePair>& pairs, int n_neighbors);
TrainingSet load_training_set(const std::filesystem::path& manifest, int n_neighbors);

struct Batch {
  nn::Var target;                  // (B,1,c,c)
  std::vector<nn::Var> neighbors;  // 2N of (B,1,c,c)
  nn::Var groundtruth;             // (B,1,c,c)
};

// Draws batch_size windows uniformly with replacement and an aligned crop
// for each, all from rng.
Batch sample_batch(const TrainingSet& set, int batch_size, int crop_size, int max_level, std::mt19937_64& rng);
Batch make_batch(const std::vector<ClipWindow>& windows);

struct StepLosses {
  std::int64_t iteration = 0;
  double l_w = 0.0;
  double l_m = 0.0;
  double l_adv = 0.0;
  double l_d = 0.0;
  double l_g_total = 0.0;
  double alpha = 0.0;
  double lr = 0.0;
  double d_real_mean = 0.0;  // mean score over all real maps, stage 2
  double d_fake_mean = 0.0;
};

// One update on the given batch. Throw DivergenceError naming the term.
StepLosses train_step_stage1(TrainState& state, const Batch& batch, const StageConfig& cfg);
// Critic step on the detached output, then generator step against the
// updated critic.
StepLosses train_step_stage2(TrainState& state, const Batch& batch, const StageConfig& cfg);

struct TrainHooks {
  std::function<void(const StepLosses&)> on_step;
  // Called every checkpoint_every iterations (when > 0) with the state.
  std::function<void(const TrainState&)> on_checkpoint;
  std::int64_t checkpoint_every = 0;
};

// Runs iterations until state.iteration reaches cfg.iterations; returns the
// per-step losses of this call.
std::vector<StepLosses> run_iterations(TrainState& state, const TrainingSet& set, const StageConfig& cfg,
                                       const TrainHooks& hooks = {});

TrainState train_stage1(const TrainingSet& set, const StageConfig& cfg, const ModelConfig& model,
                        const TrainHooks& hooks = {});
TrainState train_stage2(const TrainingSet& set, TrainState&& init, const StageConfig& cfg,
                        const TrainHooks& hooks = {});

// Loss CSV with header "iteration,l_w,l_m,l_adv,l_d,l_g_total".
class LossLog {
 public:
  explicit LossLog(const std::filesystem::path& path);
  void write(const StepLosses& s);

 private:
  std::unique_ptr<std::ofstream> out_;
};

}  // namespace mwgan
