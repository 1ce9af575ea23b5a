#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "mwgan/checkpoint.hpp"
#include "mwgan/error.hpp"
#include "mwgan/synthetic.hpp"
#include "mwgan/training.hpp"
#include "testing.hpp"

using namespace mwgan;
using mwgan::testing::TempDir;

namespace {

ModelConfig tiny_model() {
  ModelConfig m = desk_model_config();
  m.motion.channels = 4;
  m.motion.levels = 2;
  m.generator.features = 4;
  m.generator.blocks = 1;
  m.generator.dense_blocks = 1;
  m.generator.dense_layers = 2;
  m.generator.growth = 3;
  m.discriminator.channels = 4;
  return m;
}

TrainingSet tiny_set() {
  std::vector<SequencePair> pairs;
  for (int s = 0; s < 2; ++s) {
    SequencePair p;
    p.groundtruth = moving_sequence("seq" + std::to_string(s), 3, 16, 16, 1, s, 100 + s);
    for (const auto& f : p.groundtruth) {
      Frame c = f;
      c.samples = blur_noise(f.samples, BlurNoise{}, 7 + f.index);
      p.compressed.push_back(std::move(c));
    }
    pairs.push_back(std::move(p));
  }
  return build_training_set(pairs, 1);
}

StageConfig tiny_stage(int stage, std::int64_t iterations) {
  StageConfig c = stage == 1 ? StageConfig::paper_stage1() : StageConfig::paper_stage2();
  c.iterations = iterations;
  c.batch_size = 2;
  c.crop_size = 16;
  c.lr_initial = 1e-3;
  return c;
}

std::vector<double> snapshot(const nn::ParamList& params) {
  std::vector<double> out;
  for (const auto& p : params) out.insert(out.end(), p.var->value.data.begin(), p.var->value.data.end());
  return out;
}

std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& b) {
  std::ofstream(p, std::ios::binary).write(b.data(), static_cast<std::streamsize>(b.size()));
}

// Re-seals an edited archive so only the edit itself is under test.
void reseal(std::vector<char>& b) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i + 8 < b.size(); ++i) {
    h ^= static_cast<unsigned char>(b[i]);
    h *= 0x100000001b3ULL;
  }
  std::memcpy(b.data() + b.size() - 8, &h, 8);
}

TrainConfigFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_train_config(in);
}

}  // namespace

TEST(Schedule, PaperValuesAreExact) {
  const StageConfig c = StageConfig::paper_stage1();
  EXPECT_EQ(alpha_at(c, 0), 10.0);
  EXPECT_EQ(alpha_at(c, 50000), 1.0);
  EXPECT_EQ(alpha_at(c, 100000), 0.1);
  EXPECT_EQ(alpha_at(c, 200000), 10.0 / 10000.0);
  EXPECT_EQ(learning_rate(c, 0), 2e-4);
  EXPECT_EQ(learning_rate(c, 50000), 2e-4);
  EXPECT_EQ(learning_rate(c, 100000), 1e-4);
  EXPECT_EQ(learning_rate(c, 200000), 5e-5);
}

TEST(Schedule, BoundariesAreClosedOpen) {
  const StageConfig c = StageConfig::paper_stage1();
  EXPECT_EQ(alpha_at(c, 49999), 10.0);
  EXPECT_EQ(alpha_at(c, 50000), 1.0);
  EXPECT_EQ(learning_rate(c, 99999), 2e-4);
  EXPECT_EQ(learning_rate(c, 100000), 1e-4);
  EXPECT_THROW(alpha_at(c, -1), ArgumentError);
}

TEST(Schedule, StageTwo) {
  const StageConfig c = StageConfig::paper_stage2();
  EXPECT_EQ(c.iterations, 600000);
  EXPECT_EQ(c.crop_size, 128);
  EXPECT_EQ(c.batch_size, 32);
  for (std::int64_t it : {0, 50000, 100000, 599999}) EXPECT_EQ(alpha_at(c, it), 1e-2);
  EXPECT_EQ(learning_rate(c, 0), 1e-4);
  EXPECT_EQ(learning_rate(c, 99999), 1e-4);
  EXPECT_EQ(learning_rate(c, 100000), 5e-5);
  EXPECT_EQ(learning_rate(c, 200000), 2.5e-5);
  EXPECT_EQ(c.beta, 5e-3);
}

TEST(Config, ParsesEveryField) {
  const auto f = parse(
      "# desk run\n"
      "stage = 1\n"
      "iterations = 300\n"
      "batch_size = 4   # small\n"
      "crop_size = 64\n"
      "lr_initial = 1e-3\n"
      "seed = 9\n"
      "profile = paper\n"
      "checkpoint_every = 100\n");
  EXPECT_EQ(f.stage.iterations, 300);
  EXPECT_EQ(f.stage.batch_size, 4);
  EXPECT_EQ(f.stage.lr_initial, 1e-3);
  EXPECT_EQ(f.stage.alpha_initial, 10.0);
  EXPECT_EQ(f.stage.seed, 9u);
  EXPECT_EQ(f.profile, "paper");
  EXPECT_EQ(f.checkpoint_every, 100);
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  try {
    parse("stage = 1\n\nlearning_rate = 0.1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse("stage 1\n"), ConfigError);
  EXPECT_THROW(parse("iterations = 3e2x\n"), ConfigError);
  EXPECT_THROW(parse("seed = 1\nseed = 2\n"), ConfigError);
  EXPECT_THROW(parse("batch_size = 0\n"), ConfigError);
  EXPECT_THROW(parse("beta = 0.1\n"), ConfigError);  // stage 1 has no adversarial term
  EXPECT_THROW(parse("profile = huge\n"), ConfigError);
  try {
    parse("stage = 1\nlr_initial = fast\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Config, StageTwoEchoIsVerbatim) {
  const std::string echo = describe(StageConfig::paper_stage2());
  EXPECT_NE(echo.find("alpha_initial = 0.01\n"), std::string::npos) << echo;
  EXPECT_NE(echo.find("beta = 0.005\n"), std::string::npos) << echo;
  // The echo parses back to the same configuration.
  const auto back = parse(echo);
  EXPECT_EQ(describe(back.stage), echo);
}

TEST(Training, RunsAreDeterministic) {
  const TrainingSet set = tiny_set();
  const StageConfig cfg = tiny_stage(1, 4);
  std::vector<double> a, b;
  train_stage1(set, cfg, tiny_model(), TrainHooks{[&](const StepLosses& s) { a.push_back(s.l_g_total); }});
  train_stage1(set, cfg, tiny_model(), TrainHooks{[&](const StepLosses& s) { b.push_back(s.l_g_total); }});
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a, b);
}

TEST(Training, StageOneLogsNoAdversarialTerms) {
  const TrainingSet set = tiny_set();
  TrainState s = TrainState::create(tiny_model(), 1);
  const auto log = run_iterations(s, set, tiny_stage(1, 2));
  for (const auto& l : log) {
    EXPECT_EQ(l.l_adv, 0.0);
    EXPECT_EQ(l.l_d, 0.0);
    EXPECT_NEAR(l.l_g_total, l.l_w + l.alpha * l.l_m, 1e-12);
  }
  EXPECT_EQ(s.iteration, 2);
  EXPECT_FALSE(s.discriminator);
}

TEST(Training, StageMismatchIsRejected) {
  const TrainingSet set = tiny_set();
  TrainState s = TrainState::create(tiny_model(), 1);
  EXPECT_THROW(run_iterations(s, set, tiny_stage(2, 1)), ConfigError);
  EXPECT_THROW(train_stage2(set, TrainState::create(tiny_model(), 1), tiny_stage(1, 1)), ConfigError);
}

TEST(Training, DivergenceNamesTheTerm) {
  const TrainingSet set = tiny_set();
  TrainState s = TrainState::create(tiny_model(), 1);
  s.generator->params().front().var->value.data[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    run_iterations(s, set, tiny_stage(1, 1));
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.iteration(), 0);
    EXPECT_EQ(e.term(), "l_w");
  }
}

TEST(Training, UpdatePartition) {
  const TrainingSet set = tiny_set();
  TrainState s = begin_stage2(train_stage1(set, tiny_stage(1, 1), tiny_model()), 3);
  std::mt19937_64 rng(4);
  const Batch batch = sample_batch(set, 2, 16, 3, rng);
  const auto g0 = snapshot(s.generator_side_params());
  const auto d0 = snapshot(s.discriminator->params());

  // Critic update alone: reproduce the first half of a stage-2 step.
  const LossConfig lc;
  const auto e = enhance_batch(*s.motion, *s.generator, batch.target, batch.neighbors);
  s.opt_d->zero_grad();
  nn::backward(discriminator_loss(s.discriminator->forward(batch.groundtruth),
                                  s.discriminator->forward(nn::detach(e.frame)), 3));
  s.opt_d->step(1e-3);
  EXPECT_EQ(snapshot(s.generator_side_params()), g0);
  const auto d1 = snapshot(s.discriminator->params());
  EXPECT_NE(d1, d0);

  // Generator update alone: the adversarial gradient reaches D's weights but
  // opt_g must not apply it.
  s.opt_g->zero_grad();
  nn::backward(generator_total_loss(wavelet_loss(e.subbands, nn::wpt(batch.groundtruth, 1), lc),
                                    motion_loss(e.compensated, batch.groundtruth, lc),
                                    adversarial_loss_g(s.discriminator->forward(e.frame), 3), lc));
  s.opt_g->step(1e-3);
  EXPECT_EQ(snapshot(s.discriminator->params()), d1);
  EXPECT_NE(snapshot(s.generator_side_params()), g0);
}

TEST(Training, StageTwoStepReportsScores) {
  const TrainingSet set = tiny_set();
  TrainState s = begin_stage2(train_stage1(set, tiny_stage(1, 1), tiny_model()), 3);
  const auto log = run_iterations(s, set, tiny_stage(2, 2));
  ASSERT_EQ(log.size(), 2u);
  for (const auto& l : log) {
    EXPECT_TRUE(std::isfinite(l.l_d));
    EXPECT_TRUE(std::isfinite(l.l_adv));
    EXPECT_GT(l.l_d, 0.0);
    EXPECT_NEAR(l.l_g_total, l.l_w + 1e-2 * l.l_m + 5e-3 * l.l_adv, 1e-12);
  }
}

TEST(Training, StageTransferKeepsGeneratorAndMotion) {
  const TrainingSet set = tiny_set();
  TrainState s1 = train_stage1(set, tiny_stage(1, 2), tiny_model());
  const auto g = snapshot(s1.generator_side_params());
  const TrainState s2 = begin_stage2(std::move(s1), 11);
  EXPECT_EQ(snapshot(s2.generator_side_params()), g);
  EXPECT_EQ(s2.stage, 2);
  EXPECT_EQ(s2.iteration, 0);
  ASSERT_TRUE(s2.discriminator);
  EXPECT_EQ(s2.opt_g->steps(), 0);

  // The fresh critic matches one drawn directly from the stage-2 seed.
  std::mt19937_64 rng(11);
  const Discriminator fresh(tiny_model().discriminator, rng);
  EXPECT_EQ(snapshot(s2.discriminator->params()), snapshot(fresh.params()));
  EXPECT_THROW(begin_stage2(begin_stage2(TrainState::create(tiny_model(), 1), 1), 1), ArgumentError);
}

TEST(Checkpoint, RoundTripResumesIdentically) {
  TempDir dir("ckpt");
  const TrainingSet set = tiny_set();
  for (int stage : {1, 2}) {
    TrainState a = train_stage1(set, tiny_stage(1, 2), tiny_model());
    StageConfig cfg = tiny_stage(1, 4);
    if (stage == 2) {
      a = begin_stage2(std::move(a), 5);
      run_iterations(a, set, tiny_stage(2, 2));
      cfg = tiny_stage(2, 4);
    }
    const auto path = dir / ("s" + std::to_string(stage) + ".ckpt");
    save_checkpoint(a, path);
    TrainState b = load_checkpoint(path);
    EXPECT_EQ(b.stage, stage);
    EXPECT_EQ(b.iteration, 2);
    EXPECT_EQ(snapshot(b.generator_side_params()), snapshot(a.generator_side_params()));
    EXPECT_EQ(b.opt_g->steps(), a.opt_g->steps());

    const auto la = run_iterations(a, set, cfg);
    const auto lb = run_iterations(b, set, cfg);
    ASSERT_EQ(la.size(), 2u);
    ASSERT_EQ(lb.size(), 2u);
    for (std::size_t i = 0; i < la.size(); ++i) {
      EXPECT_EQ(la[i].l_g_total, lb[i].l_g_total) << "stage " << stage << " step " << i;
      EXPECT_EQ(la[i].l_d, lb[i].l_d);
    }
  }
}

TEST(Checkpoint, TamperingIsDetected) {
  TempDir dir("tamper");
  const auto path = dir / "a.ckpt";
  save_checkpoint(TrainState::create(tiny_model(), 1), path);
  const auto good = read_bytes(path);

  auto flipped = good;
  flipped[flipped.size() / 2] ^= 0x40;
  write_bytes(path, flipped);
  EXPECT_THROW(load_checkpoint(path), IntegrityError);

  write_bytes(path, std::vector<char>(good.begin(), good.begin() + good.size() / 2));
  EXPECT_THROW(load_checkpoint(path), IntegrityError);

  auto magic = good;
  magic[0] = 'X';
  write_bytes(path, magic);
  EXPECT_THROW(load_checkpoint(path), IntegrityError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), CheckpointError);
}

TEST(Checkpoint, VersionAndShapeMismatch) {
  TempDir dir("mismatch");
  const auto path = dir / "a.ckpt";
  save_checkpoint(TrainState::create(tiny_model(), 1), path);
  const auto good = read_bytes(path);

  auto version = good;
  version[8] = 2;  // u32 version follows the 8-byte magic
  reseal(version);
  write_bytes(path, version);
  try {
    load_checkpoint(path);
    FAIL() << "expected CheckpointError";
  } catch (const IntegrityError&) {
    FAIL() << "version mismatch reported as integrity failure";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }

  // Widen the generator in the stored model config: the payload no longer fits.
  auto shape = good;
  const std::string key = "\"features\":4";
  auto it = std::search(shape.begin(), shape.end(), key.begin(), key.end());
  ASSERT_NE(it, shape.end());
  *(it + static_cast<std::ptrdiff_t>(key.size()) - 1) = '5';
  reseal(shape);
  write_bytes(path, shape);
  try {
    load_checkpoint(path);
    FAIL() << "expected CheckpointError";
  } catch (const IntegrityError&) {
    FAIL() << "shape mismatch reported as integrity failure";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("shape"), std::string::npos) << e.what();
  }
}

TEST(LossLog, HeaderAndRows) {
  TempDir dir("log");
  {
    LossLog log(dir / "loss.csv");
    StepLosses s;
    s.iteration = 3;
    s.l_w = 0.5;
    s.l_m = 0.25;
    s.l_g_total = 3.0;
    log.write(s);
  }
  std::ifstream in(dir / "loss.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "iteration,l_w,l_m,l_adv,l_d,l_g_total");
  EXPECT_EQ(row, "3,0.5,0.25,0,0,3");
}
