// Command-line front end: wavelet-energy analysis, enhancement with a
// trained checkpoint, two-stage training, and synthetic data generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mwgan/analysis.hpp"
#include "mwgan/checkpoint.hpp"
#include "mwgan/data.hpp"
#include "mwgan/error.hpp"
#include "mwgan/image_io.hpp"
#include "mwgan/synthetic.hpp"
#include "mwgan/training.hpp"

namespace fs = std::filesystem;
using namespace mwgan;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kDivergence = 4 };

struct AnalyzeArgs {
  fs::path manifest, out;
  int level = 1;
  int bins = 201;
  double range = 0.0;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const auto r = analyze_manifest(a.manifest, a.level, a.bins,
                                  a.range > 0.0 ? std::optional<double>(a.range) : std::nullopt);
  fs::create_directories(a.out);
  write_energy_csv(r.energy, a.out / "energy.csv");
  write_histogram_csv(r.histograms, a.out / "histogram.csv");
  std::cout << "wrote " << r.energy.rows.size() << " energy rows to " << (a.out / "energy.csv").string() << '\n';
  return kOk;
}

struct EnhanceArgs {
  fs::path ckpt, input, gt, out;
};

int cmd_enhance(const EnhanceArgs& a) {
  const TrainState s = load_checkpoint(a.ckpt);
  const auto input = load_sequence(a.input, Role::Compressed);
  std::optional<std::vector<Frame>> gt;
  if (!a.gt.empty()) gt = load_sequence(a.gt, Role::GroundTruth);
  const auto frames = enhance_sequence(input, gt, *s.motion, *s.generator, s.model.required_multiple());

  fs::create_directories(a.out);
  for (const auto& f : frames) {
    char name[64];
    std::snprintf(name, sizeof name, "_%04d.png", f.output.index);
    write_png_gray8(a.out / (f.output.seq_id + name), f.output.height(), f.output.width(), f.pixels);
  }
  write_psnr_csv(frames, a.out / "psnr.csv");
  if (gt) {
    double din = 0.0, dout = 0.0;
    for (const auto& f : frames) {
      din += *f.psnr_input;
      dout += *f.psnr_output;
    }
    const double n = static_cast<double>(frames.size());
    std::cout << "mean PSNR compressed " << format_number(din / n) << " dB, enhanced " << format_number(dout / n)
              << " dB, delta " << format_number((dout - din) / n) << " dB\n";
  }
  std::cout << "wrote " << frames.size() << " frames to " << a.out.string() << '\n';
  return kOk;
}

struct TrainArgs {
  int stage = 1;
  fs::path config, manifest, init, out;
};

int cmd_train(const TrainArgs& a) {
  const TrainConfigFile file = load_train_config(a.config);
  const StageConfig& cfg = file.stage;
  if (cfg.stage != a.stage) {
    throw ConfigError("--stage " + std::to_string(a.stage) + " but the config is for stage " +
                      std::to_string(cfg.stage));
  }
  if (a.stage == 2 && a.init.empty()) {
    throw ConfigError("stage 2 starts from a pretrained model; pass --init with a stage-1 checkpoint");
  }

  std::cout << "# stage config\n" << describe(cfg) << "profile = " << file.profile << '\n'
            << "checkpoint_every = " << file.checkpoint_every << '\n';
  std::cout << "# schedule\n";
  for (std::int64_t it : {std::int64_t{0}, cfg.lr_decay_every, cfg.alpha_decay_every, cfg.iterations - 1}) {
    if (it < 0 || it >= cfg.iterations) continue;
    std::cout << "iteration " << it << ": lr = " << format_number(learning_rate(cfg, it))
              << ", alpha = " << format_number(alpha_at(cfg, it)) << ", beta = " << format_number(cfg.beta) << '\n';
  }

  TrainState state;
  if (a.init.empty()) {
    state = TrainState::create(model_profile(file.profile), cfg.seed);
  } else {
    state = load_checkpoint(a.init);
    if (a.stage == 2 && state.stage == 1) state = begin_stage2(std::move(state), cfg.seed);
    if (state.stage != a.stage) {
      throw ConfigError("checkpoint " + a.init.string() + " is stage " + std::to_string(state.stage) +
                        " and cannot seed stage " + std::to_string(a.stage));
    }
  }
  const TrainingSet set = load_training_set(a.manifest, state.model.neighbors);
  std::cout << "# " << set.windows.size() << " training windows, starting at iteration " << state.iteration
            << '\n';

  fs::create_directories(a.out);
  LossLog log(a.out / "loss.csv");
  TrainHooks hooks;
  hooks.on_step = [&](const StepLosses& s) {
    log.write(s);
    if (s.iteration % 50 == 0) {
      std::cout << "iter " << s.iteration << " l_w " << format_number(s.l_w) << " l_m " << format_number(s.l_m);
      if (a.stage == 2) std::cout << " l_adv " << format_number(s.l_adv) << " l_d " << format_number(s.l_d);
      std::cout << '\n' << std::flush;
    }
  };
  hooks.checkpoint_every = file.checkpoint_every;
  hooks.on_checkpoint = [&](const TrainState& s) {
    char name[64];
    std::snprintf(name, sizeof name, "stage%d_%08lld.ckpt", s.stage, static_cast<long long>(s.iteration));
    save_checkpoint(s, a.out / name);
  };
  run_iterations(state, set, cfg, hooks);
  const fs::path final_ckpt = a.out / ("stage" + std::to_string(a.stage) + "_final.ckpt");
  save_checkpoint(state, final_ckpt);
  std::cout << "saved " << final_ckpt.string() << " at iteration " << state.iteration << '\n';
  return kOk;
}

struct SynthArgs {
  fs::path out;
  int sequences = 2;
  int frames = 4;
  int size = 64;
  std::string codec = "blur";
  std::vector<int> qps{27, 37};
  int step = 2;  // pixels per frame
  double sigma = 1.0;
  double noise = 0.01;
  std::uint64_t seed = 7;
};

int cmd_synth(const SynthArgs& a) {
  if (a.codec != "blur" && a.codec != "dct") throw ConfigError("--codec must be blur or dct");
  fs::create_directories(a.out);
  std::ofstream manifest(a.out / "manifest.txt");
  manifest << "# compressed groundtruth qp\n";
  for (int s = 0; s < a.sequences; ++s) {
    const std::string id = "seq" + std::to_string(s);
    static constexpr int kDirs[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
    const int dx = kDirs[s % 4][0] * a.step;
    const int dy = kDirs[s % 4][1] * std::max(1, a.step - 1);
    const auto gt = moving_sequence(id, a.frames, a.size, a.size, dx, dy, a.seed + 1000 * s);
    write_sequence_pgm(gt, a.out / "gt" / id);
    if (a.codec == "blur") {
      std::vector<Frame> deg;
      for (const auto& f : gt) {
        deg.push_back(Frame{blur_noise(f.samples, {a.sigma, a.noise}, a.seed + 1000 * s + f.index + 1), id,
                            f.index, std::nullopt});
      }
      write_sequence_pgm(deg, a.out / "blur" / id);
      manifest << "blur/" << id << " gt/" << id << " 0\n";
    } else {
      for (int qp : a.qps) {
        std::vector<Frame> deg;
        for (const auto& f : gt) deg.push_back(Frame{dct_codec(f.samples, qp), id, f.index, qp});
        const std::string tag = "qp" + std::to_string(qp);
        write_sequence_pgm(deg, a.out / tag / id);
        manifest << tag << '/' << id << " gt/" << id << ' ' << qp << '\n';
      }
    }
  }
  std::cout << "wrote " << a.sequences << " sequences to " << a.out.string() << '\n';
  return kOk;
}

struct InitArgs {
  fs::path out;
  std::string profile = "desk";
  std::uint64_t seed = 1;
};

int cmd_init(const InitArgs& a) {
  const TrainState s = TrainState::create(model_profile(a.profile), a.seed);
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  save_checkpoint(s, a.out);
  std::cout << "saved untrained " << a.profile << " model to " << a.out.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet-domain GAN enhancement of compressed video frames"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Per-band wavelet energies and coefficient histograms");
  analyze->add_option("--manifest", an.manifest, "Manifest of compressed/ground-truth pairs")->required();
  analyze->add_option("--level", an.level, "Packet decomposition depth")->capture_default_str();
  analyze->add_option("--bins", an.bins, "Histogram bin count")->capture_default_str();
  analyze->add_option("--range", an.range, "Histogram half-range (default 2^level)");
  analyze->add_option("--out", an.out, "Output directory")->required();

  EnhanceArgs en;
  auto* enhance = app.add_subcommand("enhance", "Enhance a compressed sequence with a checkpoint");
  enhance->add_option("--ckpt", en.ckpt, "Checkpoint archive")->required();
  enhance->add_option("--input", en.input, "Compressed frames (directory or raw file)")->required();
  enhance->add_option("--gt", en.gt, "Ground-truth frames, enables PSNR columns");
  enhance->add_option("--out", en.out, "Output directory")->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Run one training stage");
  train->add_option("--stage", tr.stage, "1 or 2")->required()->check(CLI::IsMember({1, 2}));
  train->add_option("--config", tr.config, "key = value stage config")->required();
  train->add_option("--manifest", tr.manifest, "Training manifest")->required();
  train->add_option("--init", tr.init, "Checkpoint to start from (required for stage 2)");
  train->add_option("--out", tr.out, "Output directory")->required();

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Write a synthetic moving-texture data set and manifest");
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--sequences", sy.sequences)->capture_default_str();
  synth->add_option("--frames", sy.frames)->capture_default_str();
  synth->add_option("--size", sy.size, "Frame width and height")->capture_default_str();
  synth->add_option("--codec", sy.codec, "blur (blur + noise) or dct (block transform coder)")->capture_default_str();
  synth->add_option("--qp", sy.qps, "Quality tags for the dct coder")->delimiter(',');
  synth->add_option("--step", sy.step, "Motion in pixels per frame")->capture_default_str();
  synth->add_option("--sigma", sy.sigma)->capture_default_str();
  synth->add_option("--noise", sy.noise)->capture_default_str();
  synth->add_option("--seed", sy.seed)->capture_default_str();

  InitArgs in;
  auto* init = app.add_subcommand("init", "Write an untrained checkpoint");
  init->add_option("--out", in.out, "Checkpoint path")->required();
  init->add_option("--profile", in.profile, "desk or paper")->capture_default_str();
  init->add_option("--seed", in.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(an);
    if (*enhance) return cmd_enhance(en);
    if (*train) return cmd_train(tr);
    if (*synth) return cmd_synth(sy);
    if (*init) return cmd_init(in);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IngestionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const StructureError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
