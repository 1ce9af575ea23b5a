#include "mwgan/training.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "mwgan/error.hpp"
#include "mwgan/nn/bridge.hpp"
#include "mwgan/nn/ops.hpp"

namespace mwgan {

using nn::Var;

StageConfig StageConfig::paper_stage1() { return StageConfig{}; }

StageConfig StageConfig::paper_stage2() {
  StageConfig c;
  c.stage = 2;
  c.iterations = 600000;
  c.crop_size = 128;
  c.lr_initial = 1e-4;
  c.alpha_initial = 1e-2;
  c.alpha_decay_factor = 1.0;
  c.beta = 5e-3;
  return c;
}

void StageConfig::validate() const {
  if (stage != 1 && stage != 2) throw ConfigError("stage must be 1 or 2");
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (crop_size < 1) throw ConfigError("crop_size must be positive");
  if (!(lr_initial > 0.0) || !std::isfinite(lr_initial)) throw ConfigError("lr_initial must be positive");
  if (!(lr_decay_factor > 0.0) || !(alpha_decay_factor > 0.0)) throw ConfigError("decay factors must be positive");
  if (lr_decay_every < 1 || alpha_decay_every < 1) throw ConfigError("decay periods must be positive");
  if (!(alpha_initial >= 0.0) || !std::isfinite(alpha_initial)) throw ConfigError("alpha_initial must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be >= 0");
  if (stage == 1 && beta != 0.0) throw ConfigError("stage 1 trains without the adversarial term; beta must be 0");
}

namespace {

// initial / factor^k with the power formed by repeated multiplication, so
// integer factors give exact powers.
double step_decay(double initial, double factor, std::int64_t every, std::int64_t iteration) {
  if (iteration < 0) throw ArgumentError("negative iteration");
  const std::int64_t k = iteration / every;
  double p = 1.0;
  for (std::int64_t i = 0; i < k; ++i) p *= factor;
  return initial / p;
}

}  // namespace

double learning_rate(const StageConfig& cfg, std::int64_t iteration) {
  return step_decay(cfg.lr_initial, cfg.lr_decay_factor, cfg.lr_decay_every, iteration);
}

double alpha_at(const StageConfig& cfg, std::int64_t iteration) {
  return step_decay(cfg.alpha_initial, cfg.alpha_decay_factor, cfg.alpha_decay_every, iteration);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& text, int line) {
  T v{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw ConfigError("bad value '" + text + "' for key '" + key + "'", line);
  }
  return v;
}

}  // namespace

TrainConfigFile parse_train_config(std::istream& in) {
  TrainConfigFile out;
  StageConfig& s = out.stage;
  using Setter = std::function<void(const std::string&, const std::string&, int)>;
  const std::map<std::string, Setter> setters{
      {"stage", [&](auto& k, auto& v, int l) { s.stage = parse_value<int>(k, v, l); }},
      {"iterations", [&](auto& k, auto& v, int l) { s.iterations = parse_value<std::int64_t>(k, v, l); }},
      {"batch_size", [&](auto& k, auto& v, int l) { s.batch_size = parse_value<int>(k, v, l); }},
      {"crop_size", [&](auto& k, auto& v, int l) { s.crop_size = parse_value<int>(k, v, l); }},
      {"lr_initial", [&](auto& k, auto& v, int l) { s.lr_initial = parse_value<double>(k, v, l); }},
      {"lr_decay_factor", [&](auto& k, auto& v, int l) { s.lr_decay_factor = parse_value<double>(k, v, l); }},
      {"lr_decay_every", [&](auto& k, auto& v, int l) { s.lr_decay_every = parse_value<std::int64_t>(k, v, l); }},
      {"alpha_initial", [&](auto& k, auto& v, int l) { s.alpha_initial = parse_value<double>(k, v, l); }},
      {"alpha_decay_factor", [&](auto& k, auto& v, int l) { s.alpha_decay_factor = parse_value<double>(k, v, l); }},
      {"alpha_decay_every",
       [&](auto& k, auto& v, int l) { s.alpha_decay_every = parse_value<std::int64_t>(k, v, l); }},
      {"beta", [&](auto& k, auto& v, int l) { s.beta = parse_value<double>(k, v, l); }},
      {"seed", [&](auto& k, auto& v, int l) { s.seed = parse_value<std::uint64_t>(k, v, l); }},
      {"profile",
       [&](auto& k, auto& v, int l) {
         if (v != "desk" && v != "paper") throw ConfigError("bad value '" + v + "' for key '" + k + "'", l);
         out.profile = v;
       }},
      {"checkpoint_every",
       [&](auto& k, auto& v, int l) { out.checkpoint_every = parse_value<std::int64_t>(k, v, l); }},
  };
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + text + "'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + key + "'", line);
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")", line);
    }
    seen[key] = line;
    it->second(key, value, line);
  }
  if (out.checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  out.stage.validate();
  return out;
}

TrainConfigFile load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_train_config(in);
}

std::string describe(const StageConfig& c) {
  std::ostringstream o;
  o << "stage = " << c.stage << '\n'
    << "iterations = " << c.iterations << '\n'
    << "batch_size = " << c.batch_size << '\n'
    << "crop_size = " << c.crop_size << '\n'
    << "lr_initial = " << format_number(c.lr_initial) << '\n'
    << "lr_decay_factor = " << format_number(c.lr_decay_factor) << '\n'
    << "lr_decay_every = " << c.lr_decay_every << '\n'
    << "alpha_initial = " << format_number(c.alpha_initial) << '\n'
    << "alpha_decay_factor = " << format_number(c.alpha_decay_factor) << '\n'
    << "alpha_decay_every = " << c.alpha_decay_every << '\n'
    << "beta = " << format_number(c.beta) << '\n'
    << "seed = " << c.seed << '\n';
  return o.str();
}

ModelConfig model_profile(const std::string& name) {
  if (name == "desk") return desk_model_config();
  if (name == "paper") return ModelConfig{};
  throw ConfigError("unknown model profile '" + name + "'");
}

nn::ParamList TrainState::generator_side_params() const {
  nn::ParamList p = generator->params();
  for (auto& m : motion->params()) p.push_back(m);
  return p;
}

TrainState TrainState::create(const ModelConfig& model, std::uint64_t seed) {
  model.validate();
  TrainState s;
  s.model = model;
  s.rng.seed(seed);
  s.motion = std::make_unique<MotionNet>(model.motion, s.rng);
  s.generator = std::make_unique<Generator>(model.generator, model.neighbors, s.rng);
  s.opt_g = std::make_unique<nn::Adam>(s.generator_side_params());
  return s;
}

TrainState begin_stage2(TrainState&& stage1, std::uint64_t seed) {
  if (stage1.stage != 1 || !stage1.generator || !stage1.motion) {
    throw ArgumentError("stage 2 must start from a stage-1 state");
  }
  TrainState s = std::move(stage1);
  s.stage = 2;
  s.iteration = 0;
  s.rng.seed(seed);
  s.discriminator = std::make_unique<Discriminator>(s.model.discriminator, s.rng);
  s.opt_g = std::make_unique<nn::Adam>(s.generator_side_params());
  s.opt_d = std::make_unique<nn::Adam>(s.discriminator->params());
  return s;
}

TrainingSet build_training_set(const std::vector<SequencePair>& pairs, int n_neighbors) {
  TrainingSet set;
  set.n_neighbors = n_neighbors;
  for (const auto& p : pairs) {
    auto w = make_clip_windows(p, n_neighbors);
    set.windows.insert(set.windows.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  if (set.windows.empty()) throw IngestionError("training set is empty");
  return set;
}

TrainingSet load_training_set(const std::filesystem::path& manifest, int n_neighbors) {
  std::vector<SequencePair> pairs;
  for (const auto& e : read_manifest(manifest)) pairs.push_back(load_pair(e));
  return build_training_set(pairs, n_neighbors);
}

Batch make_batch(const std::vector<ClipWindow>& windows) {
  if (windows.empty()) throw ArgumentError("empty batch");
  const std::size_t nn_count = windows.front().neighbors.size();
  std::vector<const Plane*> targets, gts;
  std::vector<std::vector<const Plane*>> neigh(nn_count);
  for (const auto& w : windows) {
    if (!w.groundtruth) throw StructureError("training window " + w.target.seq_id + "#" +
                                             std::to_string(w.target.index) + " has no ground truth");
    if (w.neighbors.size() != nn_count) throw StructureError("windows in a batch differ in neighbour count");
    targets.push_back(&w.target.samples);
    gts.push_back(&w.groundtruth->samples);
    for (std::size_t i = 0; i < nn_count; ++i) neigh[i].push_back(&w.neighbors[i].samples);
  }
  Batch b;
  b.target = nn::constant(nn::stack(targets));
  b.groundtruth = nn::constant(nn::stack(gts));
  for (const auto& n : neigh) b.neighbors.push_back(nn::constant(nn::stack(n)));
  return b;
}

Batch sample_batch(const TrainingSet& set, int batch_size, int crop_size, int max_level, std::mt19937_64& rng) {
  if (set.windows.empty()) throw ArgumentError("training set is empty");
  std::uniform_int_distribution<std::size_t> pick(0, set.windows.size() - 1);
  std::vector<ClipWindow> chosen;
  for (int b = 0; b < batch_size; ++b) {
    const ClipWindow& w = set.windows[pick(rng)];
    const std::uint64_t seed = rng();
    chosen.push_back(random_crop_aligned(w, crop_size, seed, max_level));
  }
  return make_batch(chosen);
}

namespace {

LossConfig loss_config(const TrainState& state, const StageConfig& cfg) {
  LossConfig lc;
  lc.alpha = alpha_at(cfg, state.iteration);
  lc.beta = cfg.beta;
  lc.level_count = state.model.discriminator.levels;
  return lc;
}

double checked(const Var& v, std::int64_t iteration, const char* term) {
  const double x = v->value.item();
  if (!std::isfinite(x)) throw DivergenceError(iteration, term, x);
  return x;
}

double mean_score(const std::vector<Var>& maps) {
  double acc = 0.0;
  for (const auto& m : maps) {
    double s = 0.0;
    for (double x : m->value.data) s += x;
    acc += s / static_cast<double>(m->value.numel());
  }
  return acc / static_cast<double>(maps.size());
}

}  // namespace

StepLosses train_step_stage1(TrainState& state, const Batch& batch, const StageConfig& cfg) {
  if (state.stage != 1) throw ArgumentError("stage-1 step on a stage-" + std::to_string(state.stage) + " state");
  const LossConfig lc = loss_config(state, cfg);
  StepLosses out;
  out.iteration = state.iteration;
  out.alpha = lc.alpha;
  out.lr = learning_rate(cfg, state.iteration);

  state.opt_g->zero_grad();
  const EnhanceOutput e = enhance_batch(*state.motion, *state.generator, batch.target, batch.neighbors);
  const Var lw = wavelet_loss(e.subbands, nn::wpt(batch.groundtruth, 1), lc);
  const Var lm = motion_loss(e.compensated, batch.groundtruth, lc);
  out.l_w = checked(lw, state.iteration, "l_w");
  out.l_m = checked(lm, state.iteration, "l_m");
  const Var total = generator_total_loss(lw, lm, nullptr, lc);
  out.l_g_total = checked(total, state.iteration, "l_g_total");
  nn::backward(total);
  state.opt_g->step(out.lr);
  ++state.iteration;
  return out;
}

StepLosses train_step_stage2(TrainState& state, const Batch& batch, const StageConfig& cfg) {
  if (state.stage != 2 || !state.discriminator || !state.opt_d) {
    throw ArgumentError("stage-2 step needs a stage-2 state with a discriminator");
  }
  const LossConfig lc = loss_config(state, cfg);
  const Discriminator& d = *state.discriminator;
  StepLosses out;
  out.iteration = state.iteration;
  out.alpha = lc.alpha;
  out.lr = learning_rate(cfg, state.iteration);

  const EnhanceOutput e = enhance_batch(*state.motion, *state.generator, batch.target, batch.neighbors);

  state.opt_d->zero_grad();
  {
    const auto real = d.forward(batch.groundtruth);
    const auto fake = d.forward(nn::detach(e.frame));
    const Var ld = discriminator_loss(real, fake, lc.level_count);
    out.l_d = checked(ld, state.iteration, "l_d");
    out.d_real_mean = mean_score(real);
    out.d_fake_mean = mean_score(fake);
    nn::backward(ld);
  }
  state.opt_d->step(out.lr);

  state.opt_g->zero_grad();
  const Var ladv = adversarial_loss_g(d.forward(e.frame), lc.level_count);
  const Var lw = wavelet_loss(e.subbands, nn::wpt(batch.groundtruth, 1), lc);
  const Var lm = motion_loss(e.compensated, batch.groundtruth, lc);
  out.l_adv = checked(ladv, state.iteration, "l_adv");
  out.l_w = checked(lw, state.iteration, "l_w");
  out.l_m = checked(lm, state.iteration, "l_m");
  const Var total = generator_total_loss(lw, lm, ladv, lc);
  out.l_g_total = checked(total, state.iteration, "l_g_total");
  nn::backward(total);
  state.opt_g->step(out.lr);
  ++state.iteration;
  return out;
}

std::vector<StepLosses> run_iterations(TrainState& state, const TrainingSet& set, const StageConfig& cfg,
                                       const TrainHooks& hooks) {
  cfg.validate();
  if (cfg.stage != state.stage) {
    throw ConfigError("config is for stage " + std::to_string(cfg.stage) + " but the state is stage " +
                      std::to_string(state.stage));
  }
  const int multiple = state.model.required_multiple();
  int max_level = 0;
  while ((1 << max_level) < multiple) ++max_level;
  std::vector<StepLosses> log;
  while (state.iteration < cfg.iterations) {
    const Batch batch = sample_batch(set, cfg.batch_size, cfg.crop_size, max_level, state.rng);
    const StepLosses s =
        state.stage == 1 ? train_step_stage1(state, batch, cfg) : train_step_stage2(state, batch, cfg);
    log.push_back(s);
    if (hooks.on_step) hooks.on_step(s);
    if (hooks.on_checkpoint && hooks.checkpoint_every > 0 && state.iteration % hooks.checkpoint_every == 0 &&
        state.iteration < cfg.iterations) {
      hooks.on_checkpoint(state);
    }
  }
  return log;
}

TrainState train_stage1(const TrainingSet& set, const StageConfig& cfg, const ModelConfig& model,
                        const TrainHooks& hooks) {
  if (cfg.stage != 1) throw ConfigError("train_stage1 needs a stage-1 config");
  cfg.validate();
  TrainState s = TrainState::create(model, cfg.seed);
  run_iterations(s, set, cfg, hooks);
  return s;
}

TrainState train_stage2(const TrainingSet& set, TrainState&& init, const StageConfig& cfg,
                        const TrainHooks& hooks) {
  if (cfg.stage != 2) throw ConfigError("train_stage2 needs a stage-2 config");
  cfg.validate();
  TrainState s = begin_stage2(std::move(init), cfg.seed);
  run_iterations(s, set, cfg, hooks);
  return s;
}

LossLog::LossLog(const std::filesystem::path& path) : out_(std::make_unique<std::ofstream>(path)) {
  if (!*out_) throw Error("cannot write loss log " + path.string());
  *out_ << "iteration,l_w,l_m,l_adv,l_d,l_g_total\n";
}

void LossLog::write(const StepLosses& s) {
  *out_ << s.iteration << ',' << format_number(s.l_w) << ',' << format_number(s.l_m) << ','
        << format_number(s.l_adv) << ',' << format_number(s.l_d) << ',' << format_number(s.l_g_total) << '\n';
  out_->flush();
}

}  // namespace mwgan
