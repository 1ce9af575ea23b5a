#include "mwgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "mwgan/error.hpp"

namespace mwgan {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'W', 'G', 'A', 'N', 'C', 'K', '\n'};

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
void put(std::string& buf, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.append(b, sizeof(T));
}

template <class T>
T get(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw IntegrityError("checkpoint is truncated");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

struct Entry {
  std::string name;
  nn::Tensor* tensor;
};

// Every tensor of the state in archive order: parameters, then the Adam
// moments of the same partition.
std::vector<Entry> entries(const TrainState& s) {
  std::vector<Entry> out;
  auto add_partition = [&](const std::string& tag, nn::Adam& opt) {
    const auto& params = opt.params();
    for (const auto& p : params) out.push_back({p.name, &p.var->value});
    for (std::size_t i = 0; i < params.size(); ++i) {
      out.push_back({"adam." + tag + ".m." + params[i].name, &opt.first_moments()[i]});
      out.push_back({"adam." + tag + ".v." + params[i].name, &opt.second_moments()[i]});
    }
  };
  add_partition("g", *s.opt_g);
  if (s.opt_d) add_partition("d", *s.opt_d);
  return out;
}

}  // namespace

void save_checkpoint(const TrainState& state, const std::filesystem::path& path) {
  const auto index = entries(state);

  nlohmann::json header;
  header["model"] = state.model;
  header["stage"] = state.stage;
  header["iteration"] = state.iteration;
  std::ostringstream rng;
  rng << state.rng;
  header["rng"] = rng.str();
  header["adam_g_steps"] = state.opt_g->steps();
  header["adam_d_steps"] = state.opt_d ? state.opt_d->steps() : 0;
  header["has_discriminator"] = static_cast<bool>(state.discriminator);
  auto& tensors = header["tensors"] = nlohmann::json::array();
  for (const auto& e : index) {
    const auto& sh = e.tensor->shape;
    tensors.push_back({{"name", e.name}, {"shape", {sh.n, sh.c, sh.h, sh.w}}});
  }
  const std::string hdr = header.dump();

  std::string buf(kMagic, sizeof kMagic);
  put<std::uint32_t>(buf, kCheckpointVersion);
  put<std::uint64_t>(buf, hdr.size());
  buf += hdr;
  for (const auto& e : index) {
    buf.append(reinterpret_cast<const char*>(e.tensor->data.data()), e.tensor->data.size() * sizeof(double));
  }
  put<std::uint64_t>(buf, fnv1a(buf.data(), buf.size()));

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw CheckpointError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

TrainState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < sizeof kMagic + 4 + 8 + 8 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw IntegrityError(path.string() + " is not a checkpoint archive");
  }
  std::size_t tail = buf.size() - 8;
  std::size_t tpos = tail;
  if (get<std::uint64_t>(buf, tpos) != fnv1a(buf.data(), tail)) {
    throw IntegrityError("checksum mismatch in " + path.string());
  }
  std::size_t pos = sizeof kMagic;
  const auto version = get<std::uint32_t>(buf, pos);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const auto hlen = get<std::uint64_t>(buf, pos);
  if (pos + hlen > tail) throw IntegrityError("checkpoint header overruns the archive");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(buf.substr(pos, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("unreadable checkpoint header: ") + e.what());
  }
  pos += hlen;

  TrainState s;
  try {
    const ModelConfig model = header.at("model").get<ModelConfig>();
    s = TrainState::create(model, 0);
    s.stage = header.at("stage").get<int>();
    s.iteration = header.at("iteration").get<std::int64_t>();
    if (header.at("has_discriminator").get<bool>()) {
      s.discriminator = std::make_unique<Discriminator>(model.discriminator, s.rng);
      s.opt_d = std::make_unique<nn::Adam>(s.discriminator->params());
    }
    s.opt_g->set_steps(header.at("adam_g_steps").get<std::int64_t>());
    if (s.opt_d) s.opt_d->set_steps(header.at("adam_d_steps").get<std::int64_t>());
    std::istringstream rng(header.at("rng").get<std::string>());
    rng >> s.rng;
    if (!rng) throw CheckpointError("bad sampler state in checkpoint");
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
  }

  const auto index = entries(s);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != index.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, model expects " +
                          std::to_string(index.size()));
  }
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& t = tensors[i];
    const auto name = t.at("name").get<std::string>();
    const auto dims = t.at("shape").get<std::vector<int>>();
    const auto& sh = index[i].tensor->shape;
    if (name != index[i].name) throw CheckpointError("tensor " + std::to_string(i) + " is '" + name + "', expected '" +
                                                     index[i].name + "'");
    if (dims != std::vector<int>{sh.n, sh.c, sh.h, sh.w}) {
      throw CheckpointError("shape mismatch for '" + name + "': model expects " + sh.str());
    }
    const std::size_t bytes = index[i].tensor->data.size() * sizeof(double);
    if (pos + bytes > tail) throw IntegrityError("checkpoint payload is truncated");
    std::memcpy(index[i].tensor->data.data(), buf.data() + pos, bytes);
    pos += bytes;
  }
  if (pos != tail) throw IntegrityError("trailing bytes in checkpoint payload");
  return s;
}

}  // namespace mwgan
