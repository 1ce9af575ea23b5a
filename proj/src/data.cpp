#include "mwgan/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "mwgan/error.hpp"
#include "mwgan/image_io.hpp"

namespace mwgan {

namespace fs = std::filesystem;

namespace {

const char* role_name(Role r) { return r == Role::Compressed ? "compressed" : "groundtruth"; }

bool is_image_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ".png" || e == ".pgm" || e == ".pnm";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<Frame> load_raw(const fs::path& path, Role role, const RawGeometry& g) {
  if (g.width <= 0 || g.height <= 0) throw IngestionError("raw geometry must be positive for '" + path.string() + "'");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open raw " + std::string(role_name(role)) + " file '" + path.string() + "'");
  const std::size_t luma = static_cast<std::size_t>(g.width) * g.height;
  const std::size_t frame_bytes = g.yuv420p ? luma + 2 * ((g.width / 2) * static_cast<std::size_t>(g.height / 2)) : luma;
  const auto total = static_cast<std::size_t>(fs::file_size(path));
  if (total == 0) throw IngestionError("empty sequence '" + path.string() + "'");
  if (total % frame_bytes != 0) {
    throw IngestionError("raw file '" + path.string() + "' has a truncated frame " +
                         std::to_string(total / frame_bytes) + " (" + std::to_string(total) +
                         " bytes is not a multiple of " + std::to_string(frame_bytes) + ")");
  }
  std::vector<Frame> frames;
  std::vector<unsigned char> buf(frame_bytes);
  const std::string seq = path.stem().string();
  for (std::size_t k = 0; k < total / frame_bytes; ++k) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(frame_bytes));
    if (!in) throw IngestionError("read failure at frame " + std::to_string(k) + " of '" + path.string() + "'");
    Plane p(g.height, g.width);
    for (std::size_t i = 0; i < luma; ++i) p.storage()[i] = buf[i] / 255.0;
    frames.push_back(Frame{std::move(p), seq, static_cast<int>(k), std::nullopt});
  }
  return frames;
}

}  // namespace

RawGeometry read_raw_sidecar(const fs::path& raw_file) {
  const fs::path side = raw_file.string() + ".dims";
  std::ifstream in(side);
  if (!in) throw IngestionError("raw file '" + raw_file.string() + "' has no sidecar '" + side.string() + "'");
  RawGeometry g;
  std::string fmt = "y8";
  if (!(in >> g.width >> g.height)) throw IngestionError("malformed sidecar '" + side.string() + "'");
  in >> fmt;
  if (fmt == "yuv420p") {
    g.yuv420p = true;
  } else if (fmt != "y8") {
    throw IngestionError("unknown raw format '" + fmt + "' in '" + side.string() + "'");
  }
  return g;
}

std::vector<Frame> load_sequence(const fs::path& path, Role role, std::optional<RawGeometry> geometry) {
  if (!fs::exists(path)) {
    throw IngestionError(std::string(role_name(role)) + " sequence '" + path.string() + "' does not exist");
  }
  if (!fs::is_directory(path)) return load_raw(path, role, geometry ? *geometry : read_raw_sidecar(path));

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file() && is_image_ext(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) throw IngestionError("empty sequence '" + path.string() + "'");

  const std::string seq = path.filename().empty() ? path.parent_path().filename().string() : path.filename().string();
  std::vector<Frame> frames;
  for (std::size_t k = 0; k < files.size(); ++k) {
    const GrayImage img = read_gray_image(files[k]);
    if (!frames.empty() && (img.height != frames.front().height() || img.width != frames.front().width())) {
      throw IngestionError("frame '" + files[k].string() + "' is " + std::to_string(img.width) + "x" +
                           std::to_string(img.height) + ", expected " + std::to_string(frames.front().width()) +
                           "x" + std::to_string(frames.front().height()));
    }
    Plane p(img.height, img.width);
    for (std::size_t i = 0; i < img.luma.size(); ++i) p.storage()[i] = img.luma[i] / 255.0;
    frames.push_back(Frame{std::move(p), seq, static_cast<int>(k), std::nullopt});
  }
  return frames;
}

void SequencePair::validate() const {
  if (compressed.empty()) throw StructureError("sequence pair is empty");
  if (compressed.size() != groundtruth.size()) {
    throw StructureError("sequence pair length mismatch: " + std::to_string(compressed.size()) + " compressed vs " +
                         std::to_string(groundtruth.size()) + " ground-truth frames");
  }
  for (std::size_t k = 0; k < compressed.size(); ++k) {
    if (!compressed[k].samples.same_shape(groundtruth[k].samples) ||
        !compressed[k].samples.same_shape(compressed.front().samples)) {
      throw StructureError("sequence pair frame " + std::to_string(k) + " has mismatched dimensions");
    }
    if (k > 0 && (compressed[k].index <= compressed[k - 1].index || groundtruth[k].index <= groundtruth[k - 1].index)) {
      throw StructureError("sequence pair indices are not strictly increasing at position " + std::to_string(k));
    }
  }
}

void ClipWindow::validate() const {
  if (neighbors.empty() || neighbors.size() % 2 != 0) {
    throw StructureError("clip window needs an even, non-zero neighbour count");
  }
  for (const auto& f : neighbors) {
    if (!f.samples.same_shape(target.samples)) throw StructureError("clip window frames have mismatched dimensions");
  }
  if (groundtruth && !groundtruth->samples.same_shape(target.samples)) {
    throw StructureError("clip window ground truth has mismatched dimensions");
  }
}

std::vector<ClipWindow> make_clip_windows(const SequencePair& pair, int n_neighbors) {
  if (n_neighbors < 1) throw ArgumentError("make_clip_windows: N must be >= 1, got " + std::to_string(n_neighbors));
  pair.validate();
  const int len = static_cast<int>(pair.compressed.size());
  std::vector<ClipWindow> out;
  out.reserve(len);
  for (int t = 0; t < len; ++t) {
    ClipWindow w;
    w.target = pair.compressed[t];
    for (int n = n_neighbors; n >= 1; --n) w.neighbors.push_back(pair.compressed[std::max(0, t - n)]);
    for (int n = 1; n <= n_neighbors; ++n) w.neighbors.push_back(pair.compressed[std::min(len - 1, t + n)]);
    w.groundtruth = pair.groundtruth[t];
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

Frame crop(const Frame& f, int top, int left, int size) {
  Frame out{Plane(size, size), f.seq_id, f.index, f.qp};
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) out.samples(i, j) = f.samples(top + i, left + j);
  return out;
}

}  // namespace

ClipWindow random_crop_aligned(const ClipWindow& window, int size, std::uint64_t rng_seed, int max_level) {
  window.validate();
  const int h = window.target.height();
  const int w = window.target.width();
  const int div = 1 << max_level;
  if (size < 1 || size > std::min(h, w)) {
    throw ArgumentError("crop size " + std::to_string(size) + " exceeds frame extent " + std::to_string(w) + "x" +
                        std::to_string(h));
  }
  if (size % div != 0) {
    throw ArgumentError("crop size " + std::to_string(size) + " is not divisible by " + std::to_string(div));
  }
  std::mt19937_64 rng(rng_seed);
  const int top = std::uniform_int_distribution<int>(0, h - size)(rng);
  const int left = std::uniform_int_distribution<int>(0, w - size)(rng);
  ClipWindow out;
  out.target = crop(window.target, top, left, size);
  for (const auto& n : window.neighbors) out.neighbors.push_back(crop(n, top, left, size));
  if (window.groundtruth) out.groundtruth = crop(*window.groundtruth, top, left, size);
  return out;
}

std::uint64_t window_seed(std::uint64_t global_seed, const std::string& seq_id, int index, std::int64_t salt) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : seq_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = splitmix64(global_seed);
  s = splitmix64(s ^ h);
  s = splitmix64(s ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(index)));
  return splitmix64(s ^ static_cast<std::uint64_t>(salt));
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open manifest '" + path.string() + "'");
  const fs::path base = path.parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string t; fields >> t;) parts.push_back(t);
    if (parts.empty()) continue;
    if (parts.size() != 3) {
      throw IngestionError("manifest '" + path.string() + "' line " + std::to_string(lineno) +
                           ": expected 'compressed groundtruth qp'");
    }
    ManifestEntry e;
    e.compressed = fs::path(parts[0]).is_absolute() ? fs::path(parts[0]) : base / parts[0];
    e.groundtruth = fs::path(parts[1]).is_absolute() ? fs::path(parts[1]) : base / parts[1];
    try {
      std::size_t used = 0;
      e.qp = std::stoi(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw IngestionError("manifest '" + path.string() + "' line " + std::to_string(lineno) + ": bad qp '" +
                           parts[2] + "'");
    }
    out.push_back(std::move(e));
  }
  if (out.empty()) throw IngestionError("manifest '" + path.string() + "' lists no sequences");
  return out;
}

SequencePair load_pair(const ManifestEntry& entry) {
  SequencePair pair;
  pair.compressed = load_sequence(entry.compressed, Role::Compressed);
  pair.groundtruth = load_sequence(entry.groundtruth, Role::GroundTruth);
  pair.qp = entry.qp;
  const std::string seq = pair.groundtruth.front().seq_id;
  for (auto* list : {&pair.compressed, &pair.groundtruth}) {
    for (auto& f : *list) {
      f.seq_id = seq;
      f.qp = entry.qp;
    }
  }
  try {
    pair.validate();
  } catch (const StructureError& e) {
    throw IngestionError("manifest entry '" + entry.compressed.string() + "': " + e.what());
  }
  return pair;
}

}  // namespace mwgan
