#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mwgan/plane.hpp"

namespace mwgan {

enum class Role { Compressed, GroundTruth };

// Geometry of a raw planar 8-bit file. For yuv420p only the Y plane of each
// frame is kept.
struct RawGeometry {
  int width = 0;
  int height = 0;
  bool yuv420p = false;
};

// Reads "<file>.dims": "width height [y8|yuv420p]".
RawGeometry read_raw_sidecar(const std::filesystem::path& raw_file);

// A directory of PNG/PGM frames in lexicographic filename order, or a raw
// planar file whose geometry comes from `geometry` or its sidecar. Samples
// are 8-bit values divided by 255; indices run 0..len-1; seq_id is the
// path stem.
std::vector<Frame> load_sequence(const std::filesystem::path& path, Role role,
                                 std::optional<RawGeometry> geometry = std::nullopt);

struct SequencePair {
  std::vector<Frame> compressed;
  std::vector<Frame> groundtruth;
  int qp = 0;

  // Throws StructureError unless lengths, per-frame extents and
  // strictly increasing indices agree.
  void validate() const;
};

struct ClipWindow {
  Frame target;
  std::vector<Frame> neighbors;  // V_{t-N..t-1}, then V_{t+1..t+N}
  std::optional<Frame> groundtruth;

  int n_neighbors() const { return static_cast<int>(neighbors.size()) / 2; }
  void validate() const;
};

// One window per frame; neighbours past either end replicate the edge frame.
std::vector<ClipWindow> make_clip_windows(const SequencePair& pair, int n_neighbors);

// Same size x size rectangle from every frame of the window, placed by a
// generator seeded with rng_seed. size must divide by 2^max_level.
ClipWindow random_crop_aligned(const ClipWindow& window, int size, std::uint64_t rng_seed,
                               int max_level = 3);

// Deterministic per-window seed: mixes the global seed, sequence id, frame
// index and an extra salt (e.g. the iteration).
std::uint64_t window_seed(std::uint64_t global_seed, const std::string& seq_id, int index,
                          std::int64_t salt = 0);

struct ManifestEntry {
  std::filesystem::path compressed;
  std::filesystem::path groundtruth;
  int qp = 0;
};

// Plain-text manifest: "compressed groundtruth qp" per line (whitespace or
// comma separated), '#' starts a comment. Relative paths resolve against
// the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Loads both sides of an entry; frames of both sides take the ground-truth
// stem as seq_id and carry the entry's qp.
SequencePair load_pair(const ManifestEntry& entry);

}  // namespace mwgan
