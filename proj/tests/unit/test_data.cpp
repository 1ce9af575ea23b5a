#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "mwgan/data.hpp"
#include "mwgan/error.hpp"
#include "mwgan/image_io.hpp"
#include "testing.hpp"

using namespace mwgan;
using mwgan::testing::TempDir;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> ramp(int h, int w, int offset) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(h) * w);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>((i + offset) % 256);
  return px;
}

SequencePair numbered_pair(int len, int size = 16) {
  SequencePair p;
  for (int t = 0; t < len; ++t) {
    p.compressed.push_back(Frame{Plane(size, size, t / 10.0), "s", t, std::nullopt});
    p.groundtruth.push_back(Frame{Plane(size, size, t / 10.0 + 0.05), "s", t, std::nullopt});
  }
  return p;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

}  // namespace

TEST(LoadSequence, PngDirectory) {
  TempDir dir("png");
  for (int k = 0; k < 10; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "f_%02d.png", k);
    write_png_gray8(dir / name, 64, 64, ramp(64, 64, k));
  }
  const auto frames = load_sequence(dir.path(), Role::Compressed);
  ASSERT_EQ(frames.size(), 10u);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(frames[k].index, k);
    EXPECT_EQ(frames[k].height(), 64);
    EXPECT_EQ(frames[k].width(), 64);
    EXPECT_DOUBLE_EQ(frames[k].samples(0, 0), k / 255.0);
  }
}

TEST(LoadSequence, LexicographicOrderAndPgm) {
  TempDir dir("pgm");
  write_pgm_gray8(dir / "b.pgm", 8, 8, std::vector<std::uint8_t>(64, 255));
  write_pgm_gray8(dir / "a.pgm", 8, 8, std::vector<std::uint8_t>(64, 0));
  const auto frames = load_sequence(dir.path(), Role::GroundTruth);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].samples(3, 3), 0.0);
  EXPECT_EQ(frames[1].samples(3, 3), 1.0);
}

TEST(LoadSequence, RawWithGeometry) {
  TempDir dir("raw");
  const fs::path f = dir / "clip.y";
  {
    std::ofstream out(f, std::ios::binary);
    const auto px = ramp(64, 3 * 64, 0);
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  }
  const auto frames = load_sequence(f, Role::Compressed, RawGeometry{64, 64, false});
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[2].index, 2);
  EXPECT_EQ(frames[0].seq_id, "clip");

  write_text(f.string() + ".dims", "64 64 y8\n");
  EXPECT_EQ(load_sequence(f, Role::Compressed).size(), 3u);
  EXPECT_THROW(load_sequence(f, Role::Compressed, RawGeometry{64, 60, false}), IngestionError);
}

TEST(LoadSequence, RawYuv420KeepsLuma) {
  TempDir dir("yuv");
  const fs::path f = dir / "clip.yuv";
  {
    std::ofstream out(f, std::ios::binary);
    for (int k = 0; k < 2; ++k) {
      const std::vector<char> y(16, static_cast<char>(10 * (k + 1))), uv(8, 'x');
      out.write(y.data(), 16);
      out.write(uv.data(), 8);
    }
  }
  const auto frames = load_sequence(f, Role::Compressed, RawGeometry{4, 4, true});
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_DOUBLE_EQ(frames[1].samples(3, 3), 20.0 / 255.0);
}

TEST(LoadSequence, Errors) {
  TempDir dir("err");
  EXPECT_THROW(load_sequence(dir / "missing", Role::Compressed), IngestionError);
  fs::create_directories(dir / "empty");
  EXPECT_THROW(load_sequence(dir / "empty", Role::Compressed), IngestionError);

  fs::create_directories(dir / "mixed");
  write_pgm_gray8(dir / "mixed/0.pgm", 8, 8, std::vector<std::uint8_t>(64, 1));
  write_pgm_gray8(dir / "mixed/1.pgm", 8, 16, std::vector<std::uint8_t>(128, 1));
  try {
    load_sequence(dir / "mixed", Role::Compressed);
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("1.pgm"), std::string::npos) << e.what();
  }

  fs::create_directories(dir / "bad");
  write_text(dir / "bad/0.png", "not a png");
  try {
    load_sequence(dir / "bad", Role::Compressed);
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("0.png"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_sequence(dir / "bad/0.png", Role::Compressed), IngestionError);  // raw without sidecar
}

TEST(ClipWindows, EdgeReplication) {
  const auto w = make_clip_windows(numbered_pair(5), 1);
  ASSERT_EQ(w.size(), 5u);
  EXPECT_EQ(w[0].neighbors[0].index, 0);
  EXPECT_EQ(w[0].neighbors[1].index, 1);
  EXPECT_EQ(w[2].neighbors[0].index, 1);
  EXPECT_EQ(w[2].neighbors[1].index, 3);
  EXPECT_EQ(w[4].neighbors[1].index, 4);

  const auto single = make_clip_windows(numbered_pair(1), 1);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].neighbors[0].index, 0);
  EXPECT_EQ(single[0].neighbors[1].index, 0);

  const auto wide = make_clip_windows(numbered_pair(3), 2);
  std::vector<int> idx;
  for (const auto& f : wide[0].neighbors) idx.push_back(f.index);
  EXPECT_EQ(idx, (std::vector<int>{0, 0, 1, 2}));

  EXPECT_THROW(make_clip_windows(numbered_pair(5), 0), ArgumentError);
}

TEST(ClipWindows, PairingIntegrity) {
  for (int n : {1, 2, 3}) {
    const int len = 6;
    for (const auto& w : make_clip_windows(numbered_pair(len), n)) {
      ASSERT_TRUE(w.groundtruth.has_value());
      EXPECT_EQ(w.target.index, w.groundtruth->index);
      EXPECT_EQ(w.target.seq_id, w.groundtruth->seq_id);
      EXPECT_EQ(w.n_neighbors(), n);
      for (const auto& f : w.neighbors) {
        EXPECT_GE(f.index, 0);
        EXPECT_LT(f.index, len);
      }
    }
  }
}

TEST(ClipWindows, PairValidation) {
  SequencePair p = numbered_pair(3);
  p.groundtruth.pop_back();
  EXPECT_THROW(make_clip_windows(p, 1), StructureError);
  p = numbered_pair(3);
  p.groundtruth[1].samples = Plane(8, 8);
  EXPECT_THROW(p.validate(), StructureError);
}

TEST(Crop, IdentityDeterminismAlignment) {
  std::mt19937_64 rng(1);
  SequencePair p;
  for (int t = 0; t < 3; ++t) {
    p.compressed.push_back(Frame{mwgan::testing::random_plane(64, 64, rng), "s", t, std::nullopt});
    p.groundtruth.push_back(Frame{mwgan::testing::random_plane(64, 64, rng), "s", t, std::nullopt});
  }
  const ClipWindow w = make_clip_windows(p, 1)[1];

  const ClipWindow same = random_crop_aligned(w, 64, 7);
  EXPECT_EQ(same.target.samples, w.target.samples);
  EXPECT_EQ(same.groundtruth->samples, w.groundtruth->samples);

  const ClipWindow a = random_crop_aligned(w, 32, 42);
  const ClipWindow b = random_crop_aligned(w, 32, 42);
  EXPECT_EQ(a.target.samples, b.target.samples);
  EXPECT_EQ(a.neighbors[1].samples, b.neighbors[1].samples);

  // Locate the rectangle from the target and check every other frame used it.
  int top = -1, left = -1;
  for (int i = 0; i <= 32 && top < 0; ++i)
    for (int j = 0; j <= 32; ++j)
      if (w.target.samples(i, j) == a.target.samples(0, 0) && w.target.samples(i + 31, j + 31) == a.target.samples(31, 31)) {
        top = i;
        left = j;
        break;
      }
  ASSERT_GE(top, 0);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      EXPECT_EQ(a.groundtruth->samples(i, j), w.groundtruth->samples(top + i, left + j));
      EXPECT_EQ(a.neighbors[0].samples(i, j), w.neighbors[0].samples(top + i, left + j));
    }

  EXPECT_THROW(random_crop_aligned(w, 33, 1), ArgumentError);
  EXPECT_THROW(random_crop_aligned(w, 72, 1), ArgumentError);
}

TEST(Crop, WindowSeedMixesEveryInput) {
  const auto s = window_seed(1, "a", 0, 0);
  EXPECT_EQ(s, window_seed(1, "a", 0, 0));
  EXPECT_NE(s, window_seed(2, "a", 0, 0));
  EXPECT_NE(s, window_seed(1, "b", 0, 0));
  EXPECT_NE(s, window_seed(1, "a", 1, 0));
  EXPECT_NE(s, window_seed(1, "a", 0, 1));
}

TEST(Manifest, ParsesAndResolvesRelativePaths) {
  TempDir dir("manifest");
  for (const char* side : {"c", "g"}) {
    fs::create_directories(dir / side);
    for (int k = 0; k < 2; ++k)
      write_pgm_gray8(dir / (std::string(side) + "/" + std::to_string(k) + ".pgm"), 8, 8, ramp(8, 8, k));
  }
  write_text(dir / "m.txt", "# header\n\nc g 32  # trailing comment\nc, g, 37\n");
  const auto entries = read_manifest(dir / "m.txt");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].qp, 32);
  EXPECT_EQ(entries[1].qp, 37);
  EXPECT_EQ(entries[0].compressed, dir / "c");

  const SequencePair p = load_pair(entries[1]);
  EXPECT_EQ(p.qp, 37);
  EXPECT_EQ(p.compressed[0].seq_id, "g");
  EXPECT_EQ(p.compressed[1].qp, 37);
}

TEST(Manifest, ErrorsNameTheLine) {
  TempDir dir("manifest_err");
  write_text(dir / "m.txt", "a b 1\na b\n");
  try {
    read_manifest(dir / "m.txt");
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  write_text(dir / "q.txt", "a b x7\n");
  EXPECT_THROW(read_manifest(dir / "q.txt"), IngestionError);
  write_text(dir / "e.txt", "# nothing\n");
  EXPECT_THROW(read_manifest(dir / "e.txt"), IngestionError);
  EXPECT_THROW(read_manifest(dir / "absent.txt"), IngestionError);
}
