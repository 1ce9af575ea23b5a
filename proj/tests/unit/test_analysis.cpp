#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "mwgan/analysis.hpp"
#include "mwgan/error.hpp"
#include "mwgan/synthetic.hpp"
#include "mwgan/wavelet.hpp"
#include "testing.hpp"

using namespace mwgan;
using mwgan::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SequencePair degraded(const std::string& id, int qp, std::uint64_t seed) {
  SequencePair p;
  p.qp = qp;
  p.groundtruth = moving_sequence(id, 2, 32, 32, 1, 1, seed);
  for (const auto& f : p.groundtruth) {
    Frame c = f;
    c.samples = dct_codec(f.samples, qp);
    c.qp = qp;
    p.compressed.push_back(std::move(c));
  }
  return p;
}

}  // namespace

TEST(Psnr, AnalyticValuesAndCap) {
  const Plane a(8, 8, 0.3), b(8, 8, 0.4);
  EXPECT_NEAR(mse(a, b), 0.01, 1e-15);
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-9);
  EXPECT_EQ(psnr(a, a), kPsnrCap);
  EXPECT_EQ(kPsnrCap, 99.0);
  EXPECT_THROW(psnr(a, Plane(4, 4)), ArgumentError);
}

TEST(Quantize, ClampAndRoundHalfUp) {
  const Plane p(1, 6, {-0.2, 0.0, 0.5, 127.5 / 255.0 - 1e-9, 1.0, 1.7});
  EXPECT_EQ(quantize_8bit(p), (std::vector<std::uint8_t>{0, 0, 128, 127, 255, 255}));
  const Plane q(1, 2, {100.5 / 255.0, 3.0 / 255.0});
  EXPECT_EQ(quantize_8bit(q), (std::vector<std::uint8_t>{101, 3}));
  const Plane back = dequantize_8bit(1, 2, {0, 255});
  EXPECT_EQ(back(0, 0), 0.0);
  EXPECT_EQ(back(0, 1), 1.0);
  EXPECT_THROW(dequantize_8bit(2, 2, {1, 2, 3}), ArgumentError);
}

TEST(Padding, ReflectAndCropBack) {
  const Plane p(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Plane q = reflect_pad(p, 4);
  ASSERT_EQ(q.rows(), 4);
  ASSERT_EQ(q.cols(), 4);
  EXPECT_EQ(q(0, 3), 2.0);  // reflection skips the edge sample
  EXPECT_EQ(q(3, 0), 4.0);
  EXPECT_EQ(q(3, 3), 5.0);
  EXPECT_EQ(crop_top_left(q, 3, 3), p);
  EXPECT_EQ(reflect_pad(q, 4), q);  // divisible input is untouched

  std::mt19937_64 rng(1);
  const Plane r = mwgan::testing::random_plane(20, 13, rng);
  const Plane big = reflect_pad(r, 8);
  EXPECT_EQ(big.rows(), 24);
  EXPECT_EQ(big.cols(), 16);
  EXPECT_EQ(crop_top_left(big, 20, 13), r);
}

TEST(Energy, DegradationLowersHighBands) {
  const auto mild = degraded("a", 27, 5);
  const auto strong = degraded("a", 37, 5);
  const auto res = analyze_pairs({mild, strong}, 1, 51);
  for (const char* band : {"LH", "HL", "HH"}) {
    const auto& m = res.energy.row("a", 27, band);
    const auto& s = res.energy.row("a", 37, band);
    EXPECT_GT(m.energy_groundtruth, m.energy_compressed) << band;
    EXPECT_GT(m.energy_compressed, s.energy_compressed) << band;
    EXPECT_EQ(m.energy_groundtruth, s.energy_groundtruth);
  }
}

TEST(Energy, SelfComparisonIsIdentical) {
  SequencePair p;
  p.groundtruth = moving_sequence("self", 3, 16, 16, 1, 0, 9);
  p.compressed = p.groundtruth;
  const auto res = analyze_pairs({p}, 2, 33);
  ASSERT_EQ(res.energy.rows.size(), 16u);
  for (const auto& r : res.energy.rows) EXPECT_EQ(r.energy_compressed, r.energy_groundtruth) << r.band;
  ASSERT_EQ(res.histograms.size(), 32u);
  for (std::size_t b = 0; b < 16; ++b) {
    const auto& c = res.histograms[b];
    const auto& g = res.histograms[16 + b];
    EXPECT_EQ(c.role, "compressed");
    EXPECT_EQ(g.role, "groundtruth");
    EXPECT_EQ(c.histogram.label, g.histogram.label);
    EXPECT_EQ(c.histogram.counts, g.histogram.counts);
  }
}

TEST(Energy, MeanPerFrameMatchesDirectComputation) {
  const auto p = degraded("m", 32, 3);
  const auto res = analyze_pairs({p}, 1, 11);
  double expect = 0.0;
  for (const auto& f : p.compressed) expect += subband_energy(wpt_forward(f.samples, 1)).at("HH");
  expect /= static_cast<double>(p.compressed.size());
  EXPECT_NEAR(res.energy.row("m", 32, "HH").energy_compressed, expect, 1e-12);
  EXPECT_THROW(res.energy.row("m", 33, "HH"), ArgumentError);
}

TEST(Csv, OutputsAreByteDeterministic) {
  TempDir dir("csv");
  const auto run = [&](const std::string& tag) {
    const auto res = analyze_pairs({degraded("x", 30, 2), degraded("y", 35, 4)}, 1, 21);
    write_energy_csv(res.energy, dir / ("e" + tag));
    write_histogram_csv(res.histograms, dir / ("h" + tag));
  };
  run("1");
  run("2");
  EXPECT_EQ(slurp(dir / "e1"), slurp(dir / "e2"));
  EXPECT_EQ(slurp(dir / "h1"), slurp(dir / "h2"));
  const std::string e = slurp(dir / "e1");
  EXPECT_EQ(e.substr(0, e.find('\n')), "seq_id,qp,band,energy_compressed,energy_groundtruth");
  const std::string h = slurp(dir / "h1");
  EXPECT_EQ(h.substr(0, h.find('\n')), "seq_id,qp,role,band,bin_lo,bin_hi,count");
}

TEST(Enhance, IdentityAtInitAndPadding) {
  std::mt19937_64 rng(3);
  const ModelConfig m = desk_model_config();
  const MotionNet motion(m.motion, rng);
  const Generator g(m.generator, m.neighbors, rng);
  const auto gt = moving_sequence("e", 3, 20, 28, 1, 1, 8);
  std::vector<Frame> in;
  for (const auto& f : gt) in.push_back(Frame{blur_noise(f.samples, BlurNoise{}, f.index), f.seq_id, f.index, {}});

  const auto out = enhance_sequence(in, gt, motion, g, m.required_multiple());
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t t = 0; t < out.size(); ++t) {
    EXPECT_EQ(out[t].output.samples, in[t].samples);
    EXPECT_EQ(out[t].pixels, quantize_8bit(in[t].samples));
    EXPECT_EQ(*out[t].psnr_output, *out[t].psnr_input);
  }

  TempDir dir("psnr");
  write_psnr_csv(out, dir / "psnr.csv");
  std::istringstream rows(slurp(dir / "psnr.csv"));
  std::string header, first;
  std::getline(rows, header);
  std::getline(rows, first);
  EXPECT_EQ(header, "frame,psnr_compressed,psnr_enhanced,delta_psnr");
  EXPECT_EQ(first.substr(first.rfind(',') + 1), "0");

  const auto no_gt = enhance_sequence(in, std::nullopt, motion, g, m.required_multiple());
  EXPECT_FALSE(no_gt[0].psnr_output.has_value());
  EXPECT_THROW(enhance_sequence(in, std::vector<Frame>(gt.begin(), gt.end() - 1), motion, g, 8), IngestionError);
}

TEST(Enhance, PaddedMatchesUnpaddedOnDivisibleInput) {
  // With non-identity weights the crop of a padded run must equal the
  // direct run when no padding is needed.
  std::mt19937_64 rng(4);
  const ModelConfig m = desk_model_config();
  const MotionNet motion(m.motion, rng);
  const Generator g(m.generator, m.neighbors, rng);
  for (const auto& p : g.params()) p.var->value = mwgan::testing::random_tensor(p.var->value.shape, rng, -0.05, 0.05);
  const auto in = moving_sequence("d", 2, 16, 16, 1, 0, 2);
  const auto a = enhance_sequence(in, std::nullopt, motion, g, 8);
  ClipWindow w;
  w.target = in[0];
  w.neighbors = {in[0], in[1]};
  const GeneratorResult r = generator_forward(w, g, motion);
  EXPECT_EQ(a[0].output.samples, r.enhanced.samples);
  EXPECT_NE(a[0].output.samples, in[0].samples);
}

TEST(Synthetic, CodecIsDeterministicAndOnGrid) {
  const Plane p = textured_plane(32, 32, 1);
  EXPECT_EQ(dct_codec(p, 32), dct_codec(p, 32));
  EXPECT_GT(psnr(dct_codec(p, 22), p), psnr(dct_codec(p, 42), p));
  for (double v : dct_codec(p, 37).values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v * 255.0, std::round(v * 255.0), 1e-9);
  }
  const auto s = moving_sequence("m", 2, 16, 16, 2, 1, 3);
  for (int i = 0; i < 14; ++i)
    for (int j = 0; j < 14; ++j) EXPECT_EQ(s[1].samples(i, j), s[0].samples(i + 1, j + 2));
}
