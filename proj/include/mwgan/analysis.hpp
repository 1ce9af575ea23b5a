#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mwgan/data.hpp"
#include "mwgan/generator.hpp"
#include "mwgan/motion.hpp"
#include "mwgan/plane.hpp"

namespace mwgan {

inline constexpr double kPsnrCap = 99.0;

double mse(const Plane& a, const Plane& b);
// Peak 1.0; identical planes report kPsnrCap.
double psnr(const Plane& a, const Plane& b);

// Clamp to [0, 1], then round half up onto 0..255.
std::vector<std::uint8_t> quantize_8bit(const Plane& p);
Plane dequantize_8bit(int rows, int cols, const std::vector<std::uint8_t>& px);

// Extends bottom and right edges by mirror reflection (edge sample not
// repeated) up to the next multiple; a no-op on divisible extents.
Plane reflect_pad(const Plane& p, int multiple);
Plane crop_top_left(const Plane& p, int rows, int cols);

struct EnergyRow {
  std::string seq_id;
  int qp = 0;
  std::string band;
  double energy_compressed = 0.0;   // mean over frames
  double energy_groundtruth = 0.0;
};

struct EnergyReport {
  int level = 1;
  std::vector<EnergyRow> rows;  // manifest order, then band order

  const EnergyRow& row(const std::string& seq_id, int qp, const std::string& band) const;
};

struct HistogramRow {
  std::string seq_id;
  int qp = 0;
  std::string role;  // "compressed" or "groundtruth"
  Histogram histogram;
};

struct AnalysisResult {
  EnergyReport energy;
  std::vector<HistogramRow> histograms;  // pooled over all frames of a sequence
};

// Histogram range defaults to [-2^level, 2^level], the coefficient range of
// [0, 1] frames under the orthonormal packet transform.
AnalysisResult analyze_pairs(const std::vector<SequencePair>& pairs, int level, int bins,
                             std::optional<double> range = std::nullopt);
AnalysisResult analyze_manifest(const std::filesystem::path& manifest, int level, int bins,
                                std::optional<double> range = std::nullopt);

void write_energy_csv(const EnergyReport& r, const std::filesystem::path& path);
void write_histogram_csv(const std::vector<HistogramRow>& h, const std::filesystem::path& path);

struct EnhancedFrame {
  Frame output;                       // unclamped O^_t, cropped back to input size
  std::vector<std::uint8_t> pixels;   // quantized output
  std::optional<double> psnr_input;   // PSNR(V_t, O_t)
  std::optional<double> psnr_output;  // PSNR(quantized O^_t, O_t)
};

// Enhances every frame of a sequence. Inputs whose extents are not a
// multiple of `multiple` are reflect-padded and the output cropped back.
std::vector<EnhancedFrame> enhance_sequence(const std::vector<Frame>& input,
                                            const std::optional<std::vector<Frame>>& groundtruth,
                                            const MotionNet& motion, const Generator& generator, int multiple);

void write_psnr_csv(const std::vector<EnhancedFrame>& frames, const std::filesystem::path& path);

}  // namespace mwgan
