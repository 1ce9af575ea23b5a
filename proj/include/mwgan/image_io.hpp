#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mwgan {

// 8-bit single-channel raster.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<double> luma;  // 0..255, BT.601 luma for colour sources
};

// PNG (any bit layout libpng can expand to 8-bit) or binary/ASCII PGM.
// Throws IngestionError naming the file.
GrayImage read_gray_image(const std::filesystem::path& path);

void write_png_gray8(const std::filesystem::path& path, int height, int width,
                     const std::vector<std::uint8_t>& pixels);
void write_pgm_gray8(const std::filesystem::path& path, int height, int width,
                     const std::vector<std::uint8_t>& pixels);

}  // namespace mwgan
