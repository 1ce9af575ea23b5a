#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mwgan/data.hpp"
#include "mwgan/plane.hpp"

namespace mwgan {

// Deterministic [0, 1] test content: smooth gradients, oriented gratings,
// hard-edged rectangles and discs. Already on the k/255 grid.
Plane textured_plane(int rows, int cols, std::uint64_t seed);

// Frames cut from one larger textured canvas, the window moving by
// (dx, dy) pixels per frame. Frame t of `id` has index t.
std::vector<Frame> moving_sequence(const std::string& id, int frames, int rows, int cols, int dx, int dy,
                                   std::uint64_t seed);

// Separable Gaussian blur (sigma <= 0 copies), then additive white noise,
// then rounding onto the k/255 grid.
struct BlurNoise {
  double sigma = 1.0;
  double noise_std = 0.01;
};
Plane blur_noise(const Plane& p, const BlurNoise& d, std::uint64_t seed);

// Block transform coder standing in for a real codec: 8x8 orthonormal
// DCT, dead-zone scalar quantization with step 2^((qp - 4) / 6) in 8-bit
// units, reconstruction rounded onto the k/255 grid.
Plane dct_codec(const Plane& p, int qp);

// Rounds onto the k/255 grid after clamping to [0, 1].
Plane snap_8bit(const Plane& p);

// Writes frames as 8-bit PGM files "<dir>/<prefix>_NNNN.pgm".
void write_sequence_pgm(const std::vector<Frame>& frames, const std::filesystem::path& dir,
                        const std::string& prefix = "frame");

}  // namespace mwgan
