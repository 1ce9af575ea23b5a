#include "mwgan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "mwgan/analysis.hpp"
#include "mwgan/error.hpp"
#include "mwgan/image_io.hpp"

namespace mwgan {

Plane snap_8bit(const Plane& p) { return dequantize_8bit(p.rows(), p.cols(), quantize_8bit(p)); }

Plane textured_plane(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ArgumentError("textured_plane: empty extent");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = std::numbers::pi;

  Plane p(rows, cols);
  const double gx = u(rng) - 0.5, gy = u(rng) - 0.5;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) p(r, c) = 0.5 + 0.3 * (gx * c / cols + gy * r / rows);

  for (int k = 0; k < 4; ++k) {
    const double theta = pi * u(rng);
    const double period = 3.0 + 13.0 * u(rng);
    const double amp = 0.04 + 0.06 * u(rng);
    const double phase = 2.0 * pi * u(rng);
    const double fx = std::cos(theta) / period, fy = std::sin(theta) / period;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) p(r, c) += amp * std::sin(2.0 * pi * (fx * c + fy * r) + phase);
  }

  const int shapes = 6 + static_cast<int>((rows * cols) / 1024);
  for (int k = 0; k < shapes; ++k) {
    const double level = u(rng) - 0.5;
    const double cy = rows * u(rng), cx = cols * u(rng);
    const double ry = 2.0 + rows * 0.15 * u(rng), rx = 2.0 + cols * 0.15 * u(rng);
    const bool disc = u(rng) < 0.5;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double dy = (r - cy) / ry, dx = (c - cx) / rx;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (inside) p(r, c) = 0.5 * p(r, c) + 0.5 * (0.5 + level);
      }
    }
  }
  return snap_8bit(p);
}

std::vector<Frame> moving_sequence(const std::string& id, int frames, int rows, int cols, int dx, int dy,
                                   std::uint64_t seed) {
  if (frames < 1) throw ArgumentError("moving_sequence: need at least one frame");
  const int span_x = std::abs(dx) * (frames - 1);
  const int span_y = std::abs(dy) * (frames - 1);
  const Plane canvas = textured_plane(rows + span_y, cols + span_x, seed);
  std::vector<Frame> out;
  for (int t = 0; t < frames; ++t) {
    const int top = dy >= 0 ? dy * t : span_y + dy * t;
    const int left = dx >= 0 ? dx * t : span_x + dx * t;
    Plane f(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) f(r, c) = canvas(top + r, left + c);
    out.push_back(Frame{std::move(f), id, t, std::nullopt});
  }
  return out;
}

namespace {

std::vector<double> gaussian_taps(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double s = 0.0;
  for (int i = -radius; i <= radius; ++i) s += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (auto& v : k) v /= s;
  return k;
}

}  // namespace

Plane blur_noise(const Plane& p, const BlurNoise& d, std::uint64_t seed) {
  Plane out = p;
  if (d.sigma > 0.0) {
    const auto k = gaussian_taps(d.sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int rows = p.rows(), cols = p.cols();
    Plane tmp(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * p(r, std::clamp(c + i, 0, cols - 1));
        tmp(r, c) = acc;
      }
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp(std::clamp(r + i, 0, rows - 1), c);
        out(r, c) = acc;
      }
  }
  if (d.noise_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, d.noise_std);
    for (double& v : out.values()) v += noise(rng);
  }
  return snap_8bit(out);
}

Plane dct_codec(const Plane& p, int qp) {
  constexpr int B = 8;
  if (p.rows() % B != 0 || p.cols() % B != 0) throw ArgumentError("dct_codec: extents must be multiples of 8");
  const double step = std::pow(2.0, (qp - 4) / 6.0) / 255.0;
  const double pi = std::numbers::pi;
  double basis[B][B];
  for (int k = 0; k < B; ++k)
    for (int n = 0; n < B; ++n)
      basis[k][n] = (k == 0 ? std::sqrt(1.0 / B) : std::sqrt(2.0 / B)) * std::cos(pi * (n + 0.5) * k / B);

  Plane out(p.rows(), p.cols());
  double blk[B][B], tmp[B][B];
  for (int by = 0; by < p.rows(); by += B) {
    for (int bx = 0; bx < p.cols(); bx += B) {
      for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j) blk[i][j] = p(by + i, bx + j) - 0.5;
      // forward: C X C^T
      for (int k = 0; k < B; ++k)
        for (int j = 0; j < B; ++j) {
          double a = 0.0;
          for (int n = 0; n < B; ++n) a += basis[k][n] * blk[n][j];
          tmp[k][j] = a;
        }
      for (int k = 0; k < B; ++k)
        for (int l = 0; l < B; ++l) {
          double a = 0.0;
          for (int n = 0; n < B; ++n) a += tmp[k][n] * basis[l][n];
          const double level = std::floor(std::abs(a) / step + 1.0 / 3.0);
          blk[k][l] = std::copysign(level * step, a);
        }
      // inverse: C^T Y C
      for (int n = 0; n < B; ++n)
        for (int l = 0; l < B; ++l) {
          double a = 0.0;
          for (int k = 0; k < B; ++k) a += basis[k][n] * blk[k][l];
          tmp[n][l] = a;
        }
      for (int n = 0; n < B; ++n)
        for (int m = 0; m < B; ++m) {
          double a = 0.0;
          for (int l = 0; l < B; ++l) a += tmp[n][l] * basis[l][m];
          out(by + n, bx + m) = a + 0.5;
        }
    }
  }
  return snap_8bit(out);
}

void write_sequence_pgm(const std::vector<Frame>& frames, const std::filesystem::path& dir,
                        const std::string& prefix) {
  std::filesystem::create_directories(dir);
  for (const auto& f : frames) {
    char name[64];
    std::snprintf(name, sizeof name, "_%04d.pgm", f.index);
    write_pgm_gray8(dir / (prefix + name), f.height(), f.width(), quantize_8bit(f.samples));
  }
}

}  // namespace mwgan
