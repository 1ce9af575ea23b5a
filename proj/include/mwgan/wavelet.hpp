#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mwgan/plane.hpp"

namespace mwgan {

// Orthonormal two-channel analysis filter pair. Boundaries are periodized,
// so analysis is an orthogonal map and synthesis is its transpose.
struct WaveletFilter {
  std::string name;
  std::vector<double> low;
  std::vector<double> high;

  static WaveletFilter haar();

  // Throws ArgumentError unless both filters have unit norm, equal even
  // length and are mutually orthogonal.
  void validate() const;
};

// The 4^level packet sub-bands of a plane, in depth-first canonical order:
// band index i at level l has parent i / 4 at level l-1 and child kind
// i % 4 in {LL, LH, HL, HH}. The first letter is the filter applied along the
// row axis (vertical direction), the second along the column axis.
struct SubbandSet {
  int level = 0;
  std::vector<Plane> bands;

  int band_rows() const { return bands.empty() ? 0 : bands.front().rows(); }
  int band_cols() const { return bands.empty() ? 0 : bands.front().cols(); }

  // Throws StructureError on a wrong band count or inconsistent shapes.
  void validate() const;
};

// "LL", "LH", "HL", "HH" for level 1; dotted parent-first paths deeper,
// e.g. band 3 at level 2 is "LL.HH".
std::string band_label(int level, int index);
std::vector<std::string> band_labels(int level);
// Inverse of band_label; throws ArgumentError for malformed labels.
int band_index(const std::string& label);

namespace kernels {

// One-level separable analysis of a rows x cols grid. dst receives the four
// half-size bands LL, LH, HL, HH back to back.
void analyze(std::span<const double> src, int rows, int cols, std::span<double> dst,
             const WaveletFilter& filter);

// Exact transpose of analyze.
void synthesize(std::span<const double> src, int rows, int cols, std::span<double> dst,
                const WaveletFilter& filter);

// Full packet decomposition of depth `level`: dst receives 4^level bands of
// (rows >> level) x (cols >> level), canonical order. level 0 copies.
void packet_analyze(std::span<const double> src, int rows, int cols, int level,
                    std::span<double> dst, const WaveletFilter& filter);

// Inverse of packet_analyze; rows/cols are the full-resolution extents.
void packet_synthesize(std::span<const double> src, int rows, int cols, int level,
                       std::span<double> dst, const WaveletFilter& filter);

}  // namespace kernels

// Throws DivisibilityError naming the axis ("rows"/"cols") when a level-`level`
// transform cannot be applied to a rows x cols grid.
void check_divisible(int rows, int cols, int level);

SubbandSet wpt_forward(const Plane& plane, int level,
                       const WaveletFilter& filter = WaveletFilter::haar());
SubbandSet wpt_forward(const Frame& frame, int level,
                       const WaveletFilter& filter = WaveletFilter::haar());

Plane wpt_inverse(const SubbandSet& bands, const WaveletFilter& filter = WaveletFilter::haar());

struct BandEnergies {
  std::vector<std::string> labels;
  std::vector<double> energy;

  double at(const std::string& label) const;
  double total() const;
};

// Sum of squared coefficients per band.
BandEnergies subband_energy(const SubbandSet& bands);

struct Histogram {
  std::string label;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::uint64_t> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

// Bin of value x over bin_count right-closed bins (lo + k w, lo + (k+1) w];
// the first bin also holds lo and out-of-range values clamp to the edges.
int histogram_bin(double x, int bin_count, double lo, double hi);

// Per-band histogram; counts of each band sum to the band's coefficient count.
std::vector<Histogram> subband_histogram(const SubbandSet& bands, int bin_count, double lo,
                                         double hi);

}  // namespace mwgan
