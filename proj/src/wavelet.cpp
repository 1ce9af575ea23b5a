#include "mwgan/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mwgan/error.hpp"

namespace mwgan {

Plane::Plane(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw StructureError("plane data size does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}

double Plane::sum_squares() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

double Plane::max_abs_diff(const Plane& o) const {
  if (!same_shape(o)) throw StructureError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - o.data_[i]));
  return m;
}

WaveletFilter WaveletFilter::haar() {
  const double s = 1.0 / std::sqrt(2.0);
  return {"haar", {s, s}, {s, -s}};
}

void WaveletFilter::validate() const {
  constexpr double tol = 1e-12;
  if (low.empty() || low.size() % 2 != 0 || low.size() != high.size()) {
    throw ArgumentError("wavelet filter '" + name + "': taps must have equal even length");
  }
  const double nl = std::inner_product(low.begin(), low.end(), low.begin(), 0.0);
  const double nh = std::inner_product(high.begin(), high.end(), high.begin(), 0.0);
  const double dot = std::inner_product(low.begin(), low.end(), high.begin(), 0.0);
  if (std::abs(nl - 1.0) > tol || std::abs(nh - 1.0) > tol) {
    throw ArgumentError("wavelet filter '" + name + "': taps are not unit norm");
  }
  if (std::abs(dot) > tol) {
    throw ArgumentError("wavelet filter '" + name + "': low and high taps are not orthogonal");
  }
}

void SubbandSet::validate() const {
  if (level < 1) throw StructureError("subband set level must be >= 1");
  const std::size_t expected = std::size_t{1} << (2 * level);
  if (bands.size() != expected) {
    throw StructureError("subband set at level " + std::to_string(level) + " needs " +
                         std::to_string(expected) + " bands, got " +
                         std::to_string(bands.size()));
  }
  for (const auto& b : bands) {
    if (!b.same_shape(bands.front()) || b.empty()) {
      throw StructureError("subband set bands have mismatched shapes");
    }
  }
}

namespace {

constexpr const char* kKinds[4] = {"LL", "LH", "HL", "HH"};

int int_pow4(int level) { return 1 << (2 * level); }

}  // namespace

std::string band_label(int level, int index) {
  if (level < 1 || index < 0 || index >= int_pow4(level)) {
    throw ArgumentError("band_label: index out of range");
  }
  std::string out;
  for (int d = level - 1; d >= 0; --d) {
    if (!out.empty()) out += '.';
    out += kKinds[(index >> (2 * d)) & 3];
  }
  return out;
}

std::vector<std::string> band_labels(int level) {
  std::vector<std::string> out;
  for (int i = 0; i < int_pow4(level); ++i) out.push_back(band_label(level, i));
  return out;
}

int band_index(const std::string& label) {
  int index = 0;
  std::size_t pos = 0;
  bool any = false;
  while (pos <= label.size()) {
    const std::size_t dot = label.find('.', pos);
    const std::string part = label.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    const auto it = std::find(std::begin(kKinds), std::end(kKinds), part);
    if (it == std::end(kKinds)) throw ArgumentError("malformed band label '" + label + "'");
    index = index * 4 + static_cast<int>(it - std::begin(kKinds));
    any = true;
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  if (!any) throw ArgumentError("empty band label");
  return index;
}

void check_divisible(int rows, int cols, int level) {
  if (level < 0) throw ArgumentError("wavelet level must be non-negative");
  const int div = 1 << level;
  if (rows <= 0 || rows % div != 0) throw DivisibilityError("rows", rows, div);
  if (cols <= 0 || cols % div != 0) throw DivisibilityError("cols", cols, div);
}

namespace kernels {

void analyze(std::span<const double> src, int rows, int cols, std::span<double> dst,
             const WaveletFilter& f) {
  const int hr = rows / 2;
  const int hc = cols / 2;
  const int taps = static_cast<int>(f.low.size());
  const std::size_t band = static_cast<std::size_t>(hr) * hc;

  // Row-axis pass: lo/hi are hr x cols.
  std::vector<double> lo(static_cast<std::size_t>(hr) * cols, 0.0);
  std::vector<double> hi(lo.size(), 0.0);
  for (int k = 0; k < hr; ++k) {
    double* lrow = lo.data() + static_cast<std::size_t>(k) * cols;
    double* hrow = hi.data() + static_cast<std::size_t>(k) * cols;
    for (int n = 0; n < taps; ++n) {
      const int r = (2 * k + n) % rows;
      const double* srow = src.data() + static_cast<std::size_t>(r) * cols;
      const double a = f.low[n];
      const double b = f.high[n];
      for (int c = 0; c < cols; ++c) {
        lrow[c] += a * srow[c];
        hrow[c] += b * srow[c];
      }
    }
  }

  // Column-axis pass on each half.
  double* ll = dst.data();
  double* lh = ll + band;
  double* hl = lh + band;
  double* hh = hl + band;
  for (int k = 0; k < hr; ++k) {
    const double* lrow = lo.data() + static_cast<std::size_t>(k) * cols;
    const double* hrow = hi.data() + static_cast<std::size_t>(k) * cols;
    for (int m = 0; m < hc; ++m) {
      double sll = 0.0, slh = 0.0, shl = 0.0, shh = 0.0;
      for (int n = 0; n < taps; ++n) {
        const int c = (2 * m + n) % cols;
        sll += f.low[n] * lrow[c];
        slh += f.high[n] * lrow[c];
        shl += f.low[n] * hrow[c];
        shh += f.high[n] * hrow[c];
      }
      const std::size_t o = static_cast<std::size_t>(k) * hc + m;
      ll[o] = sll;
      lh[o] = slh;
      hl[o] = shl;
      hh[o] = shh;
    }
  }
}

void synthesize(std::span<const double> src, int rows, int cols, std::span<double> dst,
                const WaveletFilter& f) {
  const int hr = rows / 2;
  const int hc = cols / 2;
  const int taps = static_cast<int>(f.low.size());
  const std::size_t band = static_cast<std::size_t>(hr) * hc;
  const double* ll = src.data();
  const double* lh = ll + band;
  const double* hl = lh + band;
  const double* hh = hl + band;

  std::vector<double> lo(static_cast<std::size_t>(hr) * cols, 0.0);
  std::vector<double> hi(lo.size(), 0.0);
  for (int k = 0; k < hr; ++k) {
    double* lrow = lo.data() + static_cast<std::size_t>(k) * cols;
    double* hrow = hi.data() + static_cast<std::size_t>(k) * cols;
    for (int m = 0; m < hc; ++m) {
      const std::size_t o = static_cast<std::size_t>(k) * hc + m;
      for (int n = 0; n < taps; ++n) {
        const int c = (2 * m + n) % cols;
        lrow[c] += f.low[n] * ll[o] + f.high[n] * lh[o];
        hrow[c] += f.low[n] * hl[o] + f.high[n] * hh[o];
      }
    }
  }

  std::fill(dst.begin(), dst.begin() + static_cast<std::ptrdiff_t>(rows) * cols, 0.0);
  for (int k = 0; k < hr; ++k) {
    const double* lrow = lo.data() + static_cast<std::size_t>(k) * cols;
    const double* hrow = hi.data() + static_cast<std::size_t>(k) * cols;
    for (int n = 0; n < taps; ++n) {
      const int r = (2 * k + n) % rows;
      double* drow = dst.data() + static_cast<std::size_t>(r) * cols;
      const double a = f.low[n];
      const double b = f.high[n];
      for (int c = 0; c < cols; ++c) drow[c] += a * lrow[c] + b * hrow[c];
    }
  }
}

void packet_analyze(std::span<const double> src, int rows, int cols, int level,
                    std::span<double> dst, const WaveletFilter& f) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (level == 0) {
    std::copy_n(src.begin(), n, dst.begin());
    return;
  }
  if (level == 1) {
    analyze(src, rows, cols, dst, f);
    return;
  }
  std::vector<double> tmp(n);
  analyze(src, rows, cols, tmp, f);
  const std::size_t child = n / 4;
  for (int b = 0; b < 4; ++b) {
    packet_analyze(std::span<const double>(tmp).subspan(b * child, child), rows / 2, cols / 2,
                   level - 1, dst.subspan(b * child, child), f);
  }
}

void packet_synthesize(std::span<const double> src, int rows, int cols, int level,
                       std::span<double> dst, const WaveletFilter& f) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (level == 0) {
    std::copy_n(src.begin(), n, dst.begin());
    return;
  }
  if (level == 1) {
    synthesize(src, rows, cols, dst, f);
    return;
  }
  std::vector<double> tmp(n);
  const std::size_t child = n / 4;
  for (int b = 0; b < 4; ++b) {
    packet_synthesize(src.subspan(b * child, child), rows / 2, cols / 2, level - 1,
                      std::span<double>(tmp).subspan(b * child, child), f);
  }
  synthesize(tmp, rows, cols, dst, f);
}

}  // namespace kernels

SubbandSet wpt_forward(const Plane& plane, int level, const WaveletFilter& filter) {
  if (level < 1) throw ArgumentError("wpt_forward: level must be >= 1, got " + std::to_string(level));
  filter.validate();
  check_divisible(plane.rows(), plane.cols(), level);
  const int br = plane.rows() >> level;
  const int bc = plane.cols() >> level;
  const int count = int_pow4(level);
  std::vector<double> flat(plane.size());
  kernels::packet_analyze(plane.values(), plane.rows(), plane.cols(), level, flat, filter);

  SubbandSet out;
  out.level = level;
  out.bands.reserve(count);
  const std::size_t bsize = static_cast<std::size_t>(br) * bc;
  for (int b = 0; b < count; ++b) {
    out.bands.emplace_back(br, bc,
                           std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(b * bsize),
                                               flat.begin() + static_cast<std::ptrdiff_t>((b + 1) * bsize)));
  }
  return out;
}

SubbandSet wpt_forward(const Frame& frame, int level, const WaveletFilter& filter) {
  return wpt_forward(frame.samples, level, filter);
}

Plane wpt_inverse(const SubbandSet& bands, const WaveletFilter& filter) {
  bands.validate();
  filter.validate();
  const int rows = bands.band_rows() << bands.level;
  const int cols = bands.band_cols() << bands.level;
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& b : bands.bands) flat.insert(flat.end(), b.storage().begin(), b.storage().end());
  Plane out(rows, cols);
  kernels::packet_synthesize(flat, rows, cols, bands.level, out.values(), filter);
  return out;
}

double BandEnergies::at(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw ArgumentError("no band labelled '" + label + "'");
  return energy[static_cast<std::size_t>(it - labels.begin())];
}

double BandEnergies::total() const { return std::accumulate(energy.begin(), energy.end(), 0.0); }

BandEnergies subband_energy(const SubbandSet& bands) {
  bands.validate();
  BandEnergies out;
  out.labels = band_labels(bands.level);
  for (const auto& b : bands.bands) out.energy.push_back(b.sum_squares());
  return out;
}

int histogram_bin(double x, int bin_count, double lo, double hi) {
  const double width = (hi - lo) / bin_count;
  const double pos = std::ceil((x - lo) / width) - 1.0;
  if (!(pos >= 0.0)) return 0;  // also catches NaN
  if (pos >= bin_count - 1) return bin_count - 1;
  return static_cast<int>(pos);
}

std::vector<Histogram> subband_histogram(const SubbandSet& bands, int bin_count, double lo,
                                         double hi) {
  if (bin_count < 2) throw ArgumentError("subband_histogram: bin_count must be >= 2");
  if (!(lo < hi)) throw ArgumentError("subband_histogram: range must satisfy lo < hi");
  bands.validate();
  std::vector<Histogram> out;
  for (std::size_t i = 0; i < bands.bands.size(); ++i) {
    Histogram h{band_label(bands.level, static_cast<int>(i)), lo, hi,
                std::vector<std::uint64_t>(static_cast<std::size_t>(bin_count), 0)};
    for (double v : bands.bands[i].values()) ++h.counts[histogram_bin(v, bin_count, lo, hi)];
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace mwgan
