#include "mwgan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mwgan/error.hpp"
#include "mwgan/format.hpp"
#include "mwgan/wavelet.hpp"

namespace mwgan {

double mse(const Plane& a, const Plane& b) {
  if (!a.same_shape(b)) throw ArgumentError("mse: plane dimensions differ");
  const auto x = a.values();
  const auto y = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

double psnr(const Plane& a, const Plane& b) {
  const double m = mse(a, b);
  if (m == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / m));
}

std::vector<std::uint8_t> quantize_8bit(const Plane& p) {
  std::vector<std::uint8_t> out;
  out.reserve(p.values().size());
  for (double x : p.values()) {
    const double c = std::clamp(x, 0.0, 1.0);
    out.push_back(static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5)));
  }
  return out;
}

Plane dequantize_8bit(int rows, int cols, const std::vector<std::uint8_t>& px) {
  if (px.size() != static_cast<std::size_t>(rows) * cols) throw ArgumentError("pixel count does not match extents");
  Plane p(rows, cols);
  auto& v = p.storage();
  for (std::size_t i = 0; i < px.size(); ++i) v[i] = px[i] / 255.0;
  return p;
}

namespace {

// Mirror index into [0, n) without repeating the edge sample.
int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

int round_up(int x, int m) { return (x + m - 1) / m * m; }

}  // namespace

Plane reflect_pad(const Plane& p, int multiple) {
  if (multiple < 1) throw ArgumentError("reflect_pad: multiple must be >= 1");
  const int rows = round_up(p.rows(), multiple);
  const int cols = round_up(p.cols(), multiple);
  if (rows == p.rows() && cols == p.cols()) return p;
  Plane out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = p(mirror(r, p.rows()), mirror(c, p.cols()));
  return out;
}

Plane crop_top_left(const Plane& p, int rows, int cols) {
  if (rows > p.rows() || cols > p.cols() || rows < 1 || cols < 1) throw ArgumentError("crop exceeds plane extents");
  if (rows == p.rows() && cols == p.cols()) return p;
  Plane out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = p(r, c);
  return out;
}

const EnergyRow& EnergyReport::row(const std::string& seq_id, int qp, const std::string& band) const {
  for (const auto& r : rows) {
    if (r.seq_id == seq_id && r.qp == qp && r.band == band) return r;
  }
  throw ArgumentError("no energy row for " + seq_id + " qp " + std::to_string(qp) + " band " + band);
}

AnalysisResult analyze_pairs(const std::vector<SequencePair>& pairs, int level, int bins,
                             std::optional<double> range) {
  if (level < 1) throw ArgumentError("analysis level must be >= 1");
  if (bins < 2) throw ArgumentError("histogram needs at least 2 bins");
  const double half = range.value_or(static_cast<double>(1 << level));
  if (!(half > 0.0)) throw ArgumentError("histogram range must be positive");
  const auto labels = band_labels(level);
  const std::size_t nb = labels.size();

  AnalysisResult out;
  out.energy.level = level;
  for (const auto& pair : pairs) {
    pair.validate();
    if (pair.groundtruth.empty()) throw IngestionError("empty sequence in analysis");
    const std::string& id = pair.groundtruth.front().seq_id;
    std::vector<double> ec(nb, 0.0), eg(nb, 0.0);
    std::vector<Histogram> hc, hg;
    auto pool = [&](std::vector<Histogram>& acc, const SubbandSet& s) {
      auto h = subband_histogram(s, bins, -half, half);
      if (acc.empty()) {
        acc = std::move(h);
        return;
      }
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t k = 0; k < h[b].counts.size(); ++k) acc[b].counts[k] += h[b].counts[k];
    };
    for (std::size_t t = 0; t < pair.groundtruth.size(); ++t) {
      SubbandSet sc, sg;
      try {
        sc = wpt_forward(pair.compressed[t], level);
        sg = wpt_forward(pair.groundtruth[t], level);
      } catch (const ArgumentError& e) {
        throw IngestionError("sequence " + id + " frame " + std::to_string(t) + ": " + e.what());
      }
      const auto a = subband_energy(sc);
      const auto g = subband_energy(sg);
      for (std::size_t b = 0; b < nb; ++b) {
        ec[b] += a.energy[b];
        eg[b] += g.energy[b];
      }
      pool(hc, sc);
      pool(hg, sg);
    }
    const double frames = static_cast<double>(pair.groundtruth.size());
    for (std::size_t b = 0; b < nb; ++b) {
      out.energy.rows.push_back({id, pair.qp, labels[b], ec[b] / frames, eg[b] / frames});
    }
    for (auto& h : hc) out.histograms.push_back({id, pair.qp, "compressed", std::move(h)});
    for (auto& h : hg) out.histograms.push_back({id, pair.qp, "groundtruth", std::move(h)});
  }
  return out;
}

AnalysisResult analyze_manifest(const std::filesystem::path& manifest, int level, int bins,
                                std::optional<double> range) {
  std::vector<SequencePair> pairs;
  for (const auto& e : read_manifest(manifest)) {
    try {
      pairs.push_back(load_pair(e));
    } catch (const IngestionError& err) {
      throw IngestionError("sequence " + e.groundtruth.string() + ": " + err.what());
    }
  }
  return analyze_pairs(pairs, level, bins, range);
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_energy_csv(const EnergyReport& r, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "seq_id,qp,band,energy_compressed,energy_groundtruth\n";
  for (const auto& row : r.rows) {
    out << row.seq_id << ',' << row.qp << ',' << row.band << ',' << format_number(row.energy_compressed) << ','
        << format_number(row.energy_groundtruth) << '\n';
  }
}

void write_histogram_csv(const std::vector<HistogramRow>& h, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "seq_id,qp,role,band,bin_lo,bin_hi,count\n";
  for (const auto& row : h) {
    const auto& hist = row.histogram;
    const double w = hist.bin_width();
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
      out << row.seq_id << ',' << row.qp << ',' << row.role << ',' << hist.label << ','
          << format_number(hist.lo + w * static_cast<double>(k)) << ','
          << format_number(hist.lo + w * static_cast<double>(k + 1)) << ',' << hist.counts[k] << '\n';
    }
  }
}

std::vector<EnhancedFrame> enhance_sequence(const std::vector<Frame>& input,
                                            const std::optional<std::vector<Frame>>& groundtruth,
                                            const MotionNet& motion, const Generator& generator, int multiple) {
  if (input.empty()) throw IngestionError("input sequence is empty");
  if (groundtruth) {
    if (groundtruth->size() != input.size()) {
      throw IngestionError("ground truth has " + std::to_string(groundtruth->size()) + " frames, input has " +
                           std::to_string(input.size()));
    }
    for (std::size_t t = 0; t < input.size(); ++t) {
      if (!(*groundtruth)[t].samples.same_shape(input[t].samples)) {
        throw IngestionError("ground truth frame " + std::to_string(t) + " differs in size from the input");
      }
    }
  }
  std::vector<Frame> padded;
  for (const auto& f : input) padded.push_back(Frame{reflect_pad(f.samples, multiple), f.seq_id, f.index, f.qp});

  const int len = static_cast<int>(input.size());
  const int n = generator.n_neighbors();
  std::vector<EnhancedFrame> out;
  for (int t = 0; t < len; ++t) {
    ClipWindow w;
    w.target = padded[t];
    for (int k = n; k >= 1; --k) w.neighbors.push_back(padded[std::max(0, t - k)]);
    for (int k = 1; k <= n; ++k) w.neighbors.push_back(padded[std::min(len - 1, t + k)]);
    const GeneratorResult g = generator_forward(w, generator, motion);

    const Frame& src = input[t];
    EnhancedFrame e;
    e.output = Frame{crop_top_left(g.enhanced.samples, src.height(), src.width()), src.seq_id, src.index, src.qp};
    e.pixels = quantize_8bit(e.output.samples);
    if (groundtruth) {
      const Plane& gt = (*groundtruth)[t].samples;
      e.psnr_input = psnr(src.samples, gt);
      e.psnr_output = psnr(dequantize_8bit(src.height(), src.width(), e.pixels), gt);
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_psnr_csv(const std::vector<EnhancedFrame>& frames, const std::filesystem::path& path) {
  auto out = open_csv(path);
  const bool gt = !frames.empty() && frames.front().psnr_input.has_value();
  out << (gt ? "frame,psnr_compressed,psnr_enhanced,delta_psnr\n" : "frame\n");
  for (const auto& f : frames) {
    out << f.output.index;
    if (gt) {
      out << ',' << format_number(*f.psnr_input) << ',' << format_number(*f.psnr_output) << ','
          << format_number(*f.psnr_output - *f.psnr_input);
    }
    out << '\n';
  }
}

}  // namespace mwgan
