#include "mwgan/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <utility>

#include "mwgan/error.hpp"
#include "mwgan/wavelet.hpp"

namespace mwgan::nn {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapCM = Eigen::Map<const MatRM>;

void require_same(const Shape& a, const Shape& b, const char* op) {
  if (!(a == b)) throw StructureError(std::string(op) + ": shape mismatch " + a.str() + " vs " + b.str());
}

const WaveletFilter& haar() {
  static const WaveletFilter f = WaveletFilter::haar();
  return f;
}

struct ConvGeom {
  int cin, h, w, k, dilation, pad;
  int rows() const { return cin * k * k; }
  int pixels() const { return h * w; }
};

void im2col(const double* src, const ConvGeom& g, double* col) {
  const int P = g.pixels();
  for (int ci = 0; ci < g.cin; ++ci) {
    const double* plane = src + static_cast<std::size_t>(ci) * P;
    for (int ki = 0; ki < g.k; ++ki) {
      const int dy = ki * g.dilation - g.pad;
      for (int kj = 0; kj < g.k; ++kj) {
        const int dx = kj * g.dilation - g.pad;
        double* row = col + (static_cast<std::size_t>(ci) * g.k * g.k + ki * g.k + kj) * P;
        const int j0 = std::max(0, -dx);
        const int j1 = std::min(g.w, g.w - dx);
        for (int i = 0; i < g.h; ++i) {
          double* out = row + static_cast<std::size_t>(i) * g.w;
          const int si = i + dy;
          if (si < 0 || si >= g.h || j0 >= j1) {
            std::fill(out, out + g.w, 0.0);
            continue;
          }
          const double* in = plane + static_cast<std::size_t>(si) * g.w;
          std::fill(out, out + j0, 0.0);
          std::copy(in + j0 + dx, in + j1 + dx, out + j0);
          std::fill(out + std::max(j1, j0), out + g.w, 0.0);
        }
      }
    }
  }
}

void col2im_add(const double* col, const ConvGeom& g, double* dst) {
  const int P = g.pixels();
  for (int ci = 0; ci < g.cin; ++ci) {
    double* plane = dst + static_cast<std::size_t>(ci) * P;
    for (int ki = 0; ki < g.k; ++ki) {
      const int dy = ki * g.dilation - g.pad;
      for (int kj = 0; kj < g.k; ++kj) {
        const int dx = kj * g.dilation - g.pad;
        const double* row = col + (static_cast<std::size_t>(ci) * g.k * g.k + ki * g.k + kj) * P;
        const int j0 = std::max(0, -dx);
        const int j1 = std::min(g.w, g.w - dx);
        if (j0 >= j1) continue;
        for (int i = 0; i < g.h; ++i) {
          const int si = i + dy;
          if (si < 0 || si >= g.h) continue;
          const double* in = row + static_cast<std::size_t>(i) * g.w;
          double* out = plane + static_cast<std::size_t>(si) * g.w + dx;
          for (int j = j0; j < j1; ++j) out[j] += in[j];
        }
      }
    }
  }
}

// Per-axis linear interpolation taps for the x2 bilinear resize.
struct Taps {
  std::vector<int> i0, i1;
  std::vector<double> w0, w1;
};

Taps upsample_taps(int n) {
  Taps t;
  for (int o = 0; o < 2 * n; ++o) {
    double src = (o + 0.5) / 2.0 - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(n - 1));
    const int a = static_cast<int>(std::floor(src));
    const int b = std::min(a + 1, n - 1);
    const double f = src - a;
    t.i0.push_back(a);
    t.i1.push_back(b);
    t.w0.push_back(1.0 - f);
    t.w1.push_back(f);
  }
  return t;
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int dilation) {
  const Shape xs = x->value.shape;
  const Shape ws = weight->value.shape;
  if (ws.c != xs.c) {
    throw StructureError("conv2d: weight expects " + std::to_string(ws.c) + " input channels, got " +
                         std::to_string(xs.c));
  }
  if (ws.h != ws.w || ws.h % 2 == 0 || dilation < 1) {
    throw StructureError("conv2d: kernel must be square and odd, dilation >= 1");
  }
  if (bias && bias->value.numel() != static_cast<std::size_t>(ws.n)) {
    throw StructureError("conv2d: bias size does not match output channels");
  }
  const ConvGeom g{xs.c, xs.h, xs.w, ws.h, dilation, dilation * (ws.h - 1) / 2};
  const int cout = ws.n;
  const int K = g.rows();
  const int P = g.pixels();

  // Products run on Eigen-owned buffers: vectorized kernels peel by pointer
  // alignment, so mapping tensor storage directly would make the summation
  // order, and the low bits, depend on where the heap put each tensor.
  Tensor out(Shape{xs.n, cout, xs.h, xs.w});
  const MatRM wm = MapCM(weight->value.data.data(), cout, K);
  MatRM col(K, P), o(cout, P);
  for (int b = 0; b < xs.n; ++b) {
    im2col(x->value.data.data() + static_cast<std::size_t>(b) * xs.c * P, g, col.data());
    o.noalias() = wm * col;
    if (bias) {
      for (int c = 0; c < cout; ++c) o.row(c).array() += bias->value.data[c];
    }
    std::copy(o.data(), o.data() + o.size(), out.data.begin() + static_cast<std::ptrdiff_t>(b) * cout * P);
  }

  return make_node(std::move(out), {x, weight, bias}, [g, cout, K, P, n = xs.n](Node& self) {
    Node& xn = *self.parents[0];
    Node& wn = *self.parents[1];
    Node* bn = self.parents[2].get();
    const MatRM wm = MapCM(wn.value.data.data(), cout, K);
    MatRM col(K, P), go(cout, P), dcol(xn.requires_grad ? K : 0, P);
    MatRM gw = MatRM::Zero(wn.requires_grad ? cout : 0, K);
    for (int b = 0; b < n; ++b) {
      go = MapCM(self.grad.data.data() + static_cast<std::size_t>(b) * cout * P, cout, P);
      if (wn.requires_grad) {
        im2col(xn.value.data.data() + static_cast<std::size_t>(b) * g.cin * P, g, col.data());
        gw.noalias() += go * col.transpose();
      }
      if (bn && bn->requires_grad) {
        auto& gb = bn->grad_buffer().data;
        for (int c = 0; c < cout; ++c) gb[c] += go.row(c).sum();
      }
      if (xn.requires_grad) {
        dcol.noalias() = wm.transpose() * go;
        col2im_add(dcol.data(), g, xn.grad_buffer().data.data() + static_cast<std::size_t>(b) * g.cin * P);
      }
    }
    if (wn.requires_grad) {
      auto& dst = wn.grad_buffer().data;
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gw.data()[i];
    }
  });
}

Var leaky_relu(const Var& x, double slope) {
  Tensor out = x->value;
  for (double& v : out.data) v = v > 0.0 ? v : slope * v;
  return make_node(std::move(out), {x}, [slope](Node& self) {
    Node& xn = *self.parents[0];
    auto& gx = xn.grad_buffer().data;
    const auto& xv = xn.value.data;
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += xv[i] > 0.0 ? self.grad.data[i] : slope * self.grad.data[i];
  });
}

Var add(const Var& a, const Var& b) {
  require_same(a->value.shape, b->value.shape, "add");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b->value.data[i];
  return make_node(std::move(out), {a, b}, [](Node& self) {
    for (int p = 0; p < 2; ++p) {
      Node& n = *self.parents[p];
      if (!n.requires_grad) continue;
      auto& g = n.grad_buffer().data;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad.data[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same(a->value.shape, b->value.shape, "sub");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b->value.data[i];
  return make_node(std::move(out), {a, b}, [](Node& self) {
    for (int p = 0; p < 2; ++p) {
      Node& n = *self.parents[p];
      if (!n.requires_grad) continue;
      const double sign = p == 0 ? 1.0 : -1.0;
      auto& g = n.grad_buffer().data;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign * self.grad.data[i];
    }
  });
}

Var scale(const Var& a, double s) {
  Tensor out = a->value;
  for (double& v : out.data) v *= s;
  return make_node(std::move(out), {a}, [s](Node& self) {
    auto& g = self.parents[0]->grad_buffer().data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad.data[i];
  });
}

Var add_scalar(const Var& a, double s) {
  Tensor out = a->value;
  for (double& v : out.data) v += s;
  return make_node(std::move(out), {a}, [](Node& self) {
    auto& g = self.parents[0]->grad_buffer().data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad.data[i];
  });
}

Var scale_channels(const Var& a, const std::vector<double>& factors) {
  const Shape s = a->value.shape;
  if (factors.size() != static_cast<std::size_t>(s.c)) {
    throw StructureError("scale_channels: expected " + std::to_string(s.c) + " factors");
  }
  Tensor out = a->value;
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (double& v : out.channel(n, c)) v *= factors[c];
  return make_node(std::move(out), {a}, [factors](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    const Shape s = g.shape;
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        auto gi = g.channel(n, c);
        auto go = std::as_const(self.grad).channel(n, c);
        for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += factors[c] * go[i];
      }
  });
}

Var concat_channels(const std::vector<Var>& xs) {
  if (xs.empty()) throw StructureError("concat_channels: no inputs");
  Shape s = xs.front()->value.shape;
  int channels = 0;
  for (const auto& x : xs) {
    const Shape t = x->value.shape;
    if (t.n != s.n || t.h != s.h || t.w != s.w) {
      throw StructureError("concat_channels: mismatched shapes " + s.str() + " vs " + t.str());
    }
    channels += t.c;
  }
  const Shape os{s.n, channels, s.h, s.w};
  Tensor out(os);
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    double* dst = out.data.data() + static_cast<std::size_t>(n) * channels * plane;
    for (const auto& x : xs) {
      const std::size_t len = static_cast<std::size_t>(x->value.shape.c) * plane;
      const double* src = x->value.data.data() + static_cast<std::size_t>(n) * len;
      dst = std::copy(src, src + len, dst);
    }
  }
  return make_node(std::move(out), xs, [channels, plane](Node& self) {
    const int batch = self.value.shape.n;
    for (int n = 0; n < batch; ++n) {
      const double* src = self.grad.data.data() + static_cast<std::size_t>(n) * channels * plane;
      for (auto& p : self.parents) {
        const std::size_t len = static_cast<std::size_t>(p->value.shape.c) * plane;
        if (p->requires_grad) {
          double* dst = p->grad_buffer().data.data() + static_cast<std::size_t>(n) * len;
          for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
        }
        src += len;
      }
    }
  });
}

Var slice_channels(const Var& x, int start, int count) {
  const Shape s = x->value.shape;
  if (start < 0 || count < 1 || start + count > s.c) throw StructureError("slice_channels: range out of bounds");
  Tensor out(Shape{s.n, count, s.h, s.w});
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    const double* src = x->value.data.data() + (static_cast<std::size_t>(n) * s.c + start) * plane;
    std::copy(src, src + count * plane, out.data.data() + static_cast<std::size_t>(n) * count * plane);
  }
  return make_node(std::move(out), {x}, [start, count, plane](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    const int c = g.shape.c;
    for (int n = 0; n < g.shape.n; ++n) {
      double* dst = g.data.data() + (static_cast<std::size_t>(n) * c + start) * plane;
      const double* src = self.grad.data.data() + static_cast<std::size_t>(n) * count * plane;
      for (std::size_t i = 0; i < count * plane; ++i) dst[i] += src[i];
    }
  });
}

Var detach(const Var& x) { return constant(x->value); }

Var wpt(const Var& x, int level) {
  const Shape s = x->value.shape;
  if (level < 1) throw ArgumentError("wpt: level must be >= 1");
  check_divisible(s.h, s.w, level);
  const int bands = 1 << (2 * level);
  Tensor out(Shape{s.n, s.c * bands, s.h >> level, s.w >> level});
  const std::size_t plane = s.plane();
  for (std::size_t off = 0; off < x->value.data.size(); off += plane) {
    kernels::packet_analyze(std::span<const double>(x->value.data).subspan(off, plane), s.h, s.w,
                            level, std::span<double>(out.data).subspan(off, plane), haar());
  }
  return make_node(std::move(out), {x}, [level, s, plane](Node& self) {
    auto& g = self.parents[0]->grad_buffer().data;
    std::vector<double> tmp(plane);
    for (std::size_t off = 0; off < g.size(); off += plane) {
      kernels::packet_synthesize(std::span<const double>(self.grad.data).subspan(off, plane), s.h, s.w,
                                 level, tmp, haar());
      for (std::size_t i = 0; i < plane; ++i) g[off + i] += tmp[i];
    }
  });
}

Var iwpt(const Var& x, int level) {
  const Shape s = x->value.shape;
  if (level < 1) throw ArgumentError("iwpt: level must be >= 1");
  const int bands = 1 << (2 * level);
  if (s.c % bands != 0) {
    throw StructureError("iwpt: channel count " + std::to_string(s.c) + " is not a multiple of " +
                         std::to_string(bands));
  }
  const int h = s.h << level;
  const int w = s.w << level;
  Tensor out(Shape{s.n, s.c / bands, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::size_t off = 0; off < out.data.size(); off += plane) {
    kernels::packet_synthesize(std::span<const double>(x->value.data).subspan(off, plane), h, w, level,
                               std::span<double>(out.data).subspan(off, plane), haar());
  }
  return make_node(std::move(out), {x}, [level, h, w, plane](Node& self) {
    auto& g = self.parents[0]->grad_buffer().data;
    std::vector<double> tmp(plane);
    for (std::size_t off = 0; off < g.size(); off += plane) {
      kernels::packet_analyze(std::span<const double>(self.grad.data).subspan(off, plane), h, w, level,
                              tmp, haar());
      for (std::size_t i = 0; i < plane; ++i) g[off + i] += tmp[i];
    }
  });
}

Var avg_pool(const Var& x, int factor) {
  const Shape s = x->value.shape;
  if (factor < 1 || s.h % factor != 0 || s.w % factor != 0) {
    throw StructureError("avg_pool: extents " + s.str() + " not divisible by " + std::to_string(factor));
  }
  const int oh = s.h / factor;
  const int ow = s.w / factor;
  const double inv = 1.0 / (factor * factor);
  Tensor out(Shape{s.n, s.c, oh, ow});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int i = 0; i < s.h; ++i)
        for (int j = 0; j < s.w; ++j) out.at(n, c, i / factor, j / factor) += inv * x->value.at(n, c, i, j);
  return make_node(std::move(out), {x}, [factor, inv](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    const Shape s = g.shape;
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c)
        for (int i = 0; i < s.h; ++i)
          for (int j = 0; j < s.w; ++j) g.at(n, c, i, j) += inv * self.grad.at(n, c, i / factor, j / factor);
  });
}

Var upsample_nearest(const Var& x, int factor) {
  const Shape s = x->value.shape;
  if (factor < 1) throw ArgumentError("upsample_nearest: factor must be >= 1");
  Tensor out(Shape{s.n, s.c, s.h * factor, s.w * factor});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int i = 0; i < s.h * factor; ++i)
        for (int j = 0; j < s.w * factor; ++j) out.at(n, c, i, j) = x->value.at(n, c, i / factor, j / factor);
  return make_node(std::move(out), {x}, [factor](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    const Shape s = self.grad.shape;
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c)
        for (int i = 0; i < s.h; ++i)
          for (int j = 0; j < s.w; ++j) g.at(n, c, i / factor, j / factor) += self.grad.at(n, c, i, j);
  });
}

Var repeat_channels(const Var& x, int times) {
  const Shape s = x->value.shape;
  if (times < 1) throw ArgumentError("repeat_channels: times must be >= 1");
  Tensor out(Shape{s.n, s.c * times, s.h, s.w});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int r = 0; r < times; ++r) {
        auto src = x->value.channel(n, c);
        std::copy(src.begin(), src.end(), out.channel(n, c * times + r).begin());
      }
  return make_node(std::move(out), {x}, [times](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    for (int n = 0; n < g.shape.n; ++n)
      for (int c = 0; c < g.shape.c; ++c) {
        auto dst = g.channel(n, c);
        for (int r = 0; r < times; ++r) {
          auto src = std::as_const(self.grad).channel(n, c * times + r);
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
      }
  });
}

Var upsample_bilinear2(const Var& x) {
  const Shape s = x->value.shape;
  const Taps ty = upsample_taps(s.h);
  const Taps tx = upsample_taps(s.w);
  Tensor out(Shape{s.n, s.c, 2 * s.h, 2 * s.w});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int i = 0; i < 2 * s.h; ++i)
        for (int j = 0; j < 2 * s.w; ++j) {
          const auto& v = x->value;
          out.at(n, c, i, j) =
              ty.w0[i] * (tx.w0[j] * v.at(n, c, ty.i0[i], tx.i0[j]) + tx.w1[j] * v.at(n, c, ty.i0[i], tx.i1[j])) +
              ty.w1[i] * (tx.w0[j] * v.at(n, c, ty.i1[i], tx.i0[j]) + tx.w1[j] * v.at(n, c, ty.i1[i], tx.i1[j]));
        }
  return make_node(std::move(out), {x}, [ty, tx](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    const Shape s = self.grad.shape;
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c)
        for (int i = 0; i < s.h; ++i)
          for (int j = 0; j < s.w; ++j) {
            const double go = self.grad.at(n, c, i, j);
            g.at(n, c, ty.i0[i], tx.i0[j]) += ty.w0[i] * tx.w0[j] * go;
            g.at(n, c, ty.i0[i], tx.i1[j]) += ty.w0[i] * tx.w1[j] * go;
            g.at(n, c, ty.i1[i], tx.i0[j]) += ty.w1[i] * tx.w0[j] * go;
            g.at(n, c, ty.i1[i], tx.i1[j]) += ty.w1[i] * tx.w1[j] * go;
          }
  });
}

namespace {

struct Sample {
  int x0, x1, y0, y1;
  double fx, fy;
  bool clamp_x, clamp_y;
};

Sample locate(double y, double x, int h, int w) {
  Sample s{};
  s.clamp_x = !(x >= 0.0 && x <= w - 1);
  s.clamp_y = !(y >= 0.0 && y <= h - 1);
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  s.x0 = static_cast<int>(std::floor(x));
  s.y0 = static_cast<int>(std::floor(y));
  s.x1 = std::min(s.x0 + 1, w - 1);
  s.y1 = std::min(s.y0 + 1, h - 1);
  s.fx = x - s.x0;
  s.fy = y - s.y0;
  return s;
}

}  // namespace

Var warp(const Var& image, const Var& flow) {
  const Shape is = image->value.shape;
  const Shape fs = flow->value.shape;
  if (is.c != 1 || fs.c != 2 || is.n != fs.n || is.h != fs.h || is.w != fs.w) {
    throw StructureError("warp: expected image (N,1,H,W) and flow (N,2,H,W), got " + is.str() + " and " +
                         fs.str());
  }
  Tensor out(is);
  for (int n = 0; n < is.n; ++n)
    for (int i = 0; i < is.h; ++i)
      for (int j = 0; j < is.w; ++j) {
        const Sample s = locate(i + flow->value.at(n, 1, i, j), j + flow->value.at(n, 0, i, j), is.h, is.w);
        const auto& v = image->value;
        out.at(n, 0, i, j) = (1 - s.fy) * ((1 - s.fx) * v.at(n, 0, s.y0, s.x0) + s.fx * v.at(n, 0, s.y0, s.x1)) +
                             s.fy * ((1 - s.fx) * v.at(n, 0, s.y1, s.x0) + s.fx * v.at(n, 0, s.y1, s.x1));
      }
  return make_node(std::move(out), {image, flow}, [](Node& self) {
    Node& img = *self.parents[0];
    Node& fl = *self.parents[1];
    const Shape is = img.value.shape;
    Tensor* gi = img.requires_grad ? &img.grad_buffer() : nullptr;
    Tensor* gf = fl.requires_grad ? &fl.grad_buffer() : nullptr;
    for (int n = 0; n < is.n; ++n)
      for (int i = 0; i < is.h; ++i)
        for (int j = 0; j < is.w; ++j) {
          const double go = self.grad.at(n, 0, i, j);
          const Sample s = locate(i + fl.value.at(n, 1, i, j), j + fl.value.at(n, 0, i, j), is.h, is.w);
          const auto& v = img.value;
          if (gi) {
            gi->at(n, 0, s.y0, s.x0) += (1 - s.fy) * (1 - s.fx) * go;
            gi->at(n, 0, s.y0, s.x1) += (1 - s.fy) * s.fx * go;
            gi->at(n, 0, s.y1, s.x0) += s.fy * (1 - s.fx) * go;
            gi->at(n, 0, s.y1, s.x1) += s.fy * s.fx * go;
          }
          if (gf) {
            const double a = v.at(n, 0, s.y0, s.x0);
            const double b = v.at(n, 0, s.y0, s.x1);
            const double c = v.at(n, 0, s.y1, s.x0);
            const double d = v.at(n, 0, s.y1, s.x1);
            if (!s.clamp_x) gf->at(n, 0, i, j) += go * ((1 - s.fy) * (b - a) + s.fy * (d - c));
            if (!s.clamp_y) gf->at(n, 1, i, j) += go * ((1 - s.fx) * (c - a) + s.fx * (d - b));
          }
        }
  });
}

Var sum_squares_per_sample(const Var& x) {
  const Shape s = x->value.shape;
  const std::size_t per = s.numel() / s.n;
  Tensor out(Shape{s.n, 1, 1, 1});
  for (int n = 0; n < s.n; ++n) {
    double acc = 0.0;
    const double* p = x->value.data.data() + n * per;
    for (std::size_t i = 0; i < per; ++i) acc += p[i] * p[i];
    out.data[n] = acc;
  }
  return make_node(std::move(out), {x}, [per](Node& self) {
    Node& xn = *self.parents[0];
    auto& g = xn.grad_buffer().data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * xn.value.data[i] * self.grad.data[i / per];
  });
}

Var sqrt(const Var& x) {
  Tensor out = x->value;
  for (double& v : out.data) {
    if (v <= 0.0) throw ArgumentError("sqrt: argument must be positive");  // NaN passes to the divergence check
    v = std::sqrt(v);
  }
  return make_node(std::move(out), {x}, [](Node& self) {
    auto& g = self.parents[0]->grad_buffer().data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad.data[i] / (2.0 * self.value.data[i]);
  });
}

Var mean_all(const Var& x) {
  double acc = 0.0;
  for (double v : x->value.data) acc += v;
  const double inv = 1.0 / static_cast<double>(x->value.numel());
  return make_node(Tensor(Shape{}, {acc * inv}), {x}, [inv](Node& self) {
    auto& g = self.parents[0]->grad_buffer().data;
    for (double& v : g) v += inv * self.grad.data[0];
  });
}

Var sum_all(const Var& x) {
  double acc = 0.0;
  for (double v : x->value.data) acc += v;
  return make_node(Tensor(Shape{}, {acc}), {x}, [](Node& self) {
    auto& g = self.parents[0]->grad_buffer().data;
    for (double& v : g) v += self.grad.data[0];
  });
}

Tensor he_normal(Shape shape, int fan_in, double gain, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, gain * std::sqrt(2.0 / std::max(1, fan_in)));
  Tensor t(shape);
  for (double& v : t.data) v = dist(rng);
  return t;
}

}  // namespace mwgan::nn
