#include "mwgan/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "mwgan/error.hpp"

namespace mwgan {

namespace {

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

double bt601(unsigned r, unsigned g, unsigned b) {
  if (r == g && g == b) return r;
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

GrayImage read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IngestionError("cannot read PNG '" + path.string() + "': " + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IngestionError("cannot decode PNG '" + path.string() + "': " + image.message);
  }
  GrayImage out;
  out.height = static_cast<int>(image.height);
  out.width = static_cast<int>(image.width);
  out.luma.resize(static_cast<std::size_t>(out.height) * out.width);
  for (std::size_t i = 0; i < out.luma.size(); ++i) {
    out.luma[i] = bt601(buf[4 * i], buf[4 * i + 1], buf[4 * i + 2]);
  }
  return out;
}

// Next header token of a PNM file, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open PGM '" + path.string() + "'");
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P2") {
    throw IngestionError("'" + path.string() + "' is not a PGM (magic '" + magic + "')");
  }
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pnm_token(in));
    h = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw IngestionError("malformed PGM header in '" + path.string() + "'");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    throw IngestionError("invalid PGM header values in '" + path.string() + "'");
  }
  GrayImage out{h, w, std::vector<double>(static_cast<std::size_t>(w) * h)};
  const double rescale = 255.0 / maxval;
  if (magic == "P5") {
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(out.luma.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw IngestionError("truncated PGM data in '" + path.string() + "'");
    }
    for (std::size_t i = 0; i < out.luma.size(); ++i) {
      const unsigned v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
      out.luma[i] = maxval == 255 ? v : v * rescale;
    }
  } else {
    for (double& v : out.luma) {
      const std::string tok = pnm_token(in);
      if (tok.empty()) throw IngestionError("truncated PGM data in '" + path.string() + "'");
      const int raw = std::stoi(tok);
      v = maxval == 255 ? raw : raw * rescale;
    }
  }
  return out;
}

}  // namespace

GrayImage read_gray_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".pnm") return read_pgm(path);
  throw IngestionError("unsupported image format '" + path.string() + "'");
}

void write_png_gray8(const std::filesystem::path& path, int height, int width,
                     const std::vector<std::uint8_t>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    throw IngestionError("cannot write PNG '" + path.string() + "': " + image.message);
  }
}

void write_pgm_gray8(const std::filesystem::path& path, int height, int width,
                     const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write PGM '" + path.string() + "'");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

}  // namespace mwgan
