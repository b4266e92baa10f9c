#include "plr/image.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace plr::image {

namespace {

// Skips whitespace and '#' comments, then reads one nonnegative integer.
bool next_header_int(const std::string& bytes, std::size_t& pos, long& value) {
  while (pos < bytes.size()) {
    const unsigned char c = static_cast<unsigned char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) return false;
  value = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    value = value * 10 + (bytes[pos] - '0');
    if (value > 1'000'000'000L) return false;
    ++pos;
  }
  return true;
}

}  // namespace

GrayImage read_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ParseError("pgm: bad magic, expected P2 or P5");
  const bool binary = bytes[1] == '5';

  std::size_t pos = 2;
  long width = 0, height = 0, maxval = 0;
  if (!next_header_int(bytes, pos, width) || !next_header_int(bytes, pos, height) ||
      !next_header_int(bytes, pos, maxval))
    throw ParseError("pgm: malformed header");
  if (width <= 0 || height <= 0) throw ParseError("pgm: non-positive dimensions");
  if (maxval <= 0) throw ParseError("pgm: non-positive maxval");
  if (maxval > 255) throw UnsupportedMaxval("pgm: maxval above 255 not supported");

  GrayImage img(width, height);
  if (binary) {
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
      throw ParseError("pgm: missing whitespace before raster");
    ++pos;  // single whitespace separates header and raster
    const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos < need) throw ParseError("pgm: truncated raster");
    for (long r = 0; r < height; ++r)
      for (long c = 0; c < width; ++c)
        img(r, c) = static_cast<double>(static_cast<unsigned char>(bytes[pos++]));
  } else {
    for (long r = 0; r < height; ++r) {
      for (long c = 0; c < width; ++c) {
        long v = 0;
        if (!next_header_int(bytes, pos, v)) throw ParseError("pgm: truncated sample data");
        if (v > maxval) throw ParseError("pgm: sample exceeds maxval");
        img(r, c) = static_cast<double>(v);
      }
    }
  }
  return img;
}

std::string write_pgm(const GrayImage& img) {
  std::ostringstream header;
  header << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::string out = header.str();
  out.reserve(out.size() + static_cast<std::size_t>(img.width() * img.height()));
  for (Eigen::Index r = 0; r < img.height(); ++r) {
    for (Eigen::Index c = 0; c < img.width(); ++c) {
      double v = std::floor(img(r, c) + 0.5);  // round half-up
      v = std::min(255.0, std::max(0.0, v));
      out.push_back(static_cast<char>(static_cast<std::uint8_t>(v)));
    }
  }
  return out;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_pgm(buf.str());
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
  const std::string bytes = write_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

GrayImage pad_symmetric(const GrayImage& img, Eigen::Index margin) {
  if (margin < 0 || margin > std::min(img.width(), img.height()))
    throw MarginTooLarge("pad_symmetric: margin exceeds image size");
  if (margin == 0) return img;

  const Eigen::Index h = img.height(), w = img.width();
  const auto reflect = [](Eigen::Index i, Eigen::Index size) {
    if (i < 0) return -i - 1;
    if (i >= size) return 2 * size - 1 - i;
    return i;
  };
  GrayImage out(w + 2 * margin, h + 2 * margin);
  for (Eigen::Index r = 0; r < out.height(); ++r) {
    const Eigen::Index sr = reflect(r - margin, h);
    for (Eigen::Index c = 0; c < out.width(); ++c) out(r, c) = img(sr, reflect(c - margin, w));
  }
  return out;
}

GrayImage crop(const GrayImage& img, Eigen::Index margin) {
  if (margin < 0 || 2 * margin >= std::min(img.width(), img.height()))
    throw MarginTooLarge("crop: margin exceeds image size");
  return GrayImage(img.pix.block(margin, margin, img.height() - 2 * margin, img.width() - 2 * margin));
}

Patch extract_patch(const GrayImage& img, Eigen::Index row, Eigen::Index col, Eigen::Index d) {
  if (d < 1 || row < 0 || col < 0 || row + d > img.height() || col + d > img.width())
    throw OutOfBounds("extract_patch: patch not fully inside image");
  Patch p;
  p.row = row;
  p.col = col;
  p.values = img.pix.block(row, col, d, d).reshaped();
  return p;
}

void Accumulator::add(Eigen::Index row, Eigen::Index col,
                      const Eigen::Ref<const Eigen::VectorXd>& values) {
  const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(values.size()))));
  if (d * d != values.size()) throw ShapeError("Accumulator::add: values are not a square patch");
  if (row < 0 || col < 0 || row + d > height() || col + d > width())
    throw OutOfBounds("Accumulator::add: patch outside accumulator");
  sum_.block(row, col, d, d) += values.reshaped(d, d);
  count_.block(row, col, d, d).array() += 1.0;
}

void Accumulator::merge(const Accumulator& other) {
  if (other.width() != width() || other.height() != height())
    throw DimensionMismatch("Accumulator::merge: size mismatch");
  sum_ += other.sum_;
  count_ += other.count_;
}

Accumulator Accumulator::cropped(Eigen::Index margin) const {
  if (margin < 0 || 2 * margin >= std::min(width(), height()))
    throw MarginTooLarge("Accumulator::cropped: margin exceeds size");
  Accumulator out(width() - 2 * margin, height() - 2 * margin);
  out.sum_ = sum_.block(margin, margin, out.height(), out.width());
  out.count_ = count_.block(margin, margin, out.height(), out.width());
  return out;
}

GrayImage Accumulator::finalize() const {
  if ((count_.array() <= 0.0).any()) throw UncoveredPixels("finalize: pixel with no estimate");
  return GrayImage(sum_.cwiseQuotient(count_));
}

}  // namespace plr::image
