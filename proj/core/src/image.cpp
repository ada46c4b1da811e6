#include "tdict/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "tdict/errors.hpp"
#include "tdict/tensor_io.hpp"

namespace tdict {

namespace {

class PnmParser {
 public:
  PnmParser(std::vector<std::uint8_t> bytes, std::string name) : bytes_(std::move(bytes)), name_(std::move(name)) {}

  std::string magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') fail("not a netpbm file");
    pos_ = 2;
    return std::string{static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
  }

  long header_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("expected an integer");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000L) fail("integer out of range");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("missing whitespace after header");
    ++pos_;
  }

  int binary_sample(int maxval) {
    if (maxval < 256) {
      need(1);
      return bytes_[pos_++];
    }
    need(2);
    const int v = (bytes_[pos_] << 8) | bytes_[pos_ + 1];
    pos_ += 2;
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(name_ + ": " + msg + " at offset " + std::to_string(pos_));
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail("truncated pixel data");
  }

  std::vector<std::uint8_t> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

int to_level(double v, int maxval) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<int>(std::floor(clamped * maxval + 0.5));
}

void check_maxval(int maxval) {
  if (maxval < 1 || maxval > 65535) throw ConfigError("maxval must be in [1, 65535]");
}

void put_sample(std::string& out, int level, int maxval) {
  if (maxval < 256) {
    out.push_back(static_cast<char>(level));
  } else {
    out.push_back(static_cast<char>((level >> 8) & 0xff));
    out.push_back(static_cast<char>(level & 0xff));
  }
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

AnyImage read_pnm(const std::filesystem::path& path) {
  PnmParser p(read_file_bytes(path), path.string());
  const std::string magic = p.magic();
  const bool plain = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (magic != "P2" && magic != "P5" && !color) p.fail("unsupported netpbm type " + magic);
  const long cols = p.header_int();
  const long rows = p.header_int();
  const long maxval = p.header_int();
  if (cols < 1 || rows < 1) p.fail("empty image");
  if (maxval < 1 || maxval > 65535) p.fail("maxval out of range");
  if (!plain) p.end_header();

  const int channels = color ? 3 : 1;
  std::array<Eigen::MatrixXd, 3> planes;
  for (int c = 0; c < channels; ++c) planes[static_cast<std::size_t>(c)].resize(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const long v = plain ? p.header_int() : p.binary_sample(static_cast<int>(maxval));
        if (v > maxval) p.fail("sample exceeds maxval");
        planes[static_cast<std::size_t>(ch)](r, c) = static_cast<double>(v) / static_cast<double>(maxval);
      }
    }
  }
  if (!color) return AnyImage{std::move(planes[0])};
  return AnyImage{ImageRgb{std::move(planes)}};
}

ImageGray read_pgm(const std::filesystem::path& path) {
  AnyImage img = read_pnm(path);
  if (auto* gray = std::get_if<ImageGray>(&img)) return std::move(*gray);
  throw FormatError(path.string() + ": expected a grayscale PGM image");
}

void write_pgm(const std::filesystem::path& path, const ImageGray& image, int maxval, bool plain) {
  check_maxval(maxval);
  std::string out = (plain ? "P2\n" : "P5\n") + std::to_string(image.cols()) + " " + std::to_string(image.rows()) +
                    "\n" + std::to_string(maxval) + "\n";
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const int level = to_level(image(r, c), maxval);
      if (plain) {
        out += std::to_string(level);
        out.push_back(c + 1 == image.cols() ? '\n' : ' ');
      } else {
        put_sample(out, level, maxval);
      }
    }
  }
  write_text(path, out);
}

void write_ppm(const std::filesystem::path& path, const ImageRgb& image, int maxval) {
  check_maxval(maxval);
  std::string out = "P6\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n" +
                    std::to_string(maxval) + "\n";
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      for (const auto& ch : image.channels) put_sample(out, to_level(ch(r, c), maxval), maxval);
    }
  }
  write_text(path, out);
}

ImageGray quantize(const ImageGray& image, int maxval) {
  check_maxval(maxval);
  return image.unaryExpr([maxval](double v) { return static_cast<double>(to_level(v, maxval)) / maxval; });
}

ImageGray pad_to_multiple(const ImageGray& image, Eigen::Index p, Eigen::Index q) {
  if (p < 1 || q < 1) throw ConfigError("pad_to_multiple: patch size must be positive");
  const Eigen::Index rows = (image.rows() + p - 1) / p * p;
  const Eigen::Index cols = (image.cols() + q - 1) / q * q;
  ImageGray out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      out(r, c) = image(std::min(r, image.rows() - 1), std::min(c, image.cols() - 1));
    }
  }
  return out;
}

}  // namespace tdict
