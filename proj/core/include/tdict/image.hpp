#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <variant>

namespace tdict {

/// Grayscale image, rows x cols, pixel values normalized to [0, 1] on load.
using ImageGray = Eigen::MatrixXd;

/// RGB image as three equally sized channels in R, G, B order.
struct ImageRgb {
  std::array<Eigen::MatrixXd, 3> channels;

  Eigen::Index rows() const { return channels[0].rows(); }
  Eigen::Index cols() const { return channels[0].cols(); }
};

using AnyImage = std::variant<ImageGray, ImageRgb>;

/// Reads P2/P5 (gray) or P3/P6 (color) netpbm files. 16-bit samples are
/// big-endian as netpbm specifies.
AnyImage read_pnm(const std::filesystem::path& path);
ImageGray read_pgm(const std::filesystem::path& path);

/// Pixels are clamped to [0, 1] and rounded half-up to the target maxval.
void write_pgm(const std::filesystem::path& path, const ImageGray& image, int maxval = 255, bool plain = false);
void write_ppm(const std::filesystem::path& path, const ImageRgb& image, int maxval = 255);

/// Clamp to [0, 1] then round half-up onto the maxval grid, returned in
/// normalized units. This is exactly what write_pgm stores.
ImageGray quantize(const ImageGray& image, int maxval = 255);

/// Replicate-edge padding up to the next multiple of (p, q).
ImageGray pad_to_multiple(const ImageGray& image, Eigen::Index p, Eigen::Index q);

}  // namespace tdict
