#pragma once

#include <span>
#include <string>

#include "tdict/image.hpp"
#include "tdict/tensor3.hpp"

namespace tdict {

/// |x - ref| / |ref| in the Frobenius / Euclidean norm. Throws ConfigError
/// for a zero reference and ShapeError for mismatched sizes.
double rel_err(std::span<const double> x, std::span<const double> ref);
double rel_err(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref);
double rel_err(const Tensor3& x, const Tensor3& ref);

struct SsimOptions {
  double dynamic_range = 1.0;
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Mean SSIM over every window position that fits inside the image. Images
/// smaller than the window use a single window covering the whole image.
double ssim(const ImageGray& x, const ImageGray& y, const SsimOptions& options = {});

struct CompressionReport {
  Index nnz_coefficients = 0;
  Index nnz_dictionary = 0;
  Index pixels = 0;
  double ratio_with_dict = 0.0;  ///< (nnz(D) + nnz(C)) / pixels
  double ratio_amortized = 0.0;  ///< nnz(C) / pixels
  double rel_err = 0.0;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

CompressionReport compression_report(const Tensor3& coefficients, const Tensor3& dictionary, Index pixels,
                                     double rel_err = 0.0);

}  // namespace tdict
