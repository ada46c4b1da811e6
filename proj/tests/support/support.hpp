#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "tdict/image.hpp"
#include "tdict/tensor3.hpp"

namespace tdict::testing {

/// Smooth synthetic scene defined on the unit square, so the same seed can
/// be sampled at any resolution. Values lie strictly inside (0, 1).
ImageGray smooth_image(Index rows, Index cols, std::uint64_t seed);

/// Piecewise-smooth scene: a smooth background plus ellipses and a
/// half-plane with sharp (sub-pixel at 64 x 64) edges. Defined on the unit
/// square like smooth_image, values strictly inside (0, 1).
ImageGray scene_image(Index rows, Index cols, std::uint64_t seed);

/// Tensor with entries uniform in [lo, hi).
Tensor3 random_tensor(Index rows, Index cols, Index tubes, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0);
Eigen::MatrixXd random_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0);

/// Dense-matrix MRNSD for min |B - A X|_F over X >= 0, with the residual and
/// gradient updated by recurrence. Returns every iterate, x0 included.
std::vector<Eigen::MatrixXd> matrix_mrnsd_iterates(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                   const Eigen::MatrixXd& x0, int iters);

/// Explicit circulant-block t-product, written independently of the library.
Tensor3 reference_tprod(const Tensor3& a, const Tensor3& b);

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace tdict::testing
