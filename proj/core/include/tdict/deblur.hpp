#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tdict/blur.hpp"
#include "tdict/image.hpp"
#include "tdict/mrnsd.hpp"
#include "tdict/patch.hpp"
#include "tdict/tensor3.hpp"

namespace tdict {

struct DeblurOptions {
  MrnsdConfig solver;
  /// When set, the relative error of every iterate's image against this
  /// reference is recorded.
  std::optional<ImageGray> truth;
  /// Stride of the rel-err curve; the first and last iterates are always included.
  int curve_every = 1;
};

struct DeblurResult {
  /// Reconstruction before any clamping or quantization.
  ImageGray image;
  SolveReport report;
  /// (iteration, rel err vs truth); empty without a truth image.
  std::vector<std::pair<int, double>> rel_err_curve;

  /// Header "iter,rel_err" then one row per point.
  std::string curve_csv() const;
};

/// Dictionary-constrained deblurring: MRNSD on the composite operator from
/// the initial guess tpinv(D) * ones, then depatchify(D * C).
DeblurResult deblur_tensor(const Eigen::VectorXd& b, LinearOpPtr blur, const Tensor3& dictionary,
                           const PatchGrid& grid, std::shared_ptr<const PatchRegularizer> regularizer,
                           const DeblurOptions& options);

/// Pixel-basis baseline: MRNSD on the blur (stacked with the weighted
/// regularizer when one is given) from the all-ones image.
DeblurResult deblur_matrix(const Eigen::VectorXd& b, LinearOpPtr blur, Index rows, Index cols,
                           std::shared_ptr<const PatchRegularizer> regularizer, const DeblurOptions& options);

/// Pixelwise convex combination. Weights must be non-negative and sum to 1.
ImageGray combine(std::span<const ImageGray> images, std::span<const double> weights);

}  // namespace tdict
