#include "tdict/deblur.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "tdict/errors.hpp"
#include "tdict/metrics.hpp"
#include "tdict/tproduct.hpp"

namespace tdict {

namespace {

Eigen::VectorXd pad_data(const Eigen::VectorXd& b, Index rows) {
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(rows);
  padded.head(b.size()) = b;
  return padded;
}

// Wraps the caller's observer with a rel-err recorder when a truth image is given.
template <typename ImageFn>
MrnsdConfig with_curve(const DeblurOptions& options, ImageFn image_of, std::vector<std::pair<int, double>>& curve) {
  MrnsdConfig cfg = options.solver;
  if (!options.truth) return cfg;
  if (options.curve_every < 1) throw ConfigError("deblur: curve stride must be at least 1");
  const ImageGray& truth = *options.truth;
  const int stride = options.curve_every;
  const int last = cfg.max_iters;
  auto inner = cfg.observer;
  cfg.observer = [&curve, &truth, image_of, stride, last, inner](const IterationView& view) {
    if (view.iter % stride == 0 || view.iter == last) {
      curve.emplace_back(view.iter, rel_err(image_of(view.x), truth));
    }
    if (inner) inner(view);
  };
  return cfg;
}

void close_curve(std::vector<std::pair<int, double>>& curve, const DeblurOptions& options, int iterations,
                 const ImageGray& image) {
  if (!options.truth) return;
  if (curve.empty() || curve.back().first != iterations) curve.emplace_back(iterations, rel_err(image, *options.truth));
}

}  // namespace

std::string DeblurResult::curve_csv() const {
  std::string out = "iter,rel_err\n";
  char buf[64];
  for (const auto& [iter, err] : rel_err_curve) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", iter, err);
    out += buf;
  }
  return out;
}

DeblurResult deblur_tensor(const Eigen::VectorXd& b, LinearOpPtr blur, const Tensor3& dictionary,
                           const PatchGrid& grid, std::shared_ptr<const PatchRegularizer> regularizer,
                           const DeblurOptions& options) {
  if (!blur) throw ConfigError("deblur_tensor: null blur operator");
  if (b.size() != blur->rows()) {
    throw ShapeError("deblur_tensor: data has length " + std::to_string(b.size()) + " but the blur produces " +
                     std::to_string(blur->rows()));
  }
  const auto op = composite_op(std::move(blur), dictionary, grid, std::move(regularizer));
  if (options.truth && (options.truth->rows() != grid.image_rows() || options.truth->cols() != grid.image_cols())) {
    throw ShapeError("deblur_tensor: truth image does not match the patch grid");
  }

  const Tensor3 ones = Tensor3::constant(grid.p, grid.patches(), grid.q, 1.0);
  const Tensor3 c0 = initial_guess(dictionary, ones, options.solver.floor);
  const Eigen::VectorXd x0 = vec_unfold(c0);

  DeblurResult result;
  auto image_of = [&op](std::span<const double> x) {
    return op->image_of(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Index>(x.size())));
  };
  const MrnsdConfig cfg = with_curve(options, image_of, result.rel_err_curve);
  VectorSolution sol = mrnsd_op(*op, pad_data(b, op->rows()), x0, cfg);
  result.image = op->image_of(sol.x);
  result.report = std::move(sol.report);
  close_curve(result.rel_err_curve, options, result.report.iterations, result.image);
  return result;
}

DeblurResult deblur_matrix(const Eigen::VectorXd& b, LinearOpPtr blur, Index rows, Index cols,
                           std::shared_ptr<const PatchRegularizer> regularizer, const DeblurOptions& options) {
  if (!blur) throw ConfigError("deblur_matrix: null blur operator");
  if (blur->cols() != rows * cols) throw ShapeError("deblur_matrix: blur does not act on a " + std::to_string(rows) + "x" + std::to_string(cols) + " image");
  if (b.size() != blur->rows()) throw ShapeError("deblur_matrix: data length does not match the blur");
  if (options.truth && (options.truth->rows() != rows || options.truth->cols() != cols)) {
    throw ShapeError("deblur_matrix: truth image has the wrong size");
  }
  std::vector<StackedOp::Block> blocks{{std::move(blur), 1.0}};
  if (regularizer && regularizer->weight() > 0.0) {
    if (regularizer->cols() != rows * cols) throw ShapeError("deblur_matrix: regularizer size mismatch");
    blocks.push_back({regularizer, regularizer->weight()});
  }
  const StackedOp op(std::move(blocks));

  DeblurResult result;
  auto image_of = [rows, cols](std::span<const double> x) -> ImageGray {
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), rows, cols);
  };
  const MrnsdConfig cfg = with_curve(options, image_of, result.rel_err_curve);
  VectorSolution sol = mrnsd_op(op, pad_data(b, op.rows()), Eigen::VectorXd::Ones(rows * cols), cfg);
  result.image = Eigen::Map<const Eigen::MatrixXd>(sol.x.data(), rows, cols);
  result.report = std::move(sol.report);
  close_curve(result.rel_err_curve, options, result.report.iterations, result.image);
  return result;
}

ImageGray combine(std::span<const ImageGray> images, std::span<const double> weights) {
  if (images.empty()) throw ConfigError("combine: no images");
  if (images.size() != weights.size()) {
    throw ConfigError("combine: " + std::to_string(images.size()) + " images but " + std::to_string(weights.size()) +
                      " weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("combine: weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("combine: weights sum to " + std::to_string(total) + ", not 1");
  ImageGray out = ImageGray::Zero(images[0].rows(), images[0].cols());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].rows() != out.rows() || images[i].cols() != out.cols()) {
      throw ShapeError("combine: image " + std::to_string(i) + " has a different size");
    }
    out += weights[i] * images[i];
  }
  return out;
}

}  // namespace tdict
