#include "tdict/blur.hpp"

#include <cmath>
#include <random>
#include <string>

#include "tdict/errors.hpp"

namespace tdict {

namespace {

Index reflect(Index j, Index n) {
  if (j < 0) return -j;
  if (j >= n) return 2 * (n - 1) - j;
  return j;
}

// Y = A X where A is the reflexive 1-D blur acting down the columns of X.
Eigen::MatrixXd reflexive_cols(const Eigen::MatrixXd& x, const std::vector<double>& v) {
  const Index n = x.rows();
  const Index bw = static_cast<Index>(v.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index i = 0; i < n; ++i) {
      double acc = v[0] * x(i, c);
      for (Index d = 1; d < bw; ++d) {
        acc += v[static_cast<std::size_t>(d)] * (x(reflect(i - d, n), c) + x(reflect(i + d, n), c));
      }
      y(i, c) = acc;
    }
  }
  return y;
}

// X = A^T Y for the operator above.
Eigen::MatrixXd reflexive_cols_adjoint(const Eigen::MatrixXd& y, const std::vector<double>& v) {
  const Index n = y.rows();
  const Index bw = static_cast<Index>(v.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, y.cols());
  for (Index c = 0; c < y.cols(); ++c) {
    for (Index i = 0; i < n; ++i) {
      const double yi = y(i, c);
      x(i, c) += v[0] * yi;
      for (Index d = 1; d < bw; ++d) {
        const double w = v[static_cast<std::size_t>(d)] * yi;
        x(reflect(i - d, n), c) += w;
        x(reflect(i + d, n), c) += w;
      }
    }
  }
  return x;
}

// Y = A_1 X with A_1 = toeplitz(v) (zero boundary, symmetric).
Eigen::MatrixXd toeplitz_cols(const Eigen::MatrixXd& x, const std::vector<double>& v) {
  const Index n = x.rows();
  const Index bw = static_cast<Index>(v.size());
  Eigen::MatrixXd y(n, x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index i = 0; i < n; ++i) {
      double acc = v[0] * x(i, c);
      for (Index d = 1; d < bw; ++d) {
        if (i - d >= 0) acc += v[static_cast<std::size_t>(d)] * x(i - d, c);
        if (i + d < n) acc += v[static_cast<std::size_t>(d)] * x(i + d, c);
      }
      y(i, c) = acc;
    }
  }
  return y;
}

Psf make_psf(Index bandwidth, double sigma, double denom) {
  if (bandwidth < 1) throw ConfigError("PSF bandwidth must be at least 1");
  if (!(sigma > 0.0)) throw ConfigError("PSF sigma must be positive");
  Psf psf;
  psf.sigma = sigma;
  psf.v.resize(static_cast<std::size_t>(bandwidth));
  for (Index k = 0; k < bandwidth; ++k) {
    psf.v[static_cast<std::size_t>(k)] = std::exp(-static_cast<double>(k * k) / denom);
  }
  return psf;
}

}  // namespace

Psf gaussian_psf(Index bandwidth, double sigma) {
  return make_psf(bandwidth, sigma, sigma > 0.0 ? std::sqrt(2.0 * sigma) : 0.0);
}

Psf standard_gaussian_psf(Index bandwidth, double sigma) { return make_psf(bandwidth, sigma, 2.0 * sigma * sigma); }

BlurOperator::BlurOperator(Boundary mode, Psf psf, Index rows, Index cols, Index margin)
    : mode_(mode), psf_(std::move(psf)), rows_(rows), cols_(cols), margin_(margin) {
  if (psf_.v.empty()) throw ConfigError("BlurOperator: empty PSF");
  if (rows < 1 || cols < 1) throw ShapeError("BlurOperator: empty image");
  if (psf_.bandwidth() > rows || psf_.bandwidth() > cols) {
    throw ShapeError("BlurOperator: PSF bandwidth " + std::to_string(psf_.bandwidth()) + " exceeds image size " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (mode == Boundary::reflexive) {
    if (margin != 0) throw ConfigError("BlurOperator: margin applies to the trimmed boundary only");
    out_rows_ = rows;
    out_cols_ = cols;
  } else {
    if (margin < 0 || 2 * margin >= rows || 2 * margin >= cols) {
      throw ShapeError("BlurOperator: margin " + std::to_string(margin) + " leaves no pixels of a " +
                       std::to_string(rows) + "x" + std::to_string(cols) + " image");
    }
    out_rows_ = rows - 2 * margin;
    out_cols_ = cols - 2 * margin;
  }
}

double BlurOperator::kernel_mass() const {
  double line = psf_.v[0];
  for (std::size_t k = 1; k < psf_.v.size(); ++k) line += 2.0 * psf_.v[k];
  return line * line;
}

void BlurOperator::apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (x.size() != cols()) throw ShapeError("BlurOperator::apply: wrong input length");
  const Eigen::Map<const Eigen::MatrixXd> img(x.data(), rows_, cols_);
  Eigen::MatrixXd out;
  if (mode_ == Boundary::reflexive) {
    const Eigen::MatrixXd down = reflexive_cols(img, psf_.v);
    out = reflexive_cols(down.transpose(), psf_.v).transpose();
  } else {
    const Eigen::MatrixXd down = toeplitz_cols(img, psf_.v);
    const Eigen::MatrixXd both = toeplitz_cols(down.transpose(), psf_.v).transpose();
    out = both.block(margin_, margin_, out_rows_, out_cols_);
  }
  y = Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

void BlurOperator::adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const {
  if (y.size() != rows()) throw ShapeError("BlurOperator::adjoint: wrong input length");
  const Eigen::Map<const Eigen::MatrixXd> data(y.data(), out_rows_, out_cols_);
  Eigen::MatrixXd out;
  if (mode_ == Boundary::reflexive) {
    const Eigen::MatrixXd down = reflexive_cols_adjoint(data, psf_.v);
    out = reflexive_cols_adjoint(down.transpose(), psf_.v).transpose();
  } else {
    Eigen::MatrixXd embedded = Eigen::MatrixXd::Zero(rows_, cols_);
    embedded.block(margin_, margin_, out_rows_, out_cols_) = data;
    const Eigen::MatrixXd down = toeplitz_cols(embedded, psf_.v);
    out = toeplitz_cols(down.transpose(), psf_.v).transpose();
  }
  x = Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

ImageGray blur_reflexive(const ImageGray& image, const Psf& psf) {
  const BlurOperator op(Boundary::reflexive, psf, image.rows(), image.cols());
  const Eigen::VectorXd y = op.apply(Eigen::Map<const Eigen::VectorXd>(image.data(), image.size()));
  return Eigen::Map<const Eigen::MatrixXd>(y.data(), image.rows(), image.cols());
}

Eigen::VectorXd blur_trimmed(const ImageGray& image, const Psf& psf, Index margin) {
  const BlurOperator op(Boundary::trimmed, psf, image.rows(), image.cols(), margin);
  return op.apply(Eigen::Map<const Eigen::VectorXd>(image.data(), image.size()));
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& b, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) throw ConfigError("add_noise: level must be non-negative");
  if (level == 0.0) return b;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(b.size());
  for (auto& e : g) e = normal(rng);
  const double gn = g.norm();
  if (gn == 0.0) return b;
  const double c = level * b.norm() / gn;
  return b + c * g;
}

// ---------------------------------------------------------------------------

PatchRegularizer::PatchRegularizer(RegularizerMode mode, const PatchGrid& grid, double weight)
    : mode_(mode), weight_(weight), rows_(grid.image_rows()), cols_(grid.image_cols()) {
  if (!(weight >= 0.0)) throw ConfigError("PatchRegularizer: weight must be non-negative");
  if (mode == RegularizerMode::full) {
    for (Index a = 0; a + 1 < rows_; ++a) row_pairs_.push_back(a);
    for (Index a = 0; a + 1 < cols_; ++a) col_pairs_.push_back(a);
  } else {
    for (Index k = 1; k < grid.n_r; ++k) row_pairs_.push_back(k * grid.p - 1);
    for (Index k = 1; k < grid.n_c; ++k) col_pairs_.push_back(k * grid.q - 1);
  }
}

void PatchRegularizer::apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (x.size() != cols()) throw ShapeError("PatchRegularizer::apply: wrong input length");
  const Eigen::Map<const Eigen::MatrixXd> img(x.data(), rows_, cols_);
  y.resize(rows());
  const Index nr = static_cast<Index>(row_pairs_.size());
  const Index nc = static_cast<Index>(col_pairs_.size());
  Eigen::Map<Eigen::MatrixXd> down(y.data(), nr, cols_);
  Eigen::Map<Eigen::MatrixXd> across(y.data() + nr * cols_, rows_, nc);
  for (Index c = 0; c < cols_; ++c) {
    for (Index m = 0; m < nr; ++m) {
      const Index a = row_pairs_[static_cast<std::size_t>(m)];
      down(m, c) = img(a + 1, c) - img(a, c);
    }
  }
  for (Index m = 0; m < nc; ++m) {
    const Index b = col_pairs_[static_cast<std::size_t>(m)];
    across.col(m) = img.col(b + 1) - img.col(b);
  }
}

void PatchRegularizer::adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const {
  if (y.size() != rows()) throw ShapeError("PatchRegularizer::adjoint: wrong input length");
  x.setZero(cols());
  Eigen::Map<Eigen::MatrixXd> img(x.data(), rows_, cols_);
  const Index nr = static_cast<Index>(row_pairs_.size());
  const Index nc = static_cast<Index>(col_pairs_.size());
  const Eigen::Map<const Eigen::MatrixXd> down(y.data(), nr, cols_);
  const Eigen::Map<const Eigen::MatrixXd> across(y.data() + nr * cols_, rows_, nc);
  for (Index c = 0; c < cols_; ++c) {
    for (Index m = 0; m < nr; ++m) {
      const Index a = row_pairs_[static_cast<std::size_t>(m)];
      img(a + 1, c) += down(m, c);
      img(a, c) -= down(m, c);
    }
  }
  for (Index m = 0; m < nc; ++m) {
    const Index b = col_pairs_[static_cast<std::size_t>(m)];
    img.col(b + 1) += across.col(m);
    img.col(b) -= across.col(m);
  }
}

// ---------------------------------------------------------------------------

DictionaryBlurOp::DictionaryBlurOp(LinearOpPtr blur, const Tensor3& dictionary, const PatchGrid& grid,
                                   std::shared_ptr<const PatchRegularizer> regularizer)
    : dictionary_hat_(FourierTensor::forward(dictionary)), perm_(perm_map(grid)), grid_(grid), atoms_(dictionary.cols()) {
  if (!blur) throw ConfigError("composite_op: null blur operator");
  if (dictionary.rows() != grid.p || dictionary.tubes() != grid.q) {
    throw ShapeError("composite_op: dictionary patches are " + std::to_string(dictionary.rows()) + "x" +
                     std::to_string(dictionary.tubes()) + " but the grid uses " + std::to_string(grid.p) + "x" +
                     std::to_string(grid.q));
  }
  if (blur->cols() != grid.pixels()) {
    throw ShapeError("composite_op: blur expects " + std::to_string(blur->cols()) + " pixels, grid has " +
                     std::to_string(grid.pixels()));
  }
  std::vector<StackedOp::Block> blocks{{std::move(blur), 1.0}};
  if (regularizer && regularizer->weight() > 0.0) {
    if (regularizer->cols() != grid.pixels()) throw ShapeError("composite_op: regularizer size mismatch");
    blocks.push_back({regularizer, regularizer->weight()});
  }
  stacked_ = std::make_shared<StackedOp>(std::move(blocks));
}

Eigen::VectorXd DictionaryBlurOp::expand(const Eigen::VectorXd& x) const {
  if (x.size() != cols()) throw ShapeError("DictionaryBlurOp: wrong coefficient length");
  const Tensor3 c = unvec_unfold(x, atoms_, grid_.patches(), grid_.q);
  const Eigen::VectorXd u = vec_unfold(tprod(dictionary_hat_, c));
  Eigen::VectorXd pixels(grid_.pixels());
  for (std::size_t t = 0; t < perm_.size(); ++t) pixels[perm_[t]] = u[static_cast<Index>(t)];
  return pixels;
}

Eigen::VectorXd DictionaryBlurOp::contract(const Eigen::VectorXd& pixels) const {
  Eigen::VectorXd u(grid_.pixels());
  for (std::size_t t = 0; t < perm_.size(); ++t) u[static_cast<Index>(t)] = pixels[perm_[t]];
  const Tensor3 x = unvec_unfold(u, grid_.p, grid_.patches(), grid_.q);
  return vec_unfold(tprod_transposed(dictionary_hat_, x));
}

void DictionaryBlurOp::apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  stacked_->apply_into(expand(x), y);
}

void DictionaryBlurOp::adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const {
  Eigen::VectorXd pixels;
  stacked_->adjoint_into(y, pixels);
  x = contract(pixels);
}

ImageGray DictionaryBlurOp::image_of(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd pixels = expand(x);
  return Eigen::Map<const Eigen::MatrixXd>(pixels.data(), grid_.image_rows(), grid_.image_cols());
}

std::shared_ptr<DictionaryBlurOp> composite_op(LinearOpPtr blur, const Tensor3& dictionary, const PatchGrid& grid,
                                               std::shared_ptr<const PatchRegularizer> regularizer) {
  return std::make_shared<DictionaryBlurOp>(std::move(blur), dictionary, grid, std::move(regularizer));
}

}  // namespace tdict
