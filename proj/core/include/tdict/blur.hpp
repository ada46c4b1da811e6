#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tdict/image.hpp"
#include "tdict/linear_op.hpp"
#include "tdict/patch.hpp"
#include "tdict/tensor3.hpp"
#include "tdict/tproduct.hpp"

namespace tdict {

/// One-sided symmetric kernel: the 1-D blur weight at distance k is v[k].
struct Psf {
  std::vector<double> v;
  double sigma = 0.0;

  Index bandwidth() const { return static_cast<Index>(v.size()); }
};

/// v[k] = exp(-k^2 / sqrt(2 sigma)), k = 0 .. bw - 1. This is the kernel of
/// the trimmed-blur experiments and deliberately not exp(-k^2 / (2 sigma^2)).
Psf gaussian_psf(Index bandwidth, double sigma);
/// Textbook v[k] = exp(-k^2 / (2 sigma^2)).
Psf standard_gaussian_psf(Index bandwidth, double sigma);

enum class Boundary { reflexive, trimmed };

/// Separable blur X -> A_r X A_c^T acting on vec(X) (column-major).
///
/// reflexive: correlation with the symmetric kernel, edges extended by
/// whole-sample reflection (x[-1] = x[1]); output has the input's size.
/// trimmed: zero-boundary Toeplitz blur T = A_1 X A_1 followed by removing
/// `margin` pixels from every side; output has (rows - 2 margin) x
/// (cols - 2 margin) pixels, fewer than the unknowns.
class BlurOperator final : public LinearOp {
 public:
  BlurOperator(Boundary mode, Psf psf, Index rows, Index cols, Index margin = 0);

  Index rows() const override { return out_rows_ * out_cols_; }
  Index cols() const override { return rows_ * cols_; }
  void apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;
  void adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const override;

  Boundary mode() const { return mode_; }
  const Psf& psf() const { return psf_; }
  Index image_rows() const { return rows_; }
  Index image_cols() const { return cols_; }
  Index output_rows() const { return out_rows_; }
  Index output_cols() const { return out_cols_; }
  Index margin() const { return margin_; }

  /// Total weight of the 2-D kernel, (v[0] + 2 sum_{k>0} v[k])^2.
  double kernel_mass() const;

 private:
  Boundary mode_;
  Psf psf_;
  Index rows_;
  Index cols_;
  Index margin_;
  Index out_rows_;
  Index out_cols_;
};

ImageGray blur_reflexive(const ImageGray& image, const Psf& psf);
Eigen::VectorXd blur_trimmed(const ImageGray& image, const Psf& psf, Index margin);

/// b + c g with g standard normal from a seeded generator and c chosen so
/// that |c g| / |b| equals level.
Eigen::VectorXd add_noise(const Eigen::VectorXd& b, double level, std::uint64_t seed);

enum class RegularizerMode { full, patch_jump };

/// L = [I (x) Q_r; Q_c (x) I] on vec(X): first differences down columns
/// stacked on first differences across rows. In full mode Q has a row per
/// adjacent pixel pair; in patch_jump mode only across patch boundaries
/// (pixel p k - 1 to p k). The weight is applied by the composite operator.
class PatchRegularizer final : public LinearOp {
 public:
  PatchRegularizer(RegularizerMode mode, const PatchGrid& grid, double weight);

  Index rows() const override { return static_cast<Index>(row_pairs_.size() * cols_ + col_pairs_.size() * rows_); }
  Index cols() const override { return rows_ * cols_; }
  void apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;
  void adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const override;

  double weight() const { return weight_; }
  RegularizerMode mode() const { return mode_; }

 private:
  RegularizerMode mode_;
  double weight_;
  Index rows_;
  Index cols_;
  // Index pairs (a, a + 1) differenced along each direction.
  std::vector<Index> row_pairs_;
  std::vector<Index> col_pairs_;
};

/// C -> [A(P (I (x) circ D) vec(unfold C)); weight L(...)], with C in
/// vec(unfold(.)) order (s x M x q). Never forms P or the Kronecker
/// product: uses t-products with D, the perm_map scatter, and the blur.
class DictionaryBlurOp final : public LinearOp {
 public:
  DictionaryBlurOp(LinearOpPtr blur, const Tensor3& dictionary, const PatchGrid& grid,
                   std::shared_ptr<const PatchRegularizer> regularizer = nullptr);

  Index rows() const override { return stacked_->rows(); }
  Index cols() const override { return atoms_ * grid_.patches() * grid_.q; }
  void apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;
  void adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const override;

  /// depatchify(D * C) for coefficients in this operator's vector layout.
  ImageGray image_of(const Eigen::VectorXd& x) const;
  Index atoms() const { return atoms_; }
  const PatchGrid& grid() const { return grid_; }

 private:
  Eigen::VectorXd expand(const Eigen::VectorXd& x) const;
  Eigen::VectorXd contract(const Eigen::VectorXd& pixels) const;

  std::shared_ptr<const StackedOp> stacked_;
  FourierTensor dictionary_hat_;
  std::vector<Index> perm_;
  PatchGrid grid_;
  Index atoms_;
};

std::shared_ptr<DictionaryBlurOp> composite_op(LinearOpPtr blur, const Tensor3& dictionary, const PatchGrid& grid,
                                               std::shared_ptr<const PatchRegularizer> regularizer = nullptr);

}  // namespace tdict
