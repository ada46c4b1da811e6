#pragma once

#include <Eigen/Core>

#include <complex>
#include <vector>

#include "tdict/tensor3.hpp"

namespace tdict {

// ---------------------------------------------------------------------------
// Reshaping.
// ---------------------------------------------------------------------------

/// Block-column stack of the frontal slices: (rows * tubes) x cols.
Eigen::MatrixXd unfold(const Tensor3& t);
/// Inverse of unfold; m.rows() must be divisible by tubes.
Tensor3 fold(const Eigen::MatrixXd& m, Index tubes);

/// Block-circulant matrix whose block (r, c) is face ((r - c) mod n).
Eigen::MatrixXd circ(const Tensor3& t);

/// vec(unfold(t)), column-major.
Eigen::VectorXd vec_unfold(const Tensor3& t);
Tensor3 unvec_unfold(const Eigen::VectorXd& v, Index rows, Index cols, Index tubes);

/// unfold(t) viewed as a (rows * tubes) x cols x 1 tensor.
Tensor3 matricize(const Tensor3& t);
Tensor3 dematricize(const Tensor3& m, Index tubes);

/// Lateral slice (rows x 1 x tubes) to a rows x tubes matrix, and back.
Eigen::MatrixXd squeeze(const Tensor3& lateral_slice);
Tensor3 twist(const Eigen::MatrixXd& m);

// ---------------------------------------------------------------------------
// Transform domain.
// ---------------------------------------------------------------------------

/// A tensor after a length-n DFT along the third dimension, stored as n
/// complex frontal faces. Faces n-k and k of a real tensor are conjugate.
class FourierTensor {
 public:
  FourierTensor() = default;
  FourierTensor(Index rows, Index cols, Index tubes);

  static FourierTensor forward(const Tensor3& t);
  /// Inverse transform. Throws NumericError if the imaginary residue of the
  /// result exceeds 1e-9 of the result scale.
  Tensor3 inverse() const;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index tubes() const { return static_cast<Index>(faces_.size()); }

  Eigen::MatrixXcd& face(Index k) { return faces_[static_cast<std::size_t>(k)]; }
  const Eigen::MatrixXcd& face(Index k) const { return faces_[static_cast<std::size_t>(k)]; }

  /// Number of faces that must be computed explicitly; the rest follow by
  /// conjugate symmetry.
  Index independent_faces() const { return tubes() / 2 + 1; }
  /// Fill faces above independent_faces() from their conjugate partners.
  void mirror_conjugates();

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Eigen::MatrixXcd> faces_;
};

/// Facewise a_k * b_k.
FourierTensor facewise_product(const FourierTensor& a, const FourierTensor& b);
/// Facewise a_k^H * b_k, i.e. the transform of transpose(a) * b.
FourierTensor facewise_adjoint_product(const FourierTensor& a, const FourierTensor& b);

// ---------------------------------------------------------------------------
// Products.
// ---------------------------------------------------------------------------

/// Reference t-product fold(circ(a) * unfold(b)). Quadratic in the tube
/// length and materializes circ(a); refuses inputs whose circulant would
/// exceed 1e8 scalars. Intended as a test oracle.
Tensor3 tprod_naive(const Tensor3& a, const Tensor3& b);

/// t-product through the DFT along the third dimension.
Tensor3 tprod(const Tensor3& a, const Tensor3& b);
/// Same, with a already transformed (reused across many products).
Tensor3 tprod(const FourierTensor& a_hat, const Tensor3& b);
/// transpose(a) * b with a already transformed.
Tensor3 tprod_transposed(const FourierTensor& a_hat, const Tensor3& b);

/// t-transpose: transpose each face, keep face 1, reverse faces 2..n.
Tensor3 ttranspose(const Tensor3& a);

/// Tensor pseudoinverse: facewise Moore-Penrose inverse in the transform
/// domain.
Tensor3 tpinv(const Tensor3& a);
FourierTensor tpinv_hat(const Tensor3& a);

// ---------------------------------------------------------------------------
// Norms.
// ---------------------------------------------------------------------------

double fro_norm(const Tensor3& a);
double sum_norm(const Tensor3& a);
/// trace((a^T * b)^(1)), which equals the entrywise sum of a .* b.
double inner(const Tensor3& a, const Tensor3& b);

}  // namespace tdict
