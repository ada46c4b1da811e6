#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace tdict {

using Index = Eigen::Index;

/// Dense real third-order tensor of size rows x cols x tubes.
///
/// Element (i, j, k) is row i, column j of frontal slice k. Storage is
/// frontal slice by frontal slice, each slice column-major, so a frontal
/// slice is a contiguous Eigen column-major matrix and the raw buffer is
/// exactly the payload order of the T3D1 file format.
class Tensor3 {
 public:
  using FaceMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstFaceMap = Eigen::Map<const Eigen::MatrixXd>;

  Tensor3() = default;
  Tensor3(Index rows, Index cols, Index tubes, double fill = 0.0);

  /// Identity under the t-product: first frontal slice is I, the rest zero.
  static Tensor3 identity(Index size, Index tubes);
  static Tensor3 constant(Index rows, Index cols, Index tubes, double value);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index tubes() const { return tubes_; }
  Index size() const { return rows_ * cols_ * tubes_; }
  bool empty() const { return data_.empty(); }

  bool same_shape(const Tensor3& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && tubes_ == other.tubes_;
  }

  Index offset(Index i, Index j, Index k) const { return i + rows_ * (j + cols_ * k); }

  double& operator()(Index i, Index j, Index k) { return data_[static_cast<std::size_t>(offset(i, j, k))]; }
  double operator()(Index i, Index j, Index k) const { return data_[static_cast<std::size_t>(offset(i, j, k))]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  FaceMap face(Index k);
  ConstFaceMap face(Index k) const;

  /// Lateral slice j as a rows x 1 x tubes tensor.
  Tensor3 lateral(Index j) const;
  void set_lateral(Index j, const Tensor3& slice);

  /// Columns [first, first + count) as a new tensor.
  Tensor3 lateral_block(Index first, Index count) const;

  bool operator==(const Tensor3& other) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Index tubes_ = 0;
  std::vector<double> data_;
};

// Elementwise kernels.
Tensor3 hadamard(const Tensor3& a, const Tensor3& b);
/// alpha * a + b
Tensor3 axpy(double alpha, const Tensor3& a, const Tensor3& b);
Tensor3 scale(double alpha, const Tensor3& a);
/// Entrywise max(a, floor).
Tensor3 nonneg_clamp(const Tensor3& a, double floor);
Tensor3 operator+(const Tensor3& a, const Tensor3& b);
Tensor3 operator-(const Tensor3& a, const Tensor3& b);

/// Entries strictly greater than threshold in magnitude.
Index nnz(const Tensor3& a, double threshold = 1e-12);
double min_entry(const Tensor3& a);
double max_abs(const Tensor3& a);

/// Lateral concatenation; all inputs must share rows and tubes.
Tensor3 concat_lateral(std::span<const Tensor3> parts);

}  // namespace tdict
