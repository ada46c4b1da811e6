#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

#include "tdict/tensor3.hpp"

namespace tdict {

/// Matrix-free linear operator on flat vectors.
class LinearOp {
 public:
  virtual ~LinearOp() = default;

  /// Length of apply()'s output.
  virtual Index rows() const = 0;
  /// Length of apply()'s input.
  virtual Index cols() const = 0;

  virtual void apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;
  virtual void adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const;
};

using LinearOpPtr = std::shared_ptr<const LinearOp>;

class IdentityOp final : public LinearOp {
 public:
  explicit IdentityOp(Index n) : n_(n) {}
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  void apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y = x; }
  void adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const override { x = y; }

 private:
  Index n_;
};

class MatrixOp final : public LinearOp {
 public:
  explicit MatrixOp(Eigen::MatrixXd m) : m_(std::move(m)) {}
  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  void apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y.noalias() = m_ * x; }
  void adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const override { x.noalias() = m_.transpose() * y; }

 private:
  Eigen::MatrixXd m_;
};

/// Vertical stack [w_0 A_0; w_1 A_1; ...] over a common input space. Blocks
/// with zero weight are dropped, so a zero-weighted regularizer leaves the
/// operator identical to the unstacked one.
class StackedOp final : public LinearOp {
 public:
  struct Block {
    LinearOpPtr op;
    double weight = 1.0;
  };

  explicit StackedOp(std::vector<Block> blocks);

  Index rows() const override { return rows_; }
  Index cols() const override { return cols_; }
  void apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;
  void adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const override;

  std::size_t block_count() const { return blocks_.size(); }

 private:
  std::vector<Block> blocks_;
  Index rows_ = 0;
  Index cols_ = 0;
};

/// Largest relative mismatch |<A u, v> - <u, A^T v>| / (|A u| |v|) over
/// random Gaussian probes.
double adjoint_mismatch(const LinearOp& op, int probes = 20, std::uint64_t seed = 7);

}  // namespace tdict
