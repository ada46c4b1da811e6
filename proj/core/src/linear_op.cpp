#include "tdict/linear_op.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tdict/errors.hpp"

namespace tdict {

Eigen::VectorXd LinearOp::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols()) {
    throw ShapeError("LinearOp::apply: input length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(cols()));
  }
  Eigen::VectorXd y(rows());
  apply_into(x, y);
  return y;
}

Eigen::VectorXd LinearOp::adjoint(const Eigen::VectorXd& y) const {
  if (y.size() != rows()) {
    throw ShapeError("LinearOp::adjoint: input length " + std::to_string(y.size()) + ", expected " +
                     std::to_string(rows()));
  }
  Eigen::VectorXd x(cols());
  adjoint_into(y, x);
  return x;
}

StackedOp::StackedOp(std::vector<Block> blocks) {
  for (auto& b : blocks) {
    if (!b.op) throw ConfigError("StackedOp: null block");
    if (b.weight == 0.0) continue;
    if (!blocks_.empty() && b.op->cols() != blocks_.front().op->cols()) {
      throw ShapeError("StackedOp: blocks disagree on input length");
    }
    rows_ += b.op->rows();
    blocks_.push_back(std::move(b));
  }
  if (blocks_.empty()) throw ConfigError("StackedOp: every block has zero weight");
  cols_ = blocks_.front().op->cols();
}

void StackedOp::apply_into(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.resize(rows_);
  Index at = 0;
  Eigen::VectorXd part;
  for (const auto& b : blocks_) {
    b.op->apply_into(x, part);
    if (b.weight == 1.0) {
      y.segment(at, part.size()) = part;
    } else {
      y.segment(at, part.size()) = b.weight * part;
    }
    at += part.size();
  }
}

void StackedOp::adjoint_into(const Eigen::VectorXd& y, Eigen::VectorXd& x) const {
  x.setZero(cols_);
  Index at = 0;
  Eigen::VectorXd part;
  for (const auto& b : blocks_) {
    const Index n = b.op->rows();
    b.op->adjoint_into(y.segment(at, n), part);
    if (b.weight == 1.0) {
      x += part;
    } else {
      x += b.weight * part;
    }
    at += n;
  }
}

double adjoint_mismatch(const LinearOp& op, int probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    Eigen::VectorXd u(op.cols());
    Eigen::VectorXd v(op.rows());
    for (auto& e : u) e = normal(rng);
    for (auto& e : v) e = normal(rng);
    const Eigen::VectorXd au = op.apply(u);
    const Eigen::VectorXd atv = op.adjoint(v);
    const double lhs = au.dot(v);
    const double rhs = u.dot(atv);
    const double scale = std::max(au.norm() * v.norm(), u.norm() * atv.norm());
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace tdict
