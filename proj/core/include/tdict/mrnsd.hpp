#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tdict/linear_op.hpp"
#include "tdict/tensor3.hpp"

namespace tdict {

/// Entries above this magnitude count as non-zero in reports.
inline constexpr double kNnzThreshold = 1e-12;

/// State handed to an observer after every iteration. x and gradient are
/// the coefficients and the gradient -A^T (b - A x) in storage order.
struct IterationView {
  int iter = 0;
  std::span<const double> x;
  std::span<const double> gradient;
  double objective = 0.0;
  double alpha = 0.0;
  double theta = 0.0;
};

struct MrnsdConfig {
  int max_iters = 200;
  /// Sum-norm weight; only the sparse variants use it.
  double lambda = 0.0;
  /// Initial guesses are clamped to at least this value.
  double floor = 1e-8;
  /// Stop when |f_k - f_{k-1}| / f_{k-1} falls below this. Zero disables.
  double stop_tol = 0.0;
  /// History stride; the first and last iterations are always recorded.
  int record_every = 1;
  std::function<void(const IterationView&)> observer;

  void validate() const;
};

struct SolveRecord {
  int iter = 0;
  double objective = 0.0;  ///< 0.5 * |b - A x|^2
  double residual = 0.0;   ///< |b - A x|
  Index nnz = 0;
  double alpha = 0.0;
  double theta = 0.0;
};

struct SolveReport {
  std::vector<SolveRecord> history;
  int iterations = 0;
  bool stagnated = false;
  bool converged = false;
  double seconds = 0.0;

  /// Header "iter,objective,residual,nnz,alpha,theta" then one row per record.
  std::string to_csv() const;
};

struct StepSize {
  double theta = 0.0;  ///< unconstrained minimizer along -S
  double alpha = 0.0;  ///< theta limited so that C - alpha S stays non-negative
  /// Storage index of the entry that limits alpha, or -1 when alpha = theta.
  /// The step sets that entry to exactly zero.
  std::ptrdiff_t blocking = -1;
};

/// theta = <S, G> / |W|^2 and alpha = min(theta, min over S > 0 of C / S).
/// Throws NumericError when |W| = 0 (the operator annihilates S).
StepSize step_size(std::span<const double> s, std::span<const double> g, std::span<const double> c,
                   double w_norm_sq);
StepSize step_size(const Tensor3& s, const Tensor3& g, const Tensor3& w, const Tensor3& c);

/// S = C .* G
Tensor3 search_direction(const Tensor3& c, const Tensor3& g);

/// Soft-threshold: sign(t) max(|t| - mu, 0).
double soft_threshold(double t, double mu);

struct TensorSolution {
  Tensor3 coefficients;
  SolveReport report;
};

struct VectorSolution {
  Eigen::VectorXd x;
  SolveReport report;
};

/// Non-negative least squares min |B - D * C| over C >= 0 by tensor MRNSD.
/// cfg.lambda is ignored; see mrnsd_sparse.
TensorSolution mrnsd(const Tensor3& dictionary, const Tensor3& b, const Tensor3& c0, const MrnsdConfig& cfg);

/// MRNSD with the soft-thresholded coefficient update, which adds
/// cfg.lambda * |C|_sum to the objective.
TensorSolution mrnsd_sparse(const Tensor3& dictionary, const Tensor3& b, const Tensor3& c0, const MrnsdConfig& cfg);

/// Operator form of the same iteration. Honors cfg.lambda. The operator's
/// adjoint is probed before iterating; a mismatch above 1e-8 is a
/// ConfigError.
VectorSolution mrnsd_op(const LinearOp& op, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                        const MrnsdConfig& cfg);

/// tpinv(D) * ones(p x M x q), clamped below at floor. M is b.cols().
Tensor3 initial_guess(const Tensor3& dictionary, const Tensor3& b, double floor = 1e-8);

}  // namespace tdict
