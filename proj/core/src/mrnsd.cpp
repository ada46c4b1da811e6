#include "tdict/mrnsd.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "tdict/errors.hpp"
#include "tdict/tproduct.hpp"

namespace tdict {

namespace {

// Consecutive zero-length steps after which the solve is declared stagnant.
constexpr int kMaxZeroSteps = 5;
constexpr double kAdjointProbeTol = 1e-8;

class HistoryRecorder {
 public:
  HistoryRecorder(const MrnsdConfig& cfg, SolveReport& report) : every_(cfg.record_every), report_(report) {}

  void add(const SolveRecord& r) {
    last_ = r;
    if (r.iter % every_ == 0) {
      report_.history.push_back(r);
    }
  }

  void finish(int iterations) {
    report_.iterations = iterations;
    if (report_.history.empty() || report_.history.back().iter != last_.iter) report_.history.push_back(last_);
  }

 private:
  int every_;
  SolveReport& report_;
  SolveRecord last_;
};

Index count_nnz(std::span<const double> x) {
  Index n = 0;
  for (double v : x) n += std::abs(v) > kNnzThreshold ? 1 : 0;
  return n;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_finite(double objective, int iter) {
  if (!std::isfinite(objective)) {
    throw NumericError("MRNSD: non-finite objective at iteration " + std::to_string(iter));
  }
}

// C <- C - alpha S, then the proximal shrink when sparse. Entries the step
// limit drives to zero can round to -1e-17; they are pinned at zero.
void take_step(std::span<double> c, std::span<const double> s, const StepSize& step, bool sparse, double mu) {
  for (std::size_t n = 0; n < c.size(); ++n) {
    double v = c[n] - step.alpha * s[n];
    if (sparse) v = soft_threshold(v, mu);
    c[n] = v < 0.0 ? 0.0 : v;
  }
  if (step.blocking >= 0) c[static_cast<std::size_t>(step.blocking)] = 0.0;
}

bool all_zero(std::span<const double> x) {
  for (double v : x) {
    if (v != 0.0) return false;
  }
  return true;
}

std::string dims(const Tensor3& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "x" + std::to_string(t.tubes());
}

TensorSolution run_tensor(const Tensor3& d, const Tensor3& b, const Tensor3& c0, const MrnsdConfig& cfg,
                          bool sparse) {
  cfg.validate();
  if (d.rows() != b.rows() || d.tubes() != b.tubes() || c0.rows() != d.cols() || c0.cols() != b.cols() ||
      c0.tubes() != d.tubes()) {
    throw ShapeError("mrnsd: dictionary " + dims(d) + ", data " + dims(b) + " and initial guess " + dims(c0) +
                     " do not conform");
  }
  const double lambda = sparse ? cfg.lambda : 0.0;
  const auto start = std::chrono::steady_clock::now();

  TensorSolution out;
  SolveReport& report = out.report;
  HistoryRecorder recorder(cfg, report);

  const FourierTensor d_hat = FourierTensor::forward(d);
  Tensor3 c = nonneg_clamp(c0, cfg.floor);
  Tensor3 r = b - tprod(d_hat, c);
  Tensor3 g = scale(-1.0, tprod_transposed(d_hat, r));
  double f = 0.5 * inner(r, r);
  check_finite(f, 0);
  recorder.add({0, f, std::sqrt(2.0 * f), nnz(c, kNnzThreshold), 0.0, 0.0});
  if (cfg.observer) cfg.observer({0, c.data(), g.data(), f, 0.0, 0.0});

  int zero_steps = 0;
  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    const Tensor3 s = search_direction(c, g);
    if (all_zero(s.data())) {
      report.converged = true;
      --iter;
      break;
    }
    // Single-tube dictionaries are plain matrices; everything else reuses
    // the transform of W for the gradient update.
    const bool matrix_case = d.tubes() == 1;
    const FourierTensor w_hat = matrix_case ? FourierTensor() : facewise_product(d_hat, FourierTensor::forward(s));
    const Tensor3 w = matrix_case ? tprod(d_hat, s) : w_hat.inverse();
    StepSize step;
    try {
      step = step_size(s, g, w, c);
    } catch (const NumericError&) {
      report.stagnated = true;
      --iter;
      break;
    }
    const double mu = step.alpha * lambda;
    take_step(c.data(), s.data(), step, sparse, mu);
    if (mu > 0.0) {
      // The shrink moves C off the line C - alpha S, so the residual and
      // gradient recurrences no longer hold.
      r = b - tprod(d_hat, c);
      g = scale(-1.0, tprod_transposed(d_hat, r));
    } else {
      r = axpy(step.alpha, w, r);
      const Tensor3 dtw = matrix_case ? tprod_transposed(d_hat, w) : facewise_adjoint_product(d_hat, w_hat).inverse();
      g = axpy(-step.alpha, dtw, g);
    }
    const double f_next = 0.5 * inner(r, r);
    check_finite(f_next, iter);
    recorder.add({iter, f_next, std::sqrt(2.0 * f_next), nnz(c, kNnzThreshold), step.alpha, step.theta});
    if (cfg.observer) cfg.observer({iter, c.data(), g.data(), f_next, step.alpha, step.theta});

    zero_steps = step.alpha == 0.0 ? zero_steps + 1 : 0;
    if (zero_steps >= kMaxZeroSteps) {
      report.stagnated = true;
      break;
    }
    const bool small_change = cfg.stop_tol > 0.0 && std::abs(f - f_next) <= cfg.stop_tol * f;
    f = f_next;
    if (small_change) {
      report.converged = true;
      break;
    }
  }
  recorder.finish(std::min(iter, cfg.max_iters));
  report.seconds = seconds_since(start);
  out.coefficients = std::move(c);
  return out;
}

}  // namespace

void MrnsdConfig::validate() const {
  if (max_iters < 1) throw ConfigError("MRNSD: max_iters must be at least 1");
  if (!(lambda >= 0.0)) throw ConfigError("MRNSD: lambda must be non-negative");
  if (!(floor > 0.0)) throw ConfigError("MRNSD: positivity floor must be positive");
  if (!(stop_tol >= 0.0)) throw ConfigError("MRNSD: stop_tol must be non-negative");
  if (record_every < 1) throw ConfigError("MRNSD: record_every must be at least 1");
}

std::string SolveReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "iter,objective,residual,nnz,alpha,theta\n";
  for (const auto& r : history) {
    out << r.iter << ',' << r.objective << ',' << r.residual << ',' << r.nnz << ',' << r.alpha << ',' << r.theta
        << '\n';
  }
  return out.str();
}

double soft_threshold(double t, double mu) {
  if (t > mu) return t - mu;
  if (t < -mu) return t + mu;
  return 0.0;
}

Tensor3 search_direction(const Tensor3& c, const Tensor3& g) { return hadamard(c, g); }

StepSize step_size(std::span<const double> s, std::span<const double> g, std::span<const double> c,
                   double w_norm_sq) {
  if (s.size() != g.size() || s.size() != c.size()) throw ShapeError("step_size: operand lengths differ");
  double sg = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) sg += s[n] * g[n];
  if (!(w_norm_sq > 0.0)) {
    throw NumericError("step_size: operator annihilates the search direction (|W| = 0)");
  }
  StepSize out;
  out.theta = sg / w_norm_sq;
  double ratio = std::numeric_limits<double>::infinity();
  std::ptrdiff_t arg = -1;
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (s[n] > 0.0 && c[n] / s[n] < ratio) {
      ratio = c[n] / s[n];
      arg = static_cast<std::ptrdiff_t>(n);
    }
  }
  out.alpha = std::min(out.theta, ratio);
  if (ratio < out.theta) out.blocking = arg;
  return out;
}

StepSize step_size(const Tensor3& s, const Tensor3& g, const Tensor3& w, const Tensor3& c) {
  if (!s.same_shape(g) || !s.same_shape(c)) throw ShapeError("step_size: S, G and C differ in shape");
  return step_size(s.data(), g.data(), c.data(), inner(w, w));
}

TensorSolution mrnsd(const Tensor3& dictionary, const Tensor3& b, const Tensor3& c0, const MrnsdConfig& cfg) {
  return run_tensor(dictionary, b, c0, cfg, false);
}

TensorSolution mrnsd_sparse(const Tensor3& dictionary, const Tensor3& b, const Tensor3& c0, const MrnsdConfig& cfg) {
  return run_tensor(dictionary, b, c0, cfg, true);
}

VectorSolution mrnsd_op(const LinearOp& op, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                        const MrnsdConfig& cfg) {
  cfg.validate();
  if (b.size() != op.rows() || x0.size() != op.cols()) {
    throw ShapeError("mrnsd_op: operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                     " but data has length " + std::to_string(b.size()) + " and initial guess " +
                     std::to_string(x0.size()));
  }
  const double mismatch = adjoint_mismatch(op, 3, 11);
  if (!(mismatch <= kAdjointProbeTol)) {
    throw ConfigError("mrnsd_op: operator adjoint is inconsistent (relative mismatch " + std::to_string(mismatch) +
                      ")");
  }
  const bool sparse = cfg.lambda > 0.0;
  const auto start = std::chrono::steady_clock::now();

  VectorSolution out;
  SolveReport& report = out.report;
  HistoryRecorder recorder(cfg, report);

  Eigen::VectorXd x = x0.cwiseMax(cfg.floor);
  Eigen::VectorXd r = b - op.apply(x);
  Eigen::VectorXd g = -op.adjoint(r);
  Eigen::VectorXd s(x.size());
  Eigen::VectorXd w(op.rows());
  Eigen::VectorXd atw(op.cols());
  auto span_of = [](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(v.size())); };

  double f = 0.5 * r.squaredNorm();
  check_finite(f, 0);
  recorder.add({0, f, std::sqrt(2.0 * f), count_nnz(span_of(x)), 0.0, 0.0});
  if (cfg.observer) cfg.observer({0, span_of(x), span_of(g), f, 0.0, 0.0});

  int zero_steps = 0;
  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    s = x.cwiseProduct(g);
    if (all_zero(span_of(s))) {
      report.converged = true;
      --iter;
      break;
    }
    op.apply_into(s, w);
    StepSize step;
    try {
      step = step_size(span_of(s), span_of(g), span_of(x), w.squaredNorm());
    } catch (const NumericError&) {
      report.stagnated = true;
      --iter;
      break;
    }
    const double mu = step.alpha * cfg.lambda;
    take_step(std::span<double>(x.data(), static_cast<std::size_t>(x.size())), span_of(s), step, sparse, mu);
    if (mu > 0.0) {
      r = b - op.apply(x);
      g = -op.adjoint(r);
    } else {
      r += step.alpha * w;
      op.adjoint_into(w, atw);
      g -= step.alpha * atw;
    }
    const double f_next = 0.5 * r.squaredNorm();
    check_finite(f_next, iter);
    recorder.add({iter, f_next, std::sqrt(2.0 * f_next), count_nnz(span_of(x)), step.alpha, step.theta});
    if (cfg.observer) cfg.observer({iter, span_of(x), span_of(g), f_next, step.alpha, step.theta});

    zero_steps = step.alpha == 0.0 ? zero_steps + 1 : 0;
    if (zero_steps >= kMaxZeroSteps) {
      report.stagnated = true;
      break;
    }
    const bool small_change = cfg.stop_tol > 0.0 && std::abs(f - f_next) <= cfg.stop_tol * f;
    f = f_next;
    if (small_change) {
      report.converged = true;
      break;
    }
  }
  recorder.finish(std::min(iter, cfg.max_iters));
  report.seconds = seconds_since(start);
  out.x = std::move(x);
  return out;
}

Tensor3 initial_guess(const Tensor3& dictionary, const Tensor3& b, double floor) {
  if (dictionary.rows() != b.rows() || dictionary.tubes() != b.tubes()) {
    throw ShapeError("initial_guess: dictionary " + dims(dictionary) + " does not match data " + dims(b));
  }
  const Tensor3 ones = Tensor3::constant(b.rows(), b.cols(), b.tubes(), 1.0);
  return nonneg_clamp(tprod(tpinv_hat(dictionary), ones), floor);
}

}  // namespace tdict
