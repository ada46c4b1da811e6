#include "tdict/tproduct.hpp"

#include <unsupported/Eigen/FFT>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

#include "tdict/errors.hpp"

namespace tdict {

namespace {

std::string dims(Index r, Index c, Index n) {
  return std::to_string(r) + "x" + std::to_string(c) + "x" + std::to_string(n);
}

// Imaginary residue tolerated after an inverse transform, relative to the
// magnitude of the result.
constexpr double kImagResidueTol = 1e-9;

// Upper bound on scalars materialized by tprod_naive's circulant.
constexpr double kNaiveCircLimit = 1e8;

void require_product_shapes(Index a_cols, Index a_tubes, Index b_rows, Index b_tubes, const char* op) {
  if (a_cols != b_rows || a_tubes != b_tubes) {
    throw ShapeError(std::string(op) + ": cannot multiply ..x" + std::to_string(a_cols) + "x" +
                     std::to_string(a_tubes) + " by " + std::to_string(b_rows) + "x..x" +
                     std::to_string(b_tubes));
  }
}

}  // namespace

Eigen::MatrixXd unfold(const Tensor3& t) {
  Eigen::MatrixXd m(t.rows() * t.tubes(), t.cols());
  for (Index k = 0; k < t.tubes(); ++k) m.middleRows(k * t.rows(), t.rows()) = t.face(k);
  return m;
}

Tensor3 fold(const Eigen::MatrixXd& m, Index tubes) {
  if (tubes < 1 || m.rows() % tubes != 0) {
    throw ShapeError("fold: " + std::to_string(m.rows()) + " rows not divisible by " + std::to_string(tubes) +
                     " tubes");
  }
  const Index rows = m.rows() / tubes;
  Tensor3 t(rows, m.cols(), tubes);
  for (Index k = 0; k < tubes; ++k) t.face(k) = m.middleRows(k * rows, rows);
  return t;
}

Eigen::MatrixXd circ(const Tensor3& t) {
  const Index l = t.rows(), m = t.cols(), n = t.tubes();
  Eigen::MatrixXd c(l * n, m * n);
  for (Index r = 0; r < n; ++r) {
    for (Index col = 0; col < n; ++col) {
      c.block(r * l, col * m, l, m) = t.face(((r - col) % n + n) % n);
    }
  }
  return c;
}

Eigen::VectorXd vec_unfold(const Tensor3& t) {
  const Eigen::MatrixXd u = unfold(t);
  return Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
}

Tensor3 unvec_unfold(const Eigen::VectorXd& v, Index rows, Index cols, Index tubes) {
  if (v.size() != rows * cols * tubes) {
    throw ShapeError("unvec_unfold: vector of length " + std::to_string(v.size()) + " cannot hold " +
                     dims(rows, cols, tubes));
  }
  return fold(Eigen::Map<const Eigen::MatrixXd>(v.data(), rows * tubes, cols), tubes);
}

Tensor3 matricize(const Tensor3& t) {
  const Eigen::MatrixXd u = unfold(t);
  Tensor3 out(u.rows(), u.cols(), 1);
  out.face(0) = u;
  return out;
}

Tensor3 dematricize(const Tensor3& m, Index tubes) {
  if (m.tubes() != 1) throw ShapeError("dematricize: expected a single frontal slice");
  return fold(Eigen::MatrixXd(m.face(0)), tubes);
}

Eigen::MatrixXd squeeze(const Tensor3& lateral_slice) {
  if (lateral_slice.cols() != 1) {
    throw ShapeError("squeeze: expected a lateral slice, got " +
                     dims(lateral_slice.rows(), lateral_slice.cols(), lateral_slice.tubes()));
  }
  Eigen::MatrixXd m(lateral_slice.rows(), lateral_slice.tubes());
  for (Index k = 0; k < lateral_slice.tubes(); ++k) m.col(k) = lateral_slice.face(k).col(0);
  return m;
}

Tensor3 twist(const Eigen::MatrixXd& m) {
  Tensor3 t(m.rows(), 1, m.cols());
  for (Index k = 0; k < m.cols(); ++k) t.face(k).col(0) = m.col(k);
  return t;
}

// ---------------------------------------------------------------------------

FourierTensor::FourierTensor(Index rows, Index cols, Index tubes) : rows_(rows), cols_(cols) {
  faces_.assign(static_cast<std::size_t>(tubes), Eigen::MatrixXcd::Zero(rows, cols));
}

void FourierTensor::mirror_conjugates() {
  const Index n = tubes();
  for (Index k = independent_faces(); k < n; ++k) face(k) = face(n - k).conjugate();
}

FourierTensor FourierTensor::forward(const Tensor3& t) {
  const Index l = t.rows(), m = t.cols(), n = t.tubes();
  FourierTensor out(l, m, n);
  if (n == 1) {
    out.face(0) = t.face(0).cast<std::complex<double>>();
    return out;
  }
#pragma omp parallel
  {
    Eigen::FFT<double> fft;
    std::vector<double> tube(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> spectrum;
#pragma omp for schedule(static)
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < l; ++i) {
        for (Index k = 0; k < n; ++k) tube[static_cast<std::size_t>(k)] = t(i, j, k);
        fft.fwd(spectrum, tube);
        for (Index k = 0; k < n; ++k) out.faces_[static_cast<std::size_t>(k)](i, j) = spectrum[static_cast<std::size_t>(k)];
      }
    }
  }
  return out;
}

Tensor3 FourierTensor::inverse() const {
  const Index l = rows_, m = cols_, n = tubes();
  Tensor3 out(l, m, n);
  if (n == 1) {
    out.face(0) = face(0).real();
    return out;
  }
  double imag_max = 0.0;
  double spectrum_max = 0.0;
#pragma omp parallel reduction(max : imag_max, spectrum_max)
  {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> tube;
#pragma omp for schedule(static)
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < l; ++i) {
        for (Index k = 0; k < n; ++k) {
          spectrum[static_cast<std::size_t>(k)] = faces_[static_cast<std::size_t>(k)](i, j);
          spectrum_max = std::max(spectrum_max, std::abs(spectrum[static_cast<std::size_t>(k)]));
        }
        fft.inv(tube, spectrum);
        for (Index k = 0; k < n; ++k) {
          out(i, j, k) = tube[static_cast<std::size_t>(k)].real();
          imag_max = std::max(imag_max, std::abs(tube[static_cast<std::size_t>(k)].imag()));
        }
      }
    }
  }
  const double scale = std::max(max_abs(out), spectrum_max / static_cast<double>(n));
  if (imag_max > kImagResidueTol * scale && imag_max > 0.0) {
    throw NumericError("inverse transform: imaginary residue " + std::to_string(imag_max) +
                       " exceeds tolerance for result scale " + std::to_string(scale) +
                       "; transform-domain data is not conjugate symmetric");
  }
  return out;
}

FourierTensor facewise_product(const FourierTensor& a, const FourierTensor& b) {
  require_product_shapes(a.cols(), a.tubes(), b.rows(), b.tubes(), "facewise_product");
  FourierTensor out(a.rows(), b.cols(), a.tubes());
  const Index half = out.independent_faces();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < half; ++k) out.face(k).noalias() = a.face(k) * b.face(k);
  out.mirror_conjugates();
  return out;
}

FourierTensor facewise_adjoint_product(const FourierTensor& a, const FourierTensor& b) {
  if (a.rows() != b.rows() || a.tubes() != b.tubes()) {
    throw ShapeError("facewise_adjoint_product: row or tube mismatch");
  }
  FourierTensor out(a.cols(), b.cols(), a.tubes());
  const Index half = out.independent_faces();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < half; ++k) out.face(k).noalias() = a.face(k).adjoint() * b.face(k);
  out.mirror_conjugates();
  return out;
}

// ---------------------------------------------------------------------------

Tensor3 tprod_naive(const Tensor3& a, const Tensor3& b) {
  require_product_shapes(a.cols(), a.tubes(), b.rows(), b.tubes(), "tprod_naive");
  const double circ_scalars = static_cast<double>(a.rows()) * a.cols() * a.tubes() * a.tubes();
  if (circ_scalars > kNaiveCircLimit) {
    throw ShapeError("tprod_naive: circulant of " + dims(a.rows(), a.cols(), a.tubes()) +
                     " is too large for the reference product");
  }
  const Eigen::MatrixXd product = circ(a) * unfold(b);
  return fold(product, a.tubes());
}

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  require_product_shapes(a.cols(), a.tubes(), b.rows(), b.tubes(), "tprod");
  return tprod(FourierTensor::forward(a), b);
}

Tensor3 tprod(const FourierTensor& a_hat, const Tensor3& b) {
  require_product_shapes(a_hat.cols(), a_hat.tubes(), b.rows(), b.tubes(), "tprod");
  if (a_hat.tubes() == 1) {
    Tensor3 out(a_hat.rows(), b.cols(), 1);
    out.face(0).noalias() = Eigen::MatrixXd(a_hat.face(0).real()) * b.face(0);
    return out;
  }
  return facewise_product(a_hat, FourierTensor::forward(b)).inverse();
}

Tensor3 tprod_transposed(const FourierTensor& a_hat, const Tensor3& b) {
  if (a_hat.rows() != b.rows() || a_hat.tubes() != b.tubes()) {
    throw ShapeError("tprod_transposed: transpose(" + dims(a_hat.rows(), a_hat.cols(), a_hat.tubes()) +
                     ") cannot multiply " + dims(b.rows(), b.cols(), b.tubes()));
  }
  if (a_hat.tubes() == 1) {
    Tensor3 out(a_hat.cols(), b.cols(), 1);
    out.face(0).noalias() = Eigen::MatrixXd(a_hat.face(0).real()).transpose() * b.face(0);
    return out;
  }
  return facewise_adjoint_product(a_hat, FourierTensor::forward(b)).inverse();
}

Tensor3 ttranspose(const Tensor3& a) {
  const Index n = a.tubes();
  Tensor3 out(a.cols(), a.rows(), n);
  out.face(0) = a.face(0).transpose();
  for (Index k = 1; k < n; ++k) out.face(k) = a.face(n - k).transpose();
  return out;
}

FourierTensor tpinv_hat(const Tensor3& a) {
  const FourierTensor a_hat = FourierTensor::forward(a);
  FourierTensor out(a.cols(), a.rows(), a.tubes());
  const Index half = out.independent_faces();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < half; ++k) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a_hat.face(k));
    out.face(k) = cod.pseudoInverse();
  }
  out.mirror_conjugates();
  return out;
}

Tensor3 tpinv(const Tensor3& a) { return tpinv_hat(a).inverse(); }

// ---------------------------------------------------------------------------

double fro_norm(const Tensor3& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

double sum_norm(const Tensor3& a) {
  double s = 0.0;
  for (double x : a.data()) s += std::abs(x);
  return s;
}

double inner(const Tensor3& a, const Tensor3& b) {
  if (!a.same_shape(b)) throw ShapeError("inner: operands differ in shape");
  double s = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t n = 0; n < x.size(); ++n) s += x[n] * y[n];
  return s;
}

}  // namespace tdict
