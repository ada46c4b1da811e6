#include "tdict/tensor3.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdict/errors.hpp"

namespace tdict {

namespace {

std::string dims(const Tensor3& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "x" + std::to_string(t.tubes());
}

void require_same_shape(const Tensor3& a, const Tensor3& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + dims(a) + " vs " + dims(b));
  }
}

template <typename F>
Tensor3 zip(const Tensor3& a, const Tensor3& b, const char* op, F f) {
  require_same_shape(a, b, op);
  Tensor3 out(a.rows(), a.cols(), a.tubes());
  auto x = a.data();
  auto y = b.data();
  auto z = out.data();
  for (std::size_t n = 0; n < z.size(); ++n) z[n] = f(x[n], y[n]);
  return out;
}

template <typename F>
Tensor3 map(const Tensor3& a, F f) {
  Tensor3 out(a.rows(), a.cols(), a.tubes());
  auto x = a.data();
  auto z = out.data();
  for (std::size_t n = 0; n < z.size(); ++n) z[n] = f(x[n]);
  return out;
}

}  // namespace

Tensor3::Tensor3(Index rows, Index cols, Index tubes, double fill)
    : rows_(rows), cols_(cols), tubes_(tubes) {
  if (rows < 1 || cols < 1 || tubes < 1) {
    throw ShapeError("Tensor3: dimensions must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols) + "x" + std::to_string(tubes));
  }
  data_.assign(static_cast<std::size_t>(rows * cols * tubes), fill);
}

Tensor3 Tensor3::identity(Index size, Index tubes) {
  Tensor3 t(size, size, tubes);
  for (Index i = 0; i < size; ++i) t(i, i, 0) = 1.0;
  return t;
}

Tensor3 Tensor3::constant(Index rows, Index cols, Index tubes, double value) {
  return Tensor3(rows, cols, tubes, value);
}

Tensor3::FaceMap Tensor3::face(Index k) {
  return FaceMap(data_.data() + offset(0, 0, k), rows_, cols_);
}

Tensor3::ConstFaceMap Tensor3::face(Index k) const {
  return ConstFaceMap(data_.data() + offset(0, 0, k), rows_, cols_);
}

Tensor3 Tensor3::lateral(Index j) const { return lateral_block(j, 1); }

Tensor3 Tensor3::lateral_block(Index first, Index count) const {
  if (first < 0 || count < 1 || first + count > cols_) {
    throw ShapeError("lateral_block: columns [" + std::to_string(first) + ", " +
                     std::to_string(first + count) + ") out of range for " + dims(*this));
  }
  Tensor3 out(rows_, count, tubes_);
  for (Index k = 0; k < tubes_; ++k) out.face(k) = face(k).middleCols(first, count);
  return out;
}

void Tensor3::set_lateral(Index j, const Tensor3& slice) {
  if (slice.rows() != rows_ || slice.cols() != 1 || slice.tubes() != tubes_ || j < 0 || j >= cols_) {
    throw ShapeError("set_lateral: slice " + dims(slice) + " does not fit column " + std::to_string(j) +
                     " of " + dims(*this));
  }
  for (Index k = 0; k < tubes_; ++k) face(k).col(j) = slice.face(k).col(0);
}

Tensor3 hadamard(const Tensor3& a, const Tensor3& b) {
  return zip(a, b, "hadamard", [](double x, double y) { return x * y; });
}

Tensor3 axpy(double alpha, const Tensor3& a, const Tensor3& b) {
  return zip(a, b, "axpy", [alpha](double x, double y) { return alpha * x + y; });
}

Tensor3 scale(double alpha, const Tensor3& a) {
  return map(a, [alpha](double x) { return alpha * x; });
}

Tensor3 nonneg_clamp(const Tensor3& a, double floor) {
  return map(a, [floor](double x) { return std::max(x, floor); });
}

Tensor3 operator+(const Tensor3& a, const Tensor3& b) {
  return zip(a, b, "operator+", [](double x, double y) { return x + y; });
}

Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
  return zip(a, b, "operator-", [](double x, double y) { return x - y; });
}

Index nnz(const Tensor3& a, double threshold) {
  auto d = a.data();
  return static_cast<Index>(std::count_if(d.begin(), d.end(), [threshold](double x) { return std::abs(x) > threshold; }));
}

double min_entry(const Tensor3& a) {
  auto d = a.data();
  return d.empty() ? 0.0 : *std::min_element(d.begin(), d.end());
}

double max_abs(const Tensor3& a) {
  double m = 0.0;
  for (double x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

Tensor3 concat_lateral(std::span<const Tensor3> parts) {
  if (parts.empty()) throw ShapeError("concat_lateral: no inputs");
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != parts[0].rows() || p.tubes() != parts[0].tubes()) {
      throw ShapeError("concat_lateral: " + dims(p) + " incompatible with " + dims(parts[0]));
    }
    cols += p.cols();
  }
  Tensor3 out(parts[0].rows(), cols, parts[0].tubes());
  Index at = 0;
  for (const auto& p : parts) {
    for (Index k = 0; k < out.tubes(); ++k) out.face(k).middleCols(at, p.cols()) = p.face(k);
    at += p.cols();
  }
  return out;
}

}  // namespace tdict
