#include "tdict/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tdict/errors.hpp"

namespace tdict {

double rel_err(std::span<const double> x, std::span<const double> ref) {
  if (x.size() != ref.size()) {
    throw ShapeError("rel_err: sizes differ (" + std::to_string(x.size()) + " vs " + std::to_string(ref.size()) + ")");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw ConfigError("rel_err: reference has zero norm");
  return std::sqrt(num / den);
}

double rel_err(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref) {
  if (x.rows() != ref.rows() || x.cols() != ref.cols()) {
    throw ShapeError("rel_err: " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " vs " +
                     std::to_string(ref.rows()) + "x" + std::to_string(ref.cols()));
  }
  return rel_err(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                 std::span<const double>(ref.data(), static_cast<std::size_t>(ref.size())));
}

double rel_err(const Tensor3& x, const Tensor3& ref) {
  if (!x.same_shape(ref)) throw ShapeError("rel_err: tensor shapes differ");
  return rel_err(x.data(), ref.data());
}

namespace {

std::vector<double> gaussian_window(int n, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(n));
  const double c = 0.5 * (n - 1);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = i - c;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += w[static_cast<std::size_t>(i)];
  }
  for (double& e : w) e /= total;
  return w;
}

// Valid-region separable filtering: out(i, j) = sum_ab wr[a] wc[b] m(i + a, j + b).
Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& m, const std::vector<double>& wr, const std::vector<double>& wc) {
  const Index nr = static_cast<Index>(wr.size());
  const Index nc = static_cast<Index>(wc.size());
  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(m.rows() - nr + 1, m.cols());
  for (Index a = 0; a < nr; ++a) tmp += wr[static_cast<std::size_t>(a)] * m.middleRows(a, tmp.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(tmp.rows(), m.cols() - nc + 1);
  for (Index b = 0; b < nc; ++b) out += wc[static_cast<std::size_t>(b)] * tmp.middleCols(b, out.cols());
  return out;
}

}  // namespace

double ssim(const ImageGray& x, const ImageGray& y, const SsimOptions& options) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("ssim: " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " vs " +
                     std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
  if (x.size() == 0) throw ShapeError("ssim: empty image");
  if (options.window < 1 || !(options.sigma > 0.0) || !(options.dynamic_range > 0.0)) {
    throw ConfigError("ssim: invalid window options");
  }
  const auto wr = gaussian_window(static_cast<int>(std::min<Index>(options.window, x.rows())), options.sigma);
  const auto wc = gaussian_window(static_cast<int>(std::min<Index>(options.window, x.cols())), options.sigma);
  const double c1 = std::pow(options.k1 * options.dynamic_range, 2);
  const double c2 = std::pow(options.k2 * options.dynamic_range, 2);

  const Eigen::MatrixXd mx = filter_valid(x, wr, wc);
  const Eigen::MatrixXd my = filter_valid(y, wr, wc);
  const Eigen::MatrixXd sxx = filter_valid(x.cwiseProduct(x), wr, wc) - mx.cwiseProduct(mx);
  const Eigen::MatrixXd syy = filter_valid(y.cwiseProduct(y), wr, wc) - my.cwiseProduct(my);
  const Eigen::MatrixXd sxy = filter_valid(x.cwiseProduct(y), wr, wc) - mx.cwiseProduct(my);

  double total = 0.0;
  for (Index j = 0; j < mx.cols(); ++j) {
    for (Index i = 0; i < mx.rows(); ++i) {
      const double num = (2.0 * mx(i, j) * my(i, j) + c1) * (2.0 * sxy(i, j) + c2);
      const double den = (mx(i, j) * mx(i, j) + my(i, j) * my(i, j) + c1) * (sxx(i, j) + syy(i, j) + c2);
      total += num / den;
    }
  }
  return total / static_cast<double>(mx.size());
}

CompressionReport compression_report(const Tensor3& coefficients, const Tensor3& dictionary, Index pixels,
                                     double rel_err) {
  if (pixels <= 0) throw ShapeError("compression_report: pixel count must be positive");
  CompressionReport r;
  r.nnz_coefficients = nnz(coefficients, 1e-12);
  r.nnz_dictionary = nnz(dictionary, 1e-12);
  r.pixels = pixels;
  r.ratio_amortized = static_cast<double>(r.nnz_coefficients) / static_cast<double>(pixels);
  r.ratio_with_dict = static_cast<double>(r.nnz_coefficients + r.nnz_dictionary) / static_cast<double>(pixels);
  r.rel_err = rel_err;
  return r;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string CompressionReport::to_json() const {
  return "{\"nnz_coefficients\": " + std::to_string(nnz_coefficients) +
         ", \"nnz_dictionary\": " + std::to_string(nnz_dictionary) + ", \"pixels\": " + std::to_string(pixels) +
         ", \"ratio_with_dict\": " + num(ratio_with_dict) + ", \"ratio_amortized\": " + num(ratio_amortized) +
         ", \"rel_err\": " + num(rel_err) + "}";
}

std::string CompressionReport::csv_header() {
  return "nnz_coefficients,nnz_dictionary,pixels,ratio_with_dict,ratio_amortized,rel_err";
}

std::string CompressionReport::to_csv_row() const {
  return std::to_string(nnz_coefficients) + "," + std::to_string(nnz_dictionary) + "," + std::to_string(pixels) + "," +
         num(ratio_with_dict) + "," + num(ratio_amortized) + "," + num(rel_err);
}

}  // namespace tdict
