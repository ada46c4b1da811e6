#include "support.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unistd.h>

namespace tdict::testing {

ImageGray smooth_image(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Blob {
    double x, y, width, height;
  };
  std::vector<Blob> blobs(5);
  for (auto& b : blobs) b = {unit(rng), unit(rng), 0.08 + 0.2 * unit(rng), 2.0 * unit(rng) - 1.0};
  const double fx = 1.0 + 2.0 * unit(rng);
  const double fy = 1.0 + 2.0 * unit(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double angle = std::numbers::pi * unit(rng);
  const double offset = unit(rng) - 0.5;
  const double bias = 0.6 * unit(rng) - 0.3;

  ImageGray img(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(cols);
    for (Index i = 0; i < rows; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
      double g = bias + 0.5 * std::sin(2.0 * std::numbers::pi * (fx * u + fy * v) + phase);
      for (const auto& b : blobs) {
        const double d2 = (u - b.x) * (u - b.x) + (v - b.y) * (v - b.y);
        g += 2.0 * b.height * std::exp(-d2 / (2.0 * b.width * b.width));
      }
      const double edge = std::cos(angle) * (u - 0.5) + std::sin(angle) * (v - 0.5) - 0.3 * offset;
      g += 1.2 * std::tanh(edge / 0.04);
      img(i, j) = 1.0 / (1.0 + std::exp(-g));
    }
  }
  return img;
}

ImageGray scene_image(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5ce9e5ce9eULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Ellipse {
    double x, y, a, b, angle, level;
  };
  std::vector<Ellipse> shapes(4);
  for (auto& e : shapes) {
    e = {unit(rng), unit(rng), 0.08 + 0.25 * unit(rng), 0.08 + 0.25 * unit(rng), std::numbers::pi * unit(rng),
         2.4 * unit(rng) - 1.2};
  }
  const double gx = 2.0 * unit(rng) - 1.0;
  const double gy = 2.0 * unit(rng) - 1.0;
  const double angle = std::numbers::pi * unit(rng);
  const double offset = 0.4 * unit(rng) - 0.2;
  const double step = 1.6 * unit(rng) - 0.8;
  const double freq = 3.0 + 4.0 * unit(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  constexpr double kEdge = 0.004;

  ImageGray img(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(cols);
    for (Index i = 0; i < rows; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
      double g = gx * (u - 0.5) + gy * (v - 0.5) + 0.25 * std::sin(2.0 * std::numbers::pi * freq * (u + 0.7 * v) + phase);
      const double side = std::cos(angle) * (u - 0.5) + std::sin(angle) * (v - 0.5) - offset;
      g += step * std::tanh(side / kEdge);
      for (const auto& e : shapes) {
        const double du = u - e.x, dv = v - e.y;
        const double pu = (std::cos(e.angle) * du + std::sin(e.angle) * dv) / e.a;
        const double pv = (-std::sin(e.angle) * du + std::cos(e.angle) * dv) / e.b;
        const double radius = std::sqrt(pu * pu + pv * pv);
        g += e.level * 0.5 * (1.0 - std::tanh((radius - 1.0) * std::min(e.a, e.b) / kEdge));
      }
      img(i, j) = 1.0 / (1.0 + std::exp(-g));
    }
  }
  return img;
}

Tensor3 random_tensor(Index rows, Index cols, Index tubes, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor3 t(rows, cols, tubes);
  for (double& e : t.data()) e = dist(rng);
  return t;
}

Eigen::MatrixXd random_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

std::vector<Eigen::MatrixXd> matrix_mrnsd_iterates(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                   const Eigen::MatrixXd& x0, int iters) {
  std::vector<Eigen::MatrixXd> out{x0};
  Eigen::MatrixXd x = x0;
  Eigen::MatrixXd r = b - a * x;
  Eigen::MatrixXd g = -a.transpose() * r;
  for (int k = 0; k < iters; ++k) {
    const Eigen::MatrixXd s = x.cwiseProduct(g);
    const Eigen::MatrixXd w = a * s;
    double ww = 0.0;
    double sg = 0.0;
    for (Index i = 0; i < w.size(); ++i) ww += w.data()[i] * w.data()[i];
    for (Index i = 0; i < s.size(); ++i) sg += s.data()[i] * g.data()[i];
    if (ww == 0.0) break;
    const double theta = sg / ww;
    double alpha = theta;
    Index blocking = -1;
    for (Index i = 0; i < x.size(); ++i) {
      if (s.data()[i] > 0.0 && x.data()[i] / s.data()[i] < alpha) {
        alpha = x.data()[i] / s.data()[i];
        blocking = i;
      }
    }
    x = (x - alpha * s).cwiseMax(0.0);
    if (blocking >= 0) x.data()[blocking] = 0.0;
    r += alpha * w;
    g -= alpha * (a.transpose() * w);
    out.push_back(x);
  }
  return out;
}

Tensor3 reference_tprod(const Tensor3& a, const Tensor3& b) {
  const Index n = a.tubes();
  Tensor3 c(a.rows(), b.cols(), n);
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) {
      const Index m = ((k - l) % n + n) % n;
      for (Index j = 0; j < b.cols(); ++j) {
        for (Index t = 0; t < a.cols(); ++t) {
          const double bv = b(t, j, m);
          for (Index i = 0; i < a.rows(); ++i) c(i, j, k) += a(i, t, l) * bv;
        }
      }
    }
  }
  return c;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("tdict_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace tdict::testing
