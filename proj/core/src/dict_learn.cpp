#include "tdict/dict_learn.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "tdict/errors.hpp"
#include "tdict/patch.hpp"
#include "tdict/tproduct.hpp"

namespace tdict {

Tensor3 build_training_tensor(std::span<const ImageGray> images, Index p, Index q) {
  if (images.empty()) throw ConfigError("build_training_tensor: no images");
  std::vector<Tensor3> parts;
  parts.reserve(images.size());
  for (std::size_t n = 0; n < images.size(); ++n) {
    try {
      parts.push_back(patchify(images[n], p, q));
    } catch (const ShapeError& e) {
      throw ShapeError("training image " + std::to_string(n) + ": " + e.what());
    }
  }
  return concat_lateral(parts);
}

Tensor3 project_dict(const Tensor3& d) {
  Tensor3 out = d;
  for (double& x : out.data()) x = std::min(std::max(x, 0.0), 1.0);
  return out;
}

Tensor3 shrink(const Tensor3& t, double mu) {
  if (mu < 0.0) throw ConfigError("shrink: threshold must be non-negative");
  Tensor3 out = t;
  for (double& x : out.data()) x = std::max(x - mu, 0.0);
  return out;
}

bool in_dictionary_set(const Tensor3& d, double tol) {
  if (min_entry(d) < -tol) return false;
  const double bound = std::sqrt(static_cast<double>(d.rows() * d.tubes()));
  for (Index j = 0; j < d.cols(); ++j) {
    if (fro_norm(d.lateral(j)) > bound + tol) return false;
  }
  return true;
}

namespace {

double sq(double x) { return x * x; }

Tensor3 seeded_dictionary(const Tensor3& y, Index atoms, std::uint64_t seed) {
  std::vector<Index> all(static_cast<std::size_t>(y.cols()));
  std::iota(all.begin(), all.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; std::sample's draw sequence is library specific.
  for (Index n = 0; n < atoms; ++n) {
    std::uniform_int_distribution<Index> pick(n, y.cols() - 1);
    std::swap(all[static_cast<std::size_t>(n)], all[static_cast<std::size_t>(pick(rng))]);
  }
  Tensor3 d(y.rows(), atoms, y.tubes());
  for (Index n = 0; n < atoms; ++n) d.set_lateral(n, y.lateral(all[static_cast<std::size_t>(n)]));
  return project_dict(d);
}

}  // namespace

AdmmResult admm_learn(const Tensor3& y, const AdmmOptions& opt, const std::function<void(const AdmmState&)>& observer) {
  const Index s = opt.atoms;
  if (s < 1) throw ConfigError("admm_learn: dictionary width s must be at least 1");
  if (s > y.cols()) {
    throw ConfigError("admm_learn: s = " + std::to_string(s) + " exceeds the " + std::to_string(y.cols()) +
                      " training patches");
  }
  if (!(opt.lambda >= 0.0)) throw ConfigError("admm_learn: lambda must be non-negative");
  if (!(opt.rho > 0.0)) throw ConfigError("admm_learn: rho must be positive");
  if (opt.max_iters < 1) throw ConfigError("admm_learn: max_iters must be at least 1");
  if (min_entry(y) < 0.0) throw ConfigError("admm_learn: training tensor has negative entries");

  const auto start = std::chrono::steady_clock::now();
  const Index p = y.rows(), t = y.cols(), q = y.tubes();
  const double rho = opt.rho;
  const double y_norm = fro_norm(y);
  const double stop = opt.tol * (1.0 + y_norm);

  AdmmState st;
  st.rho = rho;
  st.dictionary = seeded_dictionary(y, s, opt.seed);
  st.u = st.dictionary;
  st.coefficients = Tensor3(s, t, q, 0.1);
  st.v = st.coefficients;
  st.dual_dictionary = Tensor3(p, s, q);
  st.dual_coefficients = Tensor3(s, t, q);

  const FourierTensor y_hat = FourierTensor::forward(y);
  FourierTensor u_hat = FourierTensor::forward(st.u);
  FourierTensor v_hat = FourierTensor::forward(st.v);
  const Index half = y_hat.independent_faces();
  const Eigen::MatrixXcd ridge = rho * Eigen::MatrixXcd::Identity(s, s);

  AdmmResult result;
  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= opt.max_iters; ++iter) {
    // U: U_k (V_k V_k^H + rho I) = Y_k V_k^H + rho (D - dual_D)_k
    {
      const FourierTensor target = FourierTensor::forward(st.dictionary - st.dual_dictionary);
#pragma omp parallel for schedule(static)
      for (Index k = 0; k < half; ++k) {
        const Eigen::MatrixXcd& vk = v_hat.face(k);
        Eigen::MatrixXcd gram = ridge;
        gram.noalias() += vk * vk.adjoint();
        const Eigen::MatrixXcd rhs = y_hat.face(k) * vk.adjoint() + rho * target.face(k);
        u_hat.face(k) = Eigen::LLT<Eigen::MatrixXcd>(gram).solve(rhs.adjoint()).adjoint();
      }
      u_hat.mirror_conjugates();
      st.u = u_hat.inverse();
    }
    // V: (U_k^H U_k + rho I) V_k = U_k^H Y_k + rho (H - dual_H)_k
    {
      const FourierTensor target = FourierTensor::forward(st.coefficients - st.dual_coefficients);
#pragma omp parallel for schedule(static)
      for (Index k = 0; k < half; ++k) {
        const Eigen::MatrixXcd& uk = u_hat.face(k);
        Eigen::MatrixXcd gram = ridge;
        gram.noalias() += uk.adjoint() * uk;
        const Eigen::MatrixXcd rhs = uk.adjoint() * y_hat.face(k) + rho * target.face(k);
        v_hat.face(k) = Eigen::LLT<Eigen::MatrixXcd>(gram).solve(rhs);
      }
      v_hat.mirror_conjugates();
      st.v = v_hat.inverse();
    }
    st.dictionary = project_dict(st.u + st.dual_dictionary);
    st.coefficients = shrink(st.v + st.dual_coefficients, opt.lambda / rho);
    st.dual_dictionary = st.dual_dictionary + st.u - st.dictionary;
    st.dual_coefficients = st.dual_coefficients + st.v - st.coefficients;

    AdmmIterate rec;
    rec.iter = iter;
    const Tensor3 fit = y - facewise_product(u_hat, v_hat).inverse();
    rec.objective = 0.5 * sq(fro_norm(fit)) + opt.lambda * sum_norm(st.coefficients);
    rec.dict_residual = fro_norm(st.dictionary - st.u);
    rec.coeff_residual = fro_norm(st.coefficients - st.v);
    if (!std::isfinite(rec.objective) || !std::isfinite(rec.dict_residual) || !std::isfinite(rec.coeff_residual)) {
      throw NumericError("admm_learn: non-finite objective at iteration " + std::to_string(iter) +
                         "; adjust rho or rescale the training data to [0, 1]");
    }
    st.iter = iter;
    st.history.push_back(rec);
    if (observer) observer(st);
    if (rec.dict_residual < stop && rec.coeff_residual < stop) {
      converged = true;
      break;
    }
  }

  result.iterations = std::min(iter, opt.max_iters);
  result.converged = converged;
  result.relative_fit = y_norm > 0.0 ? fro_norm(y - tprod(st.dictionary, st.coefficients)) / y_norm : 0.0;
  result.dictionary = std::move(st.dictionary);
  result.coefficients = std::move(st.coefficients);
  result.history = std::move(st.history);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace tdict
