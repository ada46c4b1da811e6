#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tdict/image.hpp"
#include "tdict/tensor3.hpp"

namespace tdict {

/// Lateral concatenation of patchify(image, p, q) over all images, in order.
Tensor3 build_training_tensor(std::span<const ImageGray> images, Index p, Index q);

/// Entrywise clamp to [0, 1]. Every lateral slice of the result then has
/// Frobenius norm at most sqrt(p q).
Tensor3 project_dict(const Tensor3& d);

/// Non-negative soft threshold max(t - mu, 0).
Tensor3 shrink(const Tensor3& t, double mu);

/// Non-negative with every lateral slice of Frobenius norm <= sqrt(p q).
bool in_dictionary_set(const Tensor3& d, double tol = 0.0);

struct AdmmOptions {
  Index atoms = 0;  ///< s, lateral slices of the dictionary
  double lambda = 1e-2;
  double rho = 1.0;
  int max_iters = 300;
  double tol = 1e-4;
  std::uint64_t seed = 0;
};

struct AdmmIterate {
  int iter = 0;
  double objective = 0.0;       ///< 0.5 |Y - U * V|^2 + lambda |H|_sum
  double dict_residual = 0.0;   ///< |D - U|
  double coeff_residual = 0.0;  ///< |H - V|
};

/// Full iterate of the split problem, with scaled duals.
struct AdmmState {
  Tensor3 dictionary;    ///< D
  Tensor3 coefficients;  ///< H
  Tensor3 u;
  Tensor3 v;
  Tensor3 dual_dictionary;
  Tensor3 dual_coefficients;
  double rho = 1.0;
  int iter = 0;
  std::vector<AdmmIterate> history;
};

struct AdmmResult {
  Tensor3 dictionary;
  Tensor3 coefficients;
  std::vector<AdmmIterate> history;
  int iterations = 0;
  bool converged = false;
  double relative_fit = 0.0;  ///< |Y - D * H| / |Y|
  double seconds = 0.0;
};

/// Learns D (p x s x q, entries in [0, 1]) and H >= 0 with Y ~ D * H by
/// scaled-dual ADMM on
///
///   min 0.5 |Y - U * V|^2 + lambda |H|_sum   s.t. D = U, H = V.
///
/// U and V are ridge-regularized least-squares solves done face by face in
/// the transform domain; D and H are the projections of U and V shifted by
/// their duals. Stops when both |D - U| and |H - V| drop below
/// tol * (1 + |Y|), or after max_iters.
AdmmResult admm_learn(const Tensor3& training, const AdmmOptions& options,
                      const std::function<void(const AdmmState&)>& observer = {});

}  // namespace tdict
