#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "support.hpp"
#include "tdict/dict_learn.hpp"
#include "tdict/errors.hpp"
#include "tdict/patch.hpp"
#include "tdict/tproduct.hpp"

namespace tdict {
namespace {

using testing::random_matrix;
using testing::random_tensor;
using testing::smooth_image;

TEST(TrainingTensorTest, SingleImageEqualsPatchify) {
  const ImageGray img = smooth_image(16, 16, 1);
  const std::vector<ImageGray> images{img};
  EXPECT_EQ(build_training_tensor(images, 4, 4), patchify(img, 4, 4));
}

TEST(TrainingTensorTest, BlocksFollowImageOrder) {
  const ImageGray a = smooth_image(8, 8, 2);
  const ImageGray b = smooth_image(16, 8, 3);
  const std::vector<ImageGray> twice{a, a};
  const Tensor3 dup = build_training_tensor(twice, 4, 4);
  EXPECT_EQ(dup.lateral_block(0, 4), dup.lateral_block(4, 4));

  const std::vector<ImageGray> mixed{a, b, a};
  const Tensor3 y = build_training_tensor(mixed, 4, 4);
  EXPECT_EQ(y.cols(), 4 + 8 + 4);
  EXPECT_EQ(y.lateral_block(4, 8), patchify(b, 4, 4));

  const std::vector<ImageGray> three{a, a, a};
  EXPECT_EQ(build_training_tensor(three, 4, 4).cols(), 12);
}

TEST(TrainingTensorTest, NonDivisibleRejected) {
  const std::vector<ImageGray> images{smooth_image(8, 8, 4), smooth_image(10, 8, 5)};
  EXPECT_THROW(build_training_tensor(images, 4, 4), ShapeError);
}

TEST(ProjectDictTest, ClampsToUnitInterval) {
  Tensor3 d(3, 1, 1);
  d(0, 0, 0) = -0.5;
  d(1, 0, 0) = 0.5;
  d(2, 0, 0) = 1.5;
  const Tensor3 p = project_dict(d);
  EXPECT_EQ(p(0, 0, 0), 0.0);
  EXPECT_EQ(p(1, 0, 0), 0.5);
  EXPECT_EQ(p(2, 0, 0), 1.0);
}

TEST(ProjectDictTest, IdempotentAndInSet) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor3 d = random_tensor(4, 6, 3, rng, -2.0, 3.0);
    const Tensor3 p = project_dict(d);
    EXPECT_EQ(project_dict(p), p);
    EXPECT_TRUE(in_dictionary_set(p));
  }
  EXPECT_FALSE(in_dictionary_set(Tensor3::constant(2, 2, 2, 1.5)));
}

TEST(ShrinkTest, Definition) {
  Tensor3 t(2, 1, 1);
  t(0, 0, 0) = 0.3;
  t(1, 0, 0) = 1.2;
  const Tensor3 s = shrink(t, 0.5);
  EXPECT_EQ(s(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(s(1, 0, 0), 0.7);

  std::mt19937_64 rng(7);
  const Tensor3 r = random_tensor(3, 4, 2, rng, -1.0, 1.0);
  EXPECT_EQ(shrink(r, 0.0), nonneg_clamp(r, 0.0));
  EXPECT_THROW(shrink(r, -0.1), ConfigError);
}

TEST(ShrinkTest, NnzNonIncreasingInThreshold) {
  std::mt19937_64 rng(8);
  const Tensor3 r = random_tensor(6, 8, 4, rng);
  Index prev = nnz(shrink(r, 0.0));
  for (double mu = 0.05; mu <= 1.0; mu += 0.05) {
    const Index now = nnz(shrink(r, mu));
    EXPECT_LE(now, prev);
    prev = now;
  }
}

TEST(AdmmTest, RepeatedPatchFitsWithOneAtom) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd patch = random_matrix(4, 4, rng);
  Tensor3 y(4, 20, 4);
  for (Index j = 0; j < 20; ++j) y.set_lateral(j, twist(patch));
  AdmmOptions opt;
  opt.atoms = 1;
  opt.lambda = 0.0;
  opt.seed = 3;
  const AdmmResult r = admm_learn(y, opt);
  EXPECT_LE(r.relative_fit, 0.05);
}

TEST(AdmmTest, OvercompleteFitsTrainingData) {
  std::mt19937_64 rng(10);
  const Tensor3 y = random_tensor(4, 12, 4, rng);
  AdmmOptions opt;
  opt.atoms = 12;
  opt.lambda = 0.0;
  opt.seed = 1;
  const AdmmResult r = admm_learn(y, opt);
  EXPECT_LE(r.relative_fit, 0.05);
  EXPECT_LE(fro_norm(y - tprod(r.dictionary, r.coefficients)) / fro_norm(y), r.relative_fit + 1e-12);
}

TEST(AdmmTest, IteratesStayFeasible) {
  const std::vector<ImageGray> images{smooth_image(16, 16, 11), smooth_image(16, 16, 12)};
  const Tensor3 y = build_training_tensor(images, 4, 4);
  AdmmOptions opt;
  opt.atoms = 8;
  opt.max_iters = 60;
  opt.tol = 0.0;
  int checked = 0;
  const AdmmResult r = admm_learn(y, opt, [&](const AdmmState& st) {
    ++checked;
    ASSERT_GE(min_entry(st.coefficients), 0.0);
    ASSERT_GE(min_entry(st.dictionary), 0.0);
    ASSERT_LE(max_abs(st.dictionary), 1.0);
    ASSERT_TRUE(in_dictionary_set(st.dictionary));
  });
  EXPECT_EQ(checked, 60);
  EXPECT_EQ(r.history.size(), 60u);
  EXPECT_EQ(r.dictionary.rows(), 4);
  EXPECT_EQ(r.dictionary.cols(), 8);
  EXPECT_EQ(r.coefficients.cols(), y.cols());
}

TEST(AdmmTest, DeterministicForFixedSeed) {
  std::mt19937_64 rng(13);
  const Tensor3 y = random_tensor(4, 16, 4, rng);
  AdmmOptions opt;
  opt.atoms = 8;
  opt.max_iters = 40;
  opt.seed = 5;
  const AdmmResult a = admm_learn(y, opt);
  const AdmmResult b = admm_learn(y, opt);
  EXPECT_EQ(a.dictionary, b.dictionary);
  EXPECT_EQ(a.coefficients, b.coefficients);
}

TEST(AdmmTest, SparsityIncreasesWithLambda) {
  int monotone = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::vector<ImageGray> images{smooth_image(16, 16, 100 + seed)};
    const Tensor3 y = build_training_tensor(images, 4, 4);
    Index prev = -1;
    bool ok = true;
    for (double lambda : {0.0, 1e-2, 1e-1}) {
      AdmmOptions opt;
      opt.atoms = 8;
      opt.lambda = lambda;
      opt.max_iters = 100;
      opt.seed = seed;
      const Index now = nnz(admm_learn(y, opt).coefficients);
      if (prev >= 0 && now > prev) ok = false;
      prev = now;
    }
    monotone += ok ? 1 : 0;
  }
  EXPECT_GE(monotone, 19);
}

TEST(AdmmTest, ScalingAmbiguityLeavesObjectiveUnchanged) {
  std::mt19937_64 rng(14);
  const Tensor3 y = random_tensor(4, 10, 4, rng);
  const Tensor3 d = random_tensor(4, 6, 4, rng);
  const Tensor3 h = random_tensor(6, 10, 4, rng);
  const double base = fro_norm(y - tprod(d, h));
  for (double beta : {0.25, 3.0, 10.0}) {
    const double scaled = fro_norm(y - tprod(scale(beta, d), scale(1.0 / beta, h)));
    EXPECT_LE(std::abs(scaled * scaled - base * base), 1e-12 * base * base);
  }
}

TEST(AdmmTest, LateResidualsSettleInMedian) {
  std::vector<double> change;
  for (std::uint64_t seed = 0; seed < 9; ++seed) {
    const std::vector<ImageGray> images{smooth_image(16, 16, 200 + seed)};
    AdmmOptions opt;
    opt.atoms = 8;
    opt.max_iters = 200;
    opt.tol = 0.0;
    opt.seed = seed;
    const AdmmResult r = admm_learn(build_training_tensor(images, 4, 4), opt);
    const auto& h = r.history;
    const std::size_t start = h.size() - h.size() / 10;
    const double first = h[start].dict_residual + h[start].coeff_residual;
    const double last = h.back().dict_residual + h.back().coeff_residual;
    change.push_back(last - first);
  }
  std::nth_element(change.begin(), change.begin() + 4, change.end());
  EXPECT_LE(change[4], 0.0);
}

TEST(AdmmTest, ConfigErrors) {
  std::mt19937_64 rng(15);
  const Tensor3 y = random_tensor(4, 6, 4, rng);
  AdmmOptions opt;
  opt.atoms = 7;
  EXPECT_THROW(admm_learn(y, opt), ConfigError);
  opt.atoms = 0;
  EXPECT_THROW(admm_learn(y, opt), ConfigError);
  opt.atoms = 3;
  opt.rho = 0.0;
  EXPECT_THROW(admm_learn(y, opt), ConfigError);
  opt.rho = 1.0;
  opt.lambda = -1.0;
  EXPECT_THROW(admm_learn(y, opt), ConfigError);
  opt.lambda = 0.0;
  EXPECT_THROW(admm_learn(scale(-1.0, y), opt), ConfigError);
}

}  // namespace
}  // namespace tdict
