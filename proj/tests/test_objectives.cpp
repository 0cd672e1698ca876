#include "advgd/objectives.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "advgd/rng.hpp"
#include "test_support.hpp"

using advgd::eval_local;
using advgd::global_constants;
using advgd::grad_local;
using advgd::LocalQuadratic;
using advgd::ObjectiveSpec;
using advgd::paper_quadratic;
using advgd::QuadraticSplit;

namespace {

Eigen::VectorXd scalar(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

}  // namespace

TEST(PaperQuadratic, BenchmarkConstants) {
  const ObjectiveSpec spec = paper_quadratic(10, 1);
  EXPECT_EQ(spec.agents(), 10);
  EXPECT_EQ(spec.dimension(), 1);
  EXPECT_DOUBLE_EQ(spec.mu(), 1.0);
  EXPECT_DOUBLE_EQ(spec.lip(), 1.0);
  EXPECT_EQ(spec.x_star().size(), 1);
  EXPECT_DOUBLE_EQ(spec.x_star()(0), 0.0);

  const auto constants = global_constants(spec);
  EXPECT_DOUBLE_EQ(constants.mu, 1.0);
  EXPECT_DOUBLE_EQ(constants.lip, 1.0);
  EXPECT_DOUBLE_EQ(constants.x_star(0), 0.0);
}

TEST(PaperQuadratic, IdenticalCopyLocalValues) {
  const ObjectiveSpec spec = paper_quadratic(3, 2);
  // each local is the full 1/2 x^T x
  EXPECT_DOUBLE_EQ(eval_local(spec, 0, Eigen::Vector2d(2.0, 0.0)), 2.0);
  EXPECT_DOUBLE_EQ(eval_local(spec, 2, Eigen::Vector2d(1.0, 1.0)), 1.0);
  const Eigen::VectorXd g = grad_local(spec, 1, Eigen::Vector2d(3.0, -1.0));
  EXPECT_DOUBLE_EQ(g(0), 3.0);
  EXPECT_DOUBLE_EQ(g(1), -1.0);
}

TEST(PaperQuadratic, SharedSplitSumsToBenchmark) {
  const ObjectiveSpec spec = paper_quadratic(4, 1, QuadraticSplit::shared);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) total += eval_local(spec, i, scalar(2.0));
  EXPECT_NEAR(total, 2.0, 1e-15);  // sum is the full quadratic
  EXPECT_DOUBLE_EQ(spec.mu(), 1.0);
  EXPECT_DOUBLE_EQ(spec.lip(), 1.0);
}

TEST(FromLocals, ScalarMinimizerAndConstants) {
  // 2(x-1) + 4(x+1) = 0  =>  x* = -1/3; summed curvature 6
  std::vector<LocalQuadratic> locals(2);
  locals[0].A = Eigen::MatrixXd::Constant(1, 1, 2.0);
  locals[0].b = scalar(1.0);
  locals[1].A = Eigen::MatrixXd::Constant(1, 1, 4.0);
  locals[1].b = scalar(-1.0);
  const ObjectiveSpec spec = ObjectiveSpec::from_locals(locals);
  EXPECT_NEAR(spec.x_star()(0), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(spec.mu(), 6.0, 1e-12);
  EXPECT_NEAR(spec.lip(), 6.0, 1e-12);
}

TEST(FromLocals, TwoDimensionalSpectrum) {
  // summed matrix [[4,1],[1,8]] has eigenvalues 6 ± sqrt(5)
  std::vector<LocalQuadratic> locals(2);
  locals[0].A.resize(2, 2);
  locals[0].A << 3.0, 1.0, 1.0, 3.0;
  locals[0].b = Eigen::Vector2d::Zero();
  locals[1].A = Eigen::Vector2d(1.0, 5.0).asDiagonal();
  locals[1].b = Eigen::Vector2d::Zero();
  const ObjectiveSpec spec = ObjectiveSpec::from_locals(locals);
  EXPECT_NEAR(spec.mu(), 6.0 - std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(spec.lip(), 6.0 + std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(spec.x_star().norm(), 0.0, 1e-12);
}

TEST(FromLocals, MinimizerZeroesSummedGradient) {
  advgd::rng::Stream stream(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(stream.next_u64() % 4);
    const int p = 1 + static_cast<int>(stream.next_u64() % 3);
    const ObjectiveSpec spec = ObjectiveSpec::from_locals(support::random_locals(n, p, stream));
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < n; ++i) g += grad_local(spec, i, spec.x_star());
    EXPECT_LT(g.norm(), 1e-9);
    EXPECT_LE(spec.mu(), spec.lip());
    EXPECT_GT(spec.mu(), 0.0);
  }
}

TEST(FromLocals, RejectsInvalidLocals) {
  EXPECT_THROW(ObjectiveSpec::from_locals({}), std::invalid_argument);

  LocalQuadratic asym;
  asym.A.resize(2, 2);
  asym.A << 1.0, 0.5, 0.0, 1.0;
  asym.b = Eigen::Vector2d::Zero();
  EXPECT_THROW(ObjectiveSpec::from_locals({asym}), std::invalid_argument);

  LocalQuadratic indefinite;
  indefinite.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  indefinite.b = scalar(0.0);
  EXPECT_THROW(ObjectiveSpec::from_locals({indefinite}), std::invalid_argument);

  LocalQuadratic mismatched;
  mismatched.A = Eigen::MatrixXd::Identity(2, 2);
  mismatched.b = scalar(0.0);
  EXPECT_THROW(ObjectiveSpec::from_locals({mismatched}), std::invalid_argument);

  LocalQuadratic ok;
  ok.A = Eigen::MatrixXd::Identity(2, 2);
  ok.b = Eigen::Vector2d::Zero();
  LocalQuadratic other_dim;
  other_dim.A = Eigen::MatrixXd::Identity(3, 3);
  other_dim.b = Eigen::Vector3d::Zero();
  EXPECT_THROW(ObjectiveSpec::from_locals({ok, other_dim}), std::invalid_argument);
}

TEST(Gradients, MatchFiniteDifferences) {
  advgd::rng::Stream stream(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(stream.next_u64() % 4);
    const int p = 1 + static_cast<int>(stream.next_u64() % 4);
    const ObjectiveSpec spec = ObjectiveSpec::from_locals(support::random_locals(n, p, stream));
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x(p);
      for (int j = 0; j < p; ++j) x(j) = stream.next_uniform(-2.0, 2.0);
      const Eigen::VectorXd analytic = grad_local(spec, i, x);
      const Eigen::VectorXd numeric = support::fd_grad_local(spec, i, x);
      EXPECT_LT((analytic - numeric).cwiseAbs().maxCoeff(),
                1e-6 * std::max(1.0, analytic.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Gradients, DimensionChecks) {
  const ObjectiveSpec spec = paper_quadratic(2, 2);
  EXPECT_THROW(grad_local(spec, 0, scalar(1.0)), std::invalid_argument);
  EXPECT_THROW(eval_local(spec, 0, scalar(1.0)), std::invalid_argument);
  EXPECT_THROW(grad_local(spec, 5, Eigen::Vector2d::Zero()), std::invalid_argument);
  EXPECT_THROW(spec.local(-1), std::invalid_argument);
}

TEST(EvalLocal, NonnegativeWithMinimumAtB) {
  advgd::rng::Stream stream(11);
  const ObjectiveSpec spec = ObjectiveSpec::from_locals(support::random_locals(1, 3, stream));
  EXPECT_NEAR(eval_local(spec, 0, spec.local(0).b), 0.0, 1e-15);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x(j) = stream.next_uniform(-3.0, 3.0);
    EXPECT_GE(eval_local(spec, 0, x), 0.0);
  }
}

TEST(FeasibleBound, CarriedThrough) {
  const ObjectiveSpec spec = paper_quadratic(2, 1, QuadraticSplit::identical_copy, 5.0);
  ASSERT_TRUE(spec.feasible_bound().has_value());
  EXPECT_DOUBLE_EQ(*spec.feasible_bound(), 5.0);
  EXPECT_FALSE(paper_quadratic(2, 1).feasible_bound().has_value());
}
