#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

// Local objective functions. The family is restricted to quadratics
// f_i(x) = 1/2 (x - b_i)^T A_i (x - b_i) with A_i symmetric positive
// definite, so curvature constants and the global minimizer are analytic.

namespace advgd {

struct LocalQuadratic {
  Eigen::MatrixXd A;  // p x p, symmetric positive definite
  Eigen::VectorXd b;  // p
};

enum class QuadraticSplit {
  identical_copy,  // every agent holds the full objective
  shared,          // every agent holds a 1/n share
};

/// Immutable bundle of local quadratics plus the derived metadata of the
/// summed objective: strong-convexity mu, gradient Lipschitz constant, and
/// the analytic minimizer of sum_i f_i.
class ObjectiveSpec {
 public:
  static ObjectiveSpec from_locals(std::vector<LocalQuadratic> locals,
                                   std::optional<double> feasible_bound = std::nullopt) {
    if (locals.empty()) throw std::invalid_argument("ObjectiveSpec: no local objectives");
    const auto p = locals.front().A.rows();
    if (p < 1) throw std::invalid_argument("ObjectiveSpec: dimension must be positive");

    Eigen::MatrixXd sum_a = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
    for (const auto& loc : locals) {
      if (loc.A.rows() != p || loc.A.cols() != p || loc.b.size() != p)
        throw std::invalid_argument("ObjectiveSpec: inconsistent local dimensions");
      if ((loc.A - loc.A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("ObjectiveSpec: local matrix is not symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(loc.A, Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) <= 0.0)
        throw std::invalid_argument("ObjectiveSpec: local matrix is not positive definite");
      sum_a += loc.A;
      rhs += loc.A * loc.b;
    }

    Eigen::VectorXd x_star = sum_a.ldlt().solve(rhs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum_a, Eigen::EigenvaluesOnly);
    const double mu = es.eigenvalues()(0);
    const double lip = es.eigenvalues()(p - 1);
    return ObjectiveSpec(std::move(locals), mu, lip, std::move(x_star), feasible_bound);
  }

  int agents() const { return static_cast<int>(locals_.size()); }
  int dimension() const { return static_cast<int>(locals_.front().b.size()); }
  double mu() const { return mu_; }
  double lip() const { return lip_; }
  const Eigen::VectorXd& x_star() const { return x_star_; }
  const std::optional<double>& feasible_bound() const { return feasible_bound_; }

  const LocalQuadratic& local(int i) const {
    if (i < 0 || i >= agents())
      throw std::invalid_argument("ObjectiveSpec: agent index out of range");
    return locals_[static_cast<std::size_t>(i)];
  }

 private:
  friend ObjectiveSpec paper_quadratic(int, int, QuadraticSplit, std::optional<double>);

  ObjectiveSpec(std::vector<LocalQuadratic> locals, double mu, double lip,
                Eigen::VectorXd x_star, std::optional<double> feasible_bound)
      : locals_(std::move(locals)),
        mu_(mu),
        lip_(lip),
        x_star_(std::move(x_star)),
        feasible_bound_(feasible_bound) {
    if (mu_ > lip_) throw std::invalid_argument("ObjectiveSpec: mu must not exceed lip");
    Eigen::VectorXd residual = Eigen::VectorXd::Zero(dimension());
    for (const auto& loc : locals_) residual += loc.A * (x_star_ - loc.b);
    if (residual.norm() > 1e-10)
      throw std::invalid_argument("ObjectiveSpec: x_star does not solve the stationarity system");
  }

  std::vector<LocalQuadratic> locals_;
  double mu_;
  double lip_;
  Eigen::VectorXd x_star_;
  std::optional<double> feasible_bound_;
};

/// The benchmark objective 1/2 x^T x with minimizer 0, reported with
/// mu = lip = 1. Under identical_copy each agent holds the full quadratic
/// (the per-local curvature the contraction constants are quoted for);
/// under shared each agent holds a 1/n slice and the sum is exactly the
/// benchmark quadratic.
inline ObjectiveSpec paper_quadratic(int n, int p,
                                     QuadraticSplit split = QuadraticSplit::identical_copy,
                                     std::optional<double> feasible_bound = std::nullopt) {
  if (n < 1 || p < 1) throw std::invalid_argument("paper_quadratic: need n >= 1 and p >= 1");
  const double scale = split == QuadraticSplit::identical_copy ? 1.0 : 1.0 / n;
  std::vector<LocalQuadratic> locals(
      static_cast<std::size_t>(n),
      LocalQuadratic{scale * Eigen::MatrixXd::Identity(p, p), Eigen::VectorXd::Zero(p)});
  return ObjectiveSpec(std::move(locals), 1.0, 1.0, Eigen::VectorXd::Zero(p), feasible_bound);
}

/// Gradient of agent i's local cost: A_i (x - b_i).
inline Eigen::VectorXd grad_local(const ObjectiveSpec& spec, int i, const Eigen::VectorXd& x) {
  const auto& loc = spec.local(i);
  if (x.size() != loc.b.size())
    throw std::invalid_argument("grad_local: point dimension mismatch");
  return loc.A * (x - loc.b);
}

/// Agent i's local cost value; nonnegative everywhere.
inline double eval_local(const ObjectiveSpec& spec, int i, const Eigen::VectorXd& x) {
  const auto& loc = spec.local(i);
  if (x.size() != loc.b.size())
    throw std::invalid_argument("eval_local: point dimension mismatch");
  const Eigen::VectorXd d = x - loc.b;
  return 0.5 * d.dot(loc.A * d);
}

struct GlobalConstants {
  double mu;
  double lip;
  Eigen::VectorXd x_star;
};

inline GlobalConstants global_constants(const ObjectiveSpec& spec) {
  return GlobalConstants{spec.mu(), spec.lip(), spec.x_star()};
}

}  // namespace advgd
