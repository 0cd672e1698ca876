#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "advgd/engine.hpp"

// Theoretical constants, step-size admissibility, and the convergence-bound
// curves that the measured error series are compared against.

namespace advgd {

struct StepSizeCheck {
  double alpha = 0.0;
  double mu = 0.0;
  double lip = 0.0;
  double c1 = 0.0;  // 2/(mu+L)
  double c2 = 0.0;  // 2*mu*L/(mu+L)
  bool upper_ok = false;   // alpha < c1
  bool window_ok = false;  // (mu+L)/(4*mu*L) < alpha < (mu+L)/(2*mu*L)
  bool admissible = false;
};

inline StepSizeCheck step_size_check(double alpha, double mu, double lip) {
  if (!(mu > 0.0) || !(lip > 0.0)) throw std::invalid_argument("step_size_check: mu and L must be positive");
  if (mu > lip) throw std::invalid_argument("step_size_check: mu must not exceed L");
  if (!(alpha > 0.0)) throw std::invalid_argument("step_size_check: alpha must be positive");
  StepSizeCheck chk;
  chk.alpha = alpha;
  chk.mu = mu;
  chk.lip = lip;
  chk.c1 = 2.0 / (mu + lip);
  chk.c2 = 2.0 * mu * lip / (mu + lip);
  chk.upper_ok = alpha < chk.c1;
  const double lo = (mu + lip) / (4.0 * mu * lip);
  const double hi = (mu + lip) / (2.0 * mu * lip);
  chk.window_ok = lo < alpha && alpha < hi;
  chk.admissible = chk.upper_ok && chk.window_ok;
  return chk;
}

/// Per-round multiplier of the squared average error; in (0,1) whenever the
/// step size is admissible.
inline double contraction_factor(double alpha, double c2) { return 2.0 - 2.0 * alpha * c2; }

inline bool initial_condition_ok(const Eigen::VectorXd& x0_avg, const Eigen::VectorXd& x_star,
                                 const AttackVector& eps) {
  if (x0_avg.size() != x_star.size() || x0_avg.size() != eps.size())
    throw std::invalid_argument("initial_condition_ok: dimension mismatch");
  return (x0_avg - x_star).norm() < eps.norm();
}

enum class BoundKind { average, individual };

struct BoundCurve {
  BoundKind kind = BoundKind::average;
  double r0 = 0.0;
  double eps_norm = 0.0;
  double rho = 0.0;
  std::vector<double> values;  // index k = 0..K
};

namespace detail {
inline double checked_rho(double alpha, double mu, double lip, double r0, double eps_norm) {
  const StepSizeCheck chk = step_size_check(alpha, mu, lip);
  if (!chk.admissible)
    throw std::invalid_argument("bound_curve: step size inadmissible, bound does not apply");
  if (r0 < 0.0 || eps_norm < 0.0)
    throw std::invalid_argument("bound_curve: r0 and eps_norm must be nonnegative");
  return contraction_factor(alpha, chk.c2);
}
}  // namespace detail

/// rho^{k/2}·r0 + sqrt(2)·eps_norm — decays to the sqrt(2)·||eps|| neighborhood.
inline BoundCurve bound_curve(BoundKind kind, double r0, double eps_norm, double alpha, double mu,
                              double lip, int K) {
  if (K < 0) throw std::invalid_argument("bound_curve: K must be nonnegative");
  BoundCurve curve;
  curve.kind = kind;
  curve.r0 = r0;
  curve.eps_norm = eps_norm;
  curve.rho = detail::checked_rho(alpha, mu, lip, r0, eps_norm);
  curve.values.resize(static_cast<std::size_t>(K) + 1);
  const double offset = std::sqrt(2.0) * eps_norm;
  const double half_step = std::sqrt(curve.rho);
  double decay = r0;
  for (int k = 0; k <= K; ++k) {
    curve.values[static_cast<std::size_t>(k)] = decay + offset;
    decay *= half_step;
  }
  return curve;
}

/// Variant that carries the per-round 2·eps² term through the squared-error
/// recursion instead of collapsing it to a single sqrt(2)·eps term:
///   values[k] = sqrt(rho^k·r0² + 2·eps²·(1−rho^k)/(1−rho)),
/// asymptote sqrt(2/(1−rho))·eps. Evaluated by the recursion itself so that
/// values[0] is exactly r0 (no sqrt(r0²) round-off).
inline BoundCurve bound_curve_geometric(BoundKind kind, double r0, double eps_norm, double alpha,
                                        double mu, double lip, int K) {
  if (K < 0) throw std::invalid_argument("bound_curve: K must be nonnegative");
  BoundCurve curve;
  curve.kind = kind;
  curve.r0 = r0;
  curve.eps_norm = eps_norm;
  curve.rho = detail::checked_rho(alpha, mu, lip, r0, eps_norm);
  curve.values.resize(static_cast<std::size_t>(K) + 1);
  curve.values[0] = r0;
  double sq = r0 * r0;
  const double shot = 2.0 * eps_norm * eps_norm;
  for (int k = 1; k <= K; ++k) {
    sq = curve.rho * sq + shot;
    curve.values[static_cast<std::size_t>(k)] = std::sqrt(sq);
  }
  return curve;
}

struct ErrorSeries {
  std::vector<double> avg_error;               // ||x_bar(k) - x*||
  std::vector<double> regular_avg_error;       // mean over non-adversarial agents only
  std::vector<std::vector<double>> per_agent_error;  // [agent][k]
};

inline ErrorSeries error_series(const Trajectory& traj, const Eigen::VectorXd& x_star,
                                const std::vector<int>& adversaries) {
  const std::size_t rounds = traj.states.size();
  if (rounds == 0) throw std::invalid_argument("error_series: empty trajectory");
  const int n = static_cast<int>(traj.states.front().X.rows());
  const std::set<int> adv(adversaries.begin(), adversaries.end());
  const int regular = n - static_cast<int>(adv.size());

  ErrorSeries series;
  series.avg_error.resize(rounds);
  series.regular_avg_error.resize(rounds);
  series.per_agent_error.assign(static_cast<std::size_t>(n), std::vector<double>(rounds));
  for (std::size_t k = 0; k < rounds; ++k) {
    const Eigen::MatrixXd& x = traj.states[k].X;
    series.avg_error[k] = (x.colwise().mean().transpose() - x_star).norm();
    Eigen::VectorXd reg_sum = Eigen::VectorXd::Zero(x_star.size());
    for (int i = 0; i < n; ++i) {
      series.per_agent_error[static_cast<std::size_t>(i)][k] =
          (x.row(i).transpose() - x_star).norm();
      if (!adv.count(i)) reg_sum += x.row(i).transpose();
    }
    series.regular_avg_error[k] =
        regular > 0 ? (reg_sum / regular - x_star).norm() : std::numeric_limits<double>::quiet_NaN();
  }
  return series;
}

struct DominationReport {
  bool ok = true;
  std::vector<bool> dominated;           // per-k measured <= bound
  std::optional<int> first_violation_k;  // none when ok
  double max_violation = 0.0;            // largest measured - bound overshoot
  int violations = 0;
};

/// Non-strict comparison: measured[k] == bound[k] counts as dominated.
inline DominationReport bound_domination_report(const std::vector<double>& measured,
                                                const std::vector<double>& bound) {
  if (measured.size() != bound.size())
    throw std::invalid_argument("bound_domination_report: series length mismatch");
  DominationReport report;
  report.dominated.resize(measured.size());
  for (std::size_t k = 0; k < measured.size(); ++k) {
    const bool ok = measured[k] <= bound[k];
    report.dominated[k] = ok;
    if (!ok) {
      ++report.violations;
      if (!report.first_violation_k) report.first_violation_k = static_cast<int>(k);
      report.max_violation = std::max(report.max_violation, measured[k] - bound[k]);
    }
  }
  report.ok = report.violations == 0;
  return report;
}

inline DominationReport bound_domination_report(const ErrorSeries& err, const BoundCurve& bound) {
  return bound_domination_report(err.avg_error, bound.values);
}

}  // namespace advgd
