#pragma once

// Numerical side of the two stability results: Lyapunov solutions for the
// scaled tracking and observer-error matrices, the decay margin kappa(eps0),
// the composite matrix Q(eps) and its positivity threshold, the ISS bound
// constants, and a sampled check of the linear ISS bound.
//
// Matrix norms are spectral norms. The composite Lyapunov matrix P' is
// block-diag(P0, P), which is what sandwiches V(zeta) + eta' P eta.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "entry/guidance.hpp"

namespace entry {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

class NotHurwitzError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// F = [[0, 1], [-a/eps0^2, -b/eps0]].
Mat2 tracking_matrix(double a, double b, double eps0);
/// F0 = [[0, 1], [-a, -b]].
Mat2 scaled_tracking_matrix(double a, double b);
/// A0 = [[-l1, 1], [-l2, 0]].
Mat2 observer_error_matrix(double l1, double l2);

/// Solves P A + A' P = -I for symmetric positive-definite P. Throws
/// NotHurwitzError naming the violated condition (trace < 0, det > 0), and
/// CertificationError if the residual exceeds 1e-10.
Mat2 solve_lyapunov_2x2(const Mat2& a);

/// max |P A + A' P + I|.
double lyapunov_residual(const Mat2& p, const Mat2& a);

double spectral_norm(const Mat2& m);

/// kappa = 1/eps0 - 1 - 2 eps0 |P0 B| l, B = [0, 1]'.
double kappa_of(double eps0, const Mat2& p0, double l);

/// alpha = (b/eps0) |P0 B| + eps0 l |P B|.
double alpha_of(double b, double eps0, const Mat2& p0, const Mat2& p, double l);

/// Q(eps) = [[kappa, -alpha], [-alpha, 1/eps - 1]].
Mat2 q_matrix(double kappa, double alpha, double eps);

struct QThreshold {
  double kappa = 0.0;
  double alpha = 0.0;
  double eps1_star = 0.0;  // Q(eps) > 0 exactly for 0 < eps < eps1_star

  Mat2 q(double eps) const { return q_matrix(kappa, alpha, eps); }
};

/// Throws CertificationError when kappa <= 0 (no eps makes Q positive definite).
QThreshold q_and_eps_star(double kappa, double alpha);

struct StateFeedbackIssConstants {
  double lambda1 = 0.0;  // kappa / lambda_max(P0)
  double lambda2 = 0.0;  // |B|^2 |P0|^2 / lambda_min(P0)
  double lambda3 = 0.0;  // lambda_max(P0) / lambda_min(P0)
};

struct OutputFeedbackIssConstants {
  double lambda1 = 0.0;  // lambda_min(Q) / lambda_max(P')
  double lambda2 = 0.0;  // lambda_max(P') / lambda_min(P')
  double lambda3 = 0.0;  // lambda_min(P')
  double c0 = 0.0;       // (|P0|^2 + |P|^2) |B|^2
};

struct IssConstants {
  StateFeedbackIssConstants state_feedback;
  OutputFeedbackIssConstants output_feedback;
};

IssConstants iss_bound_constants(const Mat2& p0, const Mat2& p, double kappa, const Mat2& q);

struct DeltaBound {
  double l = 0.0;
  double d = 0.0;
};

/// Smallest-area envelope |delta_i| <= l |x1_i| + d: scans l on a uniform
/// grid over [0, max |delta_i| / |x1_i|], takes d(l) = max(|delta_i| - l |x1_i|, 0)
/// and keeps the l minimizing the mean envelope height d + l max|x1| / 2.
/// Ties go to the smaller l. Throws std::invalid_argument on empty input.
DeltaBound estimate_delta_bound(std::span<const double> delta, std::span<const double> x1,
                                int grid_points = 2001);

struct IssCheck {
  bool pass = false;
  double worst_margin = 0.0;  // min over the grid of bound - |x|
  double worst_time = 0.0;
  std::size_t points = 0;
  std::string reason;
};

/// Integrates x' = F x + B d from x0 and checks at every grid point
///   |x(t)| <= sqrt(lambda3) exp(-lambda1 t / 2) |x0| + |phi(eps0)| sqrt(lambda2 / lambda1) d
/// with phi(eps0) = diag(eps0, 1) and the state-feedback constants for l = 0.
/// When kappa(eps0) <= 0 the constants do not define a bound and the check
/// fails with the reason recorded.
IssCheck verify_linear_iss_bound(double a, double b, double eps0, double d, const Vec2& x0,
                                 double horizon, double dt = 1e-3);

struct CertifyReport {
  GuidanceConfig gains;
  Mat2 p0 = Mat2::Zero();
  Mat2 p = Mat2::Zero();
  double p0_residual = 0.0;
  double p_residual = 0.0;
  double l = 0.0;
  double d = 0.0;
  bool bound_fitted = false;
  std::size_t sample_count = 0;
  double kappa = 0.0;
  double alpha = 0.0;
  Mat2 q = Mat2::Zero();  // at the configured eps
  double q_lambda_min = 0.0;
  std::optional<double> eps1_star;
  double c0 = 0.0;
  IssConstants constants;
  bool state_feedback_certified = false;
  bool output_feedback_certified = false;
  std::vector<std::string> notes;
};

/// Builds the report for a gain set. With delta samples the (l, d) bound is
/// fitted first, otherwise l = d = 0.
CertifyReport certify(const GuidanceConfig& gains, std::span<const double> delta = {},
                      std::span<const double> x1 = {});

}  // namespace entry
