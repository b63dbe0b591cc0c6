#include "entry/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "entry/integrator.hpp"

namespace entry {

namespace {

const Vec2 kB(0.0, 1.0);

Eigen::Vector4d sym_eigenvalues(const Eigen::Matrix4d& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

Vec2 sym_eigenvalues(const Mat2& m) {
  return Eigen::SelfAdjointEigenSolver<Mat2>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

Mat2 tracking_matrix(double a, double b, double eps0) {
  Mat2 f;
  f << 0.0, 1.0, -a / (eps0 * eps0), -b / eps0;
  return f;
}

Mat2 scaled_tracking_matrix(double a, double b) {
  Mat2 f;
  f << 0.0, 1.0, -a, -b;
  return f;
}

Mat2 observer_error_matrix(double l1, double l2) {
  Mat2 a;
  a << -l1, 1.0, -l2, 0.0;
  return a;
}

double lyapunov_residual(const Mat2& p, const Mat2& a) {
  return (p * a + a.transpose() * p + Mat2::Identity()).cwiseAbs().maxCoeff();
}

Mat2 solve_lyapunov_2x2(const Mat2& a) {
  const double tr = a.trace();
  const double det = a.determinant();
  if (!(tr < 0.0)) {
    std::ostringstream os;
    os << "matrix is not Hurwitz: trace = " << tr << " is not negative";
    throw NotHurwitzError(os.str());
  }
  if (!(det > 0.0)) {
    std::ostringstream os;
    os << "matrix is not Hurwitz: determinant = " << det << " is not positive";
    throw NotHurwitzError(os.str());
  }

  // Unknowns (p11, p12, p22) of the symmetric solution.
  const double a11 = a(0, 0), a12 = a(0, 1), a21 = a(1, 0), a22 = a(1, 1);
  Eigen::Matrix3d m;
  m << 2.0 * a11, 2.0 * a21, 0.0,
       a12, a11 + a22, a21,
       0.0, 2.0 * a12, 2.0 * a22;
  const Eigen::Vector3d rhs(-1.0, 0.0, -1.0);
  const Eigen::Vector3d x = m.fullPivLu().solve(rhs);

  Mat2 p;
  p << x[0], x[1], x[1], x[2];
  const double res = lyapunov_residual(p, a);
  if (!(res <= 1e-10)) {
    std::ostringstream os;
    os << "Lyapunov residual " << res << " exceeds 1e-10";
    throw CertificationError(os.str());
  }
  if (!(sym_eigenvalues(p)[0] > 0.0)) {
    throw CertificationError("Lyapunov solution is not positive definite");
  }
  return p;
}

double spectral_norm(const Mat2& m) {
  return Eigen::JacobiSVD<Mat2>(m).singularValues()[0];
}

double kappa_of(double eps0, const Mat2& p0, double l) {
  return 1.0 / eps0 - 1.0 - 2.0 * eps0 * (p0 * kB).norm() * l;
}

double alpha_of(double b, double eps0, const Mat2& p0, const Mat2& p, double l) {
  return b / eps0 * (p0 * kB).norm() + eps0 * l * (p * kB).norm();
}

Mat2 q_matrix(double kappa, double alpha, double eps) {
  Mat2 q;
  q << kappa, -alpha, -alpha, 1.0 / eps - 1.0;
  return q;
}

QThreshold q_and_eps_star(double kappa, double alpha) {
  if (!(kappa > 0.0)) {
    std::ostringstream os;
    os << "kappa(eps0) = " << kappa << " is not positive: no eps makes Q positive definite";
    throw CertificationError(os.str());
  }
  return {kappa, alpha, 1.0 / (1.0 + alpha * alpha / kappa)};
}

IssConstants iss_bound_constants(const Mat2& p0, const Mat2& p, double kappa, const Mat2& q) {
  const double b2 = kB.squaredNorm();
  const Vec2 e0 = sym_eigenvalues(p0);
  const double n0 = spectral_norm(p0);
  const double n = spectral_norm(p);

  IssConstants c;
  c.state_feedback.lambda1 = kappa / e0[1];
  c.state_feedback.lambda2 = b2 * n0 * n0 / e0[0];
  c.state_feedback.lambda3 = e0[1] / e0[0];

  Eigen::Matrix4d pc = Eigen::Matrix4d::Zero();
  pc.topLeftCorner<2, 2>() = p0;
  pc.bottomRightCorner<2, 2>() = p;
  const Eigen::Vector4d ec = sym_eigenvalues(pc);
  const double q_min = sym_eigenvalues(q)[0];
  c.output_feedback.lambda1 = q_min / ec[3];
  c.output_feedback.lambda2 = ec[3] / ec[0];
  c.output_feedback.lambda3 = ec[0];
  c.output_feedback.c0 = (n0 * n0 + n * n) * b2;
  return c;
}

DeltaBound estimate_delta_bound(std::span<const double> delta, std::span<const double> x1,
                                int grid_points) {
  if (delta.empty()) throw std::invalid_argument("estimate_delta_bound: no samples");
  if (delta.size() != x1.size()) {
    throw std::invalid_argument("estimate_delta_bound: delta and x1 differ in length");
  }
  if (grid_points < 2) throw std::invalid_argument("estimate_delta_bound: grid too small");

  double x_max = 0.0;
  double l_max = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double ax = std::abs(x1[i]);
    x_max = std::max(x_max, ax);
    if (ax > 0.0) l_max = std::max(l_max, std::abs(delta[i]) / ax);
  }
  const auto d_of = [&](double l) {
    double d = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      d = std::max(d, std::abs(delta[i]) - l * std::abs(x1[i]));
    }
    return d;
  };

  DeltaBound best{0.0, d_of(0.0)};
  double best_cost = best.d;
  for (int k = 1; k < grid_points && l_max > 0.0; ++k) {
    const double l = l_max * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    const double d = d_of(l);
    const double cost = d + 0.5 * l * x_max;
    if (cost < best_cost) {
      best_cost = cost;
      best = {l, d};
    }
  }
  return best;
}

IssCheck verify_linear_iss_bound(double a, double b, double eps0, double d, const Vec2& x0,
                                 double horizon, double dt) {
  IssCheck out;
  const Mat2 f = tracking_matrix(a, b, eps0);
  const Mat2 p0 = solve_lyapunov_2x2(scaled_tracking_matrix(a, b));
  const double kappa = kappa_of(eps0, p0, 0.0);
  const StateFeedbackIssConstants c =
      iss_bound_constants(p0, Mat2::Identity(), kappa, Mat2::Identity()).state_feedback;
  if (!(c.lambda1 > 0.0)) {
    std::ostringstream os;
    os << "kappa(eps0) = " << kappa << " <= 0 (lambda1 = " << c.lambda1
       << "): the state-feedback ISS constants do not define a bound";
    out.reason = os.str();
    out.worst_margin = -std::numeric_limits<double>::infinity();
    return out;
  }

  const double phi_norm = std::max(eps0, 1.0);
  const double gain_term = phi_norm * std::sqrt(c.lambda2 / c.lambda1) * d;
  const double x0n = x0.norm();
  const auto rhs = [&](double, const Vec2& x) { return Vec2(f * x + kB * d); };

  Vec2 x = x0;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double bound = std::sqrt(c.lambda3) * std::exp(-0.5 * c.lambda1 * t) * x0n + gain_term;
    const double margin = bound - x.norm();
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_time = t;
    }
    ++out.points;
    if (k < n) x = rk4_step(rhs, t, x, dt);
  }
  out.pass = out.worst_margin >= 0.0;
  if (!out.pass) {
    std::ostringstream os;
    os << "bound violated by " << -out.worst_margin << " at t = " << out.worst_time << " s";
    out.reason = os.str();
  }
  return out;
}

CertifyReport certify(const GuidanceConfig& gains, std::span<const double> delta,
                      std::span<const double> x1) {
  gains.validate();
  CertifyReport r;
  r.gains = gains;
  const Mat2 f0 = scaled_tracking_matrix(gains.a, gains.b);
  const Mat2 a0 = observer_error_matrix(gains.l1, gains.l2);
  r.p0 = solve_lyapunov_2x2(f0);
  r.p = solve_lyapunov_2x2(a0);
  r.p0_residual = lyapunov_residual(r.p0, f0);
  r.p_residual = lyapunov_residual(r.p, a0);

  if (!delta.empty()) {
    const DeltaBound bound = estimate_delta_bound(delta, x1);
    r.l = bound.l;
    r.d = bound.d;
    r.bound_fitted = true;
    r.sample_count = delta.size();
  } else {
    r.notes.push_back("no delta samples supplied: certificate evaluated with l = d = 0");
  }

  r.kappa = kappa_of(gains.eps0, r.p0, r.l);
  r.alpha = alpha_of(gains.b, gains.eps0, r.p0, r.p, r.l);
  r.q = q_matrix(r.kappa, r.alpha, gains.eps);
  r.q_lambda_min = sym_eigenvalues(r.q)[0];
  r.c0 = (std::pow(spectral_norm(r.p0), 2) + std::pow(spectral_norm(r.p), 2));
  r.constants = iss_bound_constants(r.p0, r.p, r.kappa, r.q);

  r.state_feedback_certified = r.kappa > 0.0;
  if (r.kappa > 0.0) {
    r.eps1_star = q_and_eps_star(r.kappa, r.alpha).eps1_star;
    r.output_feedback_certified = gains.eps < *r.eps1_star;
    if (!r.output_feedback_certified) {
      std::ostringstream os;
      os << "configured eps = " << gains.eps << " is not below eps1* = " << *r.eps1_star;
      r.notes.push_back(os.str());
    }
  } else {
    std::ostringstream os;
    os << "kappa(eps0) = " << r.kappa << " <= 0 for eps0 = " << gains.eps0
       << ": neither bound is certified (requires 1/eps0 > 1 + 2 eps0 |P0 B| l)";
    r.notes.push_back(os.str());
  }
  r.notes.push_back("composite Lyapunov matrix taken as block-diag(P0, P)");
  return r;
}

}  // namespace entry
