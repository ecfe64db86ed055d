#include "pelrec/em.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pelrec/errors.hpp"

namespace pelrec {

namespace {

struct NormalEquations {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  double bx = 0.0;  // G^T z
  double by = 0.0;
};

NormalEquations accumulate(const ObservationSystem& sys) {
  NormalEquations ne;
  for (std::size_t i = 0; i < sys.n_obs(); ++i) {
    const Gradient2& g = sys.g[i];
    const double z = sys.z[i];
    if (!std::isfinite(g.gx) || !std::isfinite(g.gy) || !std::isfinite(z)) {
      throw NumericError("observation system has non-finite entries");
    }
    ne.sxx += g.gx * g.gx;
    ne.sxy += g.gx * g.gy;
    ne.syy += g.gy * g.gy;
    ne.bx += g.gx * z;
    ne.by += g.gy * z;
  }
  return ne;
}

void check_params(const EmParams& p) {
  const bool ok = std::isfinite(p.sigma1_sq) && std::isfinite(p.sigma2_sq) &&
                  std::isfinite(p.sigman_sq) && p.sigma1_sq > 0.0 && p.sigma2_sq > 0.0 &&
                  p.sigman_sq > 0.0;
  if (!ok) throw NumericError("EM variances must be finite and positive");
}

Eigen::MatrixXd marginal_covariance(const ObservationSystem& sys, const EmParams& p) {
  const auto n = static_cast<Eigen::Index>(sys.n_obs());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Gradient2& gi = sys.g[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Gradient2& gj = sys.g[static_cast<std::size_t>(j)];
      const double v = p.sigma1_sq * gi.gx * gj.gx + p.sigma2_sq * gi.gy * gj.gy;
      m(i, j) = v;
      m(j, i) = v;
    }
    m(i, i) += p.sigman_sq;
  }
  return m;
}

Eigen::VectorXd observations(const ObservationSystem& sys) {
  return Eigen::Map<const Eigen::VectorXd>(sys.z.data(), static_cast<Eigen::Index>(sys.n_obs()));
}

}  // namespace

double param_distance(const EmParams& a, const EmParams& b) {
  const double d1 = a.sigma1_sq - b.sigma1_sq;
  const double d2 = a.sigma2_sq - b.sigma2_sq;
  const double dn = a.sigman_sq - b.sigman_sq;
  return std::sqrt(d1 * d1 + d2 * d2 + dn * dn);
}

Posterior e_step(const ObservationSystem& sys, const EmParams& params) {
  check_params(params);
  const NormalEquations ne = accumulate(sys);
  const double inv_n = 1.0 / params.sigman_sq;

  // Posterior precision; positive definite for positive variances.
  const double p11 = 1.0 / params.sigma1_sq + ne.sxx * inv_n;
  const double p12 = ne.sxy * inv_n;
  const double p22 = 1.0 / params.sigma2_sq + ne.syy * inv_n;
  const double det = p11 * p22 - p12 * p12;
  if (!(det > 0.0) || !std::isfinite(det)) throw NumericError("posterior precision not positive");

  Posterior post;
  post.a = {p22 / det, -p12 / det, p11 / det};
  post.c.dx = (post.a.a11 * ne.bx + post.a.a12 * ne.by) * inv_n;
  post.c.dy = (post.a.a12 * ne.bx + post.a.a22 * ne.by) * inv_n;

  post.e.resize(sys.n_obs());
  for (std::size_t i = 0; i < sys.n_obs(); ++i) {
    post.e[i] = sys.z[i] - (sys.g[i].gx * post.c.dx + sys.g[i].gy * post.c.dy);
  }
  post.tr_b = post.a.a11 * ne.sxx + 2.0 * post.a.a12 * ne.sxy + post.a.a22 * ne.syy;
  post.tr_b = std::max(post.tr_b, 0.0);
  return post;
}

EmParams m_step(const Posterior& post, std::size_t n_obs) {
  if (n_obs == 0) throw std::invalid_argument("m_step needs at least one observation");
  double e_sq = 0.0;
  for (double v : post.e) e_sq += v * v;
  EmParams next;
  next.sigman_sq = std::max((post.tr_b + e_sq) / static_cast<double>(n_obs), kVarianceFloor);
  next.sigma1_sq = std::max(post.a.a11 + post.c.dx * post.c.dx, kVarianceFloor);
  next.sigma2_sq = std::max(post.a.a22 + post.c.dy * post.c.dy, kVarianceFloor);
  return next;
}

double objective(const ObservationSystem& sys, const EmParams& params) {
  check_params(params);
  const Eigen::MatrixXd m = marginal_covariance(sys, params);
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError("marginal covariance not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  const Eigen::VectorXd w = llt.matrixL().solve(observations(sys));
  return log_det + w.squaredNorm();
}

EmResult em_estimate(const ObservationSystem& sys, const EmParams& init, double tol_xi,
                     int max_iter) {
  if (max_iter < 1) throw std::invalid_argument("em_estimate needs max_iter >= 1");
  EmResult result;
  result.params = init;
  result.objective_trace.push_back(objective(sys, init));
  for (int it = 1; it <= max_iter; ++it) {
    const Posterior post = e_step(sys, result.params);
    const EmParams next = m_step(post, sys.n_obs());
    result.u = post.c;
    result.iterations = it;
    result.objective_trace.push_back(objective(sys, next));
    const double change = param_distance(next, result.params);
    result.params = next;
    if (change <= tol_xi) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Displacement map_estimate(const ObservationSystem& sys, const EmParams& params) {
  check_params(params);
  const Eigen::MatrixXd m = marginal_covariance(sys, params);
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError("marginal covariance is singular");
  const Eigen::VectorXd w = llt.solve(observations(sys));
  Displacement u;
  for (std::size_t i = 0; i < sys.n_obs(); ++i) {
    u.dx += sys.g[i].gx * w(static_cast<Eigen::Index>(i));
    u.dy += sys.g[i].gy * w(static_cast<Eigen::Index>(i));
  }
  u.dx *= params.sigma1_sq;
  u.dy *= params.sigma2_sq;
  return u;
}

}  // namespace pelrec
