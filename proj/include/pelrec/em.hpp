#pragma once

#include <vector>

#include "pelrec/frame.hpp"
#include "pelrec/observation.hpp"

namespace pelrec {

/// Lower bound applied to every variance produced by the M-step.
inline constexpr double kVarianceFloor = 1e-8;

/// Model variances: prior on u_x, prior on u_y, observation noise.
struct EmParams {
  double sigma1_sq = 1.0;
  double sigma2_sq = 1.0;
  double sigman_sq = 1.0;

  friend bool operator==(const EmParams&, const EmParams&) = default;
};

/// Euclidean distance between two parameter sets viewed as 3-vectors.
double param_distance(const EmParams& a, const EmParams& b);

/// Symmetric 2x2 matrix.
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
};

/// Posterior moments of the complete data (u, n) given z.
struct Posterior {
  Sym2 a;                 // Cov[u | z]
  Displacement c;         // E[u | z]
  std::vector<double> e;  // E[n | z]
  double tr_b = 0.0;      // Tr Cov[n | z]
};

struct EmResult {
  Displacement u;
  EmParams params;
  int iterations = 0;
  /// Objective at the initial parameters and after every M-step.
  std::vector<double> objective_trace;
  bool converged = false;
};

/// E-step through the 2x2 information form:
///   A = (Lu^-1 + G^T G / sn)^-1,  c = A G^T z / sn,  e = z - G c,  Tr B = Tr(A G^T G).
/// Throws NumericError on non-finite input.
Posterior e_step(const ObservationSystem& sys, const EmParams& params);

/// Closed-form variance re-estimation, floored at kVarianceFloor.
EmParams m_step(const Posterior& post, std::size_t n_obs);

/// Negative log-likelihood (up to constants and a factor of 2):
///   log|M| + z^T M^-1 z,  M = G Lu G^T + sn I.
double objective(const ObservationSystem& sys, const EmParams& params);

/// Alternates E and M steps on a fixed system until the parameter change is
/// at most tol_xi or max_iter pairs have run.
EmResult em_estimate(const ObservationSystem& sys, const EmParams& init, double tol_xi,
                     int max_iter);

/// Posterior mean evaluated directly as Lu G^T (G Lu G^T + sn I)^-1 z.
Displacement map_estimate(const ObservationSystem& sys, const EmParams& params);

}  // namespace pelrec
