#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kmeclip/embedding.hpp"
#include "kmeclip/kernel.hpp"
#include "kmeclip/loss.hpp"
#include "kmeclip/synthetic.hpp"

namespace kmeclip {

/// Places `count` unit-norm points in R^d with pairwise distance >= min_dist.
/// Uses great-circle equispacing for d = 2 and greedy farthest-point
/// selection over a seeded candidate pool for d >= 3. Throws if the final
/// separation check fails.
std::vector<Eigen::VectorXd> separated_sphere_points(int count, int d,
                                                     double min_dist,
                                                     std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Perturbed-log-density bound (the eps/delta estimate behind the loss gap).

struct Lemma8Result {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Computes |sum_s mu_s f_s (log f_s - log g_s)| and the bound
/// 2 sqrt(eps) + mu(S) sqrt(eps) log(1/eps + 1/delta). Preconditions
/// (eps <= 1/e^2, delta <= eps, f a density w.r.t. mu, |f-g| <= eps, g >=
/// delta) are enforced with a named error per violated condition.
Lemma8Result lemma8_check(const Eigen::VectorXd& mu, const Eigen::VectorXd& f,
                          const Eigen::VectorXd& g, double eps, double delta);

struct Thm3Result {
  double loss_gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// For a positive table h with h >= delta and |h - exp_pmi| <= eps, checks
/// population_loss(joint, log h) - mutual_information(joint) against
/// 3 sqrt(eps) + sqrt(eps) log(1/eps + 1/delta).
Thm3Result thm3_check(const DiscreteJoint& joint, const Eigen::MatrixXd& h,
                      double eps, double delta);

// ---------------------------------------------------------------------------
// Finite-latent RKHS construction reproducing exp-PMI.

struct Thm4Result {
  std::vector<Eigen::VectorXd> anchors;
  std::vector<RkhsExpansion> x_embeddings;
  std::vector<RkhsExpansion> y_embeddings;
  double max_error = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// Places one anchor per latent class (pairwise separation >= 2/|Z|) and
/// builds, for each item, the expansion with coefficient
/// (p(item|z_i)/p(item)) * sqrt(rho_i) at anchor u_i. The diagonal of the
/// resulting Gram reproduces exp-PMI exactly; cross terms are bounded by
/// (C')^2/|Z| * exp(-2/(|Z| sigma)^2) with C' = model_ratio_bound.
Thm4Result thm4_construct(const FiniteLatentModel& model, double sigma, int d,
                          std::uint64_t seed = 0);

/// A length-scale small enough that the thm4_construct cross-term bound is
/// below `target` (conservatively, by an extra factor of |Z|^2).
double thm4_sigma_for_error(const FiniteLatentModel& model, double target);

// ---------------------------------------------------------------------------
// Monte-Carlo discretization of a kernel mean embedding.

struct DiscretizationTrial {
  int m = 0;
  double measured_error = 0.0;  // RKHS norm of the quadrature residual
  double bound = 0.0;           // sqrt(K) ||g||_{L2(mu)} / sqrt(m)
};

/// Draws m i.i.d. atoms from the discrete measure mu, forms the empirical
/// expansion (1/m) sum k(u_i, .) g(u_i), and measures the exact RKHS distance
/// to the true embedding sum_z mu_z g_z k(z, .). The bound holds in
/// expectation; a single trial may exceed it.
DiscretizationTrial thm5_trial(const std::vector<Eigen::VectorXd>& atoms,
                               const Eigen::VectorXd& mu,
                               const Eigen::VectorXd& g,
                               const KernelSpec& kernel, int m,
                               std::uint64_t seed);

/// Closed form of the mean squared residual over the sampling distribution:
/// (1/m) (sum_z mu_z k(z,z) g_z^2 - sum_{z,z'} mu_z mu_z' k(z,z') g_z g_z').
double thm5_mean_sq_error(const std::vector<Eigen::VectorXd>& atoms,
                          const Eigen::VectorXd& mu, const Eigen::VectorXd& g,
                          const KernelSpec& kernel, int m);

// ---------------------------------------------------------------------------
// Two-point construction for the 2-mixture model.

struct Thm7Construction {
  int N = 0;
  int d = 0;
  double epsilon = 0.0;
  double sigma = 0.0;
  std::vector<Eigen::VectorXd> anchor_points;
  std::vector<PointSetEmbedding> embeddings;  // indexed like TwoMixtureModel
  double max_error = 0.0;
  bool holds = false;

  /// <h_x, h_y>_H via the factored form N/4 * (k + k + k + k); exact on the
  /// diagonal because k(u,u) = 1.
  double pair_inner(int x_index, int y_index) const;
};

/// Anchors with pairwise distance >= 1/N, sigma = 0.9 (2 N^2 log(N/eps))^-1/2,
/// embeddings {u_i, u_j} with weights sqrt(N)/2; verifies the max deviation
/// from the closed-form exp-PMI over all pair combinations.
Thm7Construction thm7_construct(int N, int d, double epsilon,
                                std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Adversarial search over single-vector embeddings on the 2-mixture model.

struct Thm6Config {
  int N = 82;
  int d = 2;
  int restarts = 20;
  int steps = 5000;
  int batch = 128;
  double lr = 0.02;
  std::uint64_t seed = 0;
};

struct Thm6Result {
  double best_max_error = 0.0;
  double threshold = 0.0;  // N / 4
  bool guarantee_applies = false;
  bool consistent = false;
  std::vector<double> restart_errors;
};

/// Optimizes unit-sphere vector tables plus (alpha, tau) to minimize
/// max |alpha exp(S) - exp_pmi| on two_mixture(N). One-sided: the optimizer
/// upper-bounds what single-vector similarities can achieve, so when
/// N > 9^d consistency means best_max_error >= N/4.
Thm6Result thm6_adversarial_check(const Thm6Config& config);

}  // namespace kmeclip
