#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace kmeclip {

/// Discrete conditional-independence model: a latent class z ~ rho with
/// p(x,y|z) = p(x|z) p(y|z). Conditional tables are column-stochastic:
/// cond_x(x, z) = p(x|z) with each column summing to 1.
struct FiniteLatentModel {
  Eigen::VectorXd latent_probs;  // |Z|
  Eigen::MatrixXd cond_x;        // |X| x |Z|
  Eigen::MatrixXd cond_y;        // |Y| x |Z|

  FiniteLatentModel(Eigen::VectorXd latent_probs_in, Eigen::MatrixXd cond_x_in,
                    Eigen::MatrixXd cond_y_in);

  int num_latents() const { return static_cast<int>(latent_probs.size()); }
  int num_x() const { return static_cast<int>(cond_x.rows()); }
  int num_y() const { return static_cast<int>(cond_y.rows()); }

  nlohmann::json to_json() const;
  static FiniteLatentModel from_json(const nlohmann::json& j);
};

/// Explicit joint table over finite X x Y with marginals.
struct DiscreteJoint {
  Eigen::MatrixXd joint;       // |X| x |Y|
  Eigen::VectorXd marginal_x;  // row sums
  Eigen::VectorXd marginal_y;  // column sums

  /// Builds marginals from the table and validates normalization to 1e-12.
  static DiscreteJoint from_table(Eigen::MatrixXd table);

  int num_x() const { return static_cast<int>(joint.rows()); }
  int num_y() const { return static_cast<int>(joint.cols()); }

  nlohmann::json to_json() const;
  static DiscreteJoint from_json(const nlohmann::json& j);
};

/// Unordered pair of class labels, canonicalized to first <= second at
/// construction. Labels are 0-based.
struct ClassPair {
  int first;
  int second;

  ClassPair(int a, int b);
  bool operator==(const ClassPair& o) const {
    return first == o.first && second == o.second;
  }
};

/// The 2-mixture model: N latent classes, items are unordered pairs (i,j),
/// p(x=(i,j) | z=l) proportional to the number of entries of the pair equal
/// to l. Both marginals are uniform: p_X(ij) = 2 / (N (N+1)).
struct TwoMixtureModel {
  int N;

  explicit TwoMixtureModel(int N_in);

  int num_pairs() const { return N * (N + 1) / 2; }
  int index_of(ClassPair p) const;
  ClassPair pair_at(int index) const;

  FiniteLatentModel latent_model() const;
};

/// joint(x,y) = sum_z rho(z) p(x|z) p(y|z).
DiscreteJoint latent_to_joint(const FiniteLatentModel& model);

/// p(x,y) / (p(x) p(y)). Throws when a marginal is zero.
double exp_pmi(const DiscreteJoint& joint, int x, int y);

/// Closed form for the 2-mixture model:
/// N/4 * (d(i,s) + d(i,t) + d(j,s) + d(j,t)) with Kronecker deltas.
double exp_pmi_two_mixture(int N, ClassPair x, ClassPair y);

/// sum over p(x,y) > 0 of p(x,y) log(p(x,y) / (p(x) p(y))), in nats.
double mutual_information(const DiscreteJoint& joint);

/// max over (x,z) and (y,z) of p(x|z)/p(x) and p(y|z)/p(y).
double model_ratio_bound(const FiniteLatentModel& model);

}  // namespace kmeclip
