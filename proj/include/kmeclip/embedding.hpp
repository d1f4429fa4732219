#pragma once

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "kmeclip/kernel.hpp"

namespace kmeclip {

/// A point set {(w_i, f_i)} with strictly positive weights. Points are
/// unit-norm (to 1e-10) under the checked constructor; the unchecked factory
/// skips the norm check for constructions that place points off the sphere.
class PointSetEmbedding {
 public:
  PointSetEmbedding(std::vector<Eigen::VectorXd> points,
                    std::vector<double> weights);

  static PointSetEmbedding unchecked(std::vector<Eigen::VectorXd> points,
                                     std::vector<double> weights);

  const std::vector<Eigen::VectorXd>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  int size() const { return static_cast<int>(points_.size()); }
  int dim() const { return static_cast<int>(points_[0].size()); }

  /// The RKHS element sum_i w_i k(f_i, .) as a generic expansion.
  RkhsExpansion expansion(const KernelSpec& kernel) const;

  nlohmann::json to_json() const;
  static PointSetEmbedding from_json(const nlohmann::json& j);

 private:
  PointSetEmbedding() = default;
  void validate_common() const;

  std::vector<Eigen::VectorXd> points_;
  std::vector<double> weights_;
};

/// A single L2-normalized vector with a shared temperature.
struct ClipEmbedding {
  Eigen::VectorXd vector;
  double tau;

  ClipEmbedding(Eigen::VectorXd vector_in, double tau_in);
};

/// log <h_a, h_b>_H = log sum_ij w_i^a w_j^b k(f_i^a, f_j^b), evaluated with
/// a max shift so tiny sigma does not underflow the sum.
double kme_similarity(const PointSetEmbedding& a, const PointSetEmbedding& b,
                      const KernelSpec& kernel);

/// g_a . g_b / tau.
double clip_similarity(const ClipEmbedding& a, const ClipEmbedding& b);

/// The weighted kernel double sum without the logarithm.
double wpse_similarity(const PointSetEmbedding& a, const PointSetEmbedding& b,
                       const KernelSpec& kernel);

/// The additive constant -1/sigma^2 by which the single-point kme similarity
/// differs from the clip similarity at tau = sigma^2.
double prop2_constant(const KernelSpec& kernel);

}  // namespace kmeclip
