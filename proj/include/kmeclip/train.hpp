#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kmeclip/loss.hpp"
#include "kmeclip/rng.hpp"
#include "kmeclip/synthetic.hpp"

namespace kmeclip {

enum class Side { X, Y };
enum class OptimizerKind { Sgd, Adam };

/// Learnable per-item embedding parameters, stored as one flat vector:
/// raw point coordinates (projected to the unit sphere when read), raw
/// weight pre-activations (mapped through exp), and a shared log_tau.
/// For Kme/Wpse, tau = 1/sigma^2; for Clip, tau is the temperature.
class EmbeddingTable {
 public:
  EmbeddingTable(SimilarityKind mode, int n_x, int n_y, int d, int m,
                 double init_log_tau, Rng& rng);

  SimilarityKind mode() const { return mode_; }
  int n_x() const { return n_x_; }
  int n_y() const { return n_y_; }
  int dim() const { return d_; }
  int point_count() const { return m_; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  double log_tau() const { return params_[params_.size() - 1]; }
  double tau() const;

  int point_offset(Side side, int item, int k) const;
  int weight_offset(Side side, int item, int k) const;
  int log_tau_offset() const { return static_cast<int>(params_.size()) - 1; }

  Eigen::VectorXd normalized_point(Side side, int item, int k) const;
  double weight_preact(Side side, int item, int k) const;

  /// S(a, b) for X-side item a and Y-side item b under the table's mode.
  double similarity(int a, int b) const;
  Eigen::MatrixXd similarity_table() const;

  /// Rescales every raw point block to unit norm (projection step).
  void renormalize_points();

 private:
  int item_stride() const;
  int weights_per_item() const;

  SimilarityKind mode_;
  int n_x_, n_y_, d_, m_;
  Eigen::VectorXd params_;
};

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// Minibatch loss over the matched pairs in `batch` (entries are
/// (x item, y item)) together with analytic derivatives w.r.t. every raw
/// parameter. A batch of size 1 has zero loss and zero gradient.
LossGrad minibatch_loss_and_grad(const EmbeddingTable& table,
                                 const std::vector<std::pair<int, int>>& batch);

/// Population loss of the table's full similarity matrix under `joint`,
/// with analytic gradients.
LossGrad population_loss_and_grad(const EmbeddingTable& table,
                                  const DiscreteJoint& joint);

/// Max over support pairs of |exp(S) - exp_pmi|. For Clip the free scalar
/// alpha is fitted by one-dimensional search before measuring.
double pmi_fit(const EmbeddingTable& table, const DiscreteJoint& joint);

struct TrainConfig {
  int steps = 2000;
  double learning_rate = 0.02;
  int batch_size = 32;
  bool full_batch = false;
  std::uint64_t seed = 0;
  int point_set_size = 2;   // m
  int dim = 3;              // d
  OptimizerKind optimizer = OptimizerKind::Adam;
  int log_every = 50;
  double init_log_tau = std::numeric_limits<double>::quiet_NaN();  // mode default
};

struct TrainRecord {
  int step = 0;
  double batch_loss = 0.0;
  double population_loss = 0.0;
  double pmi_fit = 0.0;
  double tau = 0.0;
};

struct TrainResult {
  EmbeddingTable table;
  std::vector<TrainRecord> curve;
};

/// Optimizes an embedding table against the joint, sampling minibatches from
/// p(x,y) or, when full_batch is set, descending the exact population loss.
/// Throws with the step index if the loss diverges to NaN.
TrainResult train(const DiscreteJoint& joint, SimilarityKind mode,
                  const TrainConfig& config);

}  // namespace kmeclip
