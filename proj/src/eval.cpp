#include "kmeclip/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace kmeclip {

RetrievalReport topk_retrieval(const DiscreteJoint& joint,
                               const Eigen::MatrixXd& S,
                               const std::vector<int>& ks,
                               RetrievalDirection direction) {
  if (S.rows() != joint.num_x() || S.cols() != joint.num_y())
    throw std::invalid_argument("topk_retrieval: dimension mismatch");
  if (ks.empty()) throw std::invalid_argument("topk_retrieval: no k values");
  for (int k : ks)
    if (k < 1) throw std::invalid_argument("topk_retrieval: k must be >= 1");

  // Orient so queries index rows.
  const bool x_to_y = direction == RetrievalDirection::XtoY;
  const Eigen::MatrixXd scores = x_to_y ? S : S.transpose();
  const Eigen::MatrixXd probs =
      x_to_y ? joint.joint : Eigen::MatrixXd(joint.joint.transpose());
  const Eigen::VectorXd& query_marginal =
      x_to_y ? joint.marginal_x : joint.marginal_y;
  const int n_queries = static_cast<int>(scores.rows());
  const int n_candidates = static_cast<int>(scores.cols());

  RetrievalReport report;
  report.direction = direction;
  for (int k : ks) {
    report.top_k_accuracy[k] = 0.0;
    report.tie_counts[k] = 0;
  }

  double total_weight = 0.0;
  for (int q = 0; q < n_queries; ++q) {
    const double weight = query_marginal[q];
    if (weight <= 0.0) continue;
    total_weight += weight;
    ++report.n_queries;

    std::vector<int> order(n_candidates);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return scores(q, a) > scores(q, b);
    });

    // Rank of the first conditional-mode candidate.
    const double mode_prob = probs.row(q).maxCoeff();
    int hit_rank = n_candidates;
    for (int r = 0; r < n_candidates; ++r) {
      if (probs(q, order[r]) == mode_prob) {
        hit_rank = r;
        break;
      }
    }

    for (int k : ks) {
      if (hit_rank < k) report.top_k_accuracy[k] += weight;
      if (k < n_candidates &&
          scores(q, order[k - 1]) == scores(q, order[k]))
        ++report.tie_counts[k];
    }
  }
  if (report.n_queries == 0)
    throw std::invalid_argument("topk_retrieval: empty query support");
  for (int k : ks) report.top_k_accuracy[k] /= total_weight;
  return report;
}

}  // namespace kmeclip
