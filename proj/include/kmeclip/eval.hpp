#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "kmeclip/synthetic.hpp"

namespace kmeclip {

enum class RetrievalDirection { XtoY, YtoX };

struct RetrievalReport {
  RetrievalDirection direction = RetrievalDirection::XtoY;
  int n_queries = 0;
  std::map<int, double> top_k_accuracy;
  // Queries whose cut at rank k fell inside a run of equal scores, so the
  // outcome depended on index-order tie-breaking.
  std::map<int, int> tie_counts;
};

/// Ranks candidates by similarity (descending, ties broken by index order)
/// and scores a query as a hit at k if some maximizer of the conditional
/// p(candidate | query) appears in the top k. Accuracy is weighted by the
/// query marginal; queries with zero marginal are skipped.
RetrievalReport topk_retrieval(const DiscreteJoint& joint,
                               const Eigen::MatrixXd& S,
                               const std::vector<int>& ks,
                               RetrievalDirection direction);

}  // namespace kmeclip
