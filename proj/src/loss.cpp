#include "kmeclip/loss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kmeclip {

namespace {

void check_finite(const Eigen::MatrixXd& S) {
  if (!S.allFinite())
    throw std::invalid_argument("similarity matrix has non-finite entries");
}

// log sum_i weights[i] * exp(values[i]) over entries with positive weight,
// max-shifted.
double weighted_logsumexp(const Eigen::VectorXd& weights,
                          const Eigen::VectorXd& values) {
  double max_v = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (weights[i] > 0.0 && values[i] > max_v) max_v = values[i];
  if (!std::isfinite(max_v)) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (weights[i] > 0.0) acc += weights[i] * std::exp(values[i] - max_v);
  return max_v + std::log(acc);
}

}  // namespace

double minibatch_loss(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols())
    throw std::invalid_argument("minibatch_loss: matrix must be square");
  check_finite(S);
  const Eigen::Index n = S.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Row term: candidates y_j for the query x_i.
    const double row_max = S.row(i).maxCoeff();
    double row_acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      row_acc += std::exp(S(i, j) - row_max);
    total += -(S(i, i) - row_max) + std::log(row_acc);
    // Column term: candidates x_j for the query y_i.
    const double col_max = S.col(i).maxCoeff();
    double col_acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      col_acc += std::exp(S(j, i) - col_max);
    total += -(S(i, i) - col_max) + std::log(col_acc);
  }
  return total / (2.0 * static_cast<double>(n));
}

double population_loss(const DiscreteJoint& joint, const Eigen::MatrixXd& S,
                       SimilarityDomain domain) {
  if (S.rows() != joint.num_x() || S.cols() != joint.num_y())
    throw std::invalid_argument("population_loss: dimension mismatch");
  if (domain == SimilarityDomain::Log) {
    check_finite(S);
  } else {
    if (!S.allFinite() || (S.array() < 0.0).any())
      throw std::invalid_argument(
          "population_loss: positive-domain matrix must be finite and >= 0");
  }

  const int nx = joint.num_x();
  const int ny = joint.num_y();

  // Per-column log E_{p(x')}[exp S(x', y)] and per-row counterpart.
  Eigen::VectorXd col_lse(ny), row_lse(nx);
  if (domain == SimilarityDomain::Log) {
    for (int y = 0; y < ny; ++y)
      col_lse[y] = weighted_logsumexp(joint.marginal_x, S.col(y));
    for (int x = 0; x < nx; ++x)
      row_lse[x] = weighted_logsumexp(joint.marginal_y,
                                      S.row(x).transpose());
  } else {
    for (int y = 0; y < ny; ++y)
      col_lse[y] = std::log(joint.marginal_x.dot(S.col(y)));
    for (int x = 0; x < nx; ++x)
      row_lse[x] = std::log(S.row(x) * joint.marginal_y);
  }

  // Normalized so the value at the optimum S = PMI is the mutual information
  // itself: each supported cell contributes its divergence from PMI plus the
  // PMI-weighted mass, which sums to gap(S) + I(X,Y) >= I(X,Y).
  double total = 0.0;
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double pxy = joint.joint(x, y);
      if (pxy <= 0.0) continue;
      const double s =
          domain == SimilarityDomain::Log ? S(x, y) : std::log(S(x, y));
      if (!std::isfinite(s))
        return std::numeric_limits<double>::infinity();
      const double pmi =
          std::log(pxy / (joint.marginal_x[x] * joint.marginal_y[y]));
      total += pxy * (2.0 * pmi - s + 0.5 * (col_lse[y] + row_lse[x]));
    }
  }
  return total;
}

Eigen::MatrixXd similarity_matrix(SimilarityKind kind,
                                  const std::vector<PointSetEmbedding>& xs,
                                  const std::vector<PointSetEmbedding>& ys,
                                  const KernelSpec& kernel) {
  if (kind == SimilarityKind::Clip)
    throw std::invalid_argument(
        "similarity_matrix: Clip takes ClipEmbedding inputs");
  Eigen::MatrixXd S(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      S(i, j) = kind == SimilarityKind::Kme
                    ? kme_similarity(xs[i], ys[j], kernel)
                    : wpse_similarity(xs[i], ys[j], kernel);
    }
  }
  return S;
}

Eigen::MatrixXd similarity_matrix(const std::vector<ClipEmbedding>& xs,
                                  const std::vector<ClipEmbedding>& ys) {
  Eigen::MatrixXd S(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      S(i, j) = clip_similarity(xs[i], ys[j]);
  return S;
}

double loss_from_similarity(const DiscreteJoint& joint, SimilarityKind kind,
                            const std::vector<PointSetEmbedding>& xs,
                            const std::vector<PointSetEmbedding>& ys,
                            const KernelSpec& kernel) {
  if (static_cast<int>(xs.size()) != joint.num_x() ||
      static_cast<int>(ys.size()) != joint.num_y())
    throw std::invalid_argument(
        "loss_from_similarity: embeddings do not cover the support");
  return population_loss(joint, similarity_matrix(kind, xs, ys, kernel),
                         SimilarityDomain::Log);
}

double loss_from_similarity(const DiscreteJoint& joint,
                            const std::vector<ClipEmbedding>& xs,
                            const std::vector<ClipEmbedding>& ys) {
  if (static_cast<int>(xs.size()) != joint.num_x() ||
      static_cast<int>(ys.size()) != joint.num_y())
    throw std::invalid_argument(
        "loss_from_similarity: embeddings do not cover the support");
  return population_loss(joint, similarity_matrix(xs, ys),
                         SimilarityDomain::Log);
}

}  // namespace kmeclip
