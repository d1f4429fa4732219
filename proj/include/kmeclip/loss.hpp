#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kmeclip/embedding.hpp"
#include "kmeclip/synthetic.hpp"

namespace kmeclip {

enum class SimilarityDomain {
  Log,      // entries are S(x,y)
  Positive  // entries are exp(S(x,y)), allowing exact zeros
};

enum class SimilarityKind { Kme, Clip, Wpse };

/// Symmetric minibatch contrastive loss on an n x n similarity matrix whose
/// diagonal holds the matched pairs: the average of row- and column-softmax
/// cross entropies at the diagonal, max-shifted for stability.
double minibatch_loss(const Eigen::MatrixXd& S);

/// Exact population loss, normalized so that its minimum value is the mutual
/// information, attained at S = PMI: the divergence of S from PMI under the
/// contrastive objective, plus I(X,Y). Inner expectations run over the
/// marginals, the outer expectation over the joint; support cells with
/// p(x,y) = 0 contribute nothing. In the Positive domain an exact zero at a
/// supported cell yields +infinity.
double population_loss(const DiscreteJoint& joint, const Eigen::MatrixXd& S,
                       SimilarityDomain domain = SimilarityDomain::Log);

/// Pairwise similarity table (log domain) for point-set embeddings under the
/// chosen similarity. Wpse values are used directly as S, without a log.
Eigen::MatrixXd similarity_matrix(SimilarityKind kind,
                                  const std::vector<PointSetEmbedding>& xs,
                                  const std::vector<PointSetEmbedding>& ys,
                                  const KernelSpec& kernel);

Eigen::MatrixXd similarity_matrix(const std::vector<ClipEmbedding>& xs,
                                  const std::vector<ClipEmbedding>& ys);

/// Builds the similarity table for the joint's support and evaluates the
/// population loss. Embedding lists must cover the support exactly.
double loss_from_similarity(const DiscreteJoint& joint, SimilarityKind kind,
                            const std::vector<PointSetEmbedding>& xs,
                            const std::vector<PointSetEmbedding>& ys,
                            const KernelSpec& kernel);

double loss_from_similarity(const DiscreteJoint& joint,
                            const std::vector<ClipEmbedding>& xs,
                            const std::vector<ClipEmbedding>& ys);

}  // namespace kmeclip
