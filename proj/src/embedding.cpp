#include "kmeclip/embedding.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace kmeclip {

namespace {
constexpr double kUnitNormTol = 1e-10;
}

PointSetEmbedding::PointSetEmbedding(std::vector<Eigen::VectorXd> points,
                                     std::vector<double> weights) {
  points_ = std::move(points);
  weights_ = std::move(weights);
  validate_common();
  for (const auto& p : points_) {
    if (std::abs(p.norm() - 1.0) > kUnitNormTol)
      throw std::invalid_argument(
          "PointSetEmbedding: points must be unit-norm");
  }
}

PointSetEmbedding PointSetEmbedding::unchecked(
    std::vector<Eigen::VectorXd> points, std::vector<double> weights) {
  PointSetEmbedding e;
  e.points_ = std::move(points);
  e.weights_ = std::move(weights);
  e.validate_common();
  return e;
}

void PointSetEmbedding::validate_common() const {
  if (points_.empty())
    throw std::invalid_argument("PointSetEmbedding: m >= 1 required");
  if (points_.size() != weights_.size())
    throw std::invalid_argument(
        "PointSetEmbedding: points/weights length mismatch");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != points_[0].size())
      throw std::invalid_argument(
          "PointSetEmbedding: inconsistent point dimensions");
    if (!(weights_[i] > 0.0))
      throw std::invalid_argument(
          "PointSetEmbedding: weights must be strictly positive");
  }
}

RkhsExpansion PointSetEmbedding::expansion(const KernelSpec& kernel) const {
  return RkhsExpansion(points_, weights_, kernel);
}

nlohmann::json PointSetEmbedding::to_json() const {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const auto& p : points_) {
    std::vector<double> row(p.data(), p.data() + p.size());
    j["points"].push_back(row);
  }
  j["weights"] = weights_;
  return j;
}

PointSetEmbedding PointSetEmbedding::from_json(const nlohmann::json& j) {
  std::vector<Eigen::VectorXd> points;
  for (const auto& row : j.at("points")) {
    std::vector<double> vals = row.get<std::vector<double>>();
    points.push_back(
        Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size()));
  }
  std::vector<double> weights = j.at("weights").get<std::vector<double>>();
  return PointSetEmbedding(std::move(points), std::move(weights));
}

ClipEmbedding::ClipEmbedding(Eigen::VectorXd vector_in, double tau_in)
    : vector(std::move(vector_in)), tau(tau_in) {
  if (std::abs(vector.norm() - 1.0) > kUnitNormTol)
    throw std::invalid_argument("ClipEmbedding: vector must be unit-norm");
  if (!(tau > 0.0))
    throw std::invalid_argument("ClipEmbedding: tau must be positive");
}

double kme_similarity(const PointSetEmbedding& a, const PointSetEmbedding& b,
                      const KernelSpec& kernel) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("kme_similarity: dimension mismatch");
  // log-sum-exp over the m_a * m_b terms log(w_i) + log(w_j) + log k.
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(a.size()) * b.size());
  double max_term = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.size(); ++i) {
    const double lwa = std::log(a.weights()[i]);
    for (int j = 0; j < b.size(); ++j) {
      const double t = lwa + std::log(b.weights()[j]) +
                       log_kernel_eval(kernel, a.points()[i], b.points()[j]);
      log_terms.push_back(t);
      if (t > max_term) max_term = t;
    }
  }
  double acc = 0.0;
  for (double t : log_terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

double clip_similarity(const ClipEmbedding& a, const ClipEmbedding& b) {
  if (a.vector.size() != b.vector.size())
    throw std::invalid_argument("clip_similarity: dimension mismatch");
  if (a.tau != b.tau)
    throw std::invalid_argument("clip_similarity: temperatures differ");
  return a.vector.dot(b.vector) / a.tau;
}

double wpse_similarity(const PointSetEmbedding& a, const PointSetEmbedding& b,
                       const KernelSpec& kernel) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("wpse_similarity: dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      total += a.weights()[i] * b.weights()[j] *
               kernel_eval(kernel, a.points()[i], b.points()[j]);
  return total;
}

double prop2_constant(const KernelSpec& kernel) {
  return -1.0 / (kernel.sigma * kernel.sigma);
}

}  // namespace kmeclip
