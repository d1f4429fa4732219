#include "kmeclip/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace kmeclip {

namespace {
constexpr double kNormTol = 1e-12;

std::vector<std::vector<double>> matrix_to_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty matrix in JSON");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw std::invalid_argument("ragged matrix in JSON");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}
}  // namespace

FiniteLatentModel::FiniteLatentModel(Eigen::VectorXd latent_probs_in,
                                     Eigen::MatrixXd cond_x_in,
                                     Eigen::MatrixXd cond_y_in)
    : latent_probs(std::move(latent_probs_in)),
      cond_x(std::move(cond_x_in)),
      cond_y(std::move(cond_y_in)) {
  if (latent_probs.size() == 0)
    throw std::invalid_argument("FiniteLatentModel: empty latent space");
  if (cond_x.cols() != latent_probs.size() ||
      cond_y.cols() != latent_probs.size())
    throw std::invalid_argument(
        "FiniteLatentModel: conditional tables must have |Z| columns");
  if ((latent_probs.array() < 0.0).any() || (cond_x.array() < 0.0).any() ||
      (cond_y.array() < 0.0).any())
    throw std::invalid_argument("FiniteLatentModel: negative probability");
  if (std::abs(latent_probs.sum() - 1.0) > kNormTol)
    throw std::invalid_argument("FiniteLatentModel: rho does not sum to 1");
  for (Eigen::Index z = 0; z < latent_probs.size(); ++z) {
    if (std::abs(cond_x.col(z).sum() - 1.0) > kNormTol ||
        std::abs(cond_y.col(z).sum() - 1.0) > kNormTol)
      throw std::invalid_argument(
          "FiniteLatentModel: conditional column does not sum to 1");
  }
}

nlohmann::json FiniteLatentModel::to_json() const {
  nlohmann::json j;
  j["latent_probs"] =
      std::vector<double>(latent_probs.data(),
                          latent_probs.data() + latent_probs.size());
  j["cond_x"] = matrix_to_rows(cond_x);
  j["cond_y"] = matrix_to_rows(cond_y);
  return j;
}

FiniteLatentModel FiniteLatentModel::from_json(const nlohmann::json& j) {
  std::vector<double> rho = j.at("latent_probs").get<std::vector<double>>();
  return FiniteLatentModel(
      Eigen::Map<const Eigen::VectorXd>(rho.data(), rho.size()),
      rows_to_matrix(j.at("cond_x").get<std::vector<std::vector<double>>>()),
      rows_to_matrix(j.at("cond_y").get<std::vector<std::vector<double>>>()));
}

DiscreteJoint DiscreteJoint::from_table(Eigen::MatrixXd table) {
  if (table.rows() == 0 || table.cols() == 0)
    throw std::invalid_argument("DiscreteJoint: empty table");
  if ((table.array() < 0.0).any())
    throw std::invalid_argument("DiscreteJoint: negative entry");
  if (std::abs(table.sum() - 1.0) > kNormTol)
    throw std::invalid_argument("DiscreteJoint: table does not sum to 1");
  DiscreteJoint d;
  d.marginal_x = table.rowwise().sum();
  d.marginal_y = table.colwise().sum().transpose();
  d.joint = std::move(table);
  return d;
}

nlohmann::json DiscreteJoint::to_json() const {
  nlohmann::json j;
  j["joint"] = matrix_to_rows(joint);
  return j;
}

DiscreteJoint DiscreteJoint::from_json(const nlohmann::json& j) {
  return from_table(
      rows_to_matrix(j.at("joint").get<std::vector<std::vector<double>>>()));
}

ClassPair::ClassPair(int a, int b)
    : first(a < b ? a : b), second(a < b ? b : a) {
  if (first < 0) throw std::invalid_argument("ClassPair: negative label");
}

TwoMixtureModel::TwoMixtureModel(int N_in) : N(N_in) {
  if (N < 1) throw std::invalid_argument("TwoMixtureModel: N must be >= 1");
}

int TwoMixtureModel::index_of(ClassPair p) const {
  if (p.second >= N)
    throw std::out_of_range("TwoMixtureModel: label out of range");
  // Row-major upper triangle with 0-based labels, i <= j.
  const int i = p.first;
  const int j = p.second;
  return i * (2 * N - i + 1) / 2 + (j - i);
}

ClassPair TwoMixtureModel::pair_at(int index) const {
  if (index < 0 || index >= num_pairs())
    throw std::out_of_range("TwoMixtureModel: index out of range");
  int i = 0;
  int remaining = index;
  while (remaining >= N - i) {
    remaining -= N - i;
    ++i;
  }
  return ClassPair(i, i + remaining);
}

FiniteLatentModel TwoMixtureModel::latent_model() const {
  const int P = num_pairs();
  Eigen::VectorXd rho = Eigen::VectorXd::Constant(N, 1.0 / N);
  Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(P, N);
  for (int idx = 0; idx < P; ++idx) {
    const ClassPair p = pair_at(idx);
    for (int l = 0; l < N; ++l) {
      const int hits = (p.first == l ? 1 : 0) + (p.second == l ? 1 : 0);
      cond(idx, l) = static_cast<double>(hits) / (N + 1);
    }
  }
  // p((i,j)|l) = (d_il + d_jl)/(N+1); each column sums to (N+1)/(N+1) = 1.
  return FiniteLatentModel(std::move(rho), cond, cond);
}

DiscreteJoint latent_to_joint(const FiniteLatentModel& model) {
  Eigen::MatrixXd table =
      model.cond_x * model.latent_probs.asDiagonal() * model.cond_y.transpose();
  // Tiny normalization drift from the matrix product is renormalized away so
  // downstream tolerance checks see an exact probability table.
  table /= table.sum();
  return DiscreteJoint::from_table(std::move(table));
}

double exp_pmi(const DiscreteJoint& joint, int x, int y) {
  if (x < 0 || x >= joint.num_x() || y < 0 || y >= joint.num_y())
    throw std::out_of_range("exp_pmi: index out of range");
  const double px = joint.marginal_x[x];
  const double py = joint.marginal_y[y];
  if (!(px > 0.0) || !(py > 0.0))
    throw std::domain_error("exp_pmi: zero marginal, PMI undefined");
  return joint.joint(x, y) / (px * py);
}

double exp_pmi_two_mixture(int N, ClassPair x, ClassPair y) {
  if (x.second >= N || y.second >= N)
    throw std::out_of_range("exp_pmi_two_mixture: label out of range");
  const int count = (x.first == y.first ? 1 : 0) + (x.first == y.second ? 1 : 0) +
                    (x.second == y.first ? 1 : 0) +
                    (x.second == y.second ? 1 : 0);
  return static_cast<double>(N) / 4.0 * count;
}

double mutual_information(const DiscreteJoint& joint) {
  double mi = 0.0;
  for (int x = 0; x < joint.num_x(); ++x) {
    for (int y = 0; y < joint.num_y(); ++y) {
      const double pxy = joint.joint(x, y);
      if (pxy > 0.0)
        mi += pxy * std::log(pxy / (joint.marginal_x[x] * joint.marginal_y[y]));
    }
  }
  return mi;
}

double model_ratio_bound(const FiniteLatentModel& model) {
  const DiscreteJoint joint = latent_to_joint(model);
  for (int x = 0; x < joint.num_x(); ++x)
    if (!(joint.marginal_x[x] > 0.0))
      throw std::domain_error("model_ratio_bound: zero x-marginal");
  for (int y = 0; y < joint.num_y(); ++y)
    if (!(joint.marginal_y[y] > 0.0))
      throw std::domain_error("model_ratio_bound: zero y-marginal");
  double best = 0.0;
  for (int z = 0; z < model.num_latents(); ++z) {
    for (int x = 0; x < model.num_x(); ++x)
      best = std::max(best, model.cond_x(x, z) / joint.marginal_x[x]);
    for (int y = 0; y < model.num_y(); ++y)
      best = std::max(best, model.cond_y(y, z) / joint.marginal_y[y]);
  }
  return best;
}

}  // namespace kmeclip
