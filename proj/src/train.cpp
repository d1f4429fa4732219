#include "kmeclip/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kmeclip {

namespace {
double default_log_tau(SimilarityKind mode) {
  // Kme/Wpse: tau = 1/sigma^2, start at sigma = 0.5. Clip: temperature 0.2.
  return mode == SimilarityKind::Clip ? std::log(0.2) : std::log(4.0);
}
}  // namespace

EmbeddingTable::EmbeddingTable(SimilarityKind mode, int n_x, int n_y, int d,
                               int m, double init_log_tau, Rng& rng)
    : mode_(mode), n_x_(n_x), n_y_(n_y), d_(d), m_(m) {
  if (n_x < 1 || n_y < 1 || d < 1 || m < 1)
    throw std::invalid_argument("EmbeddingTable: invalid shape");
  if (mode == SimilarityKind::Clip && m != 1)
    throw std::invalid_argument("EmbeddingTable: Clip mode requires m = 1");
  const int total = (n_x_ + n_y_) * item_stride() + 1;
  params_ = Eigen::VectorXd::Zero(total);
  for (int side = 0; side < 2; ++side) {
    const Side s = side == 0 ? Side::X : Side::Y;
    const int items = side == 0 ? n_x_ : n_y_;
    for (int item = 0; item < items; ++item)
      for (int k = 0; k < m_; ++k)
        params_.segment(point_offset(s, item, k), d_) = rng.unit_vector(d_);
  }
  params_[log_tau_offset()] =
      std::isnan(init_log_tau) ? default_log_tau(mode) : init_log_tau;
}

int EmbeddingTable::weights_per_item() const {
  return mode_ == SimilarityKind::Clip ? 0 : m_;
}

int EmbeddingTable::item_stride() const {
  return m_ * d_ + weights_per_item();
}

int EmbeddingTable::point_offset(Side side, int item, int k) const {
  const int base = side == Side::X ? 0 : n_x_ * item_stride();
  return base + item * item_stride() + k * d_;
}

int EmbeddingTable::weight_offset(Side side, int item, int k) const {
  if (mode_ == SimilarityKind::Clip)
    throw std::logic_error("EmbeddingTable: Clip mode has no weights");
  const int base = side == Side::X ? 0 : n_x_ * item_stride();
  return base + item * item_stride() + m_ * d_ + k;
}

double EmbeddingTable::tau() const { return std::exp(log_tau()); }

Eigen::VectorXd EmbeddingTable::normalized_point(Side side, int item,
                                                 int k) const {
  const Eigen::VectorXd raw = params_.segment(point_offset(side, item, k), d_);
  return raw / raw.norm();
}

double EmbeddingTable::weight_preact(Side side, int item, int k) const {
  return params_[weight_offset(side, item, k)];
}

double EmbeddingTable::similarity(int a, int b) const {
  const double t = tau();
  if (mode_ == SimilarityKind::Clip) {
    return normalized_point(Side::X, a, 0).dot(
               normalized_point(Side::Y, b, 0)) /
           t;
  }
  // Terms log w_i + log w_j + log k = rho_i + nu_j - tau q_ij / 2.
  double max_term = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd terms(m_, m_);
  for (int i = 0; i < m_; ++i) {
    const Eigen::VectorXd fi = normalized_point(Side::X, a, i);
    for (int j = 0; j < m_; ++j) {
      const Eigen::VectorXd hj = normalized_point(Side::Y, b, j);
      const double q = (fi - hj).squaredNorm();
      terms(i, j) = weight_preact(Side::X, a, i) +
                    weight_preact(Side::Y, b, j) - t * q / 2.0;
      max_term = std::max(max_term, terms(i, j));
    }
  }
  if (mode_ == SimilarityKind::Wpse)
    return terms.array().exp().sum();
  return max_term + std::log((terms.array() - max_term).exp().sum());
}

Eigen::MatrixXd EmbeddingTable::similarity_table() const {
  Eigen::MatrixXd S(n_x_, n_y_);
  for (int a = 0; a < n_x_; ++a)
    for (int b = 0; b < n_y_; ++b) S(a, b) = similarity(a, b);
  return S;
}

void EmbeddingTable::renormalize_points() {
  for (int side = 0; side < 2; ++side) {
    const Side s = side == 0 ? Side::X : Side::Y;
    const int items = side == 0 ? n_x_ : n_y_;
    for (int item = 0; item < items; ++item) {
      for (int k = 0; k < m_; ++k) {
        auto block = params_.segment(point_offset(s, item, k), d_);
        block /= block.norm();
      }
    }
  }
}

namespace {

// Adds gS * dS(a,b)/dparams to grad, chaining through unit-norm projection,
// exp weight map, the Gaussian kernel, and (for Kme) the log-sum.
void accumulate_similarity_grad(const EmbeddingTable& table, int a, int b,
                                double gS, Eigen::VectorXd& grad) {
  if (gS == 0.0) return;
  const int d = table.dim();
  const int m = table.point_count();
  const double tau = table.tau();
  const auto& params = table.params();

  if (table.mode() == SimilarityKind::Clip) {
    const Eigen::VectorXd pa =
        params.segment(table.point_offset(Side::X, a, 0), d);
    const Eigen::VectorXd pb =
        params.segment(table.point_offset(Side::Y, b, 0), d);
    const double na = pa.norm(), nb = pb.norm();
    const Eigen::VectorXd f = pa / na, h = pb / nb;
    const double dot = f.dot(h);
    const Eigen::VectorXd df = h / tau - f * (dot / tau);
    const Eigen::VectorXd dh = f / tau - h * (dot / tau);
    grad.segment(table.point_offset(Side::X, a, 0), d) += gS * df / na;
    grad.segment(table.point_offset(Side::Y, b, 0), d) += gS * dh / nb;
    grad[table.log_tau_offset()] += gS * (-dot / tau);
    return;
  }

  std::vector<Eigen::VectorXd> f(m), h(m);
  std::vector<double> nf(m), nh(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd raw =
        params.segment(table.point_offset(Side::X, a, i), d);
    nf[i] = raw.norm();
    f[i] = raw / nf[i];
  }
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd raw =
        params.segment(table.point_offset(Side::Y, b, j), d);
    nh[j] = raw.norm();
    h[j] = raw / nh[j];
  }

  Eigen::MatrixXd terms(m, m), q(m, m);
  double max_term = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      q(i, j) = (f[i] - h[j]).squaredNorm();
      terms(i, j) = table.weight_preact(Side::X, a, i) +
                    table.weight_preact(Side::Y, b, j) - tau * q(i, j) / 2.0;
      max_term = std::max(max_term, terms(i, j));
    }
  }

  // c(i,j) = gS * dS/dt(i,j).
  Eigen::MatrixXd c(m, m);
  if (table.mode() == SimilarityKind::Wpse) {
    c = gS * terms.array().exp();
  } else {
    const Eigen::ArrayXXd e = (terms.array() - max_term).exp();
    c = gS * (e / e.sum());
  }

  double g_log_tau = 0.0;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd g_f = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < m; ++j) {
      const double cij = c(i, j);
      grad[table.weight_offset(Side::X, a, i)] += cij;
      grad[table.weight_offset(Side::Y, b, j)] += cij;
      g_f += cij * (-tau) * (f[i] - h[j]);
      Eigen::VectorXd g_h = cij * (-tau) * (h[j] - f[i]);
      grad.segment(table.point_offset(Side::Y, b, j), d) +=
          (g_h - h[j] * h[j].dot(g_h)) / nh[j];
      g_log_tau += cij * (-tau * q(i, j) / 2.0);
    }
    grad.segment(table.point_offset(Side::X, a, i), d) +=
        (g_f - f[i] * f[i].dot(g_f)) / nf[i];
  }
  grad[table.log_tau_offset()] += g_log_tau;
}

}  // namespace

LossGrad minibatch_loss_and_grad(
    const EmbeddingTable& table, const std::vector<std::pair<int, int>>& batch) {
  const int n = static_cast<int>(batch.size());
  if (n < 1) throw std::invalid_argument("minibatch_loss_and_grad: empty batch");
  for (const auto& [xi, yi] : batch) {
    if (xi < 0 || xi >= table.n_x() || yi < 0 || yi >= table.n_y())
      throw std::out_of_range("minibatch_loss_and_grad: index out of range");
  }

  Eigen::MatrixXd S(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      S(a, b) = table.similarity(batch[a].first, batch[b].second);

  LossGrad out;
  out.loss = minibatch_loss(S);
  out.grad = Eigen::VectorXd::Zero(table.params().size());

  Eigen::MatrixXd dS = Eigen::MatrixXd::Zero(n, n);
  const double inv2n = 1.0 / (2.0 * n);
  for (int i = 0; i < n; ++i) {
    const Eigen::ArrayXd row = (S.row(i).array() - S.row(i).maxCoeff()).exp();
    const Eigen::ArrayXd srow = row / row.sum();
    const Eigen::ArrayXd col = (S.col(i).array() - S.col(i).maxCoeff()).exp();
    const Eigen::ArrayXd scol = col / col.sum();
    for (int j = 0; j < n; ++j) {
      dS(i, j) += inv2n * (srow[j] - (i == j ? 1.0 : 0.0));
      dS(j, i) += inv2n * (scol[j] - (i == j ? 1.0 : 0.0));
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      accumulate_similarity_grad(table, batch[a].first, batch[b].second,
                                 dS(a, b), out.grad);
  return out;
}

LossGrad population_loss_and_grad(const EmbeddingTable& table,
                                  const DiscreteJoint& joint) {
  if (table.n_x() != joint.num_x() || table.n_y() != joint.num_y())
    throw std::invalid_argument("population_loss_and_grad: shape mismatch");
  const int nx = joint.num_x(), ny = joint.num_y();
  const Eigen::MatrixXd S = table.similarity_table();

  LossGrad out;
  out.loss = population_loss(joint, S, SimilarityDomain::Log);
  out.grad = Eigen::VectorXd::Zero(table.params().size());

  // Marginal-weighted softmaxes per column (over x') and per row (over y').
  Eigen::MatrixXd dS = Eigen::MatrixXd::Zero(nx, ny);
  for (int y = 0; y < ny; ++y) {
    const double shift = S.col(y).maxCoeff();
    const Eigen::ArrayXd w =
        joint.marginal_x.array() * (S.col(y).array() - shift).exp();
    const Eigen::ArrayXd soft = w / w.sum();
    dS.col(y) += 0.5 * joint.marginal_y[y] * soft.matrix();
  }
  for (int x = 0; x < nx; ++x) {
    const double shift = S.row(x).maxCoeff();
    const Eigen::ArrayXd w =
        joint.marginal_y.array() * (S.row(x).transpose().array() - shift).exp();
    const Eigen::ArrayXd soft = w / w.sum();
    dS.row(x) += 0.5 * joint.marginal_x[x] * soft.matrix().transpose();
  }
  dS -= joint.joint;

  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b)
      accumulate_similarity_grad(table, a, b, dS(a, b), out.grad);
  return out;
}

double pmi_fit(const EmbeddingTable& table, const DiscreteJoint& joint) {
  const Eigen::MatrixXd S = table.similarity_table();
  Eigen::MatrixXd target(joint.num_x(), joint.num_y());
  for (int x = 0; x < joint.num_x(); ++x)
    for (int y = 0; y < joint.num_y(); ++y)
      target(x, y) = exp_pmi(joint, x, y);

  const Eigen::MatrixXd e = S.array().min(700.0).exp();
  if (table.mode() != SimilarityKind::Clip)
    return (e - target).cwiseAbs().maxCoeff();

  // Clip carries a free multiplicative constant; fit the best alpha.
  // max|alpha e - r| is convex in alpha, so unimodal in log alpha.
  auto worst = [&](double log_alpha) {
    return (std::exp(log_alpha) * e - target).cwiseAbs().maxCoeff();
  };
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (worst(m1) <= worst(m2))
      hi = m2;
    else
      lo = m1;
  }
  return worst(0.5 * (lo + hi));
}

TrainResult train(const DiscreteJoint& joint, SimilarityKind mode,
                  const TrainConfig& config) {
  if (config.steps < 1 || config.learning_rate <= 0.0 ||
      config.batch_size < 1 || config.point_set_size < 1 || config.dim < 1)
    throw std::invalid_argument("train: invalid config");

  Rng rng(Rng::derive(config.seed, 0x7261, 0));
  EmbeddingTable table(mode, joint.num_x(), joint.num_y(), config.dim,
                       mode == SimilarityKind::Clip ? 1 : config.point_set_size,
                       config.init_log_tau, rng);

  // Flattened support for minibatch sampling.
  std::vector<std::pair<int, int>> support;
  std::vector<double> support_probs;
  for (int x = 0; x < joint.num_x(); ++x) {
    for (int y = 0; y < joint.num_y(); ++y) {
      if (joint.joint(x, y) > 0.0) {
        support.emplace_back(x, y);
        support_probs.push_back(joint.joint(x, y));
      }
    }
  }

  const Eigen::Index np = table.params().size();
  Eigen::VectorXd adam_m = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd adam_v = Eigen::VectorXd::Zero(np);
  constexpr double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;

  TrainResult result{table, {}};
  for (int step = 0; step < config.steps; ++step) {
    LossGrad lg;
    if (config.full_batch) {
      lg = population_loss_and_grad(result.table, joint);
    } else {
      std::vector<std::pair<int, int>> batch(config.batch_size);
      for (auto& pair : batch) pair = support[rng.categorical(support_probs)];
      lg = minibatch_loss_and_grad(result.table, batch);
    }
    if (std::isnan(lg.loss))
      throw std::runtime_error("train: loss diverged to NaN at step " +
                               std::to_string(step));

    Eigen::VectorXd& p = result.table.params();
    if (config.optimizer == OptimizerKind::Adam) {
      adam_m = b1 * adam_m + (1.0 - b1) * lg.grad;
      adam_v = b2 * adam_v + (1.0 - b2) * lg.grad.cwiseProduct(lg.grad);
      const double mc = 1.0 - std::pow(b1, step + 1);
      const double vc = 1.0 - std::pow(b2, step + 1);
      p.array() -= config.learning_rate * (adam_m.array() / mc) /
                   ((adam_v.array() / vc).sqrt() + adam_eps);
    } else {
      p -= config.learning_rate * lg.grad;
    }
    result.table.renormalize_points();

    if ((step + 1) % config.log_every == 0 || step + 1 == config.steps) {
      TrainRecord rec;
      rec.step = step + 1;
      rec.batch_loss = lg.loss;
      rec.population_loss = population_loss(
          joint, result.table.similarity_table(), SimilarityDomain::Log);
      rec.pmi_fit = pmi_fit(result.table, joint);
      rec.tau = result.table.tau();
      result.curve.push_back(rec);
    }
  }
  return result;
}

}  // namespace kmeclip
