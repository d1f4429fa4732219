#include "kmeclip/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kmeclip/rng.hpp"

namespace kmeclip {

namespace {

constexpr double kHoldsSlack = 1e-10;
// Slack for entrywise precondition checks: callers typically construct
// perturbations sitting exactly on the eps boundary.
constexpr double kPrecondSlack = 1e-9;

double min_pairwise_distance(const std::vector<Eigen::VectorXd>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::min(best, (pts[i] - pts[j]).norm());
  return best;
}

}  // namespace

std::vector<Eigen::VectorXd> separated_sphere_points(int count, int d,
                                                     double min_dist,
                                                     std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("separated_sphere_points: count");
  if (d < 2)
    throw std::invalid_argument("separated_sphere_points: d >= 2 required");
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(count);
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const double angle = 2.0 * M_PI * i / count;
      Eigen::VectorXd p(2);
      p << std::cos(angle), std::sin(angle);
      pts.push_back(p);
    }
  } else {
    // Greedy farthest-point selection over a seeded candidate pool.
    Rng rng(Rng::derive(seed, 0x5e9a7a7e));
    const int pool_size = std::max(256, 64 * count);
    std::vector<Eigen::VectorXd> pool;
    pool.reserve(pool_size);
    for (int i = 0; i < pool_size; ++i) pool.push_back(rng.unit_vector(d));

    std::vector<double> min_to_chosen(pool_size,
                                      std::numeric_limits<double>::infinity());
    pts.push_back(pool[0]);
    while (static_cast<int>(pts.size()) < count) {
      int best = -1;
      double best_dist = -1.0;
      for (int i = 0; i < pool_size; ++i) {
        min_to_chosen[i] =
            std::min(min_to_chosen[i], (pool[i] - pts.back()).norm());
        if (min_to_chosen[i] > best_dist) {
          best_dist = min_to_chosen[i];
          best = i;
        }
      }
      pts.push_back(pool[best]);
    }
  }
  if (count > 1 && min_pairwise_distance(pts) < min_dist)
    throw std::runtime_error(
        "separated_sphere_points: separation requirement not met");
  return pts;
}

// ---------------------------------------------------------------------------

Lemma8Result lemma8_check(const Eigen::VectorXd& mu, const Eigen::VectorXd& f,
                          const Eigen::VectorXd& g, double eps, double delta) {
  const double e2 = std::exp(-2.0);
  if (!(eps <= e2 + 1e-15))
    throw std::invalid_argument("lemma8_check: eps must be <= 1/e^2");
  if (!(delta > 0.0 && delta <= eps + 1e-15))
    throw std::invalid_argument("lemma8_check: need 0 < delta <= eps");
  if (mu.size() == 0 || mu.size() != f.size() || mu.size() != g.size())
    throw std::invalid_argument("lemma8_check: size mismatch");
  if ((mu.array() < 0.0).any() || (f.array() < 0.0).any())
    throw std::invalid_argument("lemma8_check: mu and f must be nonnegative");
  if (std::abs(mu.dot(f) - 1.0) > 1e-10)
    throw std::invalid_argument(
        "lemma8_check: f is not a density with respect to mu");
  for (Eigen::Index s = 0; s < mu.size(); ++s) {
    if (std::abs(f[s] - g[s]) > eps + kPrecondSlack)
      throw std::invalid_argument("lemma8_check: |f - g| <= eps violated");
    if (g[s] < delta - kPrecondSlack)
      throw std::invalid_argument("lemma8_check: g >= delta violated");
  }

  double lhs = 0.0;
  for (Eigen::Index s = 0; s < mu.size(); ++s) {
    if (f[s] > 0.0)
      lhs += mu[s] * f[s] * (std::log(f[s]) - std::log(g[s]));
  }
  Lemma8Result result;
  result.lhs = std::abs(lhs);
  result.rhs = 2.0 * std::sqrt(eps) +
               mu.sum() * std::sqrt(eps) * std::log(1.0 / eps + 1.0 / delta);
  result.holds = result.lhs <= result.rhs + kHoldsSlack;
  return result;
}

Thm3Result thm3_check(const DiscreteJoint& joint, const Eigen::MatrixXd& h,
                      double eps, double delta) {
  const double e2 = std::exp(-2.0);
  if (!(eps <= e2 + 1e-15))
    throw std::invalid_argument("thm3_check: eps must be <= 1/e^2");
  if (!(delta > 0.0 && delta <= eps + 1e-15))
    throw std::invalid_argument("thm3_check: need 0 < delta <= eps");
  if (h.rows() != joint.num_x() || h.cols() != joint.num_y())
    throw std::invalid_argument("thm3_check: dimension mismatch");
  for (int x = 0; x < joint.num_x(); ++x) {
    for (int y = 0; y < joint.num_y(); ++y) {
      if (h(x, y) < delta - kPrecondSlack)
        throw std::invalid_argument("thm3_check: h >= delta violated");
      if (std::abs(h(x, y) - exp_pmi(joint, x, y)) > eps + kPrecondSlack)
        throw std::invalid_argument(
            "thm3_check: |h - exp_pmi| <= eps violated");
    }
  }

  Thm3Result result;
  result.loss_gap = population_loss(joint, h, SimilarityDomain::Positive) -
                    mutual_information(joint);
  result.bound = 3.0 * std::sqrt(eps) +
                 std::sqrt(eps) * std::log(1.0 / eps + 1.0 / delta);
  result.holds = result.loss_gap <= result.bound + kHoldsSlack &&
                 result.loss_gap >= -kHoldsSlack;
  return result;
}

// ---------------------------------------------------------------------------

Thm4Result thm4_construct(const FiniteLatentModel& model, double sigma, int d,
                          std::uint64_t seed) {
  const int m = model.num_latents();
  const KernelSpec kernel(sigma);
  Thm4Result result;
  result.anchors = separated_sphere_points(m, d, m > 1 ? 2.0 / m : 0.0, seed);

  const DiscreteJoint joint = latent_to_joint(model);
  const double ratio_bound = model_ratio_bound(model);

  auto build = [&](const Eigen::MatrixXd& cond, const Eigen::VectorXd& marg) {
    std::vector<RkhsExpansion> out;
    out.reserve(cond.rows());
    for (Eigen::Index item = 0; item < cond.rows(); ++item) {
      std::vector<double> coeffs(m);
      for (int i = 0; i < m; ++i) {
        const double a = cond(item, i) / marg[item];
        coeffs[i] = a * std::sqrt(model.latent_probs[i]);
      }
      out.emplace_back(result.anchors, std::move(coeffs), kernel);
    }
    return out;
  };
  result.x_embeddings = build(model.cond_x, joint.marginal_x);
  result.y_embeddings = build(model.cond_y, joint.marginal_y);

  // Anchor Gram, shared across all item pairs.
  Eigen::MatrixXd gram(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      gram(i, j) = kernel_eval(kernel, result.anchors[i], result.anchors[j]);

  double max_error = 0.0;
  for (int x = 0; x < joint.num_x(); ++x) {
    for (int y = 0; y < joint.num_y(); ++y) {
      double inner = 0.0;
      for (int i = 0; i < m; ++i) {
        const double cx = result.x_embeddings[x].coefficients[i];
        if (cx == 0.0) continue;
        for (int j = 0; j < m; ++j)
          inner += cx * result.y_embeddings[y].coefficients[j] * gram(i, j);
      }
      max_error = std::max(max_error, std::abs(inner - exp_pmi(joint, x, y)));
    }
  }
  result.max_error = max_error;
  result.bound = ratio_bound * ratio_bound / m *
                 std::exp(-2.0 / ((m * sigma) * (m * sigma)));
  result.holds = result.max_error <= result.bound + kHoldsSlack;
  return result;
}

double thm4_sigma_for_error(const FiniteLatentModel& model, double target) {
  if (!(target > 0.0))
    throw std::invalid_argument("thm4_sigma_for_error: target must be > 0");
  const int m = model.num_latents();
  const double c = model_ratio_bound(model);
  // Conservative: demand (C')^2 m exp(-2/(m sigma)^2) <= target, an extra
  // m^2 over the reported bound.
  const double needed = std::log(c * c * m / target);
  if (needed <= 0.0) return 1.0;
  return std::sqrt(2.0 / needed) / m;
}

// ---------------------------------------------------------------------------

DiscretizationTrial thm5_trial(const std::vector<Eigen::VectorXd>& atoms,
                               const Eigen::VectorXd& mu,
                               const Eigen::VectorXd& g,
                               const KernelSpec& kernel, int m,
                               std::uint64_t seed) {
  const int K = static_cast<int>(atoms.size());
  if (K == 0) throw std::invalid_argument("thm5_trial: empty measure");
  if (mu.size() != K || g.size() != K)
    throw std::invalid_argument("thm5_trial: size mismatch");
  if (m < 1) throw std::invalid_argument("thm5_trial: m >= 1 required");

  Rng rng(seed);
  const std::vector<double> weights(mu.data(), mu.data() + mu.size());
  std::vector<int> counts(K, 0);
  for (int i = 0; i < m; ++i) counts[rng.categorical(weights)]++;

  // Every sample is an atom, so the difference expansion lives on the atoms:
  // coefficient (count_z/m - mu_z) g_z at atom z.
  std::vector<double> coeffs(K);
  for (int z = 0; z < K; ++z)
    coeffs[z] = (static_cast<double>(counts[z]) / m - mu[z]) * g[z];
  const RkhsExpansion diff(atoms, std::move(coeffs), kernel);

  DiscretizationTrial trial;
  trial.m = m;
  trial.measured_error = std::sqrt(rkhs_norm_sq(diff));
  const double g_l2 = std::sqrt(mu.dot(g.cwiseProduct(g)));
  trial.bound = g_l2 / std::sqrt(static_cast<double>(m));  // K = 1 (Gaussian)
  return trial;
}

double thm5_mean_sq_error(const std::vector<Eigen::VectorXd>& atoms,
                          const Eigen::VectorXd& mu, const Eigen::VectorXd& g,
                          const KernelSpec& kernel, int m) {
  const int K = static_cast<int>(atoms.size());
  if (K == 0) throw std::invalid_argument("thm5_mean_sq_error: empty measure");
  if (mu.size() != K || g.size() != K || m < 1)
    throw std::invalid_argument("thm5_mean_sq_error: bad arguments");
  double diag = 0.0;
  double cross = 0.0;
  for (int z = 0; z < K; ++z) {
    diag += mu[z] * kernel_eval(kernel, atoms[z], atoms[z]) * g[z] * g[z];
    for (int w = 0; w < K; ++w)
      cross += mu[z] * mu[w] * kernel_eval(kernel, atoms[z], atoms[w]) *
               g[z] * g[w];
  }
  return (diag - cross) / m;
}

// ---------------------------------------------------------------------------

double Thm7Construction::pair_inner(int x_index, int y_index) const {
  const TwoMixtureModel model(N);
  const ClassPair x = model.pair_at(x_index);
  const ClassPair y = model.pair_at(y_index);
  const KernelSpec kernel(sigma);
  const double ksum =
      kernel_eval(kernel, anchor_points[x.first], anchor_points[y.first]) +
      kernel_eval(kernel, anchor_points[x.first], anchor_points[y.second]) +
      kernel_eval(kernel, anchor_points[x.second], anchor_points[y.first]) +
      kernel_eval(kernel, anchor_points[x.second], anchor_points[y.second]);
  return static_cast<double>(N) / 4.0 * ksum;
}

Thm7Construction thm7_construct(int N, int d, double epsilon,
                                std::uint64_t seed) {
  if (N < 2) throw std::invalid_argument("thm7_construct: N >= 2 required");
  if (d < 2) throw std::invalid_argument("thm7_construct: d >= 2 required");
  if (!(epsilon > 0.0 && epsilon < N))
    throw std::invalid_argument("thm7_construct: need 0 < eps < N");

  Thm7Construction c;
  c.N = N;
  c.d = d;
  c.epsilon = epsilon;
  // Strict inequality in the length-scale condition; 0.9 keeps a margin.
  c.sigma = 0.9 / std::sqrt(2.0 * N * N * std::log(N / epsilon));
  c.anchor_points = separated_sphere_points(N, d, 1.0 / N, seed);

  const TwoMixtureModel model(N);
  const double w = std::sqrt(static_cast<double>(N)) / 2.0;
  for (int idx = 0; idx < model.num_pairs(); ++idx) {
    const ClassPair p = model.pair_at(idx);
    c.embeddings.emplace_back(PointSetEmbedding(
        {c.anchor_points[p.first], c.anchor_points[p.second]}, {w, w}));
  }

  double max_error = 0.0;
  for (int x = 0; x < model.num_pairs(); ++x) {
    for (int y = 0; y < model.num_pairs(); ++y) {
      const double err = std::abs(
          c.pair_inner(x, y) -
          exp_pmi_two_mixture(N, model.pair_at(x), model.pair_at(y)));
      max_error = std::max(max_error, err);
    }
  }
  c.max_error = max_error;
  c.holds = max_error < epsilon;
  return c;
}

// ---------------------------------------------------------------------------

namespace {

struct AdamState {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;
  int t = 0;

  explicit AdamState(Eigen::Index rows, Eigen::Index cols)
      : m(Eigen::MatrixXd::Zero(rows, cols)),
        v(Eigen::MatrixXd::Zero(rows, cols)) {}

  void update(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad,
              double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    const double mc = 1.0 - std::pow(b1, t);
    const double vc = 1.0 - std::pow(b2, t);
    params.array() -=
        lr * (m.array() / mc) / ((v.array() / vc).sqrt() + eps);
  }
};

double thm6_full_max_error(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                           double log_alpha, double inv_tau, int N,
                           const std::vector<ClassPair>& pairs) {
  double worst = 0.0;
  const int P = static_cast<int>(pairs.size());
  for (int a = 0; a < P; ++a) {
    for (int b = 0; b < P; ++b) {
      const double expo =
          std::min(log_alpha + X.row(a).dot(Y.row(b)) * inv_tau, 60.0);
      const double err =
          std::abs(std::exp(expo) - exp_pmi_two_mixture(N, pairs[a], pairs[b]));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace

Thm6Result thm6_adversarial_check(const Thm6Config& config) {
  const int N = config.N;
  const int d = config.d;
  const TwoMixtureModel model(N);
  const int P = model.num_pairs();
  std::vector<ClassPair> pairs;
  pairs.reserve(P);
  for (int idx = 0; idx < P; ++idx) pairs.push_back(model.pair_at(idx));

  Thm6Result result;
  result.threshold = static_cast<double>(N) / 4.0;
  result.guarantee_applies = N > std::pow(9.0, d);
  result.best_max_error = std::numeric_limits<double>::infinity();

  const double scale = 1.0 / (static_cast<double>(N) * N);
  for (int restart = 0; restart < config.restarts; ++restart) {
    Rng rng(Rng::derive(config.seed, 0x7u, restart));
    Eigen::MatrixXd X(P, d), Y(P, d);
    for (int i = 0; i < P; ++i) {
      X.row(i) = rng.unit_vector(d).transpose();
      Y.row(i) = rng.unit_vector(d).transpose();
    }
    double log_alpha = std::log(1.0 + N / 4.0);
    double log_tau = std::log(0.2);

    AdamState adam_x(P, d), adam_y(P, d), adam_s(2, 1);
    Eigen::MatrixXd scalars(2, 1);
    scalars << log_alpha, log_tau;

    const int B = config.batch;
    for (int step = 0; step < config.steps; ++step) {
      log_alpha = scalars(0, 0);
      log_tau = scalars(1, 0);
      const double inv_tau = std::exp(-log_tau);

      std::vector<int> ids_a(B), ids_b(B);
      for (int i = 0; i < B; ++i) ids_a[i] = rng.index(P);
      for (int i = 0; i < B; ++i) ids_b[i] = rng.index(P);

      Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(P, d);
      Eigen::MatrixXd gy = Eigen::MatrixXd::Zero(P, d);
      double g_log_alpha = 0.0;
      double g_inv_tau = 0.0;
      const double denom = static_cast<double>(B) * B;
      for (int i = 0; i < B; ++i) {
        const int a = ids_a[i];
        for (int j = 0; j < B; ++j) {
          const int b = ids_b[j];
          const double dot = X.row(a).dot(Y.row(b));
          const double expo = log_alpha + dot * inv_tau;
          const bool clamped = expo > 60.0;
          const double e = std::exp(clamped ? 60.0 : expo);
          const double r = exp_pmi_two_mixture(N, pairs[a], pairs[b]);
          const double g_e =
              2.0 * scale * scale * (e - r) / denom * (clamped ? 0.0 : e);
          g_log_alpha += g_e;
          g_inv_tau += g_e * dot;
          gx.row(a) += g_e * inv_tau * Y.row(b);
          gy.row(b) += g_e * inv_tau * X.row(a);
        }
      }
      Eigen::MatrixXd g_scalars(2, 1);
      g_scalars << g_log_alpha, -g_inv_tau * inv_tau;  // chain to log_tau

      adam_x.update(X, gx, config.lr);
      adam_y.update(Y, gy, config.lr);
      adam_s.update(scalars, g_scalars, config.lr);

      X.rowwise().normalize();
      Y.rowwise().normalize();
    }

    const double err = thm6_full_max_error(
        X, Y, scalars(0, 0), std::exp(-scalars(1, 0)), N, pairs);
    result.restart_errors.push_back(err);
    result.best_max_error = std::min(result.best_max_error, err);
  }

  result.consistent =
      !result.guarantee_applies || result.best_max_error >= result.threshold;
  return result;
}

}  // namespace kmeclip
