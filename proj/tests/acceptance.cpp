// Acceptance gate: one check per numbered criterion, one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kmeclip/embedding.hpp"
#include "kmeclip/eval.hpp"
#include "kmeclip/experiments.hpp"
#include "oracles.hpp"

using namespace kmeclip;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok, double seconds,
            const std::string& detail) {
  std::printf("[%2d] %s  %-28s %7.2fs  %s\n", number, ok ? "PASS" : "FAIL",
              name.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <typename Fn>
void criterion(int number, const std::string& name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    std::tie(ok, detail) = fn();
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  report(number, name, ok, secs, detail);
}

DiscreteJoint mixture_joint(int n) {
  return latent_to_joint(TwoMixtureModel(n).latent_model());
}

DiscreteJoint random_positive_joint(Rng& rng, int nx, int ny) {
  Eigen::MatrixXd table(nx, ny);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) table(x, y) = rng.uniform(0.1, 1.0);
  table /= table.sum();
  return DiscreteJoint::from_table(table);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  // 1. Log-domain vs vector similarity identity.
  criterion(1, "similarity identity", []() -> std::pair<bool, std::string> {
    const ExperimentResult r = run_prop2({0.1, 1.0, 3.0}, 1000, 8, 1);
    const double dev = r.summary["results"]["max_deviation"].get<double>();
    return {r.passed, "max deviation " + fmt(dev) + " (tol 1e-12)"};
  });

  // 2. Closed-form exp-PMI vs the generic oracle, plus exact spot values.
  criterion(2, "exp-PMI closed form", []() -> std::pair<bool, std::string> {
    double worst = 0.0;
    bool spots = true;
    for (int N = 2; N <= 12; ++N) {
      const TwoMixtureModel model(N);
      const DiscreteJoint joint = mixture_joint(N);
      for (int x = 0; x < model.num_pairs(); ++x)
        for (int y = 0; y < model.num_pairs(); ++y)
          worst = std::max(worst, std::abs(exp_pmi_two_mixture(
                                      N, model.pair_at(x), model.pair_at(y)) -
                                  exp_pmi(joint, x, y)));
      spots = spots &&
              exp_pmi_two_mixture(N, ClassPair(0, 0), ClassPair(0, 0)) ==
                  static_cast<double>(N) &&
              exp_pmi_two_mixture(N, ClassPair(0, 0), ClassPair(0, 1)) ==
                  static_cast<double>(N) / 2.0 &&
              exp_pmi_two_mixture(N, ClassPair(0, 0), ClassPair(1, 1)) == 0.0;
    }
    return {worst < 1e-12 && spots,
            "max deviation " + fmt(worst) + ", spot values exact: " +
                (spots ? "yes" : "no")};
  });

  // 3. Loss optimality at PMI.
  criterion(3, "loss optimality at PMI", []() -> std::pair<bool, std::string> {
    double worst = 0.0;
    bool never_below = true;
    for (int N = 2; N <= 8; ++N) {
      const DiscreteJoint joint = mixture_joint(N);
      Eigen::MatrixXd r(joint.num_x(), joint.num_y());
      for (int x = 0; x < joint.num_x(); ++x)
        for (int y = 0; y < joint.num_y(); ++y) r(x, y) = exp_pmi(joint, x, y);
      worst = std::max(
          worst, std::abs(population_loss(joint, r, SimilarityDomain::Positive) -
                          mutual_information(joint)));
    }
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
      const DiscreteJoint joint = random_positive_joint(rng, 5, 7);
      const double mi = mutual_information(joint);
      Eigen::MatrixXd log_r(5, 7);
      for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 7; ++y) log_r(x, y) = std::log(exp_pmi(joint, x, y));
      worst = std::max(
          worst, std::abs(population_loss(joint, log_r, SimilarityDomain::Log) -
                          mi));
      for (int p = 0; p < 10; ++p) {
        Eigen::MatrixXd noisy = log_r;
        for (int x = 0; x < 5; ++x)
          for (int y = 0; y < 7; ++y)
            noisy(x, y) += rng.uniform(-1.0, 1.0);
        never_below = never_below &&
                      population_loss(joint, noisy, SimilarityDomain::Log) >=
                          mi - 1e-10;
      }
    }
    return {worst < 1e-10 && never_below,
            "max |loss - MI| " + fmt(worst) + ", perturbations stay above MI: " +
                (never_below ? "yes" : "no")};
  });

  // 4. Perturbation bound trials.
  criterion(4, "perturbation bounds", []() -> std::pair<bool, std::string> {
    const std::vector<double> eps{1e-4, 1e-3, 1e-2};
    const ExperimentResult a = run_lemma8(100, eps, 4);
    const ExperimentResult b = run_thm3(100, eps, 4);
    const int fa = a.summary["results"]["failures"].get<int>();
    const int fb = b.summary["results"]["failures"].get<int>();
    return {a.passed && b.passed,
            "failures " + std::to_string(fa) + " + " + std::to_string(fb) +
                " of 2x300 trials"};
  });

  // 5. Finite-latent anchor construction.
  criterion(5, "anchor construction", []() -> std::pair<bool, std::string> {
    const ExperimentResult r = run_thm4(2, 6, 2, 0.01, 1e-3, 5);
    const double err = r.summary["results"]["worst_max_error"].get<double>();
    const double auto_err =
        r.summary["results"]["worst_auto_error"].get<double>();
    return {r.passed, "worst error " + fmt(err) + " within bound, tuned-sigma error " +
                          fmt(auto_err)};
  });

  // 6. Quadrature rate: exact identity plus Monte-Carlo sweep.
  criterion(6, "quadrature rate", []() -> std::pair<bool, std::string> {
    Rng rng(6);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const int K = 3;
      std::vector<Eigen::VectorXd> atoms;
      for (int i = 0; i < K; ++i) atoms.push_back(rng.unit_vector(2));
      Eigen::VectorXd mu(K), g(K);
      for (int i = 0; i < K; ++i) {
        mu[i] = rng.uniform(0.1, 1.0);
        g[i] = rng.uniform(-1.0, 1.0);
      }
      mu /= mu.sum();
      const KernelSpec kernel(rng.uniform(0.5, 1.5));
      for (int m : {1, 2, 3}) {
        worst = std::max(
            worst, std::abs(thm5_mean_sq_error(atoms, mu, g, kernel, m) -
                            oracles::enumerate_mean_sq_error(atoms, mu, g,
                                                             kernel, m)));
      }
    }
    const ExperimentResult r =
        run_thm5(16, 2, {4, 16, 64, 256, 1024}, 200, 1.0, 7);
    const double slope = r.summary["results"]["slope"].get<double>();
    return {worst < 1e-10 && r.passed,
            "identity deviation " + fmt(worst) + ", sweep slope " + fmt(slope)};
  });

  // 7. Two-point pair construction.
  criterion(7, "pair construction", []() -> std::pair<bool, std::string> {
    const ExperimentResult r =
        run_thm7({{2, 2, 0.5}, {8, 2, 0.1}, {12, 3, 0.05}}, 1);
    return {r.passed, std::string("all cases hold: ") +
                          (r.passed ? "yes" : "no")};
  });

  // 8. Adversarial single-vector optimization stays above the threshold.
  criterion(8, "single-vector limit", []() -> std::pair<bool, std::string> {
    Thm6Config config;
    config.seed = 2;
    const ExperimentResult r = run_thm6(config);
    const double best = r.summary["results"]["best_max_error"].get<double>();
    const double thr = r.summary["results"]["threshold"].get<double>();
    return {r.passed, "best optimizer error " + fmt(best) + " >= threshold " +
                          fmt(thr)};
  });

  // 9. Analytic gradients vs central finite differences.
  criterion(9, "gradient check", []() -> std::pair<bool, std::string> {
    Rng rng(9);
    double worst = 0.0;
    const SimilarityKind modes[] = {SimilarityKind::Kme, SimilarityKind::Clip,
                                    SimilarityKind::Wpse};
    for (int t = 0; t < 20; ++t) {
      const SimilarityKind mode = modes[t % 3];
      const int d = 2 + rng.index(3);
      const int m = mode == SimilarityKind::Clip ? 1 : 1 + rng.index(3);
      const int n_items = 3 + rng.index(3);
      const int batch_size = 2 + rng.index(4);
      EmbeddingTable table(mode, n_items, n_items, d, m,
                           std::numeric_limits<double>::quiet_NaN(), rng);
      // Random weight pre-activations so the check covers them too.
      if (mode != SimilarityKind::Clip)
        for (int item = 0; item < n_items; ++item)
          for (int k = 0; k < m; ++k) {
            table.params()[table.weight_offset(Side::X, item, k)] =
                rng.uniform(-0.5, 0.5);
            table.params()[table.weight_offset(Side::Y, item, k)] =
                rng.uniform(-0.5, 0.5);
          }

      std::vector<std::pair<int, int>> batch;
      for (int i = 0; i < batch_size; ++i)
        batch.emplace_back(rng.index(n_items), rng.index(n_items));

      const LossGrad lg = minibatch_loss_and_grad(table, batch);
      worst = std::max(
          worst,
          oracles::max_grad_rel_error(
              table,
              [&](const EmbeddingTable& tt) {
                Eigen::MatrixXd S(batch.size(), batch.size());
                for (std::size_t a = 0; a < batch.size(); ++a)
                  for (std::size_t b = 0; b < batch.size(); ++b)
                    S(a, b) = tt.similarity(batch[a].first, batch[b].second);
                return minibatch_loss(S);
              },
              lg.grad));

      if (t % 4 == 0) {
        const DiscreteJoint joint = random_positive_joint(rng, n_items, n_items);
        const LossGrad pop = population_loss_and_grad(table, joint);
        worst = std::max(
            worst, oracles::max_grad_rel_error(
                       table,
                       [&](const EmbeddingTable& tt) {
                         return population_loss(joint, tt.similarity_table(),
                                                SimilarityDomain::Log);
                       },
                       pop.grad));
      }
    }
    return {worst < 1e-5, "max relative error " + fmt(worst) + " (tol 1e-5)"};
  });

  // 10. Desk-scale training reaches MI; loss non-increasing in m.
  criterion(10, "desk-scale training", []() -> std::pair<bool, std::string> {
    TrainConfig config;
    config.steps = 3000;
    config.full_batch = true;
    config.seed = 10;
    config.point_set_size = 2;
    config.dim = 3;
    config.learning_rate = 0.02;
    config.log_every = 200;
    const ExperimentResult t = run_train(4, SimilarityKind::Kme, config, 0.05);
    const double gap = t.summary["results"]["gap"].get<double>();

    TrainConfig base = config;
    base.steps = 2000;
    base.seed = 11;
    const ExperimentResult a =
        run_ablation(6, {1, 2, 4, 8}, SimilarityKind::Kme, base, 0.02);
    return {t.passed && a.passed,
            "final gap " + fmt(gap) + " nats (tol 0.05), sweep monotone: " +
                (a.passed ? "yes" : "no")};
  });

  // 11. Byte-identical CSV output on reruns with the same seed.
  criterion(11, "determinism", []() -> std::pair<bool, std::string> {
    bool ok = true;
    {
      const ExperimentResult a = run_prop2({0.1, 1.0, 3.0}, 200, 8, 1);
      const ExperimentResult b = run_prop2({0.1, 1.0, 3.0}, 200, 8, 1);
      ok = ok && a.csv == b.csv;
    }
    {
      const ExperimentResult a = run_lemma8(20, {1e-3}, 4);
      const ExperimentResult b = run_lemma8(20, {1e-3}, 4);
      ok = ok && a.csv == b.csv;
    }
    {
      const ExperimentResult a = run_thm5(8, 2, {4, 16, 64}, 50, 1.0, 7);
      const ExperimentResult b = run_thm5(8, 2, {4, 16, 64}, 50, 1.0, 7);
      ok = ok && a.csv == b.csv;
    }
    {
      TrainConfig config;
      config.steps = 200;
      config.batch_size = 16;
      config.seed = 12;
      const ExperimentResult a = run_train(3, SimilarityKind::Kme, config, 1e9);
      const ExperimentResult b = run_train(3, SimilarityKind::Kme, config, 1e9);
      ok = ok && a.csv == b.csv;
    }
    return {ok, ok ? "all reruns byte-identical" : "rerun outputs differ"};
  });

  std::printf("%s: %d of 11 criteria passed\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
