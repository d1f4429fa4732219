#include "kmeclip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kmeclip/embedding.hpp"
#include "kmeclip/eval.hpp"
#include "kmeclip/io.hpp"

namespace kmeclip {

namespace {

constexpr std::uint64_t kStreamProp2 = 0x01;
constexpr std::uint64_t kStreamLemma8 = 0x02;
constexpr std::uint64_t kStreamThm3 = 0x03;
constexpr std::uint64_t kStreamThm4 = 0x04;
constexpr std::uint64_t kStreamThm5 = 0x05;

class CsvBuilder {
 public:
  explicit CsvBuilder(const std::string& header) { out_ << header << "\n"; }

  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    (write_field(fields, first), ...);
    out_ << "\n";
  }

  std::string str() const { return out_.str(); }

 private:
  template <typename T>
  void write_field(const T& v, bool& first) {
    if (!first) out_ << ",";
    first = false;
    if constexpr (std::is_same_v<T, double>)
      out_ << format_double(v);
    else
      out_ << v;
  }

  std::ostringstream out_;
};

Eigen::VectorXd random_simplex(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(0.1, 1.0);
  return v / v.sum();
}

DiscreteJoint random_positive_joint(int nx, int ny, Rng& rng) {
  Eigen::MatrixXd table(nx, ny);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) table(x, y) = rng.uniform(0.1, 1.0);
  table /= table.sum();
  return DiscreteJoint::from_table(table);
}

Eigen::MatrixXd exp_pmi_table(const DiscreteJoint& joint) {
  Eigen::MatrixXd r(joint.num_x(), joint.num_y());
  for (int x = 0; x < joint.num_x(); ++x)
    for (int y = 0; y < joint.num_y(); ++y) r(x, y) = exp_pmi(joint, x, y);
  return r;
}

DiscreteJoint two_mixture_joint(int n_classes) {
  return latent_to_joint(TwoMixtureModel(n_classes).latent_model());
}

const char* mode_name(SimilarityKind mode) {
  switch (mode) {
    case SimilarityKind::Kme: return "kme";
    case SimilarityKind::Clip: return "clip";
    default: return "wpse";
  }
}

}  // namespace

ExperimentResult run_prop2(const std::vector<double>& sigmas, int trials,
                           int d, std::uint64_t seed) {
  ExperimentResult result;
  CsvBuilder csv("sigma,trial,deviation");
  double max_dev = 0.0;
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    const KernelSpec kernel(sigmas[si]);
    const double constant = prop2_constant(kernel);
    const double tau = sigmas[si] * sigmas[si];
    for (int t = 0; t < trials; ++t) {
      Rng rng(Rng::derive(seed, kStreamProp2 + 0x100 * si, t));
      const Eigen::VectorXd u = rng.unit_vector(d), v = rng.unit_vector(d);
      const PointSetEmbedding a({u}, {1.0}), b({v}, {1.0});
      const double lhs = kme_similarity(a, b, kernel);
      const double rhs =
          clip_similarity(ClipEmbedding(u, tau), ClipEmbedding(v, tau)) +
          constant;
      const double dev = std::abs(lhs - rhs);
      max_dev = std::max(max_dev, dev);
      csv.row(sigmas[si], t, dev);
    }
  }
  result.passed = max_dev < 1e-12;
  result.summary = {{"experiment", "prop2"},
                    {"params", {{"sigmas", sigmas}, {"trials", trials},
                                {"d", d}, {"seed", seed}}},
                    {"results", {{"max_deviation", max_dev},
                                 {"tolerance", 1e-12}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("prop2.csv", csv.str());
  return result;
}

ExperimentResult run_lemma8(int trials, const std::vector<double>& eps_list,
                            std::uint64_t seed) {
  ExperimentResult result;
  CsvBuilder csv("eps,trial,lhs,rhs,holds");
  const DiscreteJoint mix = two_mixture_joint(4);
  int failures = 0;
  for (double eps : eps_list) {
    const double delta = eps / 2.0;
    for (int t = 0; t < trials; ++t) {
      Rng rng(Rng::derive(seed, kStreamLemma8, t * 1000003 +
                                                   static_cast<int>(eps * 1e6)));
      // Alternate between the 2-mixture marginal and a random measure.
      const Eigen::VectorXd mu =
          t % 2 == 0 ? mix.marginal_x : Eigen::VectorXd(random_simplex(8, rng));
      const int n = static_cast<int>(mu.size());
      Eigen::VectorXd f(n);
      for (int i = 0; i < n; ++i) f[i] = rng.uniform(0.1, 2.0);
      f /= mu.dot(f);
      Eigen::VectorXd g(n);
      for (int i = 0; i < n; ++i)
        g[i] = std::max(f[i] + eps * rng.uniform(-1.0, 1.0), delta);
      const Lemma8Result r = lemma8_check(mu, f, g, eps, delta);
      if (!r.holds) ++failures;
      csv.row(eps, t, r.lhs, r.rhs, static_cast<int>(r.holds));
    }
  }
  result.passed = failures == 0;
  result.summary = {{"experiment", "lemma8"},
                    {"params", {{"trials", trials}, {"eps_list", eps_list},
                                {"seed", seed}}},
                    {"results", {{"failures", failures},
                                 {"total", trials * eps_list.size()}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("lemma8.csv", csv.str());
  return result;
}

ExperimentResult run_thm3(int trials, const std::vector<double>& eps_list,
                          std::uint64_t seed) {
  ExperimentResult result;
  CsvBuilder csv("eps,trial,loss_gap,bound,holds");
  const DiscreteJoint mix = two_mixture_joint(4);
  int failures = 0;
  for (double eps : eps_list) {
    const double delta = eps / 2.0;
    for (int t = 0; t < trials; ++t) {
      Rng rng(Rng::derive(seed, kStreamThm3, t * 1000003 +
                                                 static_cast<int>(eps * 1e6)));
      const DiscreteJoint joint =
          t % 2 == 0 ? mix : random_positive_joint(6, 5, rng);
      const Eigen::MatrixXd r = exp_pmi_table(joint);
      Eigen::MatrixXd h(r.rows(), r.cols());
      for (Eigen::Index x = 0; x < r.rows(); ++x)
        for (Eigen::Index y = 0; y < r.cols(); ++y)
          h(x, y) = std::max(r(x, y) + eps * rng.uniform(-1.0, 1.0), delta);
      const Thm3Result res = thm3_check(joint, h, eps, delta);
      if (!res.holds) ++failures;
      csv.row(eps, t, res.loss_gap, res.bound, static_cast<int>(res.holds));
    }
  }
  result.passed = failures == 0;
  result.summary = {{"experiment", "thm3"},
                    {"params", {{"trials", trials}, {"eps_list", eps_list},
                                {"seed", seed}}},
                    {"results", {{"failures", failures},
                                 {"total", trials * eps_list.size()}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("thm3.csv", csv.str());
  return result;
}

ExperimentResult run_thm4(int n_min, int n_max, int d, double sigma,
                          double auto_target, std::uint64_t seed) {
  ExperimentResult result;
  CsvBuilder csv("N,sigma,max_error,bound,holds,sigma_auto,auto_error");
  bool all_ok = true;
  double worst_error = 0.0, worst_auto = 0.0;
  for (int N = n_min; N <= n_max; ++N) {
    const FiniteLatentModel model = TwoMixtureModel(N).latent_model();
    const Thm4Result fixed =
        thm4_construct(model, sigma, d, Rng::derive(seed, kStreamThm4, N));
    const double sigma_auto = thm4_sigma_for_error(model, auto_target);
    const Thm4Result tuned = thm4_construct(
        model, sigma_auto, d, Rng::derive(seed, kStreamThm4, 1000 + N));
    all_ok = all_ok && fixed.holds && tuned.max_error < auto_target;
    worst_error = std::max(worst_error, fixed.max_error);
    worst_auto = std::max(worst_auto, tuned.max_error);
    csv.row(N, sigma, fixed.max_error, fixed.bound,
            static_cast<int>(fixed.holds), sigma_auto, tuned.max_error);
  }
  result.passed = all_ok;
  result.summary = {{"experiment", "thm4"},
                    {"params", {{"n_min", n_min}, {"n_max", n_max}, {"d", d},
                                {"sigma", sigma}, {"auto_target", auto_target},
                                {"seed", seed}}},
                    {"results", {{"worst_max_error", worst_error},
                                 {"worst_auto_error", worst_auto}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("thm4.csv", csv.str());
  return result;
}

ExperimentResult run_thm5(int atoms, int d, const std::vector<int>& m_sweep,
                          int trials, double sigma, std::uint64_t seed) {
  ExperimentResult result;
  Rng setup(Rng::derive(seed, kStreamThm5, 0));
  std::vector<Eigen::VectorXd> zs(atoms);
  for (auto& z : zs) z = setup.unit_vector(d);
  const Eigen::VectorXd mu = random_simplex(atoms, setup);
  Eigen::VectorXd g(atoms);
  for (int i = 0; i < atoms; ++i) g[i] = setup.uniform(-1.0, 1.0);
  const KernelSpec kernel(sigma);

  CsvBuilder csv("m,mean_error,std_error,bound");
  std::vector<double> log_m, log_err;
  bool within_bound = true;
  for (std::size_t mi = 0; mi < m_sweep.size(); ++mi) {
    const int m = m_sweep[mi];
    double sum = 0.0, sum_sq = 0.0, bound = 0.0;
    for (int t = 0; t < trials; ++t) {
      const DiscretizationTrial trial = thm5_trial(
          zs, mu, g, kernel, m, Rng::derive(seed, kStreamThm5 + 1 + mi, t));
      sum += trial.measured_error;
      sum_sq += trial.measured_error * trial.measured_error;
      bound = trial.bound;
    }
    const double mean = sum / trials;
    const double var = std::max(0.0, sum_sq / trials - mean * mean);
    const double se = std::sqrt(var / trials);
    within_bound = within_bound && mean <= bound + 3.0 * se;
    log_m.push_back(std::log(static_cast<double>(m)));
    log_err.push_back(std::log(mean));
    csv.row(m, mean, se, bound);
  }

  // Least-squares slope of log(mean error) against log(m).
  const int n = static_cast<int>(log_m.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) { mx += log_m[i]; my += log_err[i]; }
  mx /= n; my /= n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (log_m[i] - mx) * (log_err[i] - my);
    den += (log_m[i] - mx) * (log_m[i] - mx);
  }
  const double slope = num / den;

  result.passed = within_bound && slope >= -0.65 && slope <= -0.35;
  result.summary = {{"experiment", "thm5"},
                    {"params", {{"atoms", atoms}, {"d", d},
                                {"m_sweep", m_sweep}, {"trials", trials},
                                {"sigma", sigma}, {"seed", seed}}},
                    {"results", {{"slope", slope},
                                 {"within_bound", within_bound}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("thm5.csv", csv.str());
  return result;
}

ExperimentResult run_thm6(const Thm6Config& config) {
  ExperimentResult result;
  const Thm6Result res = thm6_adversarial_check(config);
  CsvBuilder csv("restart,max_error");
  for (std::size_t i = 0; i < res.restart_errors.size(); ++i)
    csv.row(static_cast<int>(i), res.restart_errors[i]);
  result.passed = res.consistent;
  result.summary = {{"experiment", "thm6"},
                    {"params", {{"N", config.N}, {"d", config.d},
                                {"restarts", config.restarts},
                                {"steps", config.steps},
                                {"batch", config.batch}, {"lr", config.lr},
                                {"seed", config.seed}}},
                    {"results",
                     {{"best_max_error", res.best_max_error},
                      {"threshold", res.threshold},
                      {"guarantee_applies", res.guarantee_applies}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("thm6.csv", csv.str());
  return result;
}

ExperimentResult run_thm7(const std::vector<std::tuple<int, int, double>>& cases,
                          std::uint64_t seed) {
  ExperimentResult result;
  CsvBuilder csv("N,d,eps,sigma,max_error,diag_deviation,holds");
  bool all_ok = true;
  for (const auto& [N, d, eps] : cases) {
    const Thm7Construction c = thm7_construct(N, d, eps, seed);
    const TwoMixtureModel model(N);
    double diag_dev = 0.0;
    for (int i = 0; i < N; ++i) {
      const int idx = model.index_of(ClassPair(i, i));
      diag_dev = std::max(diag_dev,
                          std::abs(c.pair_inner(idx, idx) - static_cast<double>(N)));
    }
    const bool ok = c.holds && c.max_error < eps && diag_dev == 0.0;
    all_ok = all_ok && ok;
    csv.row(N, d, eps, c.sigma, c.max_error, diag_dev, static_cast<int>(ok));
  }
  result.passed = all_ok;
  nlohmann::json case_list = nlohmann::json::array();
  for (const auto& [N, d, eps] : cases)
    case_list.push_back({{"N", N}, {"d", d}, {"eps", eps}});
  result.summary = {{"experiment", "thm7"},
                    {"params", {{"cases", case_list}, {"seed", seed}}},
                    {"results", {{"all_cases_hold", all_ok}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("thm7.csv", csv.str());
  return result;
}

ExperimentResult run_train(int n_classes, SimilarityKind mode,
                           const TrainConfig& config, double gap_tol) {
  ExperimentResult result;
  const DiscreteJoint joint = two_mixture_joint(n_classes);
  const double mi = mutual_information(joint);
  const TrainResult res = train(joint, mode, config);

  CsvBuilder csv("step,batch_loss,population_loss,pmi_fit,tau");
  for (const TrainRecord& rec : res.curve)
    csv.row(rec.step, rec.batch_loss, rec.population_loss, rec.pmi_fit,
            rec.tau);

  const TrainRecord& last = res.curve.back();
  const double gap = last.population_loss - mi;
  result.passed = gap <= gap_tol;
  result.summary = {{"experiment", "train"},
                    {"params",
                     {{"n_classes", n_classes}, {"mode", mode_name(mode)},
                      {"steps", config.steps}, {"lr", config.learning_rate},
                      {"batch_size", config.batch_size},
                      {"full_batch", config.full_batch},
                      {"m", config.point_set_size}, {"d", config.dim},
                      {"seed", config.seed}, {"gap_tol", gap_tol}}},
                    {"results",
                     {{"final_population_loss", last.population_loss},
                      {"mutual_information", mi}, {"gap", gap},
                      {"final_pmi_fit", last.pmi_fit},
                      {"final_tau", last.tau}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("train_curve.csv", csv.str());
  return result;
}

ExperimentResult run_ablation(int n_classes, const std::vector<int>& m_list,
                              SimilarityKind mode, const TrainConfig& base,
                              double tol) {
  ExperimentResult result;
  const DiscreteJoint joint = two_mixture_joint(n_classes);
  const double mi = mutual_information(joint);

  CsvBuilder csv("m,final_loss,gap");
  std::vector<double> losses;
  for (int m : m_list) {
    TrainConfig config = base;
    config.point_set_size = m;
    const TrainResult res = train(joint, mode, config);
    const double loss = res.curve.back().population_loss;
    losses.push_back(loss);
    csv.row(m, loss, loss - mi);
  }

  bool monotone = true;
  for (std::size_t i = 1; i < losses.size(); ++i)
    monotone = monotone && losses[i] <= losses[i - 1] + tol;

  result.passed = monotone;
  result.summary = {{"experiment", "ablation"},
                    {"params",
                     {{"n_classes", n_classes}, {"m_list", m_list},
                      {"mode", mode_name(mode)}, {"steps", base.steps},
                      {"seed", base.seed}, {"tol", tol}}},
                    {"results",
                     {{"final_losses", losses},
                      {"mutual_information", mi},
                      {"non_increasing_within_tol", monotone}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("ablation.csv", csv.str());
  return result;
}

ExperimentResult run_retrieval(int n_classes, const std::vector<int>& ks) {
  ExperimentResult result;
  const DiscreteJoint joint = two_mixture_joint(n_classes);
  const Eigen::MatrixXd S = exp_pmi_table(joint);

  CsvBuilder csv("direction,k,accuracy,n_ties");
  bool monotone = true;
  nlohmann::json dirs;
  for (RetrievalDirection dir :
       {RetrievalDirection::XtoY, RetrievalDirection::YtoX}) {
    const RetrievalReport report = topk_retrieval(joint, S, ks, dir);
    const char* name = dir == RetrievalDirection::XtoY ? "x_to_y" : "y_to_x";
    double prev = 0.0;
    nlohmann::json acc;
    for (const auto& [k, a] : report.top_k_accuracy) {
      monotone = monotone && a >= prev - 1e-15;
      prev = a;
      acc[std::to_string(k)] = a;
      csv.row(name, k, a, report.tie_counts.at(k));
    }
    dirs[name] = acc;
  }
  result.passed = monotone;
  result.summary = {{"experiment", "retrieval"},
                    {"params", {{"n_classes", n_classes}, {"ks", ks}}},
                    {"results", {{"top_k_accuracy", dirs}}},
                    {"passed", result.passed}};
  result.csv.emplace_back("retrieval.csv", csv.str());
  return result;
}

}  // namespace kmeclip
