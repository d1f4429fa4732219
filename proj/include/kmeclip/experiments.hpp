#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kmeclip/theory.hpp"
#include "kmeclip/train.hpp"

namespace kmeclip {

/// One experiment run: a JSON summary, named CSV payloads (deterministic for
/// a fixed seed, 17-significant-digit floats), and an overall verdict.
struct ExperimentResult {
  nlohmann::json summary;
  std::vector<std::pair<std::string, std::string>> csv;  // name -> content
  bool passed = true;
};

/// Identity between the log-domain single-point similarity and the
/// vector similarity shifted by the kernel constant, over random unit pairs.
ExperimentResult run_prop2(const std::vector<double>& sigmas, int trials,
                           int d, std::uint64_t seed);

/// Seeded perturbation trials of the eps/delta log-density bound, on the
/// 2-mixture marginal and on random simplex measures.
ExperimentResult run_lemma8(int trials, const std::vector<double>& eps_list,
                            std::uint64_t seed);

/// Seeded perturbation trials of the loss-gap bound, on two_mixture(4) and
/// random positive joints.
ExperimentResult run_thm3(int trials, const std::vector<double>& eps_list,
                          std::uint64_t seed);

/// Finite-latent anchor construction on two_mixture(N) for a range of N;
/// also reruns each N with the length-scale chosen for `auto_target`.
ExperimentResult run_thm4(int n_min, int n_max, int d, double sigma,
                          double auto_target, std::uint64_t seed);

/// Monte-Carlo quadrature sweep over sample counts; reports mean RKHS error,
/// standard error, and the 1/sqrt(m) bound, plus the fitted log-log slope.
ExperimentResult run_thm5(int atoms, int d, const std::vector<int>& m_sweep,
                          int trials, double sigma, std::uint64_t seed);

/// Adversarial single-vector optimization on two_mixture(N).
ExperimentResult run_thm6(const Thm6Config& config);

/// Two-point construction cases (N, d, eps).
ExperimentResult run_thm7(const std::vector<std::tuple<int, int, double>>& cases,
                          std::uint64_t seed);

/// Trains an embedding table on two_mixture(n_classes); passes when the final
/// population loss is within gap_tol nats of the mutual information.
ExperimentResult run_train(int n_classes, SimilarityKind mode,
                           const TrainConfig& config, double gap_tol);

/// Point-set-size sweep on two_mixture(n_classes); passes when the final
/// losses are non-increasing in m within `tol`.
ExperimentResult run_ablation(int n_classes, const std::vector<int>& m_list,
                              SimilarityKind mode, const TrainConfig& base,
                              double tol);

/// Top-k retrieval on two_mixture(n_classes) with the exact exp-PMI table as
/// the similarity, both directions.
ExperimentResult run_retrieval(int n_classes, const std::vector<int>& ks);

}  // namespace kmeclip
