#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kmeclip/experiments.hpp"
#include "kmeclip/io.hpp"

namespace {

using kmeclip::ExperimentResult;

// Exit codes: 0 success, 1 assertion/check failure, 2 usage error, 3 I/O.
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out_dir;
};

int finish(const ExperimentResult& result, const CommonOpts& common,
           double wall_seconds) {
  nlohmann::json summary = result.summary;
  summary["wall_time_seconds"] = wall_seconds;
  try {
    std::filesystem::create_directories(common.out_dir);
    kmeclip::write_text_file(common.out_dir + "/summary.json",
                             summary.dump(2) + "\n");
    for (const auto& [name, content] : result.csv)
      kmeclip::write_text_file(common.out_dir + "/" + name, content);
  } catch (const std::exception& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cout << summary.dump(2) << std::endl;
  if (!result.passed) {
    std::cerr << "FAILED: experiment "
              << summary["experiment"].get<std::string>()
              << " did not satisfy its acceptance check\n";
    return kExitAssertion;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kmeclip experiment runner"};
  app.require_subcommand(1);
  app.fallthrough(true);
  app.set_config("--config", "", "Key-value config file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  CommonOpts common;
  if (const char* env = std::getenv("KMECLIP_OUT"))
    common.out_dir = env;
  else
    common.out_dir = "results";
  app.add_option("--out", common.out_dir, "Output directory")
      ->capture_default_str();
  app.add_option("--seed", common.seed, "Base RNG seed")
      ->capture_default_str();

  std::function<ExperimentResult()> runner;

  const std::map<std::string, kmeclip::SimilarityKind> mode_map{
      {"kme", kmeclip::SimilarityKind::Kme},
      {"clip", kmeclip::SimilarityKind::Clip},
      {"wpse", kmeclip::SimilarityKind::Wpse}};

  // --- prop2 ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "prop2", "Log-domain vs vector similarity identity check");
    auto sigmas = std::make_shared<std::vector<double>>(
        std::vector<double>{0.1, 1.0, 3.0});
    auto trials = std::make_shared<int>(1000);
    auto d = std::make_shared<int>(8);
    cmd->add_option("--sigma", *sigmas, "Kernel length-scales")
        ->capture_default_str();
    cmd->add_option("--trials", *trials)->capture_default_str();
    cmd->add_option("--d", *d, "Ambient dimension")->capture_default_str();
    cmd->callback([&, sigmas, trials, d] {
      runner = [=, &common] {
        return kmeclip::run_prop2(*sigmas, *trials, *d, common.seed);
      };
    });
  }

  // --- lemma8 / thm3 -------------------------------------------------------
  for (const std::string name : {"lemma8", "thm3"}) {
    auto* cmd = app.add_subcommand(
        name, name == "lemma8" ? "Perturbed log-density bound trials"
                               : "Loss-gap bound trials");
    auto trials = std::make_shared<int>(100);
    auto eps = std::make_shared<std::vector<double>>(
        std::vector<double>{1e-4, 1e-3, 1e-2});
    cmd->add_option("--trials", *trials)->capture_default_str();
    cmd->add_option("--eps", *eps, "Perturbation sizes")->capture_default_str();
    const bool is_lemma = name == "lemma8";
    cmd->callback([&, trials, eps, is_lemma] {
      runner = [=, &common] {
        return is_lemma ? kmeclip::run_lemma8(*trials, *eps, common.seed)
                        : kmeclip::run_thm3(*trials, *eps, common.seed);
      };
    });
  }

  // --- thm4 ----------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("thm4", "Finite-latent anchor construction");
    auto n_min = std::make_shared<int>(2);
    auto n_max = std::make_shared<int>(6);
    auto d = std::make_shared<int>(2);
    auto sigma = std::make_shared<double>(0.01);
    auto target = std::make_shared<double>(1e-3);
    cmd->add_option("--n-min", *n_min)->capture_default_str();
    cmd->add_option("--n-max", *n_max)->capture_default_str();
    cmd->add_option("--d", *d)->capture_default_str();
    cmd->add_option("--sigma", *sigma)->capture_default_str();
    cmd->add_option("--auto-target", *target)->capture_default_str();
    cmd->callback([&, n_min, n_max, d, sigma, target] {
      runner = [=, &common] {
        return kmeclip::run_thm4(*n_min, *n_max, *d, *sigma, *target,
                                 common.seed);
      };
    });
  }

  // --- thm5 ----------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("thm5", "Monte-Carlo quadrature rate sweep");
    auto atoms = std::make_shared<int>(16);
    auto d = std::make_shared<int>(2);
    auto m_sweep = std::make_shared<std::vector<int>>(
        std::vector<int>{4, 16, 64, 256, 1024});
    auto trials = std::make_shared<int>(200);
    auto sigma = std::make_shared<double>(1.0);
    cmd->add_option("--atoms", *atoms)->capture_default_str();
    cmd->add_option("--d", *d)->capture_default_str();
    cmd->add_option("--m-sweep", *m_sweep)->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--trials", *trials)->capture_default_str();
    cmd->add_option("--sigma", *sigma)->capture_default_str();
    cmd->callback([&, atoms, d, m_sweep, trials, sigma] {
      runner = [=, &common] {
        return kmeclip::run_thm5(*atoms, *d, *m_sweep, *trials, *sigma,
                                 common.seed);
      };
    });
  }

  // --- thm6 ----------------------------------------------------------------
  {
    auto* cmd =
        app.add_subcommand("thm6", "Adversarial single-vector optimization");
    auto config = std::make_shared<kmeclip::Thm6Config>();
    cmd->add_option("--n", config->N)->capture_default_str();
    cmd->add_option("--d", config->d)->capture_default_str();
    cmd->add_option("--restarts", config->restarts)->capture_default_str();
    cmd->add_option("--steps", config->steps)->capture_default_str();
    cmd->add_option("--batch", config->batch)->capture_default_str();
    cmd->add_option("--lr", config->lr)->capture_default_str();
    cmd->callback([&, config] {
      runner = [=, &common] {
        kmeclip::Thm6Config c = *config;
        c.seed = common.seed;
        return kmeclip::run_thm6(c);
      };
    });
  }

  // --- thm7 ----------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("thm7", "Two-point pair construction");
    auto n = std::make_shared<int>(8);
    auto d = std::make_shared<int>(2);
    auto eps = std::make_shared<double>(0.1);
    cmd->add_option("--n", *n)->capture_default_str();
    cmd->add_option("--d", *d)->capture_default_str();
    cmd->add_option("--eps", *eps)->capture_default_str();
    cmd->callback([&, n, d, eps] {
      runner = [=, &common] {
        return kmeclip::run_thm7({{*n, *d, *eps}}, common.seed);
      };
    });
  }

  // --- train ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("train", "Train an embedding table");
    auto n = std::make_shared<int>(4);
    auto mode = std::make_shared<kmeclip::SimilarityKind>(
        kmeclip::SimilarityKind::Kme);
    auto config = std::make_shared<kmeclip::TrainConfig>();
    auto gap_tol = std::make_shared<double>(0.05);
    cmd->add_option("--n", *n, "2-mixture classes")->capture_default_str();
    cmd->add_option("--mode", *mode, "Similarity mode")
        ->transform(CLI::CheckedTransformer(mode_map, CLI::ignore_case));
    cmd->add_option("--m", config->point_set_size)->capture_default_str();
    cmd->add_option("--d", config->dim)->capture_default_str();
    cmd->add_option("--steps", config->steps)->capture_default_str();
    cmd->add_option("--lr", config->learning_rate)->capture_default_str();
    cmd->add_option("--batch", config->batch_size)->capture_default_str();
    cmd->add_flag("--full-batch", config->full_batch);
    cmd->add_option("--log-every", config->log_every)->capture_default_str();
    cmd->add_option("--gap-tol", *gap_tol)->capture_default_str();
    cmd->callback([&, n, mode, config, gap_tol] {
      runner = [=, &common] {
        kmeclip::TrainConfig c = *config;
        c.seed = common.seed;
        return kmeclip::run_train(*n, *mode, c, *gap_tol);
      };
    });
  }

  // --- ablation ------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("ablation", "Point-set-size sweep");
    auto n = std::make_shared<int>(6);
    auto m_list =
        std::make_shared<std::vector<int>>(std::vector<int>{1, 2, 4, 8});
    auto mode = std::make_shared<kmeclip::SimilarityKind>(
        kmeclip::SimilarityKind::Kme);
    auto config = std::make_shared<kmeclip::TrainConfig>();
    auto tol = std::make_shared<double>(0.02);
    config->full_batch = true;
    cmd->add_option("--n", *n)->capture_default_str();
    cmd->add_option("--m-list", *m_list)->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--mode", *mode)
        ->transform(CLI::CheckedTransformer(mode_map, CLI::ignore_case));
    cmd->add_option("--d", config->dim)->capture_default_str();
    cmd->add_option("--steps", config->steps)->capture_default_str();
    cmd->add_option("--lr", config->learning_rate)->capture_default_str();
    cmd->add_option("--tol", *tol)->capture_default_str();
    cmd->callback([&, n, m_list, mode, config, tol] {
      runner = [=, &common] {
        kmeclip::TrainConfig c = *config;
        c.seed = common.seed;
        return kmeclip::run_ablation(*n, *m_list, *mode, c, *tol);
      };
    });
  }

  // --- retrieval -----------------------------------------------------------
  {
    auto* cmd =
        app.add_subcommand("retrieval", "Top-k retrieval on the exact table");
    auto n = std::make_shared<int>(4);
    auto ks =
        std::make_shared<std::vector<int>>(std::vector<int>{1, 5, 10});
    cmd->add_option("--n", *n)->capture_default_str();
    cmd->add_option("--ks", *ks)->delimiter(',')->capture_default_str();
    cmd->callback([&, n, ks] {
      runner = [=] { return kmeclip::run_retrieval(*n, *ks); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentResult result = runner();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return finish(result, common, wall);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
}
