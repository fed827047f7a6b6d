// moepgg: command line front end for the multi-objective public goods game.

#include "moepgg/commands.hpp"
#include "moepgg/config.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace moepgg;

std::vector<double> numbers(const std::string& text, const char* what) {
  try {
    return parse_number_list(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--") + what + ": " + e.what());
  }
}

double single(const std::string& text, const char* what) {
  const auto v = numbers(text, what);
  if (v.size() != 1) throw UsageError(std::string("--") + what + " takes a single value here");
  return v.front();
}

std::string default_out_dir() {
  if (const char* env = std::getenv("MOEPGG_OUT_DIR"); env && *env) return env;
  return "out";
}

struct Args {
  CommonOptions common;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::optional<std::string> f, beta, sigma;
  std::optional<std::size_t> episodes, runs;
  double coins = 4.0;
  std::size_t n = 2;
  std::size_t player = 0;
  std::string checkpoint;
  std::size_t groups = 25;
  std::size_t rounds = 10;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--out-dir", a.common.out_dir, "Output directory (default $MOEPGG_OUT_DIR or ./out)");
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--resolution", a.common.resolution, "Strategy grid step")->capture_default_str();
  cmd->add_option("--coins", a.coins, "Endowment per player")->capture_default_str();
}

void add_f(CLI::App* cmd, Args& a, const char* help) { cmd->add_option("--f", a.f, help); }
void add_beta(CLI::App* cmd, Args& a, const char* help) { cmd->add_option("--beta", a.beta, help); }

TrainPlan build_plan(const Args& a) {
  TrainPlan plan;
  if (!a.config.empty()) {
    try {
      plan = load_plan(a.config);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (a.beta) plan.betas = numbers(*a.beta, "beta");
  if (a.sigma) plan.sigmas = numbers(*a.sigma, "sigma");
  if (a.episodes) plan.base.episodes = *a.episodes;
  if (a.runs) plan.base.runs = *a.runs;
  if (a.seed) plan.base.master_seed = *a.seed;
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective extended public goods game: analysis and MO-DQN population experiments"};
  app.require_subcommand(1);
  Args a;
  a.common.out_dir = default_out_dir();

  auto* payoff = app.add_subcommand("payoff-table", "Vector payoffs of every pure action profile");
  add_common(payoff, a);
  add_f(payoff, a, "Multiplication factors (list or start:stop:step), default 0.5,1.5,2.5");
  payoff->add_option("--n", a.n, "Number of players (2 to 4)")->capture_default_str();

  auto* thresholds = app.add_subcommand("thresholds", "Opponent cooperation level above which cooperating is the best response");
  add_common(thresholds, a);
  add_f(thresholds, a, "Multiplication factors, default 0.5,1,1.5,2.5");
  add_beta(thresholds, a, "Risk exponents, default 0.5,1,2,3,4,5,6");

  auto* nash = app.add_subcommand("nash-sweep", "Grid Nash equilibria under SER");
  add_common(nash, a);
  add_f(nash, a, "Multiplication factors, default 0.5:3:0.5");
  add_beta(nash, a, "Risk exponents, default 0:3:0.05");

  auto* poa = app.add_subcommand("poa", "Price of anarchy over (f, beta)");
  add_common(poa, a);
  add_f(poa, a, "Multiplication factors, default 0.5:3:0.5");
  add_beta(poa, a, "Risk exponents, default 0:3:0.05");

  auto* pcs = app.add_subcommand("pcs", "Per-player Pareto coverage set of the strategy grid");
  add_common(pcs, a);
  add_f(pcs, a, "Multiplication factors, default 0.5");

  auto* landscape = app.add_subcommand("landscape", "SER utility surface over the strategy grid");
  add_common(landscape, a);
  add_f(landscape, a, "Multiplication factor, default 0.5");
  add_beta(landscape, a, "Risk exponent, default 0.5");
  landscape->add_option("--player", a.player, "Player whose utility is written (0 or 1)")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train MO-DQN populations");
  add_common(train, a);
  train->add_option("--config", a.config, "Run configuration file");
  add_beta(train, a, "Override risk exponents");
  train->add_option("--sigma", a.sigma, "Override observation noise levels");
  train->add_option("--episodes", a.episodes, "Override episodes per run");
  train->add_option("--runs", a.runs, "Override independent runs");

  auto* evaluate = app.add_subcommand("evaluate", "Greedy cooperation rate of a trained checkpoint");
  add_common(evaluate, a);
  evaluate->add_option("--checkpoint", a.checkpoint, "Checkpoint written by train")->required();
  add_f(evaluate, a, "Multiplication factors, default 0.5,1.5,3.5,6.5");
  evaluate->add_option("--sigma", a.sigma, "Observation noise level, default 0");
  evaluate->add_option("--groups", a.groups, "Random groups per f")->capture_default_str();
  evaluate->add_option("--rounds", a.rounds, "Rounds per group")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (a.seed) a.common.seed = *a.seed;
    const auto fs = [&](const char* fallback) { return numbers(a.f.value_or(fallback), "f"); };
    const auto betas = [&](const char* fallback) { return numbers(a.beta.value_or(fallback), "beta"); };

    if (*payoff) {
      cmd_payoff_table(a.common, a.n, a.coins, fs("0.5,1.5,2.5"));
    } else if (*thresholds) {
      cmd_thresholds(a.common, fs("0.5,1,1.5,2.5"), betas("0.5,1,2,3,4,5,6"), a.coins);
    } else if (*nash) {
      cmd_nash_sweep(a.common, fs("0.5:3:0.5"), betas("0:3:0.05"), a.coins);
    } else if (*poa) {
      cmd_poa(a.common, fs("0.5:3:0.5"), betas("0:3:0.05"), a.coins);
    } else if (*pcs) {
      cmd_pcs(a.common, fs("0.5"), a.coins);
    } else if (*landscape) {
      cmd_landscape(a.common, single(a.f.value_or("0.5"), "f"), single(a.beta.value_or("0.5"), "beta"), a.coins,
                    a.player);
    } else if (*train) {
      TrainPlan plan = build_plan(a);
      a.common.seed = plan.base.master_seed;
      cmd_train(a.common, plan);
    } else if (*evaluate) {
      EvaluateOptions eval;
      eval.checkpoint = a.checkpoint;
      eval.fs = fs("0.5,1.5,3.5,6.5");
      eval.sigma = a.sigma ? single(*a.sigma, "sigma") : 0.0;
      eval.groups = a.groups;
      eval.rounds = a.rounds;
      eval.coins = a.coins;
      cmd_evaluate(a.common, eval);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
