#ifndef MOEPGG_POPULATION_HPP
#define MOEPGG_POPULATION_HPP

#include "moepgg/agent.hpp"
#include "moepgg/game.hpp"

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace moepgg {

enum class BetaMode { Homogeneous, Heterogeneous };

struct ExperimentConfig {
  std::size_t n_pool = 20;
  std::size_t m_active = 4;
  double f_min = 0.5;
  double f_max = 6.5;
  std::size_t rounds_per_episode = 10;
  std::size_t updates_per_episode = 10;  // minibatch updates per active brain
  std::size_t episodes = 20000;
  std::size_t runs = 20;
  double coins = 4.0;
  double obs_noise_sigma = 0.0;

  BetaMode beta_mode = BetaMode::Homogeneous;
  double beta = 1.0;        // homogeneous value
  double beta_mean = 1.0;   // heterogeneous N(mean, sd^2)
  double beta_sd = 0.0;
  double beta_floor = 0.01;

  std::vector<double> eval_fs{0.5, 1.5, 3.5, 6.5};
  std::size_t eval_interval = 100;
  std::size_t eval_groups = 25;
  std::size_t eval_rounds = 10;
  bool eval_noisy_observations = true;

  std::uint64_t master_seed = 42;
  DqnConfig dqn;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct Observation {
  double f_observed = 0.0;
  std::vector<int> opponent_prev_actions;  // 1 = cooperated

  ObsVector flatten() const;
};

struct EvalRecord {
  std::size_t run = 0;
  std::size_t episode = 0;
  double f = 0.0;
  double mean_cooperation = 0.0;

  bool operator==(const EvalRecord&) const = default;
};

struct EpisodeResult {
  /// transitions[k] belongs to the agent in seat k.
  std::vector<std::vector<Transition>> transitions;
  std::vector<ActionProfile> profiles;  // one per round
  std::size_t cooperations = 0;
  std::size_t decisions = 0;

  double cooperation_rate() const {
    return decisions == 0 ? 0.0 : static_cast<double>(cooperations) / static_cast<double>(decisions);
  }
};

/// Seed derived from a list of integers through std::seed_seq.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

GameSpec sample_game(const ExperimentConfig& config, Rng& rng);

/// Uniform m_active-subset of the pool, in random seat order.
std::vector<std::size_t> sample_active(const ExperimentConfig& config, Rng& rng);

/// max(0, f + noise)
double observed_multiplication_factor(double f, double noise);

/// Noisy view of f plus the opponents' previous actions. One standard normal
/// is drawn per call even when sigma is 0, keeping random streams aligned
/// across noise conditions.
Observation observe(double f, double sigma, std::span<const int> prev_actions, Rng& rng);

/// Plays one episode. Rewards always use the true f of `spec`; noise only
/// enters observations. The last round is terminal.
EpisodeResult run_episode(std::span<AgentBrain* const> brains, const GameSpec& spec,
                          const ExperimentConfig& config, Rng& rng, bool explore = true,
                          double sigma = -1.0, std::size_t rounds = 0);

double sample_beta_raw(double mean, double sd, Rng& rng);
std::vector<RiskPreference> sample_betas(const ExperimentConfig& config, Rng& rng);

std::vector<AgentBrain> make_pool(const ExperimentConfig& config, std::size_t run);

/// Greedy play at a fixed f over eval_groups random groups; mean cooperation.
double evaluate(std::vector<AgentBrain>& brains, const ExperimentConfig& config, double f, Rng& rng);

struct RunOutcome {
  std::size_t run = 0;
  std::vector<EvalRecord> records;
  std::vector<AgentBrain> brains;
};

/// One independent run; deterministic in (master_seed, run).
RunOutcome train_run(const ExperimentConfig& config, std::size_t run);

/// All runs in sequence. `on_run` sees each finished run (e.g. to checkpoint);
/// brains are released afterwards.
std::vector<EvalRecord> train(const ExperimentConfig& config,
                              const std::function<void(const RunOutcome&)>& on_run = {});

}  // namespace moepgg

#endif  // MOEPGG_POPULATION_HPP
