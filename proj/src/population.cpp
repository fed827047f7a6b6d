#include "moepgg/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace moepgg {

void ExperimentConfig::validate() const {
  if (n_pool < 2) throw std::invalid_argument("config: n_pool must be at least 2");
  if (m_active < 2 || m_active > n_pool) throw std::invalid_argument("config: need 2 <= m_active <= n_pool");
  if (m_active > static_cast<std::size_t>(kMaxObservationSize))
    throw std::invalid_argument("config: m_active larger than the supported observation size");
  if (!(f_min >= 0.0 && f_min < f_max)) throw std::invalid_argument("config: need 0 <= f_min < f_max");
  if (rounds_per_episode < 1) throw std::invalid_argument("config: rounds must be >= 1");
  if (updates_per_episode < 1) throw std::invalid_argument("config: updates_per_episode must be >= 1");
  if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (!(coins >= 0.0)) throw std::invalid_argument("config: coins must be >= 0");
  if (!(obs_noise_sigma >= 0.0)) throw std::invalid_argument("config: sigma must be >= 0");
  if (beta_mode == BetaMode::Homogeneous && !(beta > 0.0))
    throw std::invalid_argument("config: beta must be > 0");
  if (beta_mode == BetaMode::Heterogeneous && (!(beta_sd >= 0.0) || !(beta_floor > 0.0)))
    throw std::invalid_argument("config: need beta_sd >= 0 and beta_floor > 0");
  if (eval_interval < 1) throw std::invalid_argument("config: eval_interval must be >= 1");
  if (eval_groups < 1 || eval_rounds < 1) throw std::invalid_argument("config: eval groups/rounds must be >= 1");
  for (double f : eval_fs)
    if (!(f >= 0.0)) throw std::invalid_argument("config: eval f values must be >= 0");
  if (!(dqn.epsilon >= 0.0 && dqn.epsilon <= 1.0)) throw std::invalid_argument("config: epsilon must lie in [0,1]");
  if (!(dqn.gamma >= 0.0 && dqn.gamma <= 1.0)) throw std::invalid_argument("config: gamma must lie in [0,1]");
  if (!(dqn.learning_rate > 0.0)) throw std::invalid_argument("config: learning rate must be > 0");
  if (dqn.batch_size < 1 || dqn.buffer_capacity < 1 || dqn.target_sync_interval < 1)
    throw std::invalid_argument("config: batch, buffer and sync interval must be >= 1");
}

ObsVector Observation::flatten() const {
  ObsVector v(static_cast<Eigen::Index>(1 + opponent_prev_actions.size()));
  v(0) = f_observed;
  for (std::size_t k = 0; k < opponent_prev_actions.size(); ++k)
    v(static_cast<Eigen::Index>(k + 1)) = opponent_prev_actions[k];
  return v;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

GameSpec sample_game(const ExperimentConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> dist(config.f_min, config.f_max);
  return GameSpec::uniform(config.m_active, config.coins, dist(rng));
}

std::vector<std::size_t> sample_active(const ExperimentConfig& config, Rng& rng) {
  std::vector<std::size_t> pool(config.n_pool);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t k = 0; k < config.m_active; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(config.m_active);
  return pool;
}

double observed_multiplication_factor(double f, double noise) { return std::max(0.0, f + noise); }

Observation observe(double f, double sigma, std::span<const int> prev_actions, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double z = gauss(rng);
  Observation o;
  o.f_observed = sigma == 0.0 ? f : observed_multiplication_factor(f, sigma * z);
  o.opponent_prev_actions.assign(prev_actions.begin(), prev_actions.end());
  return o;
}

EpisodeResult run_episode(std::span<AgentBrain* const> brains, const GameSpec& spec,
                          const ExperimentConfig& config, Rng& rng, bool explore, double sigma,
                          std::size_t rounds) {
  const std::size_t m = brains.size();
  if (m != spec.n_players()) throw std::invalid_argument("run_episode: brain count does not match players");
  if (sigma < 0.0) sigma = config.obs_noise_sigma;
  if (rounds == 0) rounds = config.rounds_per_episode;
  const double f = spec.multiplication_factor();

  // Round 1 sees every opponent as having defected.
  std::vector<int> last(m, 0);
  auto observe_all = [&]() {
    std::vector<ObsVector> obs(m);
    std::vector<int> opp;
    opp.reserve(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      opp.clear();
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) opp.push_back(last[j]);
      obs[i] = observe(f, sigma, opp, rng).flatten();
    }
    return obs;
  };

  EpisodeResult result;
  result.transitions.resize(m);
  for (auto& t : result.transitions) t.reserve(rounds);

  std::vector<ObsVector> obs = observe_all();
  for (std::size_t round = 0; round < rounds; ++round) {
    ActionProfile profile(m);
    for (std::size_t i = 0; i < m; ++i) profile[i] = brains[i]->select_action(obs[i], explore, brains[i]->rng());

    const bool terminal = round + 1 == rounds;
    for (std::size_t i = 0; i < m; ++i) last[i] = cooperated(profile[i]);
    std::vector<ObsVector> next = terminal ? obs : observe_all();

    for (std::size_t i = 0; i < m; ++i) {
      Transition t;
      t.observation = obs[i];
      t.action = profile[i];
      t.reward = vector_reward(spec, profile, i);
      t.next_observation = terminal ? ObsVector(ObsVector::Zero(obs[i].size())) : next[i];
      t.terminal = terminal;
      result.transitions[i].push_back(std::move(t));
      result.cooperations += static_cast<std::size_t>(cooperated(profile[i]));
      ++result.decisions;
    }
    result.profiles.push_back(std::move(profile));
    obs = std::move(next);
  }
  return result;
}

double sample_beta_raw(double mean, double sd, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  return mean + sd * gauss(rng);
}

std::vector<RiskPreference> sample_betas(const ExperimentConfig& config, Rng& rng) {
  std::vector<RiskPreference> out;
  out.reserve(config.n_pool);
  for (std::size_t i = 0; i < config.n_pool; ++i) {
    if (config.beta_mode == BetaMode::Homogeneous) {
      out.emplace_back(config.beta);
    } else {
      out.emplace_back(std::max(config.beta_floor, sample_beta_raw(config.beta_mean, config.beta_sd, rng)));
    }
  }
  return out;
}

std::vector<AgentBrain> make_pool(const ExperimentConfig& config, std::size_t run) {
  Rng beta_rng(derive_seed({config.master_seed, run, 1}));
  const auto prefs = sample_betas(config, beta_rng);
  DqnConfig dqn = config.dqn;
  dqn.observation_size = static_cast<int>(config.m_active);
  std::vector<AgentBrain> brains;
  brains.reserve(config.n_pool);
  for (std::size_t j = 0; j < config.n_pool; ++j)
    brains.emplace_back(prefs[j], dqn, derive_seed({config.master_seed, run, 2, j}));
  return brains;
}

namespace {
std::vector<AgentBrain*> seat(std::vector<AgentBrain>& brains, const std::vector<std::size_t>& active) {
  std::vector<AgentBrain*> out;
  out.reserve(active.size());
  for (std::size_t idx : active) out.push_back(&brains.at(idx));
  return out;
}
}  // namespace

double evaluate(std::vector<AgentBrain>& brains, const ExperimentConfig& config, double f, Rng& rng) {
  const GameSpec spec = GameSpec::uniform(config.m_active, config.coins, f);
  const double sigma = config.eval_noisy_observations ? config.obs_noise_sigma : 0.0;
  std::size_t coop = 0, total = 0;
  for (std::size_t g = 0; g < config.eval_groups; ++g) {
    const auto active = sample_active(config, rng);
    const auto seats = seat(brains, active);
    const EpisodeResult r = run_episode(seats, spec, config, rng, false, sigma, config.eval_rounds);
    coop += r.cooperations;
    total += r.decisions;
  }
  return static_cast<double>(coop) / static_cast<double>(total);
}

RunOutcome train_run(const ExperimentConfig& config, std::size_t run) {
  config.validate();
  RunOutcome out;
  out.run = run;
  out.brains = make_pool(config, run);
  Rng env(derive_seed({config.master_seed, run, 0}));

  for (std::size_t episode = 1; episode <= config.episodes; ++episode) {
    const GameSpec spec = sample_game(config, env);
    const auto active = sample_active(config, env);
    const auto seats = seat(out.brains, active);
    EpisodeResult r = run_episode(seats, spec, config, env, true);
    for (std::size_t k = 0; k < seats.size(); ++k)
      for (auto& t : r.transitions[k]) seats[k]->remember(std::move(t));
    for (std::size_t u = 0; u < config.updates_per_episode; ++u)
      for (AgentBrain* b : seats) b->train_step();

    if (episode % config.eval_interval == 0 || episode == config.episodes) {
      for (std::size_t fi = 0; fi < config.eval_fs.size(); ++fi) {
        Rng eval_rng(derive_seed({config.master_seed, run, 3, episode, fi}));
        const double f = config.eval_fs[fi];
        out.records.push_back({run, episode, f, evaluate(out.brains, config, f, eval_rng)});
      }
    }
  }
  return out;
}

std::vector<EvalRecord> train(const ExperimentConfig& config,
                              const std::function<void(const RunOutcome&)>& on_run) {
  config.validate();
  std::vector<EvalRecord> records;
  for (std::size_t run = 0; run < config.runs; ++run) {
    RunOutcome outcome = train_run(config, run);
    if (on_run) on_run(outcome);
    records.insert(records.end(), outcome.records.begin(), outcome.records.end());
  }
  return records;
}

}  // namespace moepgg
