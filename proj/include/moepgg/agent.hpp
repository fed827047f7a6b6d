#ifndef MOEPGG_AGENT_HPP
#define MOEPGG_AGENT_HPP

#include "moepgg/game.hpp"
#include "moepgg/mlp.hpp"
#include "moepgg/replay_buffer.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace moepgg {

inline constexpr int kMaxObservationSize = 8;

/// Flattened observation: (f_observed, opponent cooperation indicators...).
using ObsVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxObservationSize, 1>;

/// Column a holds the (collective, individual) estimate for action a.
using QTable = Eigen::Matrix<double, kNumObjectives, kNumActions>;

using Rng = std::mt19937_64;

struct DqnConfig {
  int observation_size = 4;
  std::vector<int> hidden_sizes{8, 8};
  double learning_rate = 0.001;
  double rms_smoothing = 0.99;
  double rms_epsilon = 1e-8;
  double gamma = 0.99;
  double epsilon = 0.1;
  std::size_t buffer_capacity = 10000;
  std::size_t batch_size = 64;
  std::size_t target_sync_interval = 100;

  std::vector<int> layer_sizes() const;
};

struct Transition {
  ObsVector observation;
  Action action = Action::Defect;
  VectorReturn reward = VectorReturn::Zero();
  ObsVector next_observation;
  bool terminal = false;
};

/// Index of the action with the highest utility of its vector estimate;
/// equal utilities resolve to Defect.
Action greedy_action(const QTable& q, const RiskPreference& pref);

/// One independent multi-objective DQN learner. Single owner, not thread safe.
class AgentBrain {
 public:
  AgentBrain(RiskPreference pref, DqnConfig config, std::uint64_t seed);

  const RiskPreference& preference() const { return pref_; }
  const DqnConfig& config() const { return config_; }
  double epsilon() const { return config_.epsilon; }
  void set_epsilon(double eps) { config_.epsilon = eps; }

  Mlp<double>& online() { return online_; }
  const Mlp<double>& online() const { return online_; }
  Mlp<double>& target() { return target_; }
  const Mlp<double>& target() const { return target_; }
  const RmsProp<double>& optimizer() const { return optimizer_; }
  const ReplayBuffer<Transition>& buffer() const { return buffer_; }
  Rng& rng() { return rng_; }
  std::size_t update_count() const { return updates_; }

  QTable q_values(const ObsVector& observation) const;
  QTable target_q_values(const ObsVector& observation) const;

  /// Epsilon-greedy when `explore`, greedy on the scalarised estimates otherwise.
  Action select_action(const ObsVector& observation, bool explore, Rng& rng) const;

  /// Vector TD target: reward, plus gamma * target-network estimate of the
  /// action maximising the utility of the bootstrapped return when not terminal.
  VectorReturn td_target(const Transition& t) const;

  /// One RMSprop step on the squared vector TD error of the taken actions.
  /// Returns the batch loss before the step.
  double update(std::span<const Transition> batch);

  /// Loss of a batch against current targets, without changing anything.
  double loss(std::span<const Transition> batch) const;

  /// Analytic gradient of loss() with respect to the online parameters, flattened.
  Mlp<double>::Vector loss_gradient(std::span<const Transition> batch) const;

  void remember(Transition t) { buffer_.push(std::move(t)); }

  /// Samples a minibatch from the buffer, updates, and syncs the target on
  /// schedule. nullopt when the buffer is empty.
  std::optional<double> train_step();

  void sync_target() { target_ = online_; }

  void save(std::ostream& out) const;
  static AgentBrain load(std::istream& in);

 private:
  struct BatchPass;
  BatchPass forward_batch(std::span<const Transition> batch) const;

  RiskPreference pref_;
  DqnConfig config_;
  Mlp<double> online_;
  Mlp<double> target_;
  RmsProp<double> optimizer_;
  ReplayBuffer<Transition> buffer_;
  Rng rng_;
  std::size_t updates_ = 0;
};

void save_brains(const std::string& path, const std::vector<AgentBrain>& brains);
std::vector<AgentBrain> load_brains(const std::string& path);

}  // namespace moepgg

#endif  // MOEPGG_AGENT_HPP
