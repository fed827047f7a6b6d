#include "moepgg/agent.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace moepgg {

std::vector<int> DqnConfig::layer_sizes() const {
  std::vector<int> sizes{observation_size};
  sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(kNumActions * kNumObjectives);
  return sizes;
}

Action greedy_action(const QTable& q, const RiskPreference& pref) {
  const double coop = estimate_utility(pref, q.col(static_cast<int>(Action::Cooperate)));
  const double defect = estimate_utility(pref, q.col(static_cast<int>(Action::Defect)));
  return coop > defect ? Action::Cooperate : Action::Defect;
}

AgentBrain::AgentBrain(RiskPreference pref, DqnConfig config, std::uint64_t seed)
    : pref_(pref),
      config_(std::move(config)),
      online_(config_.layer_sizes()),
      buffer_(config_.buffer_capacity),
      rng_(seed) {
  if (config_.observation_size <= 0 || config_.observation_size > kMaxObservationSize)
    throw std::invalid_argument("AgentBrain: observation size must lie in [1, 8]");
  if (config_.batch_size == 0) throw std::invalid_argument("AgentBrain: batch size must be positive");
  if (config_.target_sync_interval == 0)
    throw std::invalid_argument("AgentBrain: target sync interval must be positive");
  if (!(config_.epsilon >= 0.0 && config_.epsilon <= 1.0))
    throw std::invalid_argument("AgentBrain: epsilon must lie in [0,1]");
  online_.init_uniform(rng_);
  target_ = online_;
  optimizer_ = RmsProp<double>(online_.parameter_count(), config_.learning_rate, config_.rms_smoothing,
                               config_.rms_epsilon);
}

namespace {
QTable to_qtable(const Mlp<double>::Matrix& out) {
  return Eigen::Map<const QTable>(out.data());
}
}  // namespace

QTable AgentBrain::q_values(const ObsVector& observation) const {
  return to_qtable(online_.forward(observation));
}

QTable AgentBrain::target_q_values(const ObsVector& observation) const {
  return to_qtable(target_.forward(observation));
}

Action AgentBrain::select_action(const ObsVector& observation, bool explore, Rng& rng) const {
  if (explore && config_.epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < config_.epsilon) {
      std::uniform_int_distribution<int> pick(0, kNumActions - 1);
      return static_cast<Action>(pick(rng));
    }
  }
  return greedy_action(q_values(observation), pref_);
}

VectorReturn AgentBrain::td_target(const Transition& t) const {
  if (t.terminal || config_.gamma == 0.0) return t.reward;
  const QTable next = target_q_values(t.next_observation);
  QTable bootstrapped = (config_.gamma * next).colwise() + t.reward;
  const Action best = greedy_action(bootstrapped, pref_);
  return bootstrapped.col(static_cast<int>(best));
}

struct AgentBrain::BatchPass {
  Mlp<double>::Cache cache;
  Mlp<double>::Matrix output;
  Mlp<double>::Matrix residual;  // (Q - y) on taken-action rows, zero elsewhere
  double loss = 0.0;
};

AgentBrain::BatchPass AgentBrain::forward_batch(std::span<const Transition> batch) const {
  if (batch.empty()) throw std::invalid_argument("AgentBrain: empty minibatch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  Mlp<double>::Matrix inputs(config_.observation_size, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto& obs = batch[static_cast<std::size_t>(b)].observation;
    if (obs.size() != config_.observation_size)
      throw std::invalid_argument("AgentBrain: observation dimension mismatch");
    inputs.col(b) = obs;
  }

  BatchPass pass;
  pass.output = online_.forward(inputs, pass.cache);
  pass.residual = Mlp<double>::Matrix::Zero(pass.output.rows(), n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Transition& t = batch[static_cast<std::size_t>(b)];
    const int row = static_cast<int>(t.action) * kNumObjectives;
    pass.residual.block<kNumObjectives, 1>(row, b) = pass.output.block<kNumObjectives, 1>(row, b) - td_target(t);
  }
  pass.loss = pass.residual.squaredNorm() / static_cast<double>(n);
  return pass;
}

double AgentBrain::loss(std::span<const Transition> batch) const { return forward_batch(batch).loss; }

Mlp<double>::Vector AgentBrain::loss_gradient(std::span<const Transition> batch) const {
  const BatchPass pass = forward_batch(batch);
  const Mlp<double>::Matrix grad_out = (2.0 / static_cast<double>(batch.size())) * pass.residual;
  return Mlp<double>::flatten(online_.backward(pass.cache, grad_out));
}

double AgentBrain::update(std::span<const Transition> batch) {
  const BatchPass pass = forward_batch(batch);
  const Mlp<double>::Matrix grad_out = (2.0 / static_cast<double>(batch.size())) * pass.residual;
  optimizer_.step(online_, online_.backward(pass.cache, grad_out));
  ++updates_;
  return pass.loss;
}

std::optional<double> AgentBrain::train_step() {
  if (buffer_.empty()) return std::nullopt;
  const std::vector<Transition> batch = buffer_.sample(config_.batch_size, rng_);
  const double l = update(batch);
  if (updates_ % config_.target_sync_interval == 0) sync_target();
  return l;
}

// --- Checkpoints -------------------------------------------------------------
//
// Little-endian host layout assumed. Brain record:
//   "MOEPGGAB" u32 version | preference | config | online params | target params
//   | rmsprop square averages | update count | rng state | replay buffer

namespace {

constexpr char kBrainMagic[8] = {'M', 'O', 'E', 'P', 'G', 'G', 'A', 'B'};
constexpr char kPoolMagic[8] = {'M', 'O', 'E', 'P', 'G', 'G', 'R', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated input");
  return v;
}

template <typename Derived>
void put_vector(std::ostream& out, const Eigen::MatrixBase<Derived>& v) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(out, v(i));
}

Eigen::VectorXd get_vector(std::istream& in, std::uint64_t max_size = 1u << 24) {
  const auto n = get<std::uint64_t>(in);
  if (n > max_size) throw std::runtime_error("checkpoint: implausible vector length");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get<double>(in);
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  if (n > (1u << 20)) throw std::runtime_error("checkpoint: implausible string length");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("checkpoint: truncated input");
  return s;
}

void expect_magic(std::istream& in, const char (&magic)[8]) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0) throw std::runtime_error("checkpoint: bad magic header");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
}

ObsVector to_obs(const Eigen::VectorXd& v) {
  if (v.size() > kMaxObservationSize) throw std::runtime_error("checkpoint: observation too long");
  return v;
}

}  // namespace

void AgentBrain::save(std::ostream& out) const {
  out.write(kBrainMagic, 8);
  put<std::uint32_t>(out, kVersion);

  put<double>(out, pref_.beta);
  put<double>(out, pref_.weight_collective);
  put<double>(out, pref_.weight_individual);

  put<std::int32_t>(out, config_.observation_size);
  put<std::uint64_t>(out, config_.hidden_sizes.size());
  for (int h : config_.hidden_sizes) put<std::int32_t>(out, h);
  put<double>(out, config_.learning_rate);
  put<double>(out, config_.rms_smoothing);
  put<double>(out, config_.rms_epsilon);
  put<double>(out, config_.gamma);
  put<double>(out, config_.epsilon);
  put<std::uint64_t>(out, config_.buffer_capacity);
  put<std::uint64_t>(out, config_.batch_size);
  put<std::uint64_t>(out, config_.target_sync_interval);

  put_vector(out, online_.parameters());
  put_vector(out, target_.parameters());
  put_vector(out, optimizer_.square_avg());
  put<std::uint64_t>(out, updates_);

  std::ostringstream rng_state;
  rng_state << rng_;
  put_string(out, rng_state.str());

  put<std::uint64_t>(out, buffer_.head());
  put<std::uint64_t>(out, buffer_.storage().size());
  for (const Transition& t : buffer_.storage()) {
    put_vector(out, t.observation);
    put<std::int32_t>(out, static_cast<std::int32_t>(t.action));
    put<double>(out, t.reward(kCollective));
    put<double>(out, t.reward(kIndividual));
    put_vector(out, t.next_observation);
    put<std::uint8_t>(out, t.terminal ? 1 : 0);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

AgentBrain AgentBrain::load(std::istream& in) {
  expect_magic(in, kBrainMagic);

  const double beta = get<double>(in);
  const double wc = get<double>(in);
  const double wi = get<double>(in);

  DqnConfig cfg;
  cfg.observation_size = get<std::int32_t>(in);
  const auto hidden = get<std::uint64_t>(in);
  if (hidden > 64) throw std::runtime_error("checkpoint: implausible layer count");
  cfg.hidden_sizes.clear();
  for (std::uint64_t k = 0; k < hidden; ++k) cfg.hidden_sizes.push_back(get<std::int32_t>(in));
  cfg.learning_rate = get<double>(in);
  cfg.rms_smoothing = get<double>(in);
  cfg.rms_epsilon = get<double>(in);
  cfg.gamma = get<double>(in);
  cfg.epsilon = get<double>(in);
  cfg.buffer_capacity = get<std::uint64_t>(in);
  cfg.batch_size = get<std::uint64_t>(in);
  cfg.target_sync_interval = get<std::uint64_t>(in);

  AgentBrain brain(RiskPreference(beta, wc, wi), cfg, 0);
  brain.online_.set_parameters(get_vector(in));
  brain.target_.set_parameters(get_vector(in));
  const Eigen::VectorXd sq = get_vector(in);
  if (sq.size() != brain.optimizer_.square_avg().size())
    throw std::runtime_error("checkpoint: optimizer state size mismatch");
  brain.optimizer_.square_avg() = sq;
  brain.updates_ = get<std::uint64_t>(in);

  std::istringstream rng_state(get_string(in));
  rng_state >> brain.rng_;
  if (!rng_state) throw std::runtime_error("checkpoint: bad rng state");

  const auto head = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);
  if (count > cfg.buffer_capacity) throw std::runtime_error("checkpoint: buffer larger than capacity");
  std::vector<Transition> items;
  items.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Transition t;
    t.observation = to_obs(get_vector(in));
    const auto action = get<std::int32_t>(in);
    if (action != 0 && action != 1) throw std::runtime_error("checkpoint: bad action");
    t.action = static_cast<Action>(action);
    t.reward(kCollective) = get<double>(in);
    t.reward(kIndividual) = get<double>(in);
    t.next_observation = to_obs(get_vector(in));
    t.terminal = get<std::uint8_t>(in) != 0;
    items.push_back(std::move(t));
  }
  brain.buffer_.restore(std::move(items), head);
  return brain;
}

void save_brains(const std::string& path, const std::vector<AgentBrain>& brains) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kPoolMagic, 8);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, brains.size());
  for (const auto& b : brains) b.save(out);
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

std::vector<AgentBrain> load_brains(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  expect_magic(in, kPoolMagic);
  const auto n = get<std::uint64_t>(in);
  if (n > 100000) throw std::runtime_error("checkpoint: implausible agent count");
  std::vector<AgentBrain> brains;
  brains.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) brains.push_back(AgentBrain::load(in));
  return brains;
}

}  // namespace moepgg
