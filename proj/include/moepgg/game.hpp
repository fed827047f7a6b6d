#ifndef MOEPGG_GAME_HPP
#define MOEPGG_GAME_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace moepgg {

enum class Action : int { Cooperate = 0, Defect = 1 };

inline constexpr int kNumActions = 2;
inline constexpr int kNumObjectives = 2;
inline constexpr int kCollective = 0;
inline constexpr int kIndividual = 1;

/// Reward or return vector: (collective, individual).
template <typename Scalar>
using VectorReturnT = Eigen::Matrix<Scalar, kNumObjectives, 1>;
using VectorReturn = VectorReturnT<double>;

inline int cooperated(Action a) { return a == Action::Cooperate ? 1 : 0; }

inline const char* to_string(Action a) { return a == Action::Cooperate ? "C" : "D"; }

/// One game instance: player count, per-player endowments and the
/// multiplication factor f applied to the pooled contributions.
template <typename Scalar>
class GameSpecT {
 public:
  GameSpecT(std::vector<Scalar> endowments, Scalar multiplication_factor)
      : endowments_(std::move(endowments)), f_(multiplication_factor) {
    if (endowments_.size() < 2)
      throw std::invalid_argument("GameSpec: at least two players are required");
    for (Scalar c : endowments_)
      if (!(c >= Scalar(0))) throw std::invalid_argument("GameSpec: endowments must be non-negative");
    if (!(f_ >= Scalar(0)))
      throw std::invalid_argument("GameSpec: multiplication factor must be non-negative");
  }

  /// n players sharing the same endowment c.
  static GameSpecT uniform(std::size_t n_players, Scalar coins, Scalar multiplication_factor) {
    return GameSpecT(std::vector<Scalar>(n_players, coins), multiplication_factor);
  }

  std::size_t n_players() const { return endowments_.size(); }
  const std::vector<Scalar>& endowments() const { return endowments_; }
  Scalar endowment(std::size_t i) const { return endowments_.at(i); }
  Scalar multiplication_factor() const { return f_; }

 private:
  std::vector<Scalar> endowments_;
  Scalar f_;
};
using GameSpec = GameSpecT<double>;

using ActionProfile = std::vector<Action>;

/// Utility parameters of one agent. The collective return is raised to beta.
template <typename Scalar>
struct RiskPreferenceT {
  Scalar beta = Scalar(1);
  Scalar weight_collective = Scalar(1);
  Scalar weight_individual = Scalar(1);

  RiskPreferenceT() = default;
  explicit RiskPreferenceT(Scalar b, Scalar wc = Scalar(1), Scalar wi = Scalar(1))
      : beta(b), weight_collective(wc), weight_individual(wi) {
    if (!(beta >= Scalar(0))) throw std::invalid_argument("RiskPreference: beta must be >= 0");
    if (!(wc >= Scalar(0)) || !(wi >= Scalar(0)))
      throw std::invalid_argument("RiskPreference: weights must be >= 0");
  }
};
using RiskPreference = RiskPreferenceT<double>;

namespace detail {
template <typename Scalar>
void check_profile(const GameSpecT<Scalar>& spec, const ActionProfile& profile, std::size_t player) {
  if (profile.size() != spec.n_players())
    throw std::invalid_argument("action profile length " + std::to_string(profile.size()) +
                                " does not match " + std::to_string(spec.n_players()) + " players");
  if (player >= spec.n_players())
    throw std::out_of_range("player index " + std::to_string(player) + " out of range");
}

template <typename Scalar>
Scalar collective_share(const GameSpecT<Scalar>& spec, const ActionProfile& profile) {
  Scalar pool(0);
  for (std::size_t j = 0; j < profile.size(); ++j)
    pool += spec.endowment(j) * Scalar(cooperated(profile[j]));
  return pool * spec.multiplication_factor() / Scalar(spec.n_players());
}

template <typename Scalar>
Scalar kept_endowment(const GameSpecT<Scalar>& spec, const ActionProfile& profile, std::size_t player) {
  return spec.endowment(player) * Scalar(1 - cooperated(profile[player]));
}
}  // namespace detail

template <typename Scalar>
VectorReturnT<Scalar> vector_reward(const GameSpecT<Scalar>& spec, const ActionProfile& profile,
                                    std::size_t player) {
  detail::check_profile(spec, profile, player);
  return VectorReturnT<Scalar>(detail::collective_share(spec, profile),
                               detail::kept_endowment(spec, profile, player));
}

/// Single-objective reward; identical to collective + individual of vector_reward.
template <typename Scalar>
Scalar scalar_reward(const GameSpecT<Scalar>& spec, const ActionProfile& profile, std::size_t player) {
  detail::check_profile(spec, profile, player);
  return detail::collective_share(spec, profile) + detail::kept_endowment(spec, profile, player);
}

/// x^beta with 0^0 = 1. Throws on a negative base with a fractional exponent.
template <typename Scalar>
Scalar risk_power(Scalar x, Scalar beta) {
  if (beta == Scalar(0)) return Scalar(1);
  if (x < Scalar(0) && std::floor(beta) != beta)
    throw std::domain_error("utility: negative collective return with fractional beta");
  using std::pow;
  return pow(x, beta);
}

/// u(g) = w_C * g_C^beta + w_I * g_I
template <typename Scalar, typename Derived>
Scalar utility(const RiskPreferenceT<Scalar>& pref, const Eigen::MatrixBase<Derived>& g) {
  return pref.weight_collective * risk_power(Scalar(g(kCollective)), pref.beta) +
         pref.weight_individual * Scalar(g(kIndividual));
}

/// Utility on learned estimates, whose collective part can dip below zero;
/// the collective component is floored at 0 (true returns never are negative).
template <typename Scalar, typename Derived>
Scalar estimate_utility(const RiskPreferenceT<Scalar>& pref, const Eigen::MatrixBase<Derived>& g) {
  using std::max;
  return pref.weight_collective * risk_power(max(Scalar(g(kCollective)), Scalar(0)), pref.beta) +
         pref.weight_individual * Scalar(g(kIndividual));
}

enum class GameClass { Competitive, MixedMotive, Cooperative };

inline const char* to_string(GameClass c) {
  switch (c) {
    case GameClass::Competitive: return "competitive";
    case GameClass::MixedMotive: return "mixed-motive";
    case GameClass::Cooperative: return "cooperative";
  }
  return "?";
}

/// f <= 1 competitive, 1 < f <= n mixed-motive, f > n cooperative.
template <typename Scalar>
GameClass classify_game(const GameSpecT<Scalar>& spec) {
  const Scalar f = spec.multiplication_factor();
  if (f <= Scalar(1)) return GameClass::Competitive;
  if (f <= Scalar(spec.n_players())) return GameClass::MixedMotive;
  return GameClass::Cooperative;
}

/// All 2^n pure profiles in lexicographic order, player 0 most significant,
/// Cooperate before Defect.
inline std::vector<ActionProfile> enumerate_profiles(std::size_t n_players) {
  if (n_players > 20) throw std::invalid_argument("enumerate_profiles: too many players");
  std::vector<ActionProfile> out;
  const std::size_t count = std::size_t(1) << n_players;
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    ActionProfile p(n_players);
    for (std::size_t j = 0; j < n_players; ++j)
      p[j] = ((code >> (n_players - 1 - j)) & 1u) ? Action::Defect : Action::Cooperate;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace moepgg

#endif  // MOEPGG_GAME_HPP
