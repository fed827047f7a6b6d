#ifndef MOEPGG_ANALYSIS_HPP
#define MOEPGG_ANALYSIS_HPP

#include "moepgg/game.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace moepgg {

/// Per-player cooperation probabilities.
class JointStrategy {
 public:
  JointStrategy() = default;
  explicit JointStrategy(Eigen::VectorXd coop_probs);
  JointStrategy(std::initializer_list<double> coop_probs);

  std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }
  double operator[](std::size_t i) const { return probs_(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& coop_probs() const { return probs_; }

  bool operator==(const JointStrategy& o) const { return probs_ == o.probs_; }

 private:
  Eigen::VectorXd probs_;
};

/// Regular lattice over [0,1] that always contains both endpoints.
class SweepGrid {
 public:
  explicit SweepGrid(double resolution = 0.01);

  double resolution() const { return resolution_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  /// Index of the lattice point closest to p.
  std::size_t nearest(double p) const;

 private:
  double resolution_;
  std::vector<double> values_;
};

using PreferencePair = std::array<RiskPreference, 2>;

struct NashResult {
  JointStrategy strategy;
  std::vector<double> ser_values;
  bool on_pareto_front = false;
  /// Lattice indices (player 0, player 1).
  std::size_t i0 = 0, i1 = 0;
  /// Passed the continuous best-response check.
  bool verified = false;
};

enum class ClusterKind { Pure, StationaritySegment, Region };
const char* to_string(ClusterKind k);

/// Connected group of grid equilibria (8-neighbourhood on the lattice).
struct NashCluster {
  std::size_t id = 0;
  std::vector<std::size_t> members;  // indices into the equilibrium list
  double p0_min = 0, p0_max = 0, p1_min = 0, p1_max = 0;
  double sum_min = 0, sum_max = 0;
  ClusterKind kind = ClusterKind::Region;
};

class NoEquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- Expected returns and criteria -----------------------------------------

/// Expectation of the vector reward under independent Bernoulli actions.
VectorReturn expected_vector_return(const GameSpec& spec, const JointStrategy& strategy,
                                    std::size_t player);

/// Utility of the expected return (scalarised expected return).
double ser_value(const GameSpec& spec, const JointStrategy& strategy, std::size_t player,
                 const RiskPreference& pref);

/// Expected utility over the pure outcomes (expected scalarised return).
double esr_value(const GameSpec& spec, const JointStrategy& strategy, std::size_t player,
                 const RiskPreference& pref);

/// Probability of a pure profile under independent mixed strategies.
double profile_probability(const JointStrategy& strategy, const ActionProfile& profile);

/// Whether mutual cooperation beats mutual defection for every agent when
/// utilities are applied to the realised outcome, i.e. (c f)^beta > c.
/// Evaluated through the logarithmic threshold on beta.
bool esr_cooperation_preferred(double c, double f, double beta);

/// log(c) / log(c f); the beta at which the preference flips (cf != 1, cf > 0).
double esr_beta_threshold(double c, double f);

// --- Best responses (two players, equal endowments) -------------------------

/// Gain from cooperating over defecting against an opponent cooperating with
/// probability p: (k(1+p))^beta - (kp)^beta - c, with k = f c / 2.
double cooperation_advantage(double c, double f, double beta, double p);

/// Largest opponent cooperation level p* such that cooperating strictly beats
/// defecting for every p > p*. nullopt when no p <= 1 qualifies.
std::optional<double> best_response_coop_threshold(double c, double f, double beta,
                                                   double tolerance = 1e-6);

/// Cooperation probability maximising the player's SER against an opponent
/// cooperating with probability opponent_coop_prob. Ties go to the lower p.
double best_response(const GameSpec& spec, const RiskPreference& pref, double opponent_coop_prob,
                     std::size_t player = 0);

/// p0 + p1 along the interior stationarity segment of a symmetric game with
/// unit weights and 0 < beta < 1; 0 for beta == 0; nullopt otherwise.
std::optional<double> stationarity_sum(double c, double f, double beta);

// --- Sweeps over the strategy lattice ---------------------------------------

/// SER of `player` at every lattice point; rows index player 0's probability.
Eigen::MatrixXd ser_landscape(const GameSpec& spec, const PreferencePair& prefs, const SweepGrid& grid,
                              std::size_t player);

/// Grid joint strategies where neither player gains more than `tolerance` from
/// a unilateral lattice deviation.
std::vector<NashResult> find_nash_equilibria(const GameSpec& spec, const PreferencePair& prefs,
                                             const SweepGrid& grid, double tolerance = 1e-9);

std::vector<NashCluster> cluster_equilibria(const std::vector<NashResult>& equilibria,
                                            const SweepGrid& grid, const GameSpec& spec,
                                            const PreferencePair& prefs);

/// Per-player non-dominated sets over the lattice. Each player's front is
/// computed on that player's own (collective, individual) expected vector.
struct ParetoCoverage {
  std::array<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>, 2> member;

  bool contains(std::size_t player, std::size_t i0, std::size_t i1) const {
    return member[player](static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(i1));
  }
  std::vector<JointStrategy> front(std::size_t player, const SweepGrid& grid) const;
};

ParetoCoverage pareto_coverage_set(const GameSpec& spec, const SweepGrid& grid);

/// Utilitarian welfare: sum of the players' SER values.
double welfare(const GameSpec& spec, const JointStrategy& strategy, const PreferencePair& prefs);

double max_welfare(const GameSpec& spec, const PreferencePair& prefs, const SweepGrid& grid);

/// Best lattice welfare over the worst equilibrium welfare.
double price_of_anarchy(const GameSpec& spec, const PreferencePair& prefs, const SweepGrid& grid,
                        double tolerance = 1e-9);

}  // namespace moepgg

#endif  // MOEPGG_ANALYSIS_HPP
