#include "moepgg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace moepgg {

namespace {

void require_two_players(const GameSpec& spec, const char* what) {
  if (spec.n_players() != 2) throw std::invalid_argument(std::string(what) + ": two-player games only");
}

void check_strategy(const GameSpec& spec, const JointStrategy& strategy, std::size_t player) {
  if (strategy.size() != spec.n_players())
    throw std::invalid_argument("strategy length does not match the number of players");
  if (player >= spec.n_players()) throw std::out_of_range("player index out of range");
}

JointStrategy lattice_point(const SweepGrid& grid, std::size_t i0, std::size_t i1) {
  return JointStrategy{grid[i0], grid[i1]};
}

}  // namespace

JointStrategy::JointStrategy(Eigen::VectorXd coop_probs) : probs_(std::move(coop_probs)) {
  for (Eigen::Index i = 0; i < probs_.size(); ++i)
    if (!(probs_(i) >= 0.0 && probs_(i) <= 1.0))
      throw std::invalid_argument("JointStrategy: probabilities must lie in [0,1]");
}

JointStrategy::JointStrategy(std::initializer_list<double> coop_probs)
    : JointStrategy(Eigen::Map<const Eigen::VectorXd>(coop_probs.begin(),
                                                       static_cast<Eigen::Index>(coop_probs.size()))) {}

SweepGrid::SweepGrid(double resolution) : resolution_(resolution) {
  if (!(resolution > 0.0 && resolution <= 0.5))
    throw std::invalid_argument("SweepGrid: resolution must lie in (0, 0.5]");
  const double steps = 1.0 / resolution;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) < 1e-9) {
    // i / N keeps lattice values exact decimals where possible.
    const auto n = static_cast<std::size_t>(rounded);
    values_.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values_.push_back(static_cast<double>(i) / rounded);
  } else {
    for (std::size_t i = 0; static_cast<double>(i) * resolution < 1.0 - 1e-12; ++i)
      values_.push_back(static_cast<double>(i) * resolution);
    values_.push_back(1.0);
  }
}

std::size_t SweepGrid::nearest(double p) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), p);
  if (it == values_.end()) return values_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - values_.begin());
  if (hi == 0) return 0;
  return (p - values_[hi - 1] <= values_[hi] - p) ? hi - 1 : hi;
}

const char* to_string(ClusterKind k) {
  switch (k) {
    case ClusterKind::Pure: return "pure";
    case ClusterKind::StationaritySegment: return "stationarity_segment";
    case ClusterKind::Region: return "region";
  }
  return "?";
}

VectorReturn expected_vector_return(const GameSpec& spec, const JointStrategy& strategy,
                                    std::size_t player) {
  check_strategy(spec, strategy, player);
  double pool = 0.0;
  for (std::size_t j = 0; j < spec.n_players(); ++j) pool += spec.endowment(j) * strategy[j];
  const double n = static_cast<double>(spec.n_players());
  return {spec.multiplication_factor() * pool / n, spec.endowment(player) * (1.0 - strategy[player])};
}

double ser_value(const GameSpec& spec, const JointStrategy& strategy, std::size_t player,
                 const RiskPreference& pref) {
  return utility(pref, expected_vector_return(spec, strategy, player));
}

double profile_probability(const JointStrategy& strategy, const ActionProfile& profile) {
  double prob = 1.0;
  for (std::size_t j = 0; j < profile.size(); ++j)
    prob *= profile[j] == Action::Cooperate ? strategy[j] : 1.0 - strategy[j];
  return prob;
}

double esr_value(const GameSpec& spec, const JointStrategy& strategy, std::size_t player,
                 const RiskPreference& pref) {
  check_strategy(spec, strategy, player);
  double value = 0.0;
  for (const auto& profile : enumerate_profiles(spec.n_players())) {
    const double prob = profile_probability(strategy, profile);
    if (prob == 0.0) continue;
    value += prob * utility(pref, vector_reward(spec, profile, player));
  }
  return value;
}

double esr_beta_threshold(double c, double f) { return std::log(c) / std::log(c * f); }

bool esr_cooperation_preferred(double c, double f, double beta) {
  if (!(c > 0.0)) throw std::invalid_argument("esr_cooperation_preferred: c must be positive");
  const double cf = c * f;
  if (cf == 0.0) return (beta == 0.0 ? 1.0 : 0.0) > c;
  if (cf == 1.0) return 1.0 > c;
  const double threshold = esr_beta_threshold(c, f);
  return cf > 1.0 ? beta > threshold : beta < threshold;
}

double cooperation_advantage(double c, double f, double beta, double p) {
  const double k = f * c / 2.0;
  return risk_power(k * (1.0 + p), beta) - risk_power(k * p, beta) - c;
}

std::optional<double> best_response_coop_threshold(double c, double f, double beta, double tolerance) {
  // The advantage is monotone in p (increasing for beta >= 1, decreasing below),
  // so the set where cooperation wins is an upper interval whenever it reaches p = 1.
  if (cooperation_advantage(c, f, beta, 1.0) <= 0.0) return std::nullopt;
  if (cooperation_advantage(c, f, beta, 0.0) > 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (cooperation_advantage(c, f, beta, mid) > 0.0 ? hi : lo) = mid;
  }
  return lo;
}

double best_response(const GameSpec& spec, const RiskPreference& pref, double opponent_coop_prob,
                     std::size_t player) {
  require_two_players(spec, "best_response");
  if (player > 1) throw std::out_of_range("player index out of range");
  if (!(opponent_coop_prob >= 0.0 && opponent_coop_prob <= 1.0))
    throw std::invalid_argument("best_response: opponent probability outside [0,1]");

  const std::size_t other = 1 - player;
  const double f = spec.multiplication_factor();
  // collective(p) = slope * p + base, individual(p) = own * (1 - p)
  const double slope = f * spec.endowment(player) / 2.0;
  const double base = f * spec.endowment(other) * opponent_coop_prob / 2.0;
  const double own = spec.endowment(player);
  const double wc = pref.weight_collective, wi = pref.weight_individual;
  const double beta = pref.beta;

  auto value = [&](double p) { return wc * risk_power(slope * p + base, beta) + wi * own * (1.0 - p); };
  auto boundary = [&]() { return value(1.0) > value(0.0) ? 1.0 : 0.0; };

  if (beta == 0.0 || slope == 0.0 || wc == 0.0) return boundary();
  if (beta >= 1.0) return boundary();  // linear or convex in p
  if (wi * own == 0.0) return 1.0;      // strictly increasing

  // Concave: stationary point of wc * (slope p + base)^beta - wi * own * p.
  const double x_star = std::pow(wi * own / (wc * beta * slope), 1.0 / (beta - 1.0));
  return std::clamp((x_star - base) / slope, 0.0, 1.0);
}

std::optional<double> stationarity_sum(double c, double f, double beta) {
  if (beta == 0.0) return 0.0;
  if (!(beta > 0.0 && beta < 1.0) || f == 0.0 || c == 0.0) return std::nullopt;
  const double k = f * c / 2.0;
  return std::pow(c / (beta * k), 1.0 / (beta - 1.0)) / k;
}

Eigen::MatrixXd ser_landscape(const GameSpec& spec, const PreferencePair& prefs, const SweepGrid& grid,
                              std::size_t player) {
  require_two_players(spec, "ser_landscape");
  if (player > 1) throw std::out_of_range("player index out of range");
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      out(i, j) = ser_value(spec, JointStrategy{grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]},
                            player, prefs[player]);
  return out;
}

std::vector<NashResult> find_nash_equilibria(const GameSpec& spec, const PreferencePair& prefs,
                                             const SweepGrid& grid, double tolerance) {
  require_two_players(spec, "find_nash_equilibria");
  const Eigen::MatrixXd u0 = ser_landscape(spec, prefs, grid, 0);
  const Eigen::MatrixXd u1 = ser_landscape(spec, prefs, grid, 1);
  // Player 0 deviates along a column, player 1 along a row.
  const Eigen::RowVectorXd best0 = u0.colwise().maxCoeff();
  const Eigen::VectorXd best1 = u1.rowwise().maxCoeff();
  const ParetoCoverage pcs = pareto_coverage_set(spec, grid);

  std::vector<NashResult> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto ei = static_cast<Eigen::Index>(i), ej = static_cast<Eigen::Index>(j);
      if (u0(ei, ej) < best0(ej) - tolerance || u1(ei, ej) < best1(ei) - tolerance) continue;

      NashResult r;
      r.strategy = lattice_point(grid, i, j);
      r.ser_values = {u0(ei, ej), u1(ei, ej)};
      r.i0 = i;
      r.i1 = j;
      r.on_pareto_front = pcs.contains(0, i, j) && pcs.contains(1, i, j);

      r.verified = true;
      for (std::size_t player = 0; player < 2; ++player) {
        const double own = r.strategy[player];
        const double opp = r.strategy[1 - player];
        const double br = best_response(spec, prefs[player], opp, player);
        Eigen::Vector2d deviated = r.strategy.coop_probs();
        deviated(static_cast<Eigen::Index>(player)) = br;
        const double gain =
            ser_value(spec, JointStrategy(deviated), player, prefs[player]) - r.ser_values[player];
        if (gain > tolerance && std::abs(br - own) > grid.resolution() + 1e-12) r.verified = false;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<NashCluster> cluster_equilibria(const std::vector<NashResult>& equilibria,
                                            const SweepGrid& grid, const GameSpec& spec,
                                            const PreferencePair& prefs) {
  const std::size_t n = equilibria.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  // Lattice index -> equilibrium index, for neighbour lookups.
  const std::size_t m = grid.size();
  std::vector<std::ptrdiff_t> at(m * m, -1);
  for (std::size_t k = 0; k < n; ++k) at[equilibria[k].i0 * m + equilibria[k].i1] = static_cast<std::ptrdiff_t>(k);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::ptrdiff_t>(equilibria[k].i0);
    const auto j = static_cast<std::ptrdiff_t>(equilibria[k].i1);
    for (std::ptrdiff_t di = -1; di <= 1; ++di)
      for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
        const auto a = i + di, b = j + dj;
        if (a < 0 || b < 0 || a >= static_cast<std::ptrdiff_t>(m) || b >= static_cast<std::ptrdiff_t>(m)) continue;
        const auto other = at[static_cast<std::size_t>(a) * m + static_cast<std::size_t>(b)];
        if (other >= 0) parent[find(k)] = find(static_cast<std::size_t>(other));
      }
  }

  std::vector<NashCluster> clusters;
  std::vector<std::ptrdiff_t> cluster_of_root(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t root = find(k);
    if (cluster_of_root[root] < 0) {
      cluster_of_root[root] = static_cast<std::ptrdiff_t>(clusters.size());
      NashCluster c;
      c.id = clusters.size();
      c.p0_min = c.p1_min = c.sum_min = std::numeric_limits<double>::infinity();
      c.p0_max = c.p1_max = c.sum_max = -std::numeric_limits<double>::infinity();
      clusters.push_back(c);
    }
    NashCluster& c = clusters[static_cast<std::size_t>(cluster_of_root[root])];
    c.members.push_back(k);
    const double p0 = equilibria[k].strategy[0], p1 = equilibria[k].strategy[1];
    c.p0_min = std::min(c.p0_min, p0);
    c.p0_max = std::max(c.p0_max, p0);
    c.p1_min = std::min(c.p1_min, p1);
    c.p1_max = std::max(c.p1_max, p1);
    c.sum_min = std::min(c.sum_min, p0 + p1);
    c.sum_max = std::max(c.sum_max, p0 + p1);
  }

  const bool symmetric = spec.endowment(0) == spec.endowment(1) && prefs[0].beta == prefs[1].beta &&
                         prefs[0].weight_collective == 1.0 && prefs[0].weight_individual == 1.0 &&
                         prefs[1].weight_collective == 1.0 && prefs[1].weight_individual == 1.0;
  const auto s_star = symmetric ? stationarity_sum(spec.endowment(0), spec.multiplication_factor(), prefs[0].beta)
                                : std::nullopt;
  for (auto& c : clusters) {
    const bool corner = c.members.size() == 1 && (c.p0_min == 0.0 || c.p0_min == 1.0) &&
                        (c.p1_min == 0.0 || c.p1_min == 1.0);
    if (corner) {
      c.kind = ClusterKind::Pure;
    } else if (s_star && std::abs(c.sum_min - *s_star) <= 2.0 * grid.resolution() &&
               std::abs(c.sum_max - *s_star) <= 2.0 * grid.resolution()) {
      c.kind = ClusterKind::StationaritySegment;
    } else {
      c.kind = ClusterKind::Region;
    }
  }
  return clusters;
}

std::vector<JointStrategy> ParetoCoverage::front(std::size_t player, const SweepGrid& grid) const {
  std::vector<JointStrategy> out;
  const auto& mask = member[player];
  for (Eigen::Index i = 0; i < mask.rows(); ++i)
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
      if (mask(i, j)) out.push_back(lattice_point(grid, static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  return out;
}

ParetoCoverage pareto_coverage_set(const GameSpec& spec, const SweepGrid& grid) {
  require_two_players(spec, "pareto_coverage_set");
  const std::size_t m = grid.size();
  ParetoCoverage pcs;

  for (std::size_t player = 0; player < 2; ++player) {
    struct Point {
      double collective, individual;
      std::size_t i, j;
    };
    std::vector<Point> pts;
    pts.reserve(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const VectorReturn v = expected_vector_return(spec, lattice_point(grid, i, j), player);
        pts.push_back({v(kCollective), v(kIndividual), i, j});
      }
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
      if (a.collective != b.collective) return a.collective > b.collective;
      return a.individual > b.individual;
    });

    auto& mask = pcs.member[player];
    mask.setConstant(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m), false);
    // A point survives iff it tops its equal-collective group and strictly beats
    // every point with larger collective on the individual objective.
    double best_individual = -std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start < pts.size();) {
      std::size_t end = start;
      while (end < pts.size() && pts[end].collective == pts[start].collective) ++end;
      const double group_max = pts[start].individual;
      if (group_max > best_individual) {
        for (std::size_t k = start; k < end && pts[k].individual == group_max; ++k)
          mask(static_cast<Eigen::Index>(pts[k].i), static_cast<Eigen::Index>(pts[k].j)) = true;
        best_individual = group_max;
      }
      start = end;
    }
  }
  return pcs;
}

double welfare(const GameSpec& spec, const JointStrategy& strategy, const PreferencePair& prefs) {
  require_two_players(spec, "welfare");
  return ser_value(spec, strategy, 0, prefs[0]) + ser_value(spec, strategy, 1, prefs[1]);
}

double max_welfare(const GameSpec& spec, const PreferencePair& prefs, const SweepGrid& grid) {
  const Eigen::MatrixXd w = ser_landscape(spec, prefs, grid, 0) + ser_landscape(spec, prefs, grid, 1);
  return w.maxCoeff();
}

double price_of_anarchy(const GameSpec& spec, const PreferencePair& prefs, const SweepGrid& grid,
                        double tolerance) {
  const auto equilibria = find_nash_equilibria(spec, prefs, grid, tolerance);
  if (equilibria.empty())
    throw NoEquilibriumError("price_of_anarchy: no equilibrium on the lattice (grid too coarse?)");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& e : equilibria) worst = std::min(worst, e.ser_values[0] + e.ser_values[1]);
  return max_welfare(spec, prefs, grid) / worst;
}

}  // namespace moepgg
