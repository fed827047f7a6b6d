#include "moepgg/commands.hpp"

#include "moepgg/agent.hpp"
#include "moepgg/analysis.hpp"
#include "moepgg/csv.hpp"
#include "moepgg/game.hpp"
#include "moepgg/population.hpp"

#include <filesystem>
#include <fstream>

namespace moepgg {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

void write_echo(const std::string& dir, const json& j) {
  std::ofstream out(path_in(dir, "config_echo.json"), std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write config_echo.json in " + dir);
  out << j.dump(2) << '\n';
}

void require_nonempty(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw UsageError(std::string(what) + " list must not be empty");
}

json common_json(const std::string& command, const CommonOptions& opts) {
  json j;
  j["command"] = command;
  j["seed"] = opts.seed;
  j["resolution"] = opts.resolution;
  return j;
}

PreferencePair symmetric(double beta) { return {RiskPreference(beta), RiskPreference(beta)}; }

SweepGrid make_grid(double resolution) {
  try {
    return SweepGrid(resolution);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

void cmd_payoff_table(const CommonOptions& opts, std::size_t n, double coins, const std::vector<double>& fs) {
  if (n < 2 || n > 4) throw UsageError("payoff-table supports 2 to 4 players");
  require_nonempty(fs, "f");
  prepare_dir(opts.out_dir);
  CsvWriter csv(path_in(opts.out_dir, "payoff_table.csv"), {"f", "profile", "player", "collective", "individual"});
  for (double f : fs) {
    const GameSpec spec = GameSpec::uniform(n, coins, f);
    for (const auto& profile : enumerate_profiles(n)) {
      std::string label;
      for (Action a : profile) label += to_string(a);
      for (std::size_t i = 0; i < n; ++i) {
        const VectorReturn r = vector_reward(spec, profile, i);
        csv.row({format_number(f), label, std::to_string(i), format_number(r(kCollective)),
                 format_number(r(kIndividual))});
      }
    }
  }
  json j = common_json("payoff-table", opts);
  j["n"] = n;
  j["coins"] = coins;
  j["f"] = fs;
  j["profile_order"] = "player 0 first; C before D";
  write_echo(opts.out_dir, j);
}

void cmd_thresholds(const CommonOptions& opts, const std::vector<double>& fs, const std::vector<double>& betas,
                    double coins) {
  require_nonempty(fs, "f");
  require_nonempty(betas, "beta");
  if (!(coins > 0.0)) throw UsageError("coins must be positive");
  prepare_dir(opts.out_dir);
  CsvWriter csv(path_in(opts.out_dir, "thresholds.csv"), {"f", "beta", "threshold_or_NA"});
  json cells = json::array();
  for (double f : fs) {
    for (double beta : betas) {
      const auto t = best_response_coop_threshold(coins, f, beta);
      csv.row({format_number(f), format_number(beta), t ? format_number(*t) : "NA"});
      json cell;
      cell["f"] = f;
      cell["beta"] = beta;
      if (t) {
        cell["threshold"] = *t;
        // Weak reading: at p = threshold itself cooperation already strictly wins.
        cell["cooperation_strict_at_threshold"] = cooperation_advantage(coins, f, beta, *t) > 0.0;
      } else {
        cell["threshold"] = nullptr;
      }
      cells.push_back(cell);
    }
  }
  json j = common_json("thresholds", opts);
  j["coins"] = coins;
  j["f"] = fs;
  j["beta"] = betas;
  j["bisection_tolerance"] = 1e-6;
  j["convention"] =
      "cooperation is the strict best response for every opponent cooperation probability above the threshold; "
      "NA when even p = 1 does not suffice";
  j["cells"] = cells;
  write_echo(opts.out_dir, j);
}

void cmd_nash_sweep(const CommonOptions& opts, const std::vector<double>& fs, const std::vector<double>& betas,
                    double coins) {
  require_nonempty(fs, "f");
  require_nonempty(betas, "beta");
  const SweepGrid grid = make_grid(opts.resolution);
  prepare_dir(opts.out_dir);
  CsvWriter csv(path_in(opts.out_dir, "nash_sweep.csv"), {"f", "beta", "p0", "p1", "ser0", "ser1", "on_pcs"});
  CsvWriter clusters_csv(path_in(opts.out_dir, "nash_clusters.csv"),
                         {"f", "beta", "cluster", "kind", "size", "p0_min", "p0_max", "p1_min", "p1_max", "sum_min",
                          "sum_max", "stationarity_sum"});
  json empty = json::array();
  std::size_t unverified = 0;
  for (double f : fs) {
    const GameSpec spec = GameSpec::uniform(2, coins, f);
    for (double beta : betas) {
      const auto prefs = symmetric(beta);
      const auto eq = find_nash_equilibria(spec, prefs, grid);
      if (eq.empty()) empty.push_back({{"f", f}, {"beta", beta}});
      for (const auto& e : eq) {
        if (!e.verified) ++unverified;
        csv.row({format_number(f), format_number(beta), format_number(e.strategy[0]), format_number(e.strategy[1]),
                 format_number(e.ser_values[0]), format_number(e.ser_values[1]), e.on_pareto_front ? "1" : "0"});
      }
      const auto s_star = stationarity_sum(coins, f, beta);
      for (const auto& c : cluster_equilibria(eq, grid, spec, prefs)) {
        clusters_csv.row({format_number(f), format_number(beta), std::to_string(c.id), to_string(c.kind),
                          std::to_string(c.members.size()), format_number(c.p0_min), format_number(c.p0_max),
                          format_number(c.p1_min), format_number(c.p1_max), format_number(c.sum_min),
                          format_number(c.sum_max), s_star ? format_number(*s_star) : "NA"});
      }
    }
  }
  json j = common_json("nash-sweep", opts);
  j["coins"] = coins;
  j["f"] = fs;
  j["beta"] = betas;
  j["deviation_tolerance"] = 1e-9;
  j["on_pcs"] = "equilibrium lies on the Pareto coverage set of both players";
  j["cells_without_equilibrium"] = empty;
  j["unverified_equilibria"] = unverified;
  write_echo(opts.out_dir, j);
}

void cmd_poa(const CommonOptions& opts, const std::vector<double>& fs, const std::vector<double>& betas,
             double coins) {
  require_nonempty(fs, "f");
  require_nonempty(betas, "beta");
  const SweepGrid grid = make_grid(opts.resolution);
  prepare_dir(opts.out_dir);
  CsvWriter csv(path_in(opts.out_dir, "poa.csv"), {"f", "beta", "poa"});
  for (double f : fs) {
    const GameSpec spec = GameSpec::uniform(2, coins, f);
    for (double beta : betas) {
      std::string value = "NA";
      try {
        value = format_number(price_of_anarchy(spec, symmetric(beta), grid));
      } catch (const NoEquilibriumError&) {
      }
      csv.row({format_number(f), format_number(beta), value});
    }
  }
  json j = common_json("poa", opts);
  j["coins"] = coins;
  j["f"] = fs;
  j["beta"] = betas;
  j["welfare"] = "sum of the players' SER utilities";
  write_echo(opts.out_dir, j);
}

void cmd_pcs(const CommonOptions& opts, const std::vector<double>& fs, double coins) {
  require_nonempty(fs, "f");
  const SweepGrid grid = make_grid(opts.resolution);
  prepare_dir(opts.out_dir);
  CsvWriter csv(path_in(opts.out_dir, "pcs.csv"), {"f", "player", "p0", "p1"});
  for (double f : fs) {
    const ParetoCoverage pcs = pareto_coverage_set(GameSpec::uniform(2, coins, f), grid);
    for (std::size_t player = 0; player < 2; ++player)
      for (const auto& s : pcs.front(player, grid))
        csv.row({format_number(f), std::to_string(player), format_number(s[0]), format_number(s[1])});
  }
  json j = common_json("pcs", opts);
  j["coins"] = coins;
  j["f"] = fs;
  j["dominance"] = "per player, on (collective, individual) expected returns";
  write_echo(opts.out_dir, j);
}

void cmd_landscape(const CommonOptions& opts, double f, double beta, double coins, std::size_t player) {
  if (player > 1) throw UsageError("player must be 0 or 1");
  const SweepGrid grid = make_grid(opts.resolution);
  prepare_dir(opts.out_dir);
  const GameSpec spec = GameSpec::uniform(2, coins, f);
  const std::string name = "ser_landscape_" + format_number(f) + "_" + format_number(beta) +
                           (player == 0 ? "" : "_p1") + ".csv";
  write_matrix_csv(path_in(opts.out_dir, name), ser_landscape(spec, symmetric(beta), grid, player));
  json j = common_json("landscape", opts);
  j["coins"] = coins;
  j["f"] = f;
  j["beta"] = beta;
  j["player"] = player;
  j["file"] = name;
  j["layout"] = "rows: player 0 cooperation probability, columns: player 1";
  write_echo(opts.out_dir, j);
}

void cmd_train(const CommonOptions& opts, const TrainPlan& plan) {
  std::vector<Condition> conditions;
  try {
    conditions = plan.conditions();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  prepare_dir(opts.out_dir);
  write_echo(opts.out_dir, [&] {
    json j = common_json("train", opts);
    j["plan"] = to_json(plan);
    return j;
  }());

  for (const Condition& cond : conditions) {
    const std::string dir = path_in(opts.out_dir, cond.label);
    const std::string ckpt_dir = path_in(dir, "checkpoints");
    prepare_dir(ckpt_dir);
    json echo = common_json("train", opts);
    echo["label"] = cond.label;
    echo["config"] = to_json(cond.config);
    write_echo(dir, echo);

    CsvWriter csv(path_in(dir, "eval_curve.csv"), {"run", "episode", "f", "mean_cooperation"});
    train(cond.config, [&](const RunOutcome& outcome) {
      for (const auto& r : outcome.records)
        csv.row({std::to_string(r.run), std::to_string(r.episode), format_number(r.f),
                 format_number(r.mean_cooperation)});
      save_brains(path_in(ckpt_dir, "run_" + std::to_string(outcome.run) + ".ckpt"), outcome.brains);
    });
  }
}

void cmd_evaluate(const CommonOptions& opts, const EvaluateOptions& eval) {
  require_nonempty(eval.fs, "f");
  if (eval.checkpoint.empty()) throw UsageError("--checkpoint is required");
  std::vector<AgentBrain> brains = load_brains(eval.checkpoint);
  if (brains.empty()) throw std::runtime_error("checkpoint holds no agents");

  ExperimentConfig config;
  config.n_pool = brains.size();
  config.m_active = static_cast<std::size_t>(brains.front().config().observation_size);
  config.coins = eval.coins;
  config.obs_noise_sigma = eval.sigma;
  config.eval_groups = eval.groups;
  config.eval_rounds = eval.rounds;
  config.master_seed = opts.seed;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  prepare_dir(opts.out_dir);
  CsvWriter csv(path_in(opts.out_dir, "evaluate.csv"), {"f", "mean_cooperation"});
  for (std::size_t fi = 0; fi < eval.fs.size(); ++fi) {
    Rng rng(derive_seed({opts.seed, fi}));
    csv.row({format_number(eval.fs[fi]), format_number(evaluate(brains, config, eval.fs[fi], rng))});
  }
  json j = common_json("evaluate", opts);
  j["checkpoint"] = eval.checkpoint;
  j["f"] = eval.fs;
  j["sigma"] = eval.sigma;
  j["groups"] = eval.groups;
  j["rounds"] = eval.rounds;
  j["coins"] = eval.coins;
  write_echo(opts.out_dir, j);
}

}  // namespace moepgg
