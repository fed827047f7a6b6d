#include "moepgg/config.hpp"

#include "moepgg/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace moepgg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& raw) {
  const double v = parse_double(raw);
  if (v < 0 || std::floor(v) != v) throw std::invalid_argument("not a non-negative integer: '" + trim(raw) + "'");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& raw) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::string label_number(double v) {
  std::string s = format_number(v);
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty number list");
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step, got '" + s + "'");
    const double start = parse_double(parts[0]), stop = parse_double(parts[1]), step = parse_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("invalid range '" + s + "'");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
      // Snap to 1e-9 so 0.05 * 7 prints as 0.35.
      const double v = std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9;
      out.push_back(v);
    }
    return out;
  }
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_double(part));
  return out;
}

std::vector<Condition> TrainPlan::conditions() const {
  std::vector<Condition> out;
  const bool hetero = base.beta_mode == BetaMode::Heterogeneous;
  const std::vector<double> spread = hetero ? beta_sds : betas;
  for (double b : spread) {
    for (double s : sigmas) {
      Condition c;
      c.config = base;
      c.config.obs_noise_sigma = s;
      if (hetero) {
        c.config.beta_sd = b;
        c.label = "betasd" + label_number(b) + "_sigma" + label_number(s);
      } else {
        c.config.beta = b;
        c.label = "beta" + label_number(b) + "_sigma" + label_number(s);
      }
      c.config.validate();
      out.push_back(std::move(c));
    }
  }
  return out;
}

TrainPlan parse_plan(const std::string& text) {
  TrainPlan plan;
  ExperimentConfig& c = plan.base;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"n_pool", [&](const std::string& v) { c.n_pool = parse_count(v); }},
      {"m_active", [&](const std::string& v) { c.m_active = parse_count(v); }},
      {"f_min", [&](const std::string& v) { c.f_min = parse_double(v); }},
      {"f_max", [&](const std::string& v) { c.f_max = parse_double(v); }},
      {"rounds", [&](const std::string& v) { c.rounds_per_episode = parse_count(v); }},
      {"updates_per_episode", [&](const std::string& v) { c.updates_per_episode = parse_count(v); }},
      {"episodes", [&](const std::string& v) { c.episodes = parse_count(v); }},
      {"runs", [&](const std::string& v) { c.runs = parse_count(v); }},
      {"coins", [&](const std::string& v) { c.coins = parse_double(v); }},
      {"sigma", [&](const std::string& v) { plan.sigmas = parse_number_list(v); }},
      {"beta_mode",
       [&](const std::string& v) {
         const std::string m = trim(v);
         if (m == "homogeneous") c.beta_mode = BetaMode::Homogeneous;
         else if (m == "heterogeneous") c.beta_mode = BetaMode::Heterogeneous;
         else throw std::invalid_argument("beta_mode must be homogeneous or heterogeneous");
       }},
      {"beta", [&](const std::string& v) { plan.betas = parse_number_list(v); }},
      {"beta_mean", [&](const std::string& v) { c.beta_mean = parse_double(v); }},
      {"beta_sd", [&](const std::string& v) { plan.beta_sds = parse_number_list(v); }},
      {"beta_floor", [&](const std::string& v) { c.beta_floor = parse_double(v); }},
      {"eval_fs", [&](const std::string& v) { c.eval_fs = parse_number_list(v); }},
      {"eval_interval", [&](const std::string& v) { c.eval_interval = parse_count(v); }},
      {"eval_groups", [&](const std::string& v) { c.eval_groups = parse_count(v); }},
      {"eval_rounds", [&](const std::string& v) { c.eval_rounds = parse_count(v); }},
      {"eval_noisy_observations", [&](const std::string& v) { c.eval_noisy_observations = parse_bool(v); }},
      {"seed", [&](const std::string& v) { c.master_seed = parse_count(v); }},
      {"hidden_sizes",
       [&](const std::string& v) {
         c.dqn.hidden_sizes.clear();
         for (double h : parse_number_list(v)) {
           if (h < 1 || std::floor(h) != h) throw std::invalid_argument("hidden sizes must be positive integers");
           c.dqn.hidden_sizes.push_back(static_cast<int>(h));
         }
       }},
      {"learning_rate", [&](const std::string& v) { c.dqn.learning_rate = parse_double(v); }},
      {"rms_smoothing", [&](const std::string& v) { c.dqn.rms_smoothing = parse_double(v); }},
      {"rms_epsilon", [&](const std::string& v) { c.dqn.rms_epsilon = parse_double(v); }},
      {"gamma", [&](const std::string& v) { c.dqn.gamma = parse_double(v); }},
      {"epsilon", [&](const std::string& v) { c.dqn.epsilon = parse_double(v); }},
      {"buffer_capacity", [&](const std::string& v) { c.dqn.buffer_capacity = parse_count(v); }},
      {"batch_size", [&](const std::string& v) { c.dqn.batch_size = parse_count(v); }},
      {"target_sync_interval", [&](const std::string& v) { c.dqn.target_sync_interval = parse_count(v); }},
  };

  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    try {
      it->second(line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    }
  }
  if (!plan.betas.empty()) c.beta = plan.betas.front();
  if (!plan.sigmas.empty()) c.obs_noise_sigma = plan.sigmas.front();
  if (!plan.beta_sds.empty()) c.beta_sd = plan.beta_sds.front();
  return plan;
}

TrainPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str());
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["n_pool"] = c.n_pool;
  j["m_active"] = c.m_active;
  j["f_min"] = c.f_min;
  j["f_max"] = c.f_max;
  j["rounds"] = c.rounds_per_episode;
  j["updates_per_episode"] = c.updates_per_episode;
  j["episodes"] = c.episodes;
  j["runs"] = c.runs;
  j["coins"] = c.coins;
  j["sigma"] = c.obs_noise_sigma;
  j["beta_mode"] = c.beta_mode == BetaMode::Homogeneous ? "homogeneous" : "heterogeneous";
  j["beta"] = c.beta;
  j["beta_mean"] = c.beta_mean;
  j["beta_sd"] = c.beta_sd;
  j["beta_floor"] = c.beta_floor;
  j["eval_fs"] = c.eval_fs;
  j["eval_interval"] = c.eval_interval;
  j["eval_groups"] = c.eval_groups;
  j["eval_rounds"] = c.eval_rounds;
  j["eval_noisy_observations"] = c.eval_noisy_observations;
  j["seed"] = c.master_seed;
  j["hidden_sizes"] = c.dqn.hidden_sizes;
  j["learning_rate"] = c.dqn.learning_rate;
  j["rms_smoothing"] = c.dqn.rms_smoothing;
  j["rms_epsilon"] = c.dqn.rms_epsilon;
  j["gamma"] = c.dqn.gamma;
  j["epsilon"] = c.dqn.epsilon;
  j["buffer_capacity"] = c.dqn.buffer_capacity;
  j["batch_size"] = c.dqn.batch_size;
  j["target_sync_interval"] = c.dqn.target_sync_interval;
  j["conventions"] = {
      {"first_round_opponent_actions", "defect (0)"},
      {"observation_noise", "fresh draw per agent per round, clamped at 0"},
      {"terminal_round", "last round of each episode, no bootstrap"},
      {"updates_apply_to", "active agents only"},
      {"heterogeneous_beta_clamp", c.beta_floor},
      {"weight_init", "uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))"},
      {"evaluation", "greedy policy, random groups, training noise condition unless disabled"},
  };
  return j;
}

nlohmann::ordered_json to_json(const TrainPlan& plan) {
  nlohmann::ordered_json j;
  j["base"] = to_json(plan.base);
  j["betas"] = plan.betas;
  j["sigmas"] = plan.sigmas;
  j["beta_sds"] = plan.beta_sds;
  nlohmann::ordered_json conds = nlohmann::ordered_json::array();
  for (const auto& c : plan.conditions()) conds.push_back({{"label", c.label}, {"config", to_json(c.config)}});
  j["conditions"] = conds;
  return j;
}

}  // namespace moepgg
