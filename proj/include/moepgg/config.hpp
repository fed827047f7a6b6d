#ifndef MOEPGG_CONFIG_HPP
#define MOEPGG_CONFIG_HPP

#include "moepgg/population.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace moepgg {

/// One training condition of a plan: a fully resolved config plus a
/// filesystem-friendly label such as "beta1_sigma2".
struct Condition {
  std::string label;
  ExperimentConfig config;
};

/// A run configuration file. `beta`, `sigma` and `beta_sd` may be lists; the
/// plan expands to their cross product.
struct TrainPlan {
  ExperimentConfig base;
  std::vector<double> betas{1.0};
  std::vector<double> sigmas{0.0};
  std::vector<double> beta_sds{0.0};

  std::vector<Condition> conditions() const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys are errors.
TrainPlan parse_plan(const std::string& text);
TrainPlan load_plan(const std::string& path);

/// Comma-separated numbers, or an inclusive range "start:stop:step".
std::vector<double> parse_number_list(const std::string& text);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
nlohmann::ordered_json to_json(const TrainPlan& plan);

}  // namespace moepgg

#endif  // MOEPGG_CONFIG_HPP
