#ifndef MOEPGG_COMMANDS_HPP
#define MOEPGG_COMMANDS_HPP

#include "moepgg/config.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace moepgg {

/// Bad user input; the CLI maps it to exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  double resolution = 0.01;
};

// Each command writes its artifacts plus config_echo.json into out_dir.

void cmd_payoff_table(const CommonOptions& opts, std::size_t n, double coins, const std::vector<double>& fs);

void cmd_thresholds(const CommonOptions& opts, const std::vector<double>& fs, const std::vector<double>& betas,
                    double coins);

void cmd_nash_sweep(const CommonOptions& opts, const std::vector<double>& fs, const std::vector<double>& betas,
                    double coins);

void cmd_poa(const CommonOptions& opts, const std::vector<double>& fs, const std::vector<double>& betas,
             double coins);

void cmd_pcs(const CommonOptions& opts, const std::vector<double>& fs, double coins);

void cmd_landscape(const CommonOptions& opts, double f, double beta, double coins, std::size_t player);

/// Runs every condition of the plan; one sub-directory per condition label.
void cmd_train(const CommonOptions& opts, const TrainPlan& plan);

struct EvaluateOptions {
  std::string checkpoint;
  std::vector<double> fs{0.5, 1.5, 3.5, 6.5};
  double sigma = 0.0;
  std::size_t groups = 25;
  std::size_t rounds = 10;
  double coins = 4.0;
};

void cmd_evaluate(const CommonOptions& opts, const EvaluateOptions& eval);

}  // namespace moepgg

#endif  // MOEPGG_COMMANDS_HPP
