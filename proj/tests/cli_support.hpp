#ifndef MOEPGG_TESTS_CLI_SUPPORT_HPP
#define MOEPGG_TESTS_CLI_SUPPORT_HPP

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace moepgg::testing {

/// Runs the CLI binary with `args`; returns its exit status. Output is discarded.
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MOEPGG_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  auto p = std::filesystem::temp_directory_path() / ("moepgg_" + tag + "_" + std::to_string(rd()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace moepgg::testing

#endif  // MOEPGG_TESTS_CLI_SUPPORT_HPP
