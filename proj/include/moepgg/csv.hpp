#ifndef MOEPGG_CSV_HPP
#define MOEPGG_CSV_HPP

#include <Eigen/Dense>

#include <fstream>
#include <string>
#include <vector>

namespace moepgg {

/// Nine significant digits, "%.9g".
std::string format_number(double v);

/// Header-first CSV with LF line endings. Fields are written verbatim.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

/// Dense matrix, one CSV row per matrix row, no header.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace moepgg

#endif  // MOEPGG_CSV_HPP
