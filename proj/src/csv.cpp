#include "moepgg/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace moepgg {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("CsvWriter: wrong column count for " + path_);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed: " + path_);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace moepgg
