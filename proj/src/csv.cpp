#include "steindom/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace steindom {

Eigen::MatrixXd read_rows_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      std::size_t a = start, b = end;
      while (a < b && line[a] == ' ') ++a;
      while (b > a && line[b - 1] == ' ') --b;
      double v = 0.0;
      const auto res = std::from_chars(line.data() + a, line.data() + b, v);
      if (a == b || res.ec != std::errc{} || res.ptr != line.data() + b) {
        throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad number");
      }
      row.push_back(v);
      if (end == line.size()) {
        break;
      }
      start = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

void write_rows_csv(std::ostream& os, const Eigen::MatrixXd& rows) {
  char buf[64];
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (j > 0) {
        os << ',';
      }
      const auto res = std::to_chars(buf, buf + sizeof buf, rows(i, j));
      os.write(buf, res.ptr - buf);
    }
    os << '\n';
  }
}

}  // namespace steindom
