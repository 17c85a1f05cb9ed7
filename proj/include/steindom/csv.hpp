#pragma once

// Plain numeric CSV for observation rows: one observation per line, comma
// separated. Blank lines and lines starting with '#' are skipped.

#include <Eigen/Dense>

#include <iosfwd>

namespace steindom {

Eigen::MatrixXd read_rows_csv(std::istream& in);
/// Shortest round-trip formatting for each entry.
void write_rows_csv(std::ostream& os, const Eigen::MatrixXd& rows);

}  // namespace steindom
