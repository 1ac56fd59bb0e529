#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace angval {

// Shared matrix text format: first line `rows cols`, then `rows` lines of
// whitespace-separated decimals (locale-independent, '.' decimal point).
// Floats are written with 17 significant digits so every value round-trips.

Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix_file(const std::string& path);

// Reads matrices until EOF (concatenated blocks in one file).
std::vector<Eigen::MatrixXd> read_matrix_list(std::istream& in);
std::vector<Eigen::MatrixXd> read_matrix_list_file(const std::string& path);

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);

std::string format_double(double x);  // 17 significant digits

}  // namespace angval
