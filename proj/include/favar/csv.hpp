#pragma once

#include <string>
#include <vector>

#include "favar/types.hpp"

namespace favar {

// Rectangular CSV with a leading date column, as used by every artifact file:
//   date,<name>,<name>,...
//   2003-01,0.42,...
struct Table {
  std::vector<std::string> dates;    // verbatim first column
  std::vector<std::string> names;    // header row, date column excluded
  MatrixXd values;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

Table read_table(const std::string& path);
void write_table(const std::string& path, const Table& table,
                 const std::string& date_header = "date");

// max-precision float formatting; guarantees lossless round-trips and
// byte-identical reruns
std::string format_double(double v);

// DataSet <-> the four block files (x_out.csv, x_inf.csv, z.csv, m.csv).
// Loading standardizes z and retains the originals' moments; the x blocks
// must carry EA19 as their first data column.
DataSet load_dataset(const std::string& dir);
void save_dataset(const std::string& dir, const DataSet& data,
                  bool z_already_standardized = false);

}  // namespace favar
