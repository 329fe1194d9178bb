#include "favar/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace favar {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::IoError, path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2)
    throw Error(ErrorCode::IoError, path + ": need a date column plus data");
  for (size_t j = 1; j < header.size(); ++j)
    table.names.push_back(trim(header[j]));

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::IoError,
                  path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    table.dates.push_back(trim(fields[0]));
    std::vector<double> row(fields.size() - 1);
    for (size_t j = 1; j < fields.size(); ++j) {
      const std::string f = trim(fields[j]);
      try {
        size_t used = 0;
        row[j - 1] = std::stod(f, &used);
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, path + ":" + std::to_string(lineno) +
                                            ": bad number '" + f + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<int>(rows.size()),
                      static_cast<int>(table.names.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return table;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_table(const std::string& path, const Table& table,
                 const std::string& date_header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << date_header;
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  for (int i = 0; i < table.rows(); ++i) {
    out << table.dates[i];
    for (int j = 0; j < table.cols(); ++j)
      out << ',' << format_double(table.values(i, j));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

namespace {

std::vector<Month> parse_dates(const Table& t, const std::string& path) {
  std::vector<Month> dates;
  dates.reserve(t.dates.size());
  for (const auto& d : t.dates) dates.push_back(parse_month(d));
  for (size_t i = 1; i < dates.size(); ++i)
    if (dates[i].ym != dates[i - 1].ym + 1)
      throw Error(ErrorCode::IoError,
                  path + ": dates must be consecutive months");
  return dates;
}

}  // namespace

DataSet load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const Table x_out = read_table((fs::path(dir) / "x_out.csv").string());
  const Table x_inf = read_table((fs::path(dir) / "x_inf.csv").string());
  const Table ztab = read_table((fs::path(dir) / "z.csv").string());
  const Table mtab = read_table((fs::path(dir) / "m.csv").string());

  DataSet data;
  data.dates = parse_dates(x_out, dir + "/x_out.csv");
  const auto check = [&](const Table& t, const char* name) {
    if (t.rows() != static_cast<int>(data.dates.size()) ||
        t.dates != x_out.dates)
      throw Error(ErrorCode::DimensionMismatch,
                  std::string(name) + ": calendar differs from x_out.csv");
  };
  check(x_inf, "x_inf.csv");
  check(ztab, "z.csv");
  check(mtab, "m.csv");
  if (x_out.names != x_inf.names)
    throw Error(ErrorCode::DimensionMismatch,
                "x_out/x_inf country columns differ");

  data.x_out = x_out.values;
  data.x_inf = x_inf.values;
  data.m = mtab.values;
  data.country_names = x_out.names;
  data.z_names = ztab.names;

  // standardize z for estimation, keep the originals' moments
  const int T = ztab.rows();
  const int nz = ztab.cols();
  data.z.resize(T, nz);
  data.z_mean.resize(nz);
  data.z_stdev.resize(nz);
  for (int j = 0; j < nz; ++j) {
    const double mean = ztab.values.col(j).mean();
    const double ss = (ztab.values.col(j).array() - mean).square().sum();
    if (T < 2 || ss <= 0.0)
      throw Error(ErrorCode::ZeroVariance,
                  "z series '" + ztab.names[j] + "' has zero variance");
    const double sd = std::sqrt(ss / (T - 1));
    data.z_mean(j) = mean;
    data.z_stdev(j) = sd;
    data.z.col(j) = (ztab.values.col(j).array() - mean) / sd;
  }
  return data;
}

void save_dataset(const std::string& dir, const DataSet& data,
                  bool z_already_standardized) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Table t;
  t.dates.reserve(data.dates.size());
  for (Month m : data.dates) t.dates.push_back(to_string(m));

  t.names = data.country_names;
  t.values = data.x_out;
  write_table((fs::path(dir) / "x_out.csv").string(), t);
  t.values = data.x_inf;
  write_table((fs::path(dir) / "x_inf.csv").string(), t);

  t.names = data.z_names;
  if (z_already_standardized) {
    t.values = data.z;
  } else {
    // de-standardize so the files hold the original scale
    t.values.resize(data.z.rows(), data.z.cols());
    for (int j = 0; j < data.z.cols(); ++j)
      t.values.col(j) = data.z.col(j) * data.z_stdev(j) +
                        VectorXd::Constant(data.z.rows(), data.z_mean(j));
  }
  write_table((fs::path(dir) / "z.csv").string(), t);

  t.names.clear();
  for (int j = 0; j < data.m.cols(); ++j)
    t.names.push_back(data.m.cols() == 1 ? "m" : "m" + std::to_string(j + 1));
  t.values = data.m;
  write_table((fs::path(dir) / "m.csv").string(), t);
}

}  // namespace favar
