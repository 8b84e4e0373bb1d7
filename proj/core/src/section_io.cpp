#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nhfields/errors.hpp"
#include "nhfields/jet.hpp"

namespace nhfields {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() && s.find_first_not_of(" \t\r", pos) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("section csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace

SectionSamples read_section_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open section csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("section csv is empty: " + path);
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "t" || header[1] != "u") {
    throw InvalidArgument("section csv header must be t,u,y1..ym");
  }
  const int m = static_cast<int>(header.size()) - 2;

  std::vector<double> times;
  std::vector<std::vector<double>> us;
  std::vector<std::vector<std::vector<double>>> ys;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != m + 2) {
      throw InvalidArgument("section csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(m + 2) + " columns");
    }
    const double t = parse_double(cells[0], line_no);
    if (times.empty() || t != times.back()) {
      times.push_back(t);
      us.emplace_back();
      ys.emplace_back();
    }
    us.back().push_back(parse_double(cells[1], line_no));
    std::vector<double> row;
    for (int a = 0; a < m; ++a) row.push_back(parse_double(cells[2 + a], line_no));
    ys.back().push_back(std::move(row));
  }
  if (times.empty()) throw InvalidArgument("section csv has no samples");
  const int nu = static_cast<int>(us.front().size());
  SectionSamples s;
  s.layout = JetLayout{1, m};
  s.nu = nu;
  s.times = times;
  s.jump = Eigen::MatrixXd::Zero(m, 1);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    if (static_cast<int>(us[ti].size()) != nu) throw InvalidArgument("section csv: ragged time slices");
    Eigen::MatrixXd Y(nu, m);
    for (int j = 0; j < nu; ++j) {
      if (std::abs(us[ti][j] - static_cast<double>(j) / nu) > 1e-9) {
        throw InvalidArgument("section csv: spatial grid is not uniform on [0,1)");
      }
      for (int a = 0; a < m; ++a) Y(j, a) = ys[ti][j][a];
    }
    s.values.push_back(std::move(Y));
  }
  return s;
}

void write_section_csv(const std::string& path, const SectionSamples& s) {
  if (s.layout.n != 1) throw InvalidArgument("section csv supports n = 1 only");
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write section csv: " + path);
  out << "t,u";
  for (int a = 0; a < s.layout.m; ++a) out << ",y" << (a + 1);
  out << "\n";
  char buf[64];
  for (std::size_t ti = 0; ti < s.times.size(); ++ti) {
    for (int j = 0; j < s.nu; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", s.times[ti], static_cast<double>(j) / s.nu);
      out << buf;
      for (int a = 0; a < s.layout.m; ++a) {
        std::snprintf(buf, sizeof buf, ",%.17g", s.values[ti](j, a));
        out << buf;
      }
      out << "\n";
    }
  }
}

}  // namespace nhfields
