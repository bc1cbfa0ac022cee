#pragma once

#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodgefsi/harness.hpp"

namespace hodgefsi {

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::string emit_orthogonality_csv(
    const std::vector<OrthogonalityRow>& rows) {
  std::string out = "theta,energy_before,energy_after,inner_product\n";
  for (const auto& r : rows)
    out += detail::fmt(r.theta) + "," + detail::fmt(r.energy_before) + "," +
           detail::fmt(r.energy_after) + "," + detail::fmt(r.inner_product) +
           "\n";
  return out;
}

inline std::vector<OrthogonalityRow> parse_orthogonality_csv(
    const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<OrthogonalityRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_line(line);
    if (f.size() != 4) throw std::runtime_error("orthogonality csv: bad row");
    rows.push_back(
        {std::stod(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3])});
  }
  return rows;
}

// One error column per call; order cell empty on the first row.
inline std::string emit_convergence_csv(const std::string& error_name,
                                        const std::vector<ConvergenceRow>& rows) {
  std::string out = "resolution,h," + error_name + ",order\n";
  for (const auto& r : rows) {
    out += std::to_string(r.resolution) + "," + detail::fmt(r.h) + "," +
           detail::fmt(r.error) + ",";
    if (r.has_order) out += detail::fmt(r.order);
    out += "\n";
  }
  return out;
}

inline std::vector<ConvergenceRow> parse_convergence_csv(
    const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<ConvergenceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_line(line);
    if (f.size() != 4) throw std::runtime_error("convergence csv: bad row");
    ConvergenceRow r;
    r.resolution = std::stoi(f[0]);
    r.h = std::stod(f[1]);
    r.error = std::stod(f[2]);
    r.has_order = !f[3].empty();
    if (r.has_order) r.order = std::stod(f[3]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hodgefsi
