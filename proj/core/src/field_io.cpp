#include "penalab/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace penalab {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string field_csv_string(const ScalarField& f) {
  const Grid& g = f.grid();
  std::ostringstream out;
  out << (g.dim() == 2 ? "x,y,value\n" : "x,value\n");
  for (int iy = 0; iy < g.n(1); ++iy)
    for (int ix = 0; ix < g.n(0); ++ix) {
      const int k = g.interior_index(ix, iy);
      const double v = k >= 0 ? f[k] : 0.0;
      out << format_number(g.x_of(ix));
      if (g.dim() == 2) out << ',' << format_number(g.y_of(iy));
      out << ',' << format_number(v) << '\n';
    }
  return out.str();
}

void write_field_csv(const ScalarField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
  out << field_csv_string(f);
}

ScalarField read_field_csv(GridPtr grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_field_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_field_csv: empty file " + path);
  const int value_col = grid->dim() == 2 ? 2 : 1;
  ScalarField f(grid);
  int node = 0;
  const int total = grid->num_nodes();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (node >= total) throw std::runtime_error("read_field_csv: too many rows for the grid");
    std::stringstream ss(line);
    std::string cell;
    double value = 0.0;
    for (int c = 0; c <= value_col; ++c) {
      if (!std::getline(ss, cell, ','))
        throw std::runtime_error("read_field_csv: malformed row '" + line + "'");
      if (c == value_col) value = std::stod(cell);
    }
    const int k = grid->interior_index(node);
    if (k >= 0) f[k] = value;
    ++node;
  }
  if (node != total) throw std::runtime_error("read_field_csv: row count does not match the grid");
  return f;
}

} // namespace penalab
