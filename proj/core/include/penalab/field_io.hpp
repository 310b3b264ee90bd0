#ifndef PENALAB_FIELD_IO_HPP
#define PENALAB_FIELD_IO_HPP

#include <string>

#include "penalab/grid.hpp"

namespace penalab {

// Formats a double with 17 significant digits (round-trip safe).
std::string format_number(double x);

// CSV dump with header x[,y],value over all lattice nodes in row-major
// order; nodes outside the unknown set carry the value 0.
void write_field_csv(const ScalarField& f, const std::string& path);
std::string field_csv_string(const ScalarField& f);

// Reads a field written by write_field_csv back onto a matching grid.
ScalarField read_field_csv(GridPtr grid, const std::string& path);

} // namespace penalab

#endif
