#pragma once

#include <iosfwd>
#include <string>

#include "mfl/measures.hpp"

namespace mfl {

// One value per line after a header row naming the type and parameters:
//   GridDensity,left=<l>,right=<r>,cells=<n>     followed by n cell masses
//   EmpiricalMeasure,n=<N>                       followed by N sorted atoms

void write_csv(std::ostream& os, const GridDensity& rho);
void write_csv(std::ostream& os, const EmpiricalMeasure& mu);

/// Reads either type, dispatching on the header.
Measure read_measure_csv(std::istream& is);

}  // namespace mfl
