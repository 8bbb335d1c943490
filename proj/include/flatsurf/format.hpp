#ifndef FLATSURF_FORMAT_HPP
#define FLATSURF_FORMAT_HPP

#include <string>
#include <vector>

#include "flatsurf/surface.hpp"

namespace flatsurf {

// "flatsurf v1" line format.  Numbers may be decimals or rationals p/q
// (converted to nearest binary64 on parse).  serialize_surface emits the
// canonical form: polygons sorted by id, vertices as given, gluings sorted
// lexicographically with each pair ordered, marked classes by their smallest
// representative.  Canonical text round-trips byte-identically.
FlatSurface parse_surface(const std::string& text);
std::string serialize_surface(const FlatSurface& s);

// Shortest round-trip decimal representation of a double.
std::string format_double(double x);
// Fixed 12-significant-digit decimal used by the CSV reports.
std::string format_sig12(double x);

// Named generators.
//   torus --slope S       unit square torus rotated so the slope-S direction
//                         is horizontal; the vertex class is marked
//   pillowcase            two unit squares side by side, flip-glued tops and
//                         bottoms; four angle-pi cone points, area 2
//   lshape A B            L of arm lengths A,B (unit arm width), one 6pi point
//   regular-2ngon N       regular 2N-gon, opposite sides identified
//   torus-cover K         degree-K lattice cover Z(K,0)+Z(0,1) of the unit
//                         torus with marked lifts
FlatSurface gen_torus(double slope);
FlatSurface gen_pillowcase();
FlatSurface gen_lshape(double a, double b);
FlatSurface gen_regular_2ngon(int n);
FlatSurface gen_torus_cover(int k);

// Dispatch by name with positional numeric params; throws BadParams.
FlatSurface generate(const std::string& name, const std::vector<double>& params);

}  // namespace flatsurf

#endif
