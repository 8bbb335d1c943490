#ifndef FLATSURF_DECOMPOSITION_HPP
#define FLATSURF_DECOMPOSITION_HPP

#include <vector>

#include "flatsurf/triangulation.hpp"

namespace flatsurf {

struct ThickComponent {
    int id = 0;
    double area = 0;
    double diameter = 0;  // graph diameter plus the h-correction
};

struct Decomposition {
    double epsilon = 0;
    std::vector<ThickComponent> components;
    int C = 0;
    double delta = 0;  // +inf sentinel when C == 1
    double removed_area = 0;
    double h_effective = 0;  // longest graph edge actually used
};

// Graph approximation of the thick part {dist(., Sigma) >= eps}.  The surface
// is sampled on a per-triangle barycentric lattice refined to resolution h
// near the eps level set; node clearances are exact distances computed by
// local development.  Components are connected subgraphs of thick nodes, with
// graph diameters; delta is the maximin clearance over paths between distinct
// components (widest-path search).
Decomposition thick_thin_decomposition(const FlatSurface& s, double eps, double h,
                                       bool marked_as_singular = true,
                                       long long node_budget = 60000);
Decomposition thick_thin_decomposition(const TriSurface& ts, double eps, double h,
                                       bool marked_as_singular = true,
                                       long long node_budget = 60000);

}  // namespace flatsurf

#endif
