#ifndef FLATSURF_COVER_HPP
#define FLATSURF_COVER_HPP

#include <map>
#include <string>
#include <vector>

#include "flatsurf/geodesics.hpp"
#include "flatsurf/surface.hpp"

namespace flatsurf {

// A point on a surface addressed by polygon chart.
struct SurfacePoint {
    std::string polygon;
    Vec2 p;
};

// Degree-2 cover p : total -> base with its deck transformation.  For the
// orientation double cover, sheet 1 polygons are stored rotated by pi
// (coordinates negated) so every induced gluing is literally of Translation
// kind; the deck involution is the sheet swap composed with negation.
// Explicit lattice covers carry translation deck maps instead.
struct CoverData {
    struct SheetEntry {
        std::string base_id;
        int sheet = 0;
        Transition to_base;  // chart map total polygon -> base polygon
    };
    struct DeckEntry {
        std::string image_id;
        Transition map;  // chart map onto the image polygon
    };

    FlatSurface base;
    FlatSurface total;
    std::map<std::string, SheetEntry> sheet_of;  // by total polygon id
    std::map<std::string, DeckEntry> deck;       // the nontrivial deck element
    std::vector<ConePoint> branch_points;        // base cone classes with odd k
    bool total_connected = false;

    bool branched() const { return !branch_points.empty(); }
    std::string lift_id(const std::string& base_id, int sheet) const {
        return base_id + "@" + std::to_string(sheet);
    }

    SurfacePoint involution(const SurfacePoint& pt) const;
    SurfacePoint project(const SurfacePoint& pt) const;
    // 1 entry at a branch point, 2 otherwise (swapped by the involution)
    std::vector<SurfacePoint> lift(const SurfacePoint& pt) const;

    CurvePath apply_involution(const CurvePath& path) const;
    CurvePath project_path(const CurvePath& path) const;
};

CoverData build_double_cover(const FlatSurface& base);

// Explicit degree-2 lattice cover Z(2,0)+Z(0,1) of the unit square torus,
// presented as CoverData (deck map: shift by (1,0)).
CoverData lattice_double_cover_of_torus();

// Prop-5.1-style projection: the first self-return subcurve of the projected
// curve.  Requires an unbranched cover and a closed simple input.
CurvePath project_curve(const CoverData& cover, const CurvePath& gamma);

struct SystoleComparison {
    double sys_total = 0;
    double sys_base = 0;
    bool ok = false;
};

// Systoles upstairs vs downstairs with identical search parameters;
// ok when sys_total >= sys_base - 1e-6.
SystoleComparison verify_systole_comparison(const CoverData& cover, int depth = 2,
                                            bool marked_as_singular = true);
// Same check for an explicitly given finite cover (e.g. a lattice cover).
SystoleComparison verify_systole_comparison(const FlatSurface& total, const FlatSurface& base,
                                            int depth = 2, bool marked_as_singular = true);

// Validation helper shared with the CLI: consecutive curve segments must be
// glued (exit maps to entry); throws NotClosed otherwise.
void require_closed_chain(const FlatSurface& s, const CurvePath& path);

}  // namespace flatsurf

#endif
