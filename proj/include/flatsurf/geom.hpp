#ifndef FLATSURF_GEOM_HPP
#define FLATSURF_GEOM_HPP

#include <array>
#include <cmath>

namespace flatsurf {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double norm() const { return std::sqrt(x * x + y * y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// 2x2 real matrix, row major.
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;  // [[a b],[c d]]
    Vec2 apply(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    double det() const { return a * d - b * c; }
    static Mat2 diag(double p, double q) { return {p, 0, 0, q}; }
    static Mat2 rotation(double theta) {
        double co = std::cos(theta), si = std::sin(theta);
        return {co, -si, si, co};
    }
    static Mat2 g_t(double t) { return diag(std::exp(-t), std::exp(t)); }
};

// Chart transition z -> sign*z + c with sign in {+1,-1}.  These are exactly
// the transition maps of a half-translation structure, and they are closed
// under composition and inversion.
struct Transition {
    double sign = 1.0;
    Vec2 c;

    Vec2 apply(const Vec2& z) const { return {sign * z.x + c.x, sign * z.y + c.y}; }
    // this(other(z))
    Transition compose(const Transition& other) const {
        return {sign * other.sign, {sign * other.c.x + c.x, sign * other.c.y + c.y}};
    }
    Transition inverse() const { return {sign, {-sign * c.x, -sign * c.y}}; }
    static Transition identity() { return {}; }
};

// Interior angle at corner b of a CCW polygon ... -> a -> b -> c -> ...,
// measured CCW from (c-b) to (a-b); lies in (0, 2pi).
inline double interior_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
    Vec2 u = c - b;  // outgoing
    Vec2 w = a - b;  // incoming, reversed
    double ang = std::atan2(cross(u, w), dot(u, w));
    if (ang <= 0) ang += 2.0 * std::acos(-1.0);
    return ang;
}

// Signed area of a polygon given as a CCW vertex loop.
template <class It>
double signed_area(It first, It last) {
    double s = 0.0;
    It prev = last;
    --prev;
    for (It it = first; it != last; prev = it, ++it)
        s += cross(*prev, *it);
    return 0.5 * s;
}

// In-circle predicate: > 0 when d lies strictly inside the circumcircle of
// the CCW triangle (a,b,c).  Raw determinant, caller normalizes.
inline double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    double ax = a.x - d.x, ay = a.y - d.y;
    double bx = b.x - d.x, by = b.y - d.y;
    double cx = c.x - d.x, cy = c.y - d.y;
    double a2 = ax * ax + ay * ay;
    double b2 = bx * bx + by * by;
    double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

// Distance from point p to segment [a,b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    if (len2 == 0.0) return dist(p, a);
    double t = dot(p - a, ab) / len2;
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    return dist(p, a + t * ab);
}

// Proper/improper intersection of segments [a,b] and [c,d].  Returns true and
// fills s,t (params on each segment) when the lines cross within both ranges.
inline bool segment_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                              double& s, double& t, double tol = 1e-12) {
    Vec2 r = b - a, q = d - c;
    double denom = cross(r, q);
    if (std::abs(denom) < tol * (r.norm() * q.norm() + 1e-300)) return false;
    Vec2 ca = c - a;
    s = cross(ca, q) / denom;
    t = cross(ca, r) / denom;
    return s >= -tol && s <= 1 + tol && t >= -tol && t <= 1 + tol;
}

inline bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c,
                              double tol = 1e-9) {
    double d1 = cross(b - a, p - a);
    double d2 = cross(c - b, p - b);
    double d3 = cross(a - c, p - c);
    return d1 >= -tol && d2 >= -tol && d3 >= -tol;
}

}  // namespace flatsurf

#endif
