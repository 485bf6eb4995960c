#pragma once

// Exact geometry of planar convex polygons and analytic N-balls.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pfreq {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// { x : <normal, x> < offset }, normal of unit length pointing outward.
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;

  double slack(Vec2 p) const { return offset - dot(normal, p); }
};

/// Open bounded convex polygon, stored both as a counterclockwise vertex chain
/// and as the intersection of its edge halfplanes (edge i joins vertex i to
/// vertex i+1). Immutable once built.
class ConvexPolygon {
 public:
  /// Accepts either orientation. Near-duplicate vertices (closer than
  /// 1e-12 * diameter) are merged and collinear vertices dropped; a reflex or
  /// self-overlapping chain throws InvalidInput.
  static ConvexPolygon from_vertices(std::vector<Vec2> vertices);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const HalfPlane> halfplanes() const { return halfplanes_; }
  std::size_t size() const { return vertices_.size(); }

  double edge_length(std::size_t i) const;
  double diameter() const;
  /// Smallest slack over all edges; positive iff p is strictly inside.
  double min_slack(Vec2 p) const;

  ConvexPolygon translated(Vec2 shift) const;
  ConvexPolygon scaled(double factor) const;

 private:
  ConvexPolygon() = default;
  void build_halfplanes();

  std::vector<Vec2> vertices_;
  std::vector<HalfPlane> halfplanes_;
};

struct BallShape {
  int dim = 2;
  double radius = 1.0;
  std::vector<double> center;  // empty means the origin

  BallShape() = default;
  BallShape(int dim_, double radius_, std::vector<double> center_ = {});
};

/// Volume of the unit ball in R^N, pi^{N/2} / Gamma(N/2 + 1).
double unit_ball_volume(int dim);

double measure(const ConvexPolygon& poly);
double measure(const BallShape& ball);
double perimeter(const ConvexPolygon& poly);
double perimeter(const BallShape& ball);

struct InradiusResult {
  double inradius = 0.0;
  Vec2 center;
};

/// Largest inscribed disk. Exhaustive over edge triples as active-constraint
/// candidates; when the optimal centers form a segment the midpoint of that
/// segment is returned.
InradiusResult inradius(const ConvexPolygon& poly);

/// d(x) = min_i (b_i - <a_i, x>). Throws OutOfDomain when x lies outside the
/// closed polygon by more than 1e-12 * diameter.
double distance_to_boundary(const ConvexPolygon& poly, Vec2 x);

struct GaugeValue {
  double value = 0.0;
  Vec2 gradient;
  std::size_t facet = 0;
  bool tie = false;  // x sits on a boundary between two facet cones
};

/// j(x) = max_i <a_i, x> / b_i. Requires the origin strictly inside.
GaugeValue minkowski_gauge(const ConvexPolygon& poly, Vec2 x);

/// Translate so that a Chebyshev center lands on the origin.
ConvexPolygon center_at_chebyshev(const ConvexPolygon& poly);

struct BoundaryIntegrals {
  double plus = 0.0;   // sum_i b_i l_i  =  integral of <x, nu> over the boundary
  double minus = 0.0;  // sum_i l_i / b_i  =  integral of 1 / <x, nu>
};

BoundaryIntegrals boundary_integrals(const ConvexPolygon& poly);

struct NormalProductCheck {
  double min_offset = 0.0;
  double inradius = 0.0;
  bool bound_holds = false;           // min_offset >= inradius - 1e-12
  std::vector<std::size_t> tangent_edges;
  bool circumscribes_inball = false;  // every edge touches the inball
};

/// For a polygon centered at a Chebyshev center, <x, nu> = b_i on edge i
/// must dominate the inradius.
NormalProductCheck normal_product_check(const ConvexPolygon& poly);

struct InnerParallelBody {
  double offset = 0.0;
  std::optional<ConvexPolygon> polygon;  // empty once offset >= inradius

  bool empty() const { return !polygon.has_value(); }
};

/// { x in poly : d(x) > t }.
InnerParallelBody inner_parallel(const ConvexPolygon& poly, double t);

/// Regular m-gon with the given circumradius, centered at the origin, first
/// vertex on the positive x axis.
ConvexPolygon regular_polygon(int sides, double circumradius, Vec2 center = {});

/// (-L/2, L/2) x (0, 1).
ConvexPolygon slab(double length);

ConvexPolygon axis_box(Vec2 lo, Vec2 hi);

/// Convex hull (monotone chain). Throws InvalidInput with fewer than three
/// hull vertices.
ConvexPolygon convex_hull(std::vector<Vec2> points);

}  // namespace pfreq
