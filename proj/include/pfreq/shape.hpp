#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfreq/geometry.hpp"

namespace pfreq {

using ShapePart = std::variant<ConvexPolygon, BallShape>;

/// Pairwise disjoint union. Disjointness is checked on construction.
struct UnionShape {
  std::vector<ShapePart> parts;

  explicit UnionShape(std::vector<ShapePart> parts_);
};

using Shape = std::variant<ConvexPolygon, BallShape, UnionShape>;

/// A shape with a stable identifier, as it appears in families and reports.
struct NamedShape {
  std::string id;
  Shape shape = BallShape{};
  double slab_length = 0.0;  // > 0 when the shape is the slab (-L/2, L/2) x (0, 1)
};

int dimension(const Shape& s);
double measure(const Shape& s);
/// Union: largest inradius over the parts.
double inradius_of(const Shape& s);
/// Any finite characteristic length, used to pick default grid spacings.
double diameter(const Shape& s);
bool is_convex(const Shape& s);

/// Polygonal approximation of a disk with an explicit vertex count.
ConvexPolygon disk_polygon(int sides, double radius);

/// Parses the shape schema:
///   {"type":"polygon","vertices":[[x,y],...]}
///   {"type":"ball","dim":N,"radius":R[,"center":[...]]}
///   {"type":"rect","L":L}                     -- (-L/2, L/2) x (0, 1)
///   {"type":"regular","sides":m[,"radius":r]} -- circumradius r
///   {"type":"union","parts":[...]}
NamedShape shape_from_json(const nlohmann::json& j, const std::string& default_id = "shape");
nlohmann::json shape_to_json(const NamedShape& s);

NamedShape load_shape_file(const std::string& path);

}  // namespace pfreq
