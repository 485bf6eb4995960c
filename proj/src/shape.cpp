#include "pfreq/shape.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "pfreq/error.hpp"

namespace pfreq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Vec2 ball_center2(const BallShape& b) {
  return b.center.empty() ? Vec2{} : Vec2{b.center[0], b.center[1]};
}

double point_polygon_distance(const ConvexPolygon& poly, Vec2 p) {
  if (poly.min_slack(p) > 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % v.size()];
    const Vec2 ab = b - a;
    const double s = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    best = std::min(best, norm(p - (a + s * ab)));
  }
  return best;
}

// Separating-axis test on open polygons; touching boundaries count as disjoint.
bool separated(const ConvexPolygon& a, const ConvexPolygon& b) {
  const double tol = 1e-12 * std::max(a.diameter(), b.diameter());
  auto test = [tol](const ConvexPolygon& p, const ConvexPolygon& q) {
    for (const HalfPlane& h : p.halfplanes()) {
      double lo = std::numeric_limits<double>::infinity();
      for (const Vec2& v : q.vertices()) lo = std::min(lo, dot(h.normal, v));
      if (lo >= h.offset - tol) return true;
    }
    return false;
  };
  return test(a, b) || test(b, a);
}

bool disjoint(const ShapePart& x, const ShapePart& y) {
  return std::visit(
      overloaded{
          [](const ConvexPolygon& a, const ConvexPolygon& b) { return separated(a, b); },
          [](const BallShape& a, const BallShape& b) {
            if (a.dim != b.dim) throw InvalidInput("union mixes dimensions");
            double d2 = 0.0;
            for (int k = 0; k < a.dim; ++k) {
              const double ca = a.center.empty() ? 0.0 : a.center[k];
              const double cb = b.center.empty() ? 0.0 : b.center[k];
              d2 += (ca - cb) * (ca - cb);
            }
            return std::sqrt(d2) >= (a.radius + b.radius) * (1.0 - 1e-12);
          },
          [](const ConvexPolygon& a, const BallShape& b) {
            if (b.dim != 2) throw InvalidInput("union mixes dimensions");
            return point_polygon_distance(a, ball_center2(b)) >= b.radius * (1.0 - 1e-12);
          },
          [](const BallShape& b, const ConvexPolygon& a) {
            if (b.dim != 2) throw InvalidInput("union mixes dimensions");
            return point_polygon_distance(a, ball_center2(b)) >= b.radius * (1.0 - 1e-12);
          },
      },
      x, y);
}

double part_measure(const ShapePart& p) {
  return std::visit([](const auto& s) { return measure(s); }, p);
}

double part_inradius(const ShapePart& p) {
  return std::visit(overloaded{[](const ConvexPolygon& s) { return inradius(s).inradius; },
                               [](const BallShape& s) { return s.radius; }},
                    p);
}

int part_dim(const ShapePart& p) {
  return std::visit(overloaded{[](const ConvexPolygon&) { return 2; },
                               [](const BallShape& s) { return s.dim; }},
                    p);
}

std::vector<double> read_point(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("point must be a JSON array");
  std::vector<double> out;
  for (const auto& c : j) out.push_back(c.get<double>());
  return out;
}

void collect_parts(const nlohmann::json& j, std::vector<ShapePart>& out) {
  const NamedShape s = shape_from_json(j);
  std::visit(overloaded{[&](const ConvexPolygon& p) { out.emplace_back(p); },
                        [&](const BallShape& b) { out.emplace_back(b); },
                        [&](const UnionShape& u) {
                          for (const auto& p : u.parts) out.push_back(p);
                        }},
             s.shape);
}

nlohmann::json part_to_json(const ShapePart& p) {
  return std::visit(overloaded{[](const ConvexPolygon& poly) {
                                 nlohmann::json v = nlohmann::json::array();
                                 for (const Vec2& q : poly.vertices()) v.push_back({q.x, q.y});
                                 return nlohmann::json{{"type", "polygon"}, {"vertices", v}};
                               },
                               [](const BallShape& b) {
                                 nlohmann::json j{{"type", "ball"}, {"dim", b.dim}, {"radius", b.radius}};
                                 if (!b.center.empty()) j["center"] = b.center;
                                 return j;
                               }},
                    p);
}

}  // namespace

UnionShape::UnionShape(std::vector<ShapePart> parts_) : parts(std::move(parts_)) {
  if (parts.empty()) throw InvalidInput("union needs at least one part");
  const int dim = part_dim(parts.front());
  for (const auto& p : parts) {
    if (part_dim(p) != dim) throw InvalidInput("union mixes dimensions");
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (!disjoint(parts[i], parts[j])) {
        throw InvalidInput("union parts " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
}

int dimension(const Shape& s) {
  return std::visit(overloaded{[](const ConvexPolygon&) { return 2; },
                               [](const BallShape& b) { return b.dim; },
                               [](const UnionShape& u) { return part_dim(u.parts.front()); }},
                    s);
}

double measure(const Shape& s) {
  return std::visit(overloaded{[](const ConvexPolygon& p) { return measure(p); },
                               [](const BallShape& b) { return measure(b); },
                               [](const UnionShape& u) {
                                 double m = 0.0;
                                 for (const auto& p : u.parts) m += part_measure(p);
                                 return m;
                               }},
                    s);
}

double inradius_of(const Shape& s) {
  return std::visit(overloaded{[](const ConvexPolygon& p) { return inradius(p).inradius; },
                               [](const BallShape& b) { return b.radius; },
                               [](const UnionShape& u) {
                                 double r = 0.0;
                                 for (const auto& p : u.parts) r = std::max(r, part_inradius(p));
                                 return r;
                               }},
                    s);
}

double diameter(const Shape& s) {
  return std::visit(overloaded{[](const ConvexPolygon& p) { return p.diameter(); },
                               [](const BallShape& b) { return 2.0 * b.radius; },
                               [](const UnionShape& u) {
                                 double d = 0.0;
                                 for (const auto& p : u.parts) {
                                   d = std::max(d, std::visit(overloaded{[](const ConvexPolygon& q) { return q.diameter(); },
                                                                         [](const BallShape& b) { return 2.0 * b.radius; }},
                                                              p));
                                 }
                                 return d;
                               }},
                    s);
}

bool is_convex(const Shape& s) {
  if (const auto* u = std::get_if<UnionShape>(&s)) return u->parts.size() == 1;
  return true;
}

ConvexPolygon disk_polygon(int sides, double radius) { return regular_polygon(sides, radius); }

NamedShape shape_from_json(const nlohmann::json& j, const std::string& default_id) {
  if (!j.is_object() || !j.contains("type")) throw InvalidInput("shape JSON needs a \"type\" field");
  NamedShape out;
  out.id = j.value("id", default_id);
  const std::string type = j.at("type").get<std::string>();
  if (type == "polygon") {
    std::vector<Vec2> v;
    for (const auto& p : j.at("vertices")) {
      const auto c = read_point(p);
      if (c.size() != 2) throw InvalidInput("polygon vertex must have two coordinates");
      v.push_back({c[0], c[1]});
    }
    out.shape = ConvexPolygon::from_vertices(std::move(v));
  } else if (type == "ball") {
    std::vector<double> center;
    if (j.contains("center")) center = read_point(j.at("center"));
    out.shape = BallShape(j.value("dim", 2), j.at("radius").get<double>(), std::move(center));
  } else if (type == "rect") {
    const double L = j.at("L").get<double>();
    out.shape = slab(L);
    out.slab_length = L;
  } else if (type == "regular") {
    out.shape = regular_polygon(j.at("sides").get<int>(), j.value("radius", 1.0));
  } else if (type == "union") {
    std::vector<ShapePart> parts;
    for (const auto& p : j.at("parts")) collect_parts(p, parts);
    out.shape = UnionShape(std::move(parts));
  } else {
    throw InvalidInput("unknown shape type \"" + type + "\"");
  }
  return out;
}

nlohmann::json shape_to_json(const NamedShape& s) {
  nlohmann::json j;
  if (s.slab_length > 0.0) {
    j = {{"type", "rect"}, {"L", s.slab_length}};
  } else {
    j = std::visit(overloaded{[](const ConvexPolygon& p) { return part_to_json(ShapePart{p}); },
                              [](const BallShape& b) { return part_to_json(ShapePart{b}); },
                              [](const UnionShape& u) {
                                nlohmann::json parts = nlohmann::json::array();
                                for (const auto& p : u.parts) parts.push_back(part_to_json(p));
                                return nlohmann::json{{"type", "union"}, {"parts", parts}};
                              }},
                   s.shape);
  }
  j["id"] = s.id;
  return j;
}

NamedShape load_shape_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open shape file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("shape file " + path + ": " + e.what());
  }
  return shape_from_json(j, path);
}

}  // namespace pfreq
