#include "pfreq/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "pfreq/error.hpp"

namespace pfreq {

namespace {

constexpr double kRelTol = 1e-12;

double signed_area(std::span<const Vec2> v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    twice += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * twice;
}

double max_pairwise_distance(std::span<const Vec2> v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      d = std::max(d, norm(v[i] - v[j]));
    }
  }
  return d;
}

// Lexicographic order on points with a tolerance on each coordinate.
bool lex_less(Vec2 a, Vec2 b, double tol) {
  if (a.x < b.x - tol) return true;
  if (a.x > b.x + tol) return false;
  return a.y < b.y - tol;
}

}  // namespace

ConvexPolygon ConvexPolygon::from_vertices(std::vector<Vec2> v) {
  if (v.size() < 3) {
    throw InvalidInput("polygon needs at least 3 vertices, got " + std::to_string(v.size()));
  }
  for (const Vec2& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("non-finite polygon vertex");
  }
  const double diam = max_pairwise_distance(v);
  if (!(diam > 0.0)) throw InvalidInput("polygon vertices coincide");
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());

  // Merge near-duplicates along the cyclic chain.
  std::vector<Vec2> chain;
  chain.reserve(v.size());
  for (const Vec2& p : v) {
    if (chain.empty() || norm(p - chain.back()) > kRelTol * diam) chain.push_back(p);
  }
  while (chain.size() > 1 && norm(chain.front() - chain.back()) <= kRelTol * diam) chain.pop_back();

  // Drop collinear vertices, reject reflex ones.
  bool changed = true;
  while (changed && chain.size() >= 3) {
    changed = false;
    const std::size_t n = chain.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = chain[(i + n - 1) % n];
      const Vec2 next = chain[(i + 1) % n];
      const Vec2 e1 = chain[i] - prev;
      const Vec2 e2 = next - chain[i];
      const double turn = cross(e1, e2) / (norm(e1) * norm(e2));
      if (std::abs(turn) <= kRelTol) {
        chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
      if (turn < 0.0) throw InvalidInput("reflex vertex at index " + std::to_string(i));
    }
  }
  if (chain.size() < 3) throw InvalidInput("polygon degenerates to fewer than 3 vertices");

  // A chain with only left turns is convex iff it winds exactly once.
  double turning = 0.0;
  const std::size_t n = chain.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = chain[i] - chain[(i + n - 1) % n];
    const Vec2 e2 = chain[(i + 1) % n] - chain[i];
    turning += std::atan2(cross(e1, e2), dot(e1, e2));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-9) {
    throw InvalidInput("vertex chain winds more than once");
  }

  ConvexPolygon poly;
  poly.vertices_ = std::move(chain);
  poly.build_halfplanes();

  const double tol = kRelTol * diam;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const double s = poly.halfplanes_[i].slack(poly.vertices_[k]);
      const bool incident = (i == k) || ((i + 1) % poly.size() == k);
      if (incident ? std::abs(s) > tol : s < -tol) {
        throw InvalidInput("halfplane representation inconsistent with vertices");
      }
    }
  }
  return poly;
}

void ConvexPolygon::build_halfplanes() {
  const std::size_t n = vertices_.size();
  halfplanes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = vertices_[(i + 1) % n] - vertices_[i];
    const double len = norm(d);
    const Vec2 normal{d.y / len, -d.x / len};
    // Average over both endpoints so the offset is symmetric in rounding.
    const double b = 0.5 * (dot(normal, vertices_[i]) + dot(normal, vertices_[(i + 1) % n]));
    halfplanes_[i] = HalfPlane{normal, b};
  }
}

double ConvexPolygon::edge_length(std::size_t i) const {
  return norm(vertices_[(i + 1) % size()] - vertices_[i]);
}

double ConvexPolygon::diameter() const { return max_pairwise_distance(vertices_); }

double ConvexPolygon::min_slack(Vec2 p) const {
  double s = std::numeric_limits<double>::infinity();
  for (const HalfPlane& hp : halfplanes_) s = std::min(s, hp.slack(p));
  return s;
}

ConvexPolygon ConvexPolygon::translated(Vec2 shift) const {
  ConvexPolygon out;
  out.vertices_.reserve(size());
  for (const Vec2& p : vertices_) out.vertices_.push_back(p + shift);
  out.build_halfplanes();
  return out;
}

ConvexPolygon ConvexPolygon::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidInput("scale factor must be positive");
  ConvexPolygon out;
  out.vertices_.reserve(size());
  for (const Vec2& p : vertices_) out.vertices_.push_back(factor * p);
  out.build_halfplanes();
  return out;
}

BallShape::BallShape(int dim_, double radius_, std::vector<double> center_)
    : dim(dim_), radius(radius_), center(std::move(center_)) {
  if (dim < 2) throw InvalidInput("ball dimension must be at least 2");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("ball radius must be positive");
  if (!center.empty() && center.size() != static_cast<std::size_t>(dim)) {
    throw InvalidInput("ball center has wrong dimension");
  }
}

double unit_ball_volume(int dim) {
  if (dim < 1) throw InvalidInput("dimension must be positive");
  const double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double measure(const ConvexPolygon& poly) { return signed_area(poly.vertices()); }

double measure(const BallShape& ball) {
  return unit_ball_volume(ball.dim) * std::pow(ball.radius, ball.dim);
}

double perimeter(const ConvexPolygon& poly) {
  double p = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) p += poly.edge_length(i);
  return p;
}

double perimeter(const BallShape& ball) {
  return ball.dim * unit_ball_volume(ball.dim) * std::pow(ball.radius, ball.dim - 1);
}

InradiusResult inradius(const ConvexPolygon& poly) {
  const auto hp = poly.halfplanes();
  const std::size_t m = hp.size();
  const double tol = kRelTol * poly.diameter();

  double best = -std::numeric_limits<double>::infinity();
  Vec2 lo{}, hi{};

  auto feasible = [&](Vec2 c, double r) {
    for (const HalfPlane& h : hp) {
      if (dot(h.normal, c) + r > h.offset + tol) return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        // Solve <a, c> + r = b on the three edges by Cramer's rule.
        const Vec2 a0 = hp[i].normal, a1 = hp[j].normal, a2 = hp[k].normal;
        const double b0 = hp[i].offset, b1 = hp[j].offset, b2 = hp[k].offset;
        const double det = a0.x * (a1.y - a2.y) - a0.y * (a1.x - a2.x) + (a1.x * a2.y - a2.x * a1.y);
        if (std::abs(det) < 1e-14) continue;
        const double dx = b0 * (a1.y - a2.y) - a0.y * (b1 - b2) + (b1 * a2.y - b2 * a1.y);
        const double dy = a0.x * (b1 - b2) - b0 * (a1.x - a2.x) + (a1.x * b2 - a2.x * b1);
        const double dr = a0.x * (a1.y * b2 - a2.y * b1) - a0.y * (a1.x * b2 - a2.x * b1) +
                          b0 * (a1.x * a2.y - a2.x * a1.y);
        const Vec2 c{dx / det, dy / det};
        const double r = dr / det;
        if (r < best - tol) continue;
        if (r <= best + tol) {
          if (!lex_less(c, lo, tol) && !lex_less(hi, c, tol)) continue;
          if (!feasible(c, r)) continue;
          if (lex_less(c, lo, tol)) lo = c;
          if (lex_less(hi, c, tol)) hi = c;
          continue;
        }
        if (!feasible(c, r)) continue;
        best = r;
        lo = hi = c;
      }
    }
  }
  if (!(best > 0.0)) throw InvalidInput("polygon has no inscribed disk");
  return InradiusResult{best, 0.5 * (lo + hi)};
}

double distance_to_boundary(const ConvexPolygon& poly, Vec2 x) {
  const double d = poly.min_slack(x);
  if (d < -kRelTol * poly.diameter()) {
    throw OutOfDomain("point lies outside the polygon");
  }
  return std::max(d, 0.0);
}

GaugeValue minkowski_gauge(const ConvexPolygon& poly, Vec2 x) {
  const auto hp = poly.halfplanes();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(hp.size());
  for (std::size_t i = 0; i < hp.size(); ++i) {
    if (!(hp[i].offset > 0.0)) {
      throw PreconditionViolation("minkowski_gauge: origin must lie strictly inside the polygon");
    }
    vals[i] = dot(hp[i].normal, x) / hp[i].offset;
    best = std::max(best, vals[i]);
  }
  const double tol = kRelTol * std::max(1.0, std::abs(best));
  GaugeValue g;
  g.value = best;
  bool found = false;
  for (std::size_t i = 0; i < hp.size(); ++i) {
    if (vals[i] >= best - tol) {
      if (!found) {
        g.facet = i;
        g.gradient = (1.0 / hp[i].offset) * hp[i].normal;
        found = true;
      } else {
        g.tie = true;
      }
    }
  }
  return g;
}

ConvexPolygon center_at_chebyshev(const ConvexPolygon& poly) {
  const InradiusResult ir = inradius(poly);
  return poly.translated(Vec2{} - ir.center);
}

BoundaryIntegrals boundary_integrals(const ConvexPolygon& poly) {
  BoundaryIntegrals out;
  const auto hp = poly.halfplanes();
  for (std::size_t i = 0; i < hp.size(); ++i) {
    if (!(hp[i].offset > 0.0)) {
      throw PreconditionViolation("boundary_integrals: origin must lie strictly inside the polygon");
    }
    const double len = poly.edge_length(i);
    out.plus += hp[i].offset * len;
    out.minus += len / hp[i].offset;
  }
  return out;
}

NormalProductCheck normal_product_check(const ConvexPolygon& poly) {
  const InradiusResult ir = inradius(poly);
  const double at_origin = poly.min_slack(Vec2{});
  if (std::abs(at_origin - ir.inradius) > 1e-9 * std::max(1.0, ir.inradius)) {
    throw PreconditionViolation("normal_product_check: origin is not a Chebyshev center");
  }
  NormalProductCheck out;
  out.inradius = ir.inradius;
  out.min_offset = std::numeric_limits<double>::infinity();
  const auto hp = poly.halfplanes();
  for (std::size_t i = 0; i < hp.size(); ++i) {
    out.min_offset = std::min(out.min_offset, hp[i].offset);
    if (std::abs(hp[i].offset - ir.inradius) <= 1e-10 * ir.inradius) out.tangent_edges.push_back(i);
  }
  out.bound_holds = out.min_offset >= ir.inradius - 1e-12;
  out.circumscribes_inball = out.tangent_edges.size() == hp.size();
  return out;
}

InnerParallelBody inner_parallel(const ConvexPolygon& poly, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("inner_parallel: offset must be nonnegative");
  InnerParallelBody body;
  body.offset = t;
  if (t == 0.0) {
    body.polygon = poly;
    return body;
  }
  const double r = inradius(poly).inradius;
  if (t >= r * (1.0 - 1e-12)) return body;

  std::vector<Vec2> cur(poly.vertices().begin(), poly.vertices().end());
  for (const HalfPlane& h : poly.halfplanes()) {
    const double b = h.offset - t;
    std::vector<Vec2> next;
    next.reserve(cur.size() + 1);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Vec2 p = cur[i];
      const Vec2 q = cur[(i + 1) % cur.size()];
      const double sp = b - dot(h.normal, p);
      const double sq = b - dot(h.normal, q);
      if (sp >= 0.0) next.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) next.push_back(p + (sp / (sp - sq)) * (q - p));
    }
    cur = std::move(next);
    if (cur.size() < 3) return body;
  }
  try {
    body.polygon = ConvexPolygon::from_vertices(std::move(cur));
  } catch (const InvalidInput&) {
    body.polygon.reset();
  }
  return body;
}

ConvexPolygon regular_polygon(int sides, double circumradius, Vec2 center) {
  if (sides < 3) throw InvalidInput("regular polygon needs at least 3 sides");
  if (!(circumradius > 0.0)) throw InvalidInput("circumradius must be positive");
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>(sides));
  for (int k = 0; k < sides; ++k) {
    const double a = 2.0 * std::numbers::pi * k / sides;
    v.push_back(center + circumradius * Vec2{std::cos(a), std::sin(a)});
  }
  return ConvexPolygon::from_vertices(std::move(v));
}

ConvexPolygon axis_box(Vec2 lo, Vec2 hi) {
  if (!(hi.x > lo.x) || !(hi.y > lo.y)) throw InvalidInput("box corners out of order");
  return ConvexPolygon::from_vertices({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

ConvexPolygon slab(double length) {
  if (!(length > 0.0)) throw InvalidInput("slab length must be positive");
  return axis_box({-0.5 * length, 0.0}, {0.5 * length, 1.0});
}

ConvexPolygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw InvalidInput("convex hull of fewer than 3 distinct points");
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw InvalidInput("convex hull has fewer than 3 vertices");
  return ConvexPolygon::from_vertices(std::move(hull));
}

}  // namespace pfreq
