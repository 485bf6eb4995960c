#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pfreq/error.hpp"
#include "pfreq/geometry.hpp"
#include "pfreq/shape.hpp"

using namespace pfreq;
using doctest::Approx;

namespace {

ConvexPolygon unit_square() { return axis_box({0.0, 0.0}, {1.0, 1.0}); }

ConvexPolygon equilateral(double side) {
  return ConvexPolygon::from_vertices({{0.0, 0.0}, {side, 0.0}, {side / 2.0, side * std::sqrt(3.0) / 2.0}});
}

}  // namespace

TEST_CASE("measure and perimeter") {
  CHECK(measure(unit_square()) == Approx(1.0));
  CHECK(measure(BallShape(2, 1.0)) == Approx(std::numbers::pi));
  CHECK(measure(ConvexPolygon::from_vertices({{0, 0}, {2, 0}, {0, 2}})) == Approx(2.0));
  CHECK(perimeter(unit_square()) == Approx(4.0));
  CHECK(perimeter(BallShape(2, 1.0)) == Approx(2.0 * std::numbers::pi));
  CHECK(perimeter(axis_box({0, 0}, {10, 1})) == Approx(22.0));
  CHECK(measure(BallShape(3, 2.0)) == Approx(4.0 / 3.0 * std::numbers::pi * 8.0));
}

TEST_CASE("construction normalizes and rejects") {
  // Clockwise input, a duplicate and a collinear vertex.
  const auto p = ConvexPolygon::from_vertices({{0, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 0.5}, {1, 0}});
  CHECK(p.size() == 4);
  CHECK(measure(p) == Approx(1.0));
  CHECK_THROWS_AS(ConvexPolygon::from_vertices({{0, 0}, {1, 0}}), InvalidInput);
  CHECK_THROWS_AS(ConvexPolygon::from_vertices({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), InvalidInput);
  CHECK_THROWS_AS(BallShape(1, 1.0), InvalidInput);
  CHECK_THROWS_AS(BallShape(2, -1.0), InvalidInput);
}

TEST_CASE("halfplanes agree with vertices") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const ConvexPolygon p = oracle::random_polygon(rng);
    const auto v = p.vertices();
    const auto hp = p.halfplanes();
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t k = 0; k < hp.size(); ++k) {
        const double s = hp[k].slack(v[i]);
        const bool incident = k == i || (k + 1) % v.size() == i;
        if (incident) CHECK(std::abs(s) <= 1e-12 * p.diameter());
        else CHECK(s > 0.0);
      }
    }
  }
}

TEST_CASE("inradius") {
  const InradiusResult sq = inradius(unit_square());
  CHECK(sq.inradius == Approx(0.5));
  CHECK(sq.center.x == Approx(0.5));
  CHECK(sq.center.y == Approx(0.5));
  CHECK(inradius(slab(7.0)).inradius == Approx(0.5));
  // The slab's optimal centers form a segment; its midpoint is returned.
  CHECK(inradius(slab(7.0)).center.x == Approx(0.0).epsilon(1e-12));

  const ConvexPolygon tri = equilateral(1.0);
  const double brute = oracle::grid_max_distance(tri, 2000);
  CHECK(inradius(tri).inradius == Approx(brute).epsilon(1e-3));
  CHECK(inradius(tri).inradius == Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));

  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const ConvexPolygon p = oracle::random_polygon(rng);
    const InradiusResult r = inradius(p);
    CHECK(p.min_slack(r.center) >= r.inradius - 1e-12);
    CHECK(r.inradius >= oracle::grid_max_distance(p, 300) - 1e-12);
  }
}

TEST_CASE("distance to boundary") {
  CHECK(distance_to_boundary(unit_square(), {0.5, 0.5}) == Approx(0.5));
  CHECK(distance_to_boundary(unit_square(), {0.5, 0.0}) == Approx(0.0));
  const double sampled = oracle::boundary_sample_distance(unit_square(), {0.25, 0.5}, 40000);
  CHECK(distance_to_boundary(unit_square(), {0.25, 0.5}) == Approx(sampled).epsilon(1e-6));
  CHECK_THROWS_AS(distance_to_boundary(unit_square(), {1.5, 0.5}), OutOfDomain);
}

TEST_CASE("minkowski gauge") {
  const ConvexPolygon sq = axis_box({-1, -1}, {1, 1});
  CHECK(minkowski_gauge(sq, {0.5, -0.25}).value == Approx(0.5));
  CHECK(minkowski_gauge(sq, {0.6, 0.6}).value == Approx(2.0 * minkowski_gauge(sq, {0.3, 0.3}).value));
  const GaugeValue corner = minkowski_gauge(sq, {0.5, 0.5});
  CHECK(corner.tie);
  CHECK_THROWS_AS(minkowski_gauge(unit_square(), {0.5, 0.5}), PreconditionViolation);

  const ConvexPolygon hex = regular_polygon(6, 1.0);
  for (Vec2 v : hex.vertices()) CHECK(minkowski_gauge(hex, v).value == Approx(1.0));
  // |grad j| b_i = 1 inside each facet cone.
  const auto hp = hex.halfplanes();
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const Vec2 mid = 0.5 * (hex.vertices()[i] + hex.vertices()[(i + 1) % hex.size()]);
    const GaugeValue g = minkowski_gauge(hex, 0.7 * mid);
    CHECK(norm(g.gradient) * hp[g.facet].offset == Approx(1.0).epsilon(1e-14));
    CHECK(g.facet == i);
  }
}

TEST_CASE("center at chebyshev") {
  const ConvexPolygon c = center_at_chebyshev(unit_square());
  CHECK(measure(c) == Approx(1.0));
  for (Vec2 v : c.vertices()) {
    CHECK(std::abs(v.x) == Approx(0.5));
    CHECK(std::abs(v.y) == Approx(0.5));
  }
  const ConvexPolygon hex = regular_polygon(6, 1.0);
  const ConvexPolygon hc = center_at_chebyshev(hex);
  for (std::size_t i = 0; i < hex.size(); ++i) CHECK(norm(hc.vertices()[i] - hex.vertices()[i]) < 1e-12);

  // Incenter of the right triangle with legs 3: r = (a + b - c) / 2.
  const ConvexPolygon tri = ConvexPolygon::from_vertices({{0, 0}, {3, 0}, {0, 3}});
  const double r = (6.0 - 3.0 * std::sqrt(2.0)) / 2.0;
  const ConvexPolygon tc = center_at_chebyshev(tri);
  CHECK(tc.vertices()[0].x == Approx(-r));
  CHECK(tc.vertices()[0].y == Approx(-r));
  for (const HalfPlane& h : tc.halfplanes()) CHECK(h.offset >= r - 1e-12);
}

TEST_CASE("boundary integrals") {
  const BoundaryIntegrals sq = boundary_integrals(axis_box({-1, -1}, {1, 1}));
  CHECK(sq.plus == Approx(8.0));
  CHECK(sq.minus == Approx(8.0));
  const double radius = 1.7;
  const BoundaryIntegrals disk = boundary_integrals(disk_polygon(256, radius));
  CHECK(disk.plus == Approx(2.0 * std::numbers::pi * radius * radius).epsilon(1e-3));
  CHECK(disk.minus == Approx(2.0 * std::numbers::pi).epsilon(1e-3));
  CHECK_THROWS_AS(boundary_integrals(unit_square()), PreconditionViolation);
}

TEST_CASE("normal product check") {
  const NormalProductCheck sq = normal_product_check(axis_box({-0.5, -0.5}, {0.5, 0.5}));
  CHECK(sq.min_offset == Approx(0.5));
  CHECK(sq.inradius == Approx(0.5));
  CHECK(sq.circumscribes_inball);
  CHECK(sq.tangent_edges.size() == 4);

  const NormalProductCheck rect = normal_product_check(axis_box({-1, -0.5}, {1, 0.5}));
  CHECK(rect.min_offset == Approx(0.5));
  CHECK(rect.bound_holds);
  CHECK_FALSE(rect.circumscribes_inball);
  CHECK(rect.tangent_edges.size() == 2);

  const NormalProductCheck hex = normal_product_check(regular_polygon(6, 1.0));
  CHECK(hex.min_offset == Approx(std::sqrt(3.0) / 2.0));
  CHECK(hex.inradius == Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("inner parallel bodies") {
  const InnerParallelBody sq = inner_parallel(unit_square(), 0.25);
  REQUIRE_FALSE(sq.empty());
  CHECK(perimeter(*sq.polygon) == Approx(2.0));
  CHECK(measure(*sq.polygon) == Approx(0.25));

  const ConvexPolygon hex = regular_polygon(6, 1.0);
  const InnerParallelBody same = inner_parallel(hex, 0.0);
  REQUIRE_FALSE(same.empty());
  CHECK(measure(*same.polygon) == Approx(measure(hex)));

  const ConvexPolygon tri = equilateral(1.0);
  const InradiusResult in = inradius(tri);
  const InnerParallelBody half = inner_parallel(tri, in.inradius / 2.0);
  REQUIRE_FALSE(half.empty());
  // Homothety about the incenter with ratio 1/2.
  for (Vec2 v : tri.vertices()) {
    const Vec2 expect = in.center + 0.5 * (v - in.center);
    bool found = false;
    for (Vec2 w : half.polygon->vertices()) found = found || norm(w - expect) < 1e-12;
    CHECK(found);
  }
  CHECK(inner_parallel(tri, in.inradius).empty());
  CHECK(inner_parallel(tri, 2.0).empty());

  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const ConvexPolygon p = oracle::random_polygon(rng);
    const double r = inradius(p).inradius;
    double last = perimeter(p);
    for (int k = 1; k < 20; ++k) {
      const double off = r * k / 20.0;
      const InnerParallelBody b = inner_parallel(p, off);
      REQUIRE_FALSE(b.empty());
      const double per = perimeter(*b.polygon);
      CHECK(per <= last + 1e-12);
      last = per;
      CHECK(inradius(*b.polygon).inradius == Approx(r - off).epsilon(1e-9));
      for (const HalfPlane& h : b.polygon->halfplanes()) {
        bool parent = false;
        for (const HalfPlane& g : p.halfplanes()) {
          parent = parent || (norm(h.normal - g.normal) < 1e-12 && std::abs(h.offset - (g.offset - off)) < 1e-9);
        }
        CHECK(parent);
      }
    }
  }
}

TEST_CASE("union ingestion and shape json") {
  CHECK_THROWS_AS(UnionShape({BallShape(2, 1.0, {0, 0}), BallShape(2, 1.0, {1, 0})}), InvalidInput);
  CHECK_THROWS_AS(UnionShape({unit_square(), axis_box({0.5, 0.5}, {2, 2})}), InvalidInput);
  const UnionShape ok({unit_square(), BallShape(2, 0.5, {3, 0.5})});
  CHECK(measure(Shape{ok}) == Approx(1.0 + std::numbers::pi / 4.0));
  CHECK(inradius_of(Shape{ok}) == Approx(0.5));
  CHECK_FALSE(is_convex(Shape{ok}));

  const auto j = nlohmann::json::parse(R"({"type":"union","parts":[{"type":"rect","L":4},
      {"type":"ball","dim":2,"radius":0.25,"center":[0,3]}]})");
  const NamedShape s = shape_from_json(j, "u");
  CHECK(measure(s.shape) == Approx(4.0 + std::numbers::pi / 16.0));
  const NamedShape back = shape_from_json(shape_to_json(s), "u");
  CHECK(measure(back.shape) == Approx(measure(s.shape)));
  CHECK(shape_from_json(nlohmann::json::parse(R"({"type":"rect","L":16})")).slab_length == 16.0);
  CHECK_THROWS_AS(shape_from_json(nlohmann::json::parse(R"({"type":"blob"})")), InvalidInput);
}

TEST_CASE("geometry properties on random polygons") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 500; ++t) {
    const ConvexPolygon p = center_at_chebyshev(oracle::random_polygon(rng));
    const double area = measure(p);
    CHECK(boundary_integrals(p).plus == Approx(2.0 * area).epsilon(1e-12));
    const NormalProductCheck npc = normal_product_check(p);
    CHECK(npc.min_offset >= npc.inradius - 1e-12);
    const Vec2 x{u(rng), u(rng)};
    const double s = 0.01 + std::abs(u(rng));
    CHECK(minkowski_gauge(p, s * x).value == Approx(s * minkowski_gauge(p, x).value).epsilon(1e-12));
    // Level set: a boundary point scaled by s has gauge s.
    const auto v = p.vertices();
    const std::size_t i = rng() % v.size();
    const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Vec2 b = v[i] + w * (v[(i + 1) % v.size()] - v[i]);
    CHECK(std::abs(minkowski_gauge(p, s * b).value - s) <= 1e-10 * std::max(1.0, s));
  }
}
