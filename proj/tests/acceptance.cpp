// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pfreq/bounds.hpp"
#include "pfreq/cli.hpp"
#include "pfreq/onedim.hpp"
#include "pfreq/solver.hpp"

using namespace pfreq;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && s > budget_s) {
    o.pass = false;
    o.detail += "; over the time budget";
  }
  failures += !o.pass;
  std::printf("%s %2d  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// The default family run shared by criteria 4, 5, 7, 8 and 9.
const SuiteReport& default_suite() {
  static const SuiteReport rep = [] {
    RunConfig c;
    c.trials = 0;  // the property suites run separately at full size
    return run_suite(c);
  }();
  return rep;
}

std::vector<const BoundReport*> reports(const std::string& id, double q = -1.0) {
  std::vector<const BoundReport*> out;
  for (const BoundReport& b : default_suite().bounds) {
    if (b.id == id && (q < 0.0 || b.q == q)) out.push_back(&b);
  }
  return out;
}

const AlphaScanResult& scan_at(double q) {
  for (const AlphaScanResult& s : default_suite().scans) {
    if (s.q == q) return s;
  }
  throw std::runtime_error("no scan at the requested q");
}

}  // namespace

int main() {
  std::printf("pfreq acceptance run\n");

  criterion(1, "pi_{2,1} = 2 sqrt 3 and pi_{2,2} = pi to 1e-6", 5.0, [] {
    const double e1 = rel(onedim::pi_2q(1.0).value, 2.0 * std::sqrt(3.0));
    const double e2 = rel(onedim::pi_2q(2.0).value, kPi);
    return Outcome{e1 < 1e-6 && e2 < 1e-6, fmt("rel errors %.2e, %.2e", e1, e2)};
  });

  criterion(2, "T(B_1) = pi/8 in the plane, radial and 256-gon", 30.0, [] {
    const double radial = torsion(BallShape(2, 1.0));
    const double grid = torsion(disk_polygon(256, 1.0));
    const double e1 = rel(radial, kPi / 8.0), e2 = rel(grid, kPi / 8.0);
    return Outcome{e1 < 2e-3 && e2 < 2e-3, fmt("radial %.6f (%.1e), grid %.6f (%.1e)", radial, e1, grid, e2)};
  });

  criterion(3, "unit square q = 2: 2 pi^2 at h = 1/128, order >= 1.8", 60.0, [] {
    const ConvexPolygon sq = axis_box({0, 0}, {1, 1});
    const double exact = 2.0 * kPi * kPi;
    const double l64 = solve_polygon(sq, 2.0, 1.0 / 64).result.lambda;
    const double l128 = solve_polygon(sq, 2.0, 1.0 / 128).result.lambda;
    const double order = std::log2(std::abs(l64 - exact) / std::abs(l128 - exact));
    const double e = rel(l128, exact);
    return Outcome{e < 5e-3 && order >= 1.8, fmt("lambda %.6f, rel err %.2e, order %.3f", l128, e, order)};
  });

  criterion(4, "HPWEAK strict on the default family at q = 1, 1.5, 2; slab limits", 600.0, [] {
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteReport& rep = default_suite();
    bool ok = rep.errors.empty();
    double min_rel = std::numeric_limits<double>::infinity();
    int count = 0;
    for (double q : {1.0, 1.5, 2.0}) {
      for (const BoundReport* b : reports("HPWEAK", q)) {
        ++count;
        if (!b->applicable) continue;  // the two-disk union is not convex
        ok = ok && b->verdict == Verdict::kHolds && b->slack > 0.0;
        min_rel = std::min(min_rel, b->relative_slack);
      }
    }
    std::string gaps;
    for (const SlabTable& t : rep.slabs) {
      if (t.q > 2.0) continue;
      ok = ok && t.passes;
      gaps += fmt(" q=%g:%.3f%s", t.q, t.final_gap, t.monotone ? "" : "(non-monotone)");
    }
    ok = ok && count == 3 * static_cast<int>(rep.shape_ids.size());
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Outcome{ok, fmt("%d reports, min relative slack %.4f, slab gaps at L=16%s, sweep %.0f s", count, min_rel,
                           gaps.c_str(), s)};
  });

  criterion(5, "HPWEAKUP family-wide at q = 1, 1.5, 2, 3; m-gon slack to the ball", 0.0, [] {
    bool ok = true;
    int count = 0;
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
      for (const BoundReport* b : reports("HPWEAKUP", q)) {
        ++count;
        if (b->applicable) ok = ok && b->verdict != Verdict::kViolated;
      }
    }
    std::string tail;
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
      double prev = std::numeric_limits<double>::infinity();
      bool mono = true;
      for (int m : {8, 16, 32, 64, 128}) {
        const NamedShape p{"regular-" + std::to_string(m), regular_polygon(m, 1.0), 0.0};
        const BoundReport r = check_upper(facts_of(p), q, lambda_2q_refined(p.shape, q));
        ok = ok && r.verdict != Verdict::kViolated;
        mono = mono && r.relative_slack < prev;
        prev = r.relative_slack;
      }
      ok = ok && mono && prev < 0.01;
      tail += fmt(" q=%g:%.2e%s", q, prev, mono ? "" : "(non-monotone)");
    }
    return Outcome{ok, fmt("%d family reports; slack at m=128%s", count, tail.c_str())};
  });

  criterion(6, "MPS: disk attains 1/8, slab L = 16 reaches 90% of 1/3 from below", 0.0, [] {
    const NamedShape disk{"disk", BallShape(2, 1.0), 0.0};
    const auto d = check_torsion_double(facts_of(disk), lambda_2q_refined(disk.shape, 1.0));
    const double disk_ratio = (1.0 / lambda_2q_refined(disk.shape, 1.0).lambda) / kPi;
    const NamedShape sl{"slab-16", slab(16.0), 16.0};
    const FrequencyResult t = lambda_2q_refined(sl.shape, 1.0);
    const auto s = check_torsion_double(facts_of(sl), t);
    const double ratio = (1.0 / t.lambda) / (16.0 * 0.25);
    const bool ok = std::abs(disk_ratio - 0.125) / 0.125 < 5e-3 && d[0].verdict != Verdict::kViolated &&
                    ratio >= 0.9 / 3.0 && ratio < 1.0 / 3.0 && s[1].verdict == Verdict::kHolds;
    return Outcome{ok, fmt("disk T/(|B|R^2) = %.6f, slab T/(|S|R^2) = %.5f = %.2f%% of 1/3", disk_ratio, ratio,
                           300.0 * ratio)};
  });

  criterion(7, "certificate at q = 1: dominates, matches the ball, chain holds", 0.0, [] {
    const onedim::BallExtremal f = onedim::ball_extremal(1.0, 2);
    bool ok = true;
    int polys = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const BoundReport* b : reports("CERTIFICATE", 1.0)) {
      ++polys;
      ok = ok && b->verdict == Verdict::kHolds;
      min_margin = std::min(min_margin, b->relative_slack);
    }
    for (const BoundReport* b : reports("CERTIFICATE_CHAIN", 1.0)) ok = ok && b->slack >= -b->tolerance;
    for (int m : {8, 16, 32, 64, 128}) {
      const ConvexPolygon p = regular_polygon(m, 1.0);
      const Certificate c = certificate_upper(p, 1.0, f.profile, lambda_2q(p, 1.0));
      ok = ok && c.domination.verdict == Verdict::kHolds && c.chain.slack >= -1e-9;
      ++polys;
    }
    const ConvexPolygon disk = disk_polygon(256, 1.0);
    const Certificate c = certificate_upper(disk, 1.0, f.profile, lambda_2q(disk, 1.0));
    const double e = rel(c.value, 8.0 / kPi);
    ok = ok && e < 5e-3 && c.chain.slack >= -1e-9 && c.domination.verdict != Verdict::kViolated;
    return Outcome{ok, fmt("%d polygons, min relative margin %.4f; 256-gon certificate %.6f vs 8/pi (%.1e)", polys,
                           min_margin, c.value, e)};
  });

  criterion(8, "BFNT: lambda T / |Omega| >= pi^2/32 family-wide", 0.0, [] {
    bool ok = true;
    double min_slack = std::numeric_limits<double>::infinity();
    std::string who;
    const auto rs = reports("BFNT_IMPROVED");
    for (const BoundReport* b : rs) {
      if (!b->applicable) continue;
      ok = ok && b->verdict == Verdict::kHolds;
      if (b->slack < min_slack) {
        min_slack = b->slack;
        who = b->shape_id;
      }
    }
    return Outcome{ok && !rs.empty(), fmt("%zu reports, min slack %.5f on %s", rs.size(), min_slack, who.c_str())};
  });

  criterion(9, "slab trends at q = 1 for alpha = 0, 1, 2", 0.0, [] {
    const AlphaScanResult& s = scan_at(1.0);
    std::vector<const ScanEntry*> slabs;
    for (const ScanEntry& e : s.entries) {
      if (e.slab_length > 0.0) slabs.push_back(&e);
    }
    std::sort(slabs.begin(), slabs.end(), [](auto* a, auto* b) { return a->slab_length < b->slab_length; });
    if (slabs.size() < 2) return Outcome{false, "no slabs in the family"};
    auto v = [&](const ScanEntry* e, double alpha) { return scan_value(*e, 1.0, alpha); };
    const ScanEntry* first = slabs.front();
    const ScanEntry* last = slabs.back();
    const double drop = v(first, 0.0) / v(last, 0.0);
    const double growth = v(last, 2.0) / v(first, 2.0);
    // At alpha = 1 the scan value is R^2 lambda |Omega| = L lambda / 4, whose
    // limit is (pi_{2,1}/2)^2 = 3; the length-normalized L lambda tends to 12.
    bool mono = true;
    for (std::size_t k = 1; k < slabs.size(); ++k) {
      mono = mono && slabs[k]->slab_length * slabs[k]->lambda < slabs[k - 1]->slab_length * slabs[k - 1]->lambda;
    }
    const double l_lambda = last->slab_length * last->lambda;
    const bool ok = drop >= 2.0 && growth >= 2.0 && mono && l_lambda > 12.0 && (l_lambda - 12.0) / 12.0 < 0.10;
    return Outcome{ok, fmt("alpha=0 drop x%.2f; alpha=1 L*lambda %.4f -> 12 (scan value %.4f -> 3); alpha=2 growth x%.2f",
                           drop, l_lambda, v(last, 1.0), growth)};
  });

  criterion(10, "property suites, 10^4 randomized trials each", 0.0, [] {
    constexpr int kTrials = 10000;
    bool ok = true;
    std::string detail;
    for (const PropertySummary& p : run_properties(20240601, kTrials)) {
      ok = ok && p.failures == 0 && p.trials == kTrials;
      detail += fmt("%s %d/%d, ", p.name.c_str(), p.trials - p.failures, p.trials);
    }

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // 5-point Laplacian of the (concave) distance function is nonpositive.
    int super_fail = 0;
    for (int t = 0; t < kTrials; ++t) {
      const ConvexPolygon p = oracle::random_polygon(rng);
      const InradiusResult ir = inradius(p);
      const double h = ir.inradius * (0.01 + 0.3 * u(rng));
      const double ang = 2.0 * kPi * u(rng);
      const double r = (ir.inradius - h) * std::sqrt(u(rng));
      const Vec2 x = ir.center + Vec2{r * std::cos(ang), r * std::sin(ang)};
      if (p.min_slack(x) <= h) continue;
      const double lap = distance_to_boundary(p, x + Vec2{h, 0}) + distance_to_boundary(p, x - Vec2{h, 0}) +
                         distance_to_boundary(p, x + Vec2{0, h}) + distance_to_boundary(p, x - Vec2{0, h}) -
                         4.0 * distance_to_boundary(p, x);
      super_fail += lap > 1e-12;
    }
    ok = ok && super_fail == 0;
    detail += fmt("distance_superharmonic %d/%d, ", kTrials - super_fail, kTrials);

    int union_fail = 0;
    for (int t = 0; t < kTrials; ++t) {
      const double a = 0.1 + 10.0 * u(rng), b = 0.1 + 10.0 * u(rng), q = 1.0 + 2.0 * u(rng);
      const std::vector<double> parts{a, b};
      const double oracle_value = oracle::union_by_mass_splitting(a, b, q, 4000);
      union_fail += rel(lambda_union(parts, q), oracle_value) > 1e-5;
    }
    ok = ok && union_fail == 0;
    detail += fmt("union_rule %d/%d, ", kTrials - union_fail, kTrials);

    // lambda(t Omega) = t^{-4/q} lambda(Omega) on tiny grids.
    int scale_fail = 0;
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      const ConvexPolygon p = oracle::random_polygon(rng, 6);
      const double q = u(rng) < 0.25 ? (u(rng) < 0.5 ? 1.0 : 2.0) : 1.0 + 2.0 * u(rng);
      const double s = 0.5 + 1.5 * u(rng);
      const double h = inradius(p).inradius / 4.0;
      const double a = solve_polygon(p, q, h).result.lambda;
      const double b = solve_polygon(p.scaled(s), q, s * h).result.lambda;
      const double err = rel(b, a * std::pow(s, -4.0 / q));
      worst = std::max(worst, err);
      scale_fail += err > 1e-6;
    }
    ok = ok && scale_fail == 0;
    detail += fmt("scaling_covariance %d/%d (worst %.1e)", kTrials - scale_fail, kTrials, worst);
    return Outcome{ok, detail};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
