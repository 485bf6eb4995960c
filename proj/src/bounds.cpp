#include "pfreq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "pfreq/error.hpp"

namespace pfreq {

namespace {

std::mutex cache_mutex;
std::map<std::pair<double, int>, double> ball_cache;
std::map<double, double> pi_cache;

double omega(int dim) { return unit_ball_volume(dim); }

double tol_for(const FrequencyResult& r, double side) { return r.error_estimate * std::abs(side) + 1e-9; }

BoundReport not_applicable(BoundReport r, std::string why) {
  r.applicable = false;
  r.note = std::move(why);
  return r;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kViolated:
      return "violated";
    case Verdict::kEquality:
      return "equality-within-tolerance";
  }
  return "?";
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::kBoundedBelow:
      return "bounded-below-positive";
    case Trend::kVanishing:
      return "vanishing";
    case Trend::kBlowingUp:
      return "blowing-up";
  }
  return "?";
}

BoundReport make_report(std::string id, std::string shape_id, double q, double lhs, double rhs, double tolerance) {
  BoundReport r;
  r.id = std::move(id);
  r.shape_id = std::move(shape_id);
  r.q = q;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.relative_slack = rhs != 0.0 ? r.slack / std::abs(rhs) : r.slack;
  r.tolerance = tolerance;
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
    r.verdict = Verdict::kViolated;
    r.note = "non-finite value";
  } else if (r.slack > tolerance) {
    r.verdict = Verdict::kHolds;
  } else if (std::abs(r.slack) <= tolerance) {
    r.verdict = Verdict::kEquality;
  } else {
    r.verdict = Verdict::kViolated;
  }
  return r;
}

ShapeFacts facts_of(const NamedShape& s) {
  ShapeFacts f;
  f.id = s.id;
  f.dim = dimension(s.shape);
  f.measure = measure(s.shape);
  f.inradius = inradius_of(s.shape);
  f.convex = is_convex(s.shape);
  f.ball = std::holds_alternative<BallShape>(s.shape);
  if (const auto* u = std::get_if<UnionShape>(&s.shape)) {
    f.ball = u->parts.size() == 1 && std::holds_alternative<BallShape>(u->parts.front());
  }
  f.slab_length = s.slab_length;
  return f;
}

double ball_lambda(double q, int dim) {
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = ball_cache.find({q, dim}); it != ball_cache.end()) return it->second;
  }
  const double v = onedim::ball_extremal(q, dim).lambda;
  std::lock_guard lock(cache_mutex);
  ball_cache.emplace(std::pair{q, dim}, v);
  return v;
}

double pi2q_value(double q) {
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = pi_cache.find(q); it != pi_cache.end()) return it->second;
  }
  const double v = onedim::pi_2q(q).value;
  std::lock_guard lock(cache_mutex);
  pi_cache.emplace(q, v);
  return v;
}

BoundReport check_lower(const ShapeFacts& g, double q, const FrequencyResult& lambda) {
  if (q < 1.0 || q > 2.0) throw InvalidInput("HPWEAK applies only to 1 <= q <= 2");
  const double pi = pi2q_value(q);
  const double lhs = std::pow(pi / (2.0 * g.inradius), 2.0);
  const double rhs = lambda.lambda * std::pow(g.measure, (2.0 - q) / q);
  BoundReport r = make_report("HPWEAK", g.id, q, lhs, rhs, tol_for(lambda, rhs));
  if (!g.convex) return not_applicable(std::move(r), "shape is not convex");
  return r;
}

BoundReport check_upper(const ShapeFacts& g, double q, const FrequencyResult& lambda) {
  const double e = (2.0 - q) / q;
  const double lhs = lambda.lambda * std::pow(g.measure, e);
  const double rhs = std::pow(omega(g.dim), e) * ball_lambda(q, g.dim) / (g.inradius * g.inradius);
  // The ball side carries the radial solver's own error as well.
  const double tol = tol_for(lambda, lhs) + 1e-7 * rhs;
  BoundReport r = make_report("HPWEAKUP", g.id, q, lhs, rhs, tol);
  if (q < 2.0 && !g.convex) return not_applicable(std::move(r), "q < 2 needs convexity");
  if (g.ball) r.note = "ball: equality case";
  return r;
}

std::array<BoundReport, 2> check_torsion_double(const ShapeFacts& g, const FrequencyResult& t) {
  if (t.q != 1.0) throw InvalidInput("torsion checks need the q = 1 result");
  const double torsion = 1.0 / t.lambda;
  const double scale = g.measure * g.inradius * g.inradius;
  const double tol = tol_for(t, torsion);
  BoundReport lower = make_report("MPS_LOWER", g.id, 1.0, scale / (g.dim * (g.dim + 2.0)), torsion, tol);
  BoundReport upper = make_report("MPS_UPPER", g.id, 1.0, torsion, scale / 3.0, tol);
  if (!g.convex) {
    lower = not_applicable(std::move(lower), "shape is not convex");
    upper = not_applicable(std::move(upper), "shape is not convex");
  }
  return {lower, upper};
}

std::vector<BoundReport> check_classical(const ShapeFacts& g, double q, const FrequencyResult& lambda) {
  std::vector<BoundReport> out;
  const double n = g.dim;
  const double lb = ball_lambda(q, g.dim);
  const double ball_tol = 1e-7;

  const double fk_rhs = lb * std::pow(omega(g.dim), 2.0 / n + (2.0 - q) / q) *
                        std::pow(g.measure, -2.0 / n - (2.0 - q) / q);
  out.push_back(make_report("FK", g.id, q, fk_rhs, lambda.lambda, tol_for(lambda, lambda.lambda) + ball_tol * fk_rhs));

  if (q == 2.0) {
    const double hp = std::pow(std::numbers::pi / (2.0 * g.inradius), 2.0);
    BoundReport r = make_report("HP", g.id, q, hp, lambda.lambda, tol_for(lambda, lambda.lambda));
    out.push_back(g.convex ? r : not_applicable(std::move(r), "shape is not convex"));
  } else {
    // No sharp constant is known; the value is reported for the empirical
    // infimum over the family.
    const double v = lambda.lambda * std::pow(g.inradius, 2.0 + (2.0 - q) * n / q);
    BoundReport r = make_report("HPQ", g.id, q, 0.0, v, tol_for(lambda, v));
    r.note = "empirical value lambda R^{2+(2-q)N/q}";
    if (q < 2.0) r = not_applicable(std::move(r), "no positive lower bound for q < 2; slabs drive it to 0");
    else if (!g.convex) r = not_applicable(std::move(r), "shape is not convex");
    out.push_back(std::move(r));
  }

  const double banale = lb / std::pow(g.inradius, 2.0 + (2.0 - q) * n / q);
  out.push_back(make_report("BANALE", g.id, q, lambda.lambda, banale, tol_for(lambda, lambda.lambda) + ball_tol * banale));
  return out;
}

BoundReport check_bfnt(const ShapeFacts& g, const FrequencyResult& lambda2, const FrequencyResult& t) {
  const double torsion = 1.0 / t.lambda;
  const double v = lambda2.lambda * torsion / g.measure;
  const double c = std::pow(std::numbers::pi / 2.0, 2.0) / (g.dim * (g.dim + 2.0));
  const double tol = (lambda2.error_estimate + t.error_estimate) * v + 1e-9;
  BoundReport r = make_report("BFNT_IMPROVED", g.id, 2.0, c, v, tol);
  if (!g.convex) return not_applicable(std::move(r), "shape is not convex");
  return r;
}

Certificate certificate_upper(const ConvexPolygon& poly, double q, const onedim::RadialProfile& f,
                              const FrequencyResult& lambda, const std::string& shape_id) {
  if (q < 1.0 || q >= 2.0) throw InvalidInput("certificate needs 1 <= q < 2");
  if (f.dim != 2 || f.q != q) throw InvalidInput("certificate needs the planar ball profile at the same q");
  const ConvexPolygon centered = center_at_chebyshev(poly);
  const BoundaryIntegrals bi = boundary_integrals(centered);
  const auto [dirichlet, mass] = onedim::radial_factors(f);
  const double area = measure(centered);
  const double r = inradius(centered).inradius;
  const double w = omega(2);

  Certificate c;
  c.value = dirichlet * bi.minus / std::pow(mass * bi.plus, 2.0 / q);
  c.ball_lambda = 2.0 * w * dirichlet / std::pow(2.0 * w * mass, 2.0 / q);
  c.chain_rhs = std::pow(w, 2.0 / q - 1.0) * std::pow(area, 1.0 - 2.0 / q) * c.ball_lambda / (r * r);
  c.domination = make_report("CERTIFICATE", shape_id, q, lambda.lambda, c.value, tol_for(lambda, lambda.lambda));
  c.chain = make_report("CERTIFICATE_CHAIN", shape_id, q, c.value, c.chain_rhs, 1e-9);
  return c;
}

double scan_value(const ScanEntry& e, double q, double alpha) {
  const double beta = 2.0 - e.dim * (alpha - (2.0 - q) / q);
  return std::pow(e.inradius, beta) * e.lambda * std::pow(e.measure, alpha);
}

AlphaScanResult alpha_scan(std::vector<ScanEntry> entries, double q, const std::vector<double>& alphas) {
  AlphaScanResult out;
  out.q = q;
  out.threshold = std::max((2.0 - q) / q, 0.0);
  out.entries = std::move(entries);

  std::vector<std::size_t> slabs;
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    if (out.entries[i].slab_length > 0.0) slabs.push_back(i);
  }
  std::sort(slabs.begin(), slabs.end(), [&](std::size_t a, std::size_t b) {
    return out.entries[a].slab_length < out.entries[b].slab_length;
  });

  for (double alpha : alphas) {
    AlphaRow row;
    row.alpha = alpha;
    row.beta = 2.0 - 2.0 * (alpha - (2.0 - q) / q);
    row.min = std::numeric_limits<double>::infinity();
    row.max = -row.min;
    for (const ScanEntry& e : out.entries) {
      const double v = scan_value(e, q, alpha);
      row.values.push_back(v);
      if (v < row.min) {
        row.min = v;
        row.argmin = e.shape_id;
      }
      row.max = std::max(row.max, v);
    }
    if (out.entries.empty()) row.min = row.max = 0.0;

    if (slabs.size() >= 2) {
      bool dec = true, inc = true;
      for (std::size_t k = 1; k < slabs.size(); ++k) {
        const double a = row.values[slabs[k - 1]], b = row.values[slabs[k]];
        dec = dec && b < a;
        inc = inc && b > a;
      }
      const double first = row.values[slabs.front()], last = row.values[slabs.back()];
      if (dec && first >= 2.0 * last) row.slab_trend = Trend::kVanishing;
      else if (inc && last >= 2.0 * first) row.slab_trend = Trend::kBlowingUp;
    }
    const double eps = 1e-12;
    if (alpha < out.threshold - eps) row.expected = Trend::kVanishing;
    else if (alpha > out.threshold + eps) row.expected = Trend::kBlowingUp;
    out.rows.push_back(std::move(row));
  }
  return out;
}

SlabTable slab_asymptotics(double q, std::vector<double> lengths, double h, const SolverOptions& opts) {
  std::vector<SlabRow> rows;
  for (double L : lengths) {
    const FrequencyResult r = lambda_2q_refined(Shape{slab(L)}, q, h, opts);
    rows.push_back(SlabRow{L, r.lambda, 0.0, r.error_estimate});
  }
  return make_slab_table(q, std::move(rows));
}

SlabTable make_slab_table(double q, std::vector<SlabRow> rows) {
  if (rows.size() < 2) throw InvalidInput("slab table needs at least two lengths");
  std::sort(rows.begin(), rows.end(), [](const SlabRow& a, const SlabRow& b) { return a.length < b.length; });
  SlabTable t;
  t.q = q;
  t.bounded_case = q <= 2.0;
  for (SlabRow& row : rows) {
    row.normalized = t.bounded_case ? std::pow(row.length, (2.0 - q) / q) * row.lambda : row.lambda;
  }
  t.rows = std::move(rows);
  t.monotone = true;
  for (std::size_t k = 1; k < t.rows.size(); ++k) t.monotone = t.monotone && t.rows[k].normalized < t.rows[k - 1].normalized;
  const double last = t.rows.back().normalized;
  if (t.bounded_case) {
    const double pi = pi2q_value(q);
    t.limit = pi * pi;
    t.final_gap = (last - t.limit) / t.limit;
    t.passes = t.monotone && last > t.limit && t.final_gap < 0.10;
  } else {
    const double prev = t.rows[t.rows.size() - 2].normalized;
    t.final_gap = std::abs(last - prev) / prev;
    t.passes = t.monotone && last > 0.0 && t.final_gap < 0.02;
  }
  return t;
}

}  // namespace pfreq
