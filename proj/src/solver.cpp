#include "pfreq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "pfreq/error.hpp"
#include "pfreq/onedim.hpp"

namespace pfreq {

namespace kp = kernels::parallel;

namespace {

constexpr double kMaskSlack = 1e-9;  // in units of h
constexpr double kMinTheta = 1e-6;

// Distance from p to the boundary along the unit direction e.
double ray_distance(const ConvexPolygon& poly, Vec2 p, Vec2 e) {
  double best = std::numeric_limits<double>::infinity();
  for (const HalfPlane& hp : poly.halfplanes()) {
    const double c = dot(hp.normal, e);
    if (c > 0.0) best = std::min(best, hp.slack(p) / c);
  }
  return best;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double mass_norm(std::span<const double> u, double q, double h) {
  return std::pow(h * h * kp::sum_abs_pow(u, q), 1.0 / q);
}

double energy(const Stencil& a, std::span<const double> u, std::vector<double>& scratch) {
  scratch.resize(u.size());
  kp::apply(a, u, scratch);
  return kp::dot(u, scratch);
}

void require_exponent(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidInput("exponent q must be a finite value >= 1");
}

struct TorsionSolve {
  std::vector<double> w;
  double t = 0.0;
  CgResult cg;
};

TorsionSolve solve_torsion(const GridDomain& dom, const Preconditioner& m) {
  const double h2 = dom.h() * dom.h();
  std::vector<double> b(dom.size(), h2);
  TorsionSolve out;
  out.w.assign(dom.size(), 0.0);
  out.cg = pcg(dom.stencil(), m, b, out.w, {1e-12, 0});
  if (!out.cg.converged) {
    throw NonConvergence("torsion solve did not converge", out.cg.relative_residual, out.w);
  }
  out.t = h2 * kp::sum_abs_pow(out.w, 1.0);
  return out;
}

GridSolution torsion_path(std::shared_ptr<const GridDomain> dom, const Preconditioner& m) {
  TorsionSolve ts = solve_torsion(*dom, m);
  GridSolution sol;
  sol.result.q = 1.0;
  sol.result.lambda = 1.0 / ts.t;
  sol.result.iterations = ts.cg.iterations;
  sol.result.residual = ts.cg.relative_residual;
  sol.result.method = "torsion";
  kp::scale(1.0 / ts.t, ts.w);
  sol.field = GridField{std::move(dom), std::move(ts.w)};
  return sol;
}

// Orthonormalizes the columns in place (modified Gram-Schmidt, two passes).
// A column that collapses is replaced by a fresh pseudo-random vector.
void orthonormalize(std::vector<std::vector<double>>& y, std::uint64_t& rng) {
  for (std::size_t j = 0; j < y.size(); ++j) {
    for (int attempt = 0;; ++attempt) {
      const double before = std::sqrt(kp::dot(y[j], y[j]));
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < j; ++i) kp::axpy(-kp::dot(y[i], y[j]), y[i], y[j]);
      }
      const double nrm = std::sqrt(kp::dot(y[j], y[j]));
      if (nrm > 1e-10 * before && nrm > 0.0) {
        kp::scale(1.0 / nrm, y[j]);
        break;
      }
      if (attempt > 4) throw NonConvergence("subspace basis degenerated", 0.0, {});
      for (double& v : y[j]) v = static_cast<double>(splitmix64(rng) >> 11) * 0x1.0p-53 - 0.5;
    }
  }
}

GridSolution subspace_path(std::shared_ptr<const GridDomain> dom, const Preconditioner& m, const SolverOptions& opts) {
  const GridDomain& d = *dom;
  const Stencil& a = d.stencil();
  const std::size_t n = d.size();
  const double h2 = d.h() * d.h();
  const std::size_t p = std::min(static_cast<std::size_t>(std::max(opts.block_size, 1)), n);

  // Start: the torsion function, then random modulations of it.
  std::uint64_t rng = 0x5eed;
  std::vector<std::vector<double>> x(p, std::vector<double>(n));
  std::vector<double> ritz(p, 0.0);
  {
    TorsionSolve ts = solve_torsion(d, m);
    x[0] = std::move(ts.w);
    for (std::size_t j = 1; j < p; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        x[j][k] = x[0][k] * (static_cast<double>(splitmix64(rng) >> 11) * 0x1.0p-53 - 0.5);
      }
    }
  }
  orthonormalize(x, rng);
  std::vector<double> ax(n);
  for (std::size_t j = 0; j < p; ++j) ritz[j] = energy(a, x[j], ax) / h2;

  std::vector<std::vector<double>> y(p, std::vector<double>(n));
  std::vector<std::vector<double>> ay(p, std::vector<double>(n));
  std::vector<double> rhs(n);
  Eigen::MatrixXd hmat(p, p);
  double lambda = ritz[0];
  double change = 1.0;
  int settled = 0;
  int it = 0;
  for (it = 1; it <= opts.max_iterations; ++it) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        rhs[k] = h2 * x[j][k];
        y[j][k] = x[j][k] / ritz[j];
      }
      const CgResult cg = pcg(a, m, rhs, y[j], {1e-10, 0});
      if (!cg.converged) throw NonConvergence("inner solve of the subspace iteration failed", lambda, x[0]);
    }
    orthonormalize(y, rng);
    for (std::size_t j = 0; j < p; ++j) kp::apply(a, y[j], ay[j]);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i; j < p; ++j) {
        const double v = kp::dot(y[i], ay[j]);
        hmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        hmat(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hmat);
    const Eigen::MatrixXd& v = es.eigenvectors();
    for (std::size_t j = 0; j < p; ++j) {
      std::fill(x[j].begin(), x[j].end(), 0.0);
      for (std::size_t i = 0; i < p; ++i) {
        kp::axpy(v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), y[i], x[j]);
      }
      ritz[j] = es.eigenvalues()(static_cast<Eigen::Index>(j)) / h2;
    }
    change = std::abs(ritz[0] - lambda) / ritz[0];
    lambda = ritz[0];
    settled = change < opts.lambda_rtol ? settled + 1 : 0;
    if (settled >= 2) break;
  }
  if (settled < 2) throw NonConvergence("subspace iteration did not converge", lambda, x[0]);

  std::vector<double> u = std::move(x[0]);
  if (kp::sum_abs_pow(u, 1.0) > 0.0) {
    double s = 0.0;
    for (double vv : u) s += vv;
    if (s < 0.0) kp::scale(-1.0, u);
  }
  for (double& vv : u) vv = std::max(vv, 0.0);
  kp::scale(1.0 / mass_norm(u, 2.0, d.h()), u);

  GridSolution sol;
  sol.result.q = 2.0;
  sol.result.lambda = energy(a, u, ax);
  sol.result.iterations = std::min(it, opts.max_iterations);
  sol.result.residual = change;
  sol.result.method = "subspace";
  sol.field = GridField{std::move(dom), std::move(u)};
  return sol;
}

// u <- A^{-1}(h^2 u^{q-1}), clamped and renormalized in L^q.
GridSolution nonlinear_path(std::shared_ptr<const GridDomain> dom, const Preconditioner& m, double q,
                            const SolverOptions& opts) {
  const GridDomain& d = *dom;
  const Stencil& a = d.stencil();
  const std::size_t n = d.size();
  const double h2 = d.h() * d.h();

  std::vector<double> u = solve_torsion(d, m).w;
  kp::scale(1.0 / mass_norm(u, q, d.h()), u);
  std::vector<double> scratch(n), rhs(n), y(n);
  double lambda = energy(a, u, scratch);
  double change = 1.0;
  int settled = 0;
  int it = 0;
  for (it = 1; it <= opts.max_iterations; ++it) {
    kp::positive_pow(u, q, rhs);
    kp::scale(h2, rhs);
    for (std::size_t k = 0; k < n; ++k) y[k] = u[k] / lambda;
    const double inner = std::clamp(0.01 * std::sqrt(change), 1e-12, 1e-4);
    const CgResult cg = pcg(a, m, rhs, y, {inner, 0});
    if (!cg.converged) throw NonConvergence("inner solve of the nonlinear iteration failed", lambda, u);
    for (double& v : y) v = std::max(v, 0.0);
    kp::scale(1.0 / mass_norm(y, q, d.h()), y);
    std::swap(u, y);
    const double next = energy(a, u, scratch);
    change = std::abs(next - lambda) / next;
    lambda = next;
    settled = change < opts.lambda_rtol ? settled + 1 : 0;
    if (settled >= 3) break;
  }
  if (settled < 3) throw NonConvergence("nonlinear inverse iteration did not converge", lambda, u);

  GridSolution sol;
  sol.result.q = q;
  sol.result.lambda = lambda;
  sol.result.iterations = it;
  sol.result.residual = change;
  sol.result.method = "nonlinear";
  sol.field = GridField{std::move(dom), std::move(u)};
  return sol;
}

double ball_scale(const BallShape& b, double q) {
  return std::pow(b.radius, -2.0 - (2.0 - q) * b.dim / q);
}

FrequencyResult radial_result(const BallShape& b, double q, const SolverOptions& opts) {
  if (q >= onedim::critical_exponent(b.dim)) throw InvalidInput("q must be below the critical exponent");
  const onedim::BallExtremal e = onedim::ball_extremal(q, b.dim, opts.radial_nodes);
  FrequencyResult r;
  r.q = q;
  r.lambda = e.lambda * ball_scale(b, q);
  r.h = b.radius / opts.radial_nodes;
  r.iterations = e.iterations;
  r.error_estimate = e.error_estimate;
  r.method = "radial";
  r.nodes = static_cast<std::size_t>(opts.radial_nodes) + 1;
  return r;
}

FrequencyResult part_result(const ShapePart& part, double q, double h, const SolverOptions& opts, bool refined) {
  if (const auto* b = std::get_if<BallShape>(&part)) return radial_result(*b, q, opts);
  const Shape s = std::get<ConvexPolygon>(part);
  return refined ? lambda_2q_refined(s, q, h, opts) : lambda_2q(s, q, h, opts);
}

FrequencyResult combine_union(const UnionShape& u, double q, double h, const SolverOptions& opts, bool refined) {
  std::vector<FrequencyResult> parts;
  parts.reserve(u.parts.size());
  for (const ShapePart& p : u.parts) parts.push_back(part_result(p, q, h, opts, refined));
  FrequencyResult r;
  r.q = q;
  r.lambda = lambda_union(parts, q);
  r.h = std::numeric_limits<double>::infinity();
  r.method = "union";
  for (const FrequencyResult& p : parts) {
    r.h = std::min(r.h, p.h);
    r.iterations += p.iterations;
    r.residual = std::max(r.residual, p.residual);
    r.error_estimate = std::max(r.error_estimate, p.error_estimate);
    r.nodes += p.nodes;
  }
  return r;
}

}  // namespace

GridDomain::GridDomain(const ConvexPolygon& poly, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("grid spacing must be positive");
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-lo.x, -lo.y};
  for (Vec2 v : poly.vertices()) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  spec_.origin = lo;
  spec_.h = h;
  const double cells_x = std::ceil((hi.x - lo.x) / h - 1e-9);
  const double cells_y = std::ceil((hi.y - lo.y) / h - 1e-9);
  if ((cells_x + 1.0) * (cells_y + 1.0) > 2.0e8) throw InvalidInput("grid too fine for this shape");
  spec_.nx = static_cast<int>(cells_x);
  spec_.ny = static_cast<int>(cells_y);

  const auto width = static_cast<std::size_t>(spec_.nx) + 1;
  index_.assign(width * (static_cast<std::size_t>(spec_.ny) + 1), -1);
  for (int j = 0; j <= spec_.ny; ++j) {
    for (int i = 0; i <= spec_.nx; ++i) {
      if (poly.min_slack(spec_.node(i, j)) > kMaskSlack * h) {
        index_[static_cast<std::size_t>(j) * width + static_cast<std::size_t>(i)] =
            static_cast<std::int32_t>(coords_.size());
        coords_.emplace_back(i, j);
      }
    }
  }
  if (coords_.empty()) throw InvalidInput("grid has no interior nodes; decrease the spacing");
  if (coords_.size() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw InvalidInput("grid too fine for this shape");
  }

  static constexpr int kDi[4] = {1, -1, 0, 0};
  static constexpr int kDj[4] = {0, 0, 1, -1};
  const std::size_t n = coords_.size();
  stencil_.diag.assign(n, 0.0);
  stencil_.nbr.assign(n, {-1, -1, -1, -1});
  for (std::size_t k = 0; k < n; ++k) {
    const auto [i, j] = coords_[k];
    const Vec2 p = spec_.node(i, j);
    double diag = 0.0;
    for (int dir = 0; dir < 4; ++dir) {
      const std::int32_t nb = index(i + kDi[dir], j + kDj[dir]);
      if (nb >= 0) {
        stencil_.nbr[k][static_cast<std::size_t>(dir)] = nb;
        diag += 1.0;
      } else {
        const double theta =
            std::clamp(ray_distance(poly, p, {static_cast<double>(kDi[dir]), static_cast<double>(kDj[dir])}) / h,
                       kMinTheta, 1.0);
        diag += 1.0 / theta;
      }
    }
    stencil_.diag[k] = diag;
  }
}

std::int32_t GridDomain::index(int i, int j) const {
  if (i < 0 || j < 0 || i > spec_.nx || j > spec_.ny) return -1;
  return index_[static_cast<std::size_t>(j) * (static_cast<std::size_t>(spec_.nx) + 1) + static_cast<std::size_t>(i)];
}

GridSolution solve_grid(std::shared_ptr<const GridDomain> domain, double q, const SolverOptions& opts) {
  require_exponent(q);
  const Preconditioner m(domain->stencil(), opts.precond);
  GridSolution sol;
  if (q == 1.0 && !opts.force_general_path) {
    sol = torsion_path(domain, m);
  } else if (q == 2.0 && !opts.force_general_path) {
    sol = subspace_path(domain, m, opts);
  } else {
    sol = nonlinear_path(domain, m, q, opts);
  }
  sol.result.h = domain->h();
  sol.result.nodes = domain->size();
  sol.result.norm_check = mass_norm(sol.field.values, q, domain->h());
  return sol;
}

GridSolution solve_polygon(const ConvexPolygon& poly, double q, double h, const SolverOptions& opts) {
  require_exponent(q);
  return solve_grid(std::make_shared<const GridDomain>(poly, h), q, opts);
}

double default_spacing(const Shape& s) {
  return std::min(diameter(s) / 256.0, inradius_of(s) / 16.0);
}

FrequencyResult lambda_2q(const Shape& s, double q, double h, const SolverOptions& opts) {
  require_exponent(q);
  if (const auto* b = std::get_if<BallShape>(&s)) return radial_result(*b, q, opts);
  if (const auto* u = std::get_if<UnionShape>(&s)) return combine_union(*u, q, h, opts, false);
  const auto& poly = std::get<ConvexPolygon>(s);
  if (h <= 0.0) h = default_spacing(s);
  return solve_polygon(poly, q, h, opts).result;
}

FrequencyResult lambda_2q_refined(const Shape& s, double q, double h, const SolverOptions& opts) {
  require_exponent(q);
  if (std::holds_alternative<BallShape>(s)) return lambda_2q(s, q, h, opts);
  if (const auto* u = std::get_if<UnionShape>(&s)) return combine_union(*u, q, h, opts, true);
  if (h <= 0.0) h = default_spacing(s);
  FrequencyResult fine = lambda_2q(s, q, h, opts);
  const FrequencyResult coarse = lambda_2q(s, q, 2.0 * h, opts);
  fine.error_estimate = std::abs(fine.lambda - coarse.lambda) / fine.lambda;
  return fine;
}

double torsion(const Shape& s, double h, const SolverOptions& opts) {
  if (const auto* u = std::get_if<UnionShape>(&s)) {
    double t = 0.0;
    for (const ShapePart& p : u->parts) {
      t += std::visit([&](const auto& part) { return torsion(Shape{part}, h, opts); }, p);
    }
    return t;
  }
  if (std::holds_alternative<BallShape>(s)) return 1.0 / lambda_2q(s, 1.0, h, opts).lambda;
  if (h <= 0.0) h = default_spacing(s);
  const GridDomain dom(std::get<ConvexPolygon>(s), h);
  const Preconditioner m(dom.stencil(), opts.precond);
  return solve_torsion(dom, m).t;
}

double lambda_union(std::span<const double> lambdas, double q) {
  require_exponent(q);
  if (lambdas.empty()) throw InvalidInput("lambda_union: no parts");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw InvalidInput("lambda_union: part frequencies must be positive");
  }
  const double m = *std::min_element(lambdas.begin(), lambdas.end());
  if (q >= 2.0) return m;
  // Scaled by the smallest part so the power sum stays in [1, n] however
  // large the exponent gets as q approaches 2.
  const double e = q / (2.0 - q);
  double s = 0.0;
  for (double l : lambdas) s += std::pow(m / l, e);
  return m * std::pow(s, -1.0 / e);
}

double lambda_union(std::span<const FrequencyResult> parts, double q) {
  std::vector<double> l;
  l.reserve(parts.size());
  for (const FrequencyResult& p : parts) l.push_back(p.lambda);
  return lambda_union(l, q);
}

double lane_emden_residual(const GridSolution& s) {
  const GridDomain& d = *s.field.domain;
  const auto& u = s.field.values;
  const double h2 = d.h() * d.h();
  const double q = s.result.q;
  const double lambda = s.result.lambda;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto [i, j] = d.coords(k);
    const std::int32_t ne = d.index(i + 1, j + 1), nw = d.index(i - 1, j + 1);
    const std::int32_t se = d.index(i + 1, j - 1), sw = d.index(i - 1, j - 1);
    if (ne < 0 || nw < 0 || se < 0 || sw < 0) continue;
    const double lap = (u[static_cast<std::size_t>(ne)] + u[static_cast<std::size_t>(nw)] +
                        u[static_cast<std::size_t>(se)] + u[static_cast<std::size_t>(sw)] - 4.0 * u[k]) /
                       (2.0 * h2);
    const double force = lambda * (u[k] > 0.0 ? std::pow(u[k], q - 1.0) : 0.0);
    const double r = -lap - force;
    num += r * r;
    den += force * force;
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

}  // namespace pfreq
