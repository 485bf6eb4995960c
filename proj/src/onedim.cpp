#include "pfreq/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pfreq/error.hpp"
#include "pfreq/geometry.hpp"

namespace pfreq::onedim {

namespace {

// Symmetric positive definite tridiagonal matrix; off[i] couples i and i+1.
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;
};

std::vector<double> thomas_solve(const Tridiag& k, std::span<const double> rhs) {
  const std::size_t n = k.diag.size();
  std::vector<double> c(n), x(rhs.begin(), rhs.end());
  double denom = k.diag[0];
  c[0] = n > 1 ? k.off[0] / denom : 0.0;
  x[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = k.diag[i] - k.off[i - 1] * c[i - 1];
    c[i] = i + 1 < n ? k.off[i] / denom : 0.0;
    x[i] = (x[i] - k.off[i - 1] * x[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

double quadratic_form(const Tridiag& k, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += k.diag[i] * u[i] * u[i];
    if (i + 1 < u.size()) s += 2.0 * k.off[i] * u[i] * u[i + 1];
  }
  return s;
}

double weighted_pow_sum(std::span<const double> w, std::span<const double> u, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), q);
  return s;
}

void normalize(std::span<const double> w, std::span<double> u, double q) {
  const double s = std::pow(weighted_pow_sum(w, u, q), 1.0 / q);
  for (double& v : u) v /= s;
}

struct QuotientMin {
  std::vector<double> u;  // sum w |u|^q = 1
  double value = 0.0;     // u^T K u
  int iterations = 0;
};

// Nonlinear inverse iteration u <- K^{-1} (w u^{q-1}), renormalized. The
// fixed points are the critical points of u^T K u / (sum w |u|^q)^{2/q}; from
// a positive start it converges to the positive minimizer.
QuotientMin minimize_quotient(const Tridiag& k, std::span<const double> w, double q, std::vector<double> u,
                              const Options& opts) {
  normalize(w, u, q);
  double value = quadratic_form(k, u);
  std::vector<double> rhs(u.size());
  int settled = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = u[i] > 0.0 ? w[i] * std::pow(u[i], q - 1.0) : 0.0;
    u = thomas_solve(k, rhs);
    for (double& v : u) v = std::max(v, 0.0);
    normalize(w, u, q);
    const double next = quadratic_form(k, u);
    const double change = std::abs(next - value) / next;
    value = next;
    settled = change <= opts.tolerance ? settled + 1 : 0;
    if (settled >= 2) return QuotientMin{std::move(u), value, it};
  }
  throw NonConvergence("one-dimensional quotient minimization did not converge", value, std::move(u));
}

void check_exponent(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidInput("exponent q must satisfy q >= 1");
}

QuotientMin solve_flat(double q, int n, const Options& opts) {
  const double h = 1.0 / n;
  Tridiag k;
  k.diag.assign(static_cast<std::size_t>(n - 1), 2.0 / h);
  k.off.assign(static_cast<std::size_t>(n - 2 > 0 ? n - 2 : 0), -1.0 / h);
  std::vector<double> w(static_cast<std::size_t>(n - 1), h);
  std::vector<double> u0(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) u0[static_cast<std::size_t>(i - 1)] = std::sin(std::numbers::pi * i * h);
  return minimize_quotient(k, w, q, std::move(u0), opts);
}

struct RadialSolve {
  QuotientMin min;
  double lambda = 0.0;
  std::vector<double> weights;
};

RadialSolve solve_radial(double q, int dim, int n, const Options& opts) {
  const double h = 1.0 / n;
  const auto un = static_cast<std::size_t>(n);
  // Unknowns f_0 .. f_{n-1}; f_n = 0. Link i joins nodes i and i+1 and
  // carries the weight t^{N-1} at its midpoint. The flux through t = 0 is
  // zero, which is the symmetric ghost-node condition f_{-1} = f_1.
  std::vector<double> link(un);
  for (std::size_t i = 0; i < un; ++i) link[i] = std::pow((static_cast<double>(i) + 0.5) * h, dim - 1);
  Tridiag k;
  k.diag.resize(un);
  k.off.resize(un - 1);
  for (std::size_t i = 0; i < un; ++i) {
    k.diag[i] = (link[i] + (i > 0 ? link[i - 1] : 0.0)) / h;
    if (i + 1 < un) k.off[i] = -link[i] / h;
  }
  // Mass: exact integral of t^{N-1} over the dual cell of each node.
  std::vector<double> w(un);
  for (std::size_t i = 0; i < un; ++i) {
    const double hi = (static_cast<double>(i) + 0.5) * h;
    const double lo = i == 0 ? 0.0 : (static_cast<double>(i) - 0.5) * h;
    w[i] = (std::pow(hi, dim) - std::pow(lo, dim)) / dim;
  }
  std::vector<double> u0(un);
  for (std::size_t i = 0; i < un; ++i) {
    const double t = static_cast<double>(i) * h;
    u0[i] = 1.0 - t * t;
  }
  RadialSolve out;
  out.min = minimize_quotient(k, w, q, std::move(u0), opts);
  const double area = dim * unit_ball_volume(dim);  // N omega_N
  out.lambda = out.min.value * std::pow(area, 1.0 - 2.0 / q);
  out.weights = std::move(w);
  return out;
}

}  // namespace

PoincareConstant pi_2q(double q, int n, const Options& opts) {
  check_exponent(q);
  if (q >= 100.0) throw InvalidInput("pi_2q: exponent must be below 100");
  if (n < 8) throw InvalidInput("pi_2q: need at least 8 intervals");
  PoincareConstant out;
  out.q = q;
  out.resolution = n;
  if (q > 10.0) out.warning = "q > 10: convergence of the discrete minimization is slow";
  const QuotientMin fine = solve_flat(q, n, opts);
  const QuotientMin coarse = solve_flat(q, n / 2, opts);
  out.value = std::sqrt(fine.value);
  out.iterations = fine.iterations;
  out.residual = std::abs(out.value - std::sqrt(coarse.value)) / out.value;
  return out;
}

std::vector<double> monotone_rearrangement(std::span<const double> v) {
  std::vector<double> w(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) w[i] = w[i - 1] + std::abs(v[i] - v[i - 1]);
  return w;
}

MixedProfile mixed_profile(double q, int n, const Options& opts) {
  check_exponent(q);
  if (q > 2.0) throw InvalidInput("mixed_profile: requires 1 <= q <= 2");
  if (n < 8) throw InvalidInput("mixed_profile: need at least 8 intervals");
  const double h = 1.0 / n;
  const auto un = static_cast<std::size_t>(n);
  // Unknowns v_1 .. v_n on t_i = -1 + i h; v_0 = 0, Neumann at t = 0.
  Tridiag k;
  k.diag.assign(un, 2.0 / h);
  k.diag.back() = 1.0 / h;
  k.off.assign(un - 1, -1.0 / h);
  std::vector<double> w(un, h);
  w.back() = 0.5 * h;
  std::vector<double> u0(un);
  for (std::size_t i = 0; i < un; ++i) u0[i] = std::sin(0.5 * std::numbers::pi * (static_cast<double>(i) + 1.0) * h);

  QuotientMin m = minimize_quotient(k, w, q, std::move(u0), opts);

  MixedProfile out;
  out.iterations = m.iterations;
  std::vector<double> samples(un + 1, 0.0);
  std::copy(m.u.begin(), m.u.end(), samples.begin() + 1);
  out.min_value = m.value;
  if (!std::is_sorted(samples.begin(), samples.end())) {
    samples = monotone_rearrangement(samples);
    std::span<double> interior(samples.data() + 1, un);
    normalize(w, interior, q);
    out.min_value = quadratic_form(k, interior);
    out.rearranged = true;
  }
  out.profile = RadialProfile{-1.0, 0.0, std::move(samples), q, 1, "Lq", 1.0};
  return out;
}

double critical_exponent(int dim) {
  if (dim <= 2) return std::numeric_limits<double>::infinity();
  return 2.0 * dim / (dim - 2.0);
}

BallExtremal ball_extremal(double q, int dim, int n, const Options& opts) {
  check_exponent(q);
  if (dim < 2) throw InvalidInput("ball_extremal: dimension must be at least 2");
  if (q >= critical_exponent(dim)) throw InvalidInput("ball_extremal: q must be below the critical exponent");
  if (n < 8) throw InvalidInput("ball_extremal: need at least 8 intervals");

  const RadialSolve fine = solve_radial(q, dim, n, opts);
  const RadialSolve coarse = solve_radial(q, dim, n / 2, opts);

  BallExtremal out;
  out.lambda = fine.lambda;
  out.error_estimate = std::abs(fine.lambda - coarse.lambda) / fine.lambda;
  out.iterations = fine.min.iterations;
  // Scale so that N omega_N int f^q t^{N-1} = 1, i.e. unit L^q norm on B_1.
  const double area = dim * unit_ball_volume(dim);
  const double s = std::pow(area, -1.0 / q);
  std::vector<double> f(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t i = 0; i < fine.min.u.size(); ++i) f[i] = s * fine.min.u[i];
  out.profile = RadialProfile{0.0, 1.0, std::move(f), q, dim, "Lq(B1)", 1.0};
  return out;
}

double radial_lane_emden_residual(const BallExtremal& e) {
  const auto& f = e.profile.samples;
  const double h = e.profile.spacing();
  const int dim = e.profile.dim;
  const double q = e.profile.q;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    const double t = static_cast<double>(i) * h;
    const double d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    const double d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
    const double force = e.lambda * (f[i] > 0.0 ? std::pow(f[i], q - 1.0) : 0.0);
    const double r = -(d2 + (dim - 1) * d1 / t) - force;
    const double wt = h * std::pow(t, dim - 1);
    num += wt * r * r;
    den += wt * force * force;
  }
  return std::sqrt(num / den);
}

std::pair<double, double> radial_factors(const RadialProfile& prof) {
  const auto& f = prof.samples;
  const std::size_t n = f.size() - 1;
  if (n < 4) throw InvalidInput("radial_factors: profile too short");
  const double h = prof.spacing();
  const int dim = prof.dim;
  std::vector<double> grad2(n + 1), mass(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double d;
    if (i == 0) {
      d = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    } else if (i == n) {
      d = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    } else {
      d = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    const double t = prof.lo + static_cast<double>(i) * h;
    const double wt = std::pow(t, dim - 1);
    grad2[i] = d * d * wt;
    mass[i] = std::pow(std::abs(f[i]), prof.q) * wt;
  }
  auto simpson = [h](const std::vector<double>& g) {
    const std::size_t m = g.size() - 1;
    const std::size_t even = m - (m % 2);
    double s = 0.0;
    for (std::size_t i = 0; i + 2 <= even; i += 2) s += g[i] + 4.0 * g[i + 1] + g[i + 2];
    s *= h / 3.0;
    if (even < m) s += 0.5 * h * (g[m - 1] + g[m]);
    return s;
  };
  return {simpson(grad2), simpson(mass)};
}

ChebyshevCheck chebyshev_like_check(std::span<const double> xi, std::span<const double> psi, double a) {
  if (xi.size() != psi.size() || xi.size() < 2) throw InvalidInput("chebyshev_like_check: sample sizes differ");
  if (!(a > 0.0)) throw InvalidInput("chebyshev_like_check: right endpoint must be positive");
  const std::size_t n = xi.size() - 1;
  const double h = a / static_cast<double>(n);
  if (std::abs(xi[0]) > 1e-14) throw InvalidInput("chebyshev_like_check: xi(0) must vanish");
  double prev_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= n; ++i) {
    const double ratio = xi[i] / (static_cast<double>(i) * h);
    if (ratio < prev_ratio - 1e-12 * std::max(1.0, std::abs(prev_ratio))) {
      throw InvalidInput("chebyshev_like_check: xi(t)/t is not non-decreasing");
    }
    prev_ratio = ratio;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    if (psi[i] < 0.0) throw InvalidInput("chebyshev_like_check: psi must be nonnegative");
    if (i > 0 && psi[i] > psi[i - 1]) throw InvalidInput("chebyshev_like_check: psi must be non-increasing");
  }
  ChebyshevCheck out;
  double trap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double avg = 0.5 * (psi[i] + psi[i + 1]);
    out.lhs += (xi[i + 1] - xi[i]) * avg;
    trap += h * avg;
  }
  out.rhs = xi[n] / a * trap;
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

}  // namespace pfreq::onedim
