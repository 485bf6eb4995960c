#pragma once

// One-dimensional Poincare-Sobolev problems: the constants pi_{2,q} on (0,1),
// the mixed profile on (-1, 0) with a free right end, and the radial extremal
// of lambda_{2,q} on the unit N-ball.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pfreq::onedim {

struct RadialProfile {
  double lo = 0.0;  // domain [lo, hi], uniform nodes
  double hi = 1.0;
  std::vector<double> samples;
  double q = 2.0;
  int dim = 1;                   // 1 for flat profiles, N for radial ones
  std::string norm = "Lq";
  double norm_value = 1.0;

  double spacing() const { return (hi - lo) / static_cast<double>(samples.size() - 1); }
};

struct PoincareConstant {
  double q = 2.0;
  double value = 0.0;     // pi_{2,q}
  int resolution = 0;     // intervals
  double residual = 0.0;  // relative change against the half-resolution solve
  int iterations = 0;
  std::string warning;    // set for q > 10
};

struct Options {
  double tolerance = 1e-12;  // relative change of the Rayleigh quotient
  int max_iterations = 1'000'000;
};

/// pi_{2,q} = min |phi'|_2 / |phi|_q over phi(0) = phi(1) = 0. Accepts
/// 1 <= q < 100.
PoincareConstant pi_2q(double q, int n = 4096, const Options& opts = {});

struct MixedProfile {
  RadialProfile profile;  // v on [-1, 0], non-decreasing, unit L^q norm
  double min_value = 0.0; // min of int |v'|^2, equals (pi_{2,q}/2)^2
  int iterations = 0;
  bool rearranged = false;
};

/// Minimizes int_{-1}^0 |phi'|^2 over phi(-1) = 0, |phi|_q = 1, right end free.
MixedProfile mixed_profile(double q, int n = 4096, const Options& opts = {});

/// w_i = sum_{k < i} |v_{k+1} - v_k|: non-decreasing, same Dirichlet energy,
/// pointwise |w| >= |v| when v_0 = 0.
std::vector<double> monotone_rearrangement(std::span<const double> v);

struct BallExtremal {
  RadialProfile profile;  // f on [0, 1], f(1) = 0, N omega_N int f^q t^{N-1} = 1
  double lambda = 0.0;    // lambda_{2,q}(B_1)
  double error_estimate = 0.0;
  int iterations = 0;
};

/// Critical Sobolev exponent 2N/(N-2); infinity for N = 2.
double critical_exponent(int dim);

/// Radial minimizer of the Rayleigh quotient on the unit ball of R^N.
BallExtremal ball_extremal(double q, int dim, int n = 2048, const Options& opts = {});

/// Relative discrete L^2 residual of -(f'' + (N-1) f'/t) - lambda f^{q-1} at
/// the interior nodes, using central differences.
double radial_lane_emden_residual(const BallExtremal& e);

/// Radial factors int_0^1 |f'|^2 t^{N-1} dt and int_0^1 f^q t^{N-1} dt by
/// composite Simpson (trapezoid on a trailing odd interval).
std::pair<double, double> radial_factors(const RadialProfile& f);

struct ChebyshevCheck {
  double lhs = 0.0;  // int_0^a xi' psi
  double rhs = 0.0;  // xi(a)/a int_0^a psi
  bool holds = false;
};

/// For xi(0) = 0 with xi(t)/t non-decreasing and psi >= 0 non-increasing on a
/// uniform grid over [0, a]. Precondition failures throw InvalidInput.
ChebyshevCheck chebyshev_like_check(std::span<const double> xi, std::span<const double> psi, double a);

}  // namespace pfreq::onedim
