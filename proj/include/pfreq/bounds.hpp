#pragma once

// Inequality checks for lambda_{2,q}, torsion and inradius, plus the
// alpha scan over shape families and the slab asymptotics.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pfreq/geometry.hpp"
#include "pfreq/onedim.hpp"
#include "pfreq/shape.hpp"
#include "pfreq/solver.hpp"

namespace pfreq {

enum class Verdict { kHolds, kViolated, kEquality };

std::string to_string(Verdict v);

/// One inequality on one shape, arranged as lhs <= rhs.
struct BoundReport {
  std::string id;  // FK HP HPQ BANALE HPWEAK HPWEAKUP MPS_LOWER MPS_UPPER BFNT_IMPROVED CERTIFICATE CERTIFICATE_CHAIN
  std::string shape_id;
  double q = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;           // rhs - lhs
  double relative_slack = 0.0;  // slack / |rhs|
  double tolerance = 0.0;
  Verdict verdict = Verdict::kHolds;
  bool applicable = true;  // false: recorded for information, outside the hypotheses
  std::string note;
};

/// slack > tol: holds; |slack| <= tol: equality within tolerance; else violated.
BoundReport make_report(std::string id, std::string shape_id, double q, double lhs, double rhs, double tolerance);

/// Geometric data the checks consume.
struct ShapeFacts {
  std::string id;
  int dim = 2;
  double measure = 0.0;
  double inradius = 0.0;
  bool convex = true;
  bool ball = false;
  double slab_length = 0.0;
};

ShapeFacts facts_of(const NamedShape& s);

/// lambda_{2,q}(B_1) in R^N from the radial solver; memoized, thread safe.
double ball_lambda(double q, int dim);
/// pi_{2,q}; memoized, thread safe.
double pi2q_value(double q);

/// lambda |Omega|^{(2-q)/q} > (pi_{2,q} / (2 R))^2 for convex sets, 1 <= q <= 2.
BoundReport check_lower(const ShapeFacts& g, double q, const FrequencyResult& lambda);

/// lambda |Omega|^{(2-q)/q} <= omega_N^{(2-q)/q} lambda(B_1) / R^2; needs
/// convexity when q < 2.
BoundReport check_upper(const ShapeFacts& g, double q, const FrequencyResult& lambda);

/// |Omega| R^2 / (N (N+2)) <= T < |Omega| R^2 / 3 for convex sets; `t` is the
/// q = 1 result (T = 1 / lambda_{2,1}).
std::array<BoundReport, 2> check_torsion_double(const ShapeFacts& g, const FrequencyResult& t);

/// Faber-Krahn, Hersch-Protter (HP for q = 2, empirical HPQ value for q > 2)
/// and the inclusion bound lambda <= lambda(B_1) / R^{2 + (2-q) N / q}.
std::vector<BoundReport> check_classical(const ShapeFacts& g, double q, const FrequencyResult& lambda);

/// lambda T / |Omega| >= (pi/2)^2 / (N (N+2)) for convex sets.
BoundReport check_bfnt(const ShapeFacts& g, const FrequencyResult& lambda2, const FrequencyResult& t);

struct Certificate {
  double value = 0.0;         // Rayleigh quotient of f(j_Omega)
  double ball_lambda = 0.0;   // lambda(B_1) from the same radial quadrature
  double chain_rhs = 0.0;     // omega^{2/q-1} |Omega|^{1-2/q} ball_lambda / R^2
  BoundReport domination;     // solver lambda <= certificate
  BoundReport chain;          // certificate <= chain_rhs
};

/// Upper bound on lambda_{2,q}(poly), 1 <= q < 2, from the radial ball
/// extremal f composed with the gauge of the Chebyshev-centered polygon.
/// `lambda` is the solver value to dominate.
Certificate certificate_upper(const ConvexPolygon& poly, double q, const onedim::RadialProfile& f,
                              const FrequencyResult& lambda, const std::string& shape_id = "polygon");

enum class Trend { kBoundedBelow, kVanishing, kBlowingUp };
std::string to_string(Trend t);

struct ScanEntry {
  std::string shape_id;
  double slab_length = 0.0;  // > 0 for slabs
  double lambda = 0.0;
  double measure = 0.0;
  double inradius = 0.0;
  int dim = 2;
};

struct AlphaRow {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> values;  // aligned with the scan entries
  double min = 0.0;
  double max = 0.0;
  std::string argmin;
  Trend slab_trend = Trend::kBoundedBelow;
  Trend expected = Trend::kBoundedBelow;
};

struct AlphaScanResult {
  double q = 0.0;
  double threshold = 0.0;  // max((2-q)/q, 0)
  std::vector<ScanEntry> entries;
  std::vector<AlphaRow> rows;
};

/// R^beta lambda |Omega|^alpha with beta = 2 - N (alpha - (2-q)/q).
double scan_value(const ScanEntry& e, double q, double alpha);

/// Slab values sorted by L: vanishing when they decrease monotonically by a
/// factor >= 2, blowing up when they increase monotonically by >= 2,
/// otherwise bounded below.
AlphaScanResult alpha_scan(std::vector<ScanEntry> entries, double q, const std::vector<double>& alphas);

struct SlabRow {
  double length = 0.0;
  double lambda = 0.0;
  double normalized = 0.0;  // L^{(2-q)/q} lambda for q <= 2, raw lambda otherwise
  double error_estimate = 0.0;
};

struct SlabTable {
  double q = 0.0;
  bool bounded_case = true;  // q <= 2: normalized values tend to pi_{2,q}^2
  double limit = 0.0;        // pi_{2,q}^2, or 0 when unknown
  std::vector<SlabRow> rows;
  bool monotone = false;
  double final_gap = 0.0;    // relative gap to the limit, or last relative change
  bool passes = false;
};

/// Slabs (-L/2, L/2) x (0, 1). For q <= 2 the normalized values must
/// decrease to pi_{2,q}^2 and be within 10% at the largest L; for q > 2 the
/// raw values must change by less than 2% between the two largest L.
SlabTable slab_asymptotics(double q, std::vector<double> lengths, double h = 0.0, const SolverOptions& opts = {});

/// The same table from precomputed rows (length, lambda, error estimate).
SlabTable make_slab_table(double q, std::vector<SlabRow> rows);

}  // namespace pfreq
