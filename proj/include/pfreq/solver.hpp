#pragma once

// Discrete generalized principal frequencies lambda_{2,q} on planar convex
// polygons (grid), on N-balls (radial reduction) and on disjoint unions.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pfreq/geometry.hpp"
#include "pfreq/kernels.hpp"
#include "pfreq/pcg.hpp"
#include "pfreq/shape.hpp"

namespace pfreq {

/// Nodes origin + (i h, j h), 0 <= i <= nx, 0 <= j <= ny.
struct GridSpec {
  Vec2 origin;
  double h = 0.0;
  int nx = 0;
  int ny = 0;

  Vec2 node(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
};

/// Interior nodes of a polygon on a uniform grid, and the energy operator.
///
/// A node is interior when its slack to every edge exceeds 1e-9 h. A grid
/// link leaving the domain is cut where the ray meets the boundary, at a
/// fraction theta of the spacing, and contributes u_i^2 / theta to the
/// energy. On axis-aligned rectangles whose sides fall on grid lines this is
/// the plain 5-point Laplacian.
class GridDomain {
 public:
  GridDomain(const ConvexPolygon& poly, double h);

  const GridSpec& spec() const { return spec_; }
  const Stencil& stencil() const { return stencil_; }
  std::size_t size() const { return coords_.size(); }
  double h() const { return spec_.h; }

  /// Unknown index of node (i, j), or -1 when it is not interior.
  std::int32_t index(int i, int j) const;
  std::pair<int, int> coords(std::size_t k) const { return coords_[k]; }
  Vec2 position(std::size_t k) const { return spec_.node(coords_[k].first, coords_[k].second); }

 private:
  GridSpec spec_;
  std::vector<std::int32_t> index_;
  std::vector<std::pair<int, int>> coords_;
  Stencil stencil_;
};

/// Values at the interior nodes of a domain; zero everywhere else.
struct GridField {
  std::shared_ptr<const GridDomain> domain;
  std::vector<double> values;
};

struct SolverOptions {
  double lambda_rtol = 1e-10;   // relative change of lambda between iterations
  int max_iterations = 20000;   // outer iterations
  int block_size = 8;           // subspace size of the q = 2 path
  PreconditionerKind precond = PreconditionerKind::kMic;
  bool force_general_path = false;  // skip the q = 1 and q = 2 specializations
  int radial_nodes = 2048;
};

struct FrequencyResult {
  double q = 2.0;
  double lambda = 0.0;
  double h = 0.0;               // grid spacing, or R / n on the radial path
  int iterations = 0;
  double residual = 0.0;        // last relative change (or linear residual)
  double norm_check = 1.0;      // |u|_q of the returned minimizer
  double error_estimate = 0.0;  // relative, from a resolution study; 0 if none
  std::string method;           // torsion | subspace | nonlinear | radial | union
  std::size_t nodes = 0;
};

struct GridSolution {
  GridField field;  // nonnegative minimizer, unit L^q norm
  FrequencyResult result;
};

/// Minimizes sum_links (du)^2 / (h^2 sum |u|^q)^{2/q} on the grid domain.
GridSolution solve_polygon(const ConvexPolygon& poly, double q, double h, const SolverOptions& opts = {});
GridSolution solve_grid(std::shared_ptr<const GridDomain> domain, double q, const SolverOptions& opts = {});

/// min(diameter / 256, inradius / 16).
double default_spacing(const Shape& s);

/// lambda_{2,q} of any shape at spacing h (0 picks the default spacing).
/// Balls go through the radial solver, unions through lambda_union.
FrequencyResult lambda_2q(const Shape& s, double q, double h = 0.0, const SolverOptions& opts = {});

/// Same, plus a second solve at spacing 2h; reports the finer value with
/// error_estimate = |lambda_h - lambda_2h| / lambda_h.
FrequencyResult lambda_2q_refined(const Shape& s, double q, double h = 0.0, const SolverOptions& opts = {});

/// Torsional rigidity: h^2 sum w with A w = h^2 (the discrete -Lap w = 1).
double torsion(const Shape& s, double h = 0.0, const SolverOptions& opts = {});

/// Disjoint union combination. For q < 2 mass splits between the parts:
/// (sum lambda_i^{-q/(2-q)})^{-(2-q)/q}; for q >= 2 the smallest part wins.
double lambda_union(std::span<const double> lambdas, double q);
double lambda_union(std::span<const FrequencyResult> parts, double q);

/// Relative discrete L^2 residual of -Lap u - lambda u^{q-1}, with -Lap
/// taken from the diagonal (rotated) 5-point stencil at nodes whose four
/// diagonal neighbours are interior.
double lane_emden_residual(const GridSolution& s);

}  // namespace pfreq
