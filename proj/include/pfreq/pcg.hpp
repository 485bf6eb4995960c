#pragma once

#include <span>
#include <vector>

#include "pfreq/kernels.hpp"

namespace pfreq {

enum class PreconditionerKind { kNone, kJacobi, kMic };

/// Preconditioner for a Stencil whose nodes are numbered so that the west and
/// south neighbours of a node precede it (row-major grid order).
class Preconditioner {
 public:
  Preconditioner(const Stencil& a, PreconditionerKind kind);

  void apply(std::span<const double> r, std::span<double> z) const;
  PreconditionerKind kind() const { return kind_; }

 private:
  const Stencil* a_;
  PreconditionerKind kind_;
  std::vector<double> inv_;  // 1/diag for Jacobi, pivots for MIC(0)
};

struct CgOptions {
  double rtol = 1e-12;
  int max_iterations = 0;  // 0: 10 * n + 100
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for A x = b, starting from the
/// contents of x. Stops when |r| <= rtol |b|.
CgResult pcg(const Stencil& a, const Preconditioner& m, std::span<const double> b, std::span<double> x,
             const CgOptions& opts = {});

}  // namespace pfreq
