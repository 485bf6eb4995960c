#include "pfreq/pcg.hpp"

#include <cmath>

namespace pfreq {

namespace k = kernels::parallel;

Preconditioner::Preconditioner(const Stencil& a, PreconditionerKind kind) : a_(&a), kind_(kind) {
  const std::size_t n = a.size();
  if (kind_ == PreconditionerKind::kJacobi) {
    inv_.resize(n);
    for (std::size_t i = 0; i < n; ++i) inv_[i] = 1.0 / a.diag[i];
  } else if (kind_ == PreconditionerKind::kMic) {
    // Modified incomplete Cholesky, 5-point pattern. Off-diagonal couplings
    // are all -1, so the squared couplings drop out of the recurrence.
    constexpr double tau = 0.97;
    constexpr double sigma = 0.25;
    inv_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double e = a.diag[i];
      const auto w = a.nbr[i][Stencil::kWest];
      const auto s = a.nbr[i][Stencil::kSouth];
      if (w >= 0) {
        const double pw = inv_[static_cast<std::size_t>(w)];
        const double fill = a.nbr[static_cast<std::size_t>(w)][Stencil::kNorth] >= 0 ? 1.0 : 0.0;
        e -= pw * pw * (1.0 + tau * fill);
      }
      if (s >= 0) {
        const double ps = inv_[static_cast<std::size_t>(s)];
        const double fill = a.nbr[static_cast<std::size_t>(s)][Stencil::kEast] >= 0 ? 1.0 : 0.0;
        e -= ps * ps * (1.0 + tau * fill);
      }
      if (e < sigma * a.diag[i]) e = a.diag[i];
      inv_[i] = 1.0 / std::sqrt(e);
    }
  }
}

void Preconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = r.size();
  switch (kind_) {
    case PreconditionerKind::kNone:
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i];
      return;
    case PreconditionerKind::kJacobi:
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_[i];
      return;
    case PreconditionerKind::kMic:
      break;
  }
  const Stencil& a = *a_;
  // Forward: (D + L) D^{-1/2}-scaled lower solve.
  for (std::size_t i = 0; i < n; ++i) {
    double t = r[i];
    const auto w = a.nbr[i][Stencil::kWest];
    const auto s = a.nbr[i][Stencil::kSouth];
    if (w >= 0) t += inv_[static_cast<std::size_t>(w)] * z[static_cast<std::size_t>(w)];
    if (s >= 0) t += inv_[static_cast<std::size_t>(s)] * z[static_cast<std::size_t>(s)];
    z[i] = t * inv_[i];
  }
  // Backward.
  for (std::size_t i = n; i-- > 0;) {
    double t = z[i];
    const auto e = a.nbr[i][Stencil::kEast];
    const auto nn = a.nbr[i][Stencil::kNorth];
    double up = 0.0;
    if (e >= 0) up += z[static_cast<std::size_t>(e)];
    if (nn >= 0) up += z[static_cast<std::size_t>(nn)];
    t += inv_[i] * up;
    z[i] = t * inv_[i];
  }
}

CgResult pcg(const Stencil& a, const Preconditioner& m, std::span<const double> b, std::span<double> x,
             const CgOptions& opts) {
  const std::size_t n = a.size();
  CgResult res;
  const double bnorm = std::sqrt(k::dot(b, b));
  if (bnorm == 0.0) {
    for (double& v : x) v = 0.0;
    res.converged = true;
    return res;
  }
  const int max_it = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(10 * n + 100);

  std::vector<double> r(n), z(n), p(n), ap(n);
  k::apply(a, x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double rnorm = std::sqrt(k::dot(r, r));
  if (rnorm <= opts.rtol * bnorm) {
    res.relative_residual = rnorm / bnorm;
    res.converged = true;
    return res;
  }
  m.apply(r, z);
  p = z;
  double rz = k::dot(r, z);
  for (int it = 1; it <= max_it; ++it) {
    k::apply(a, p, ap);
    const double alpha = rz / k::dot(p, ap);
    k::axpy(alpha, p, x);
    k::axpy(-alpha, ap, r);
    rnorm = std::sqrt(k::dot(r, r));
    res.iterations = it;
    if (rnorm <= opts.rtol * bnorm) {
      res.converged = true;
      break;
    }
    m.apply(r, z);
    const double rz_new = k::dot(r, z);
    k::xpby(z, rz_new / rz, p);
    rz = rz_new;
  }
  res.relative_residual = rnorm / bnorm;
  return res;
}

}  // namespace pfreq
