#include "pfreq/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pfreq::kernels {

namespace serial {

void apply(const Stencil& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    double v = a.diag[i] * x[i];
    for (std::int32_t j : a.nbr[i]) {
      if (j >= 0) v -= x[static_cast<std::size_t>(j)];
    }
    y[i] = v;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

double sum_abs_pow(std::span<const double> u, double q) {
  double s = 0.0;
  for (double v : u) s += std::pow(std::abs(v), q);
  return s;
}

void positive_pow(std::span<const double> u, double q, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] > 0.0 ? std::pow(u[i], q - 1.0) : 0.0;
}

}  // namespace serial

namespace parallel {

namespace {

// Sum of f(i) over [0, n): per-block partial sums computed concurrently, then
// added in block order. The block layout is fixed, so the result is bitwise
// identical for any thread count.
template <class F>
double blocked_sum(std::size_t n, F&& f) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

void apply(const Stencil& a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  const double* xp = x.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& nb = a.nbr[static_cast<std::size_t>(i)];
    double v = a.diag[static_cast<std::size_t>(i)] * xp[i];
    if (nb[0] >= 0) v -= xp[nb[0]];
    if (nb[1] >= 0) v -= xp[nb[1]];
    if (nb[2] >= 0) v -= xp[nb[2]];
    if (nb[3] >= 0) v -= xp[nb[3]];
    y[static_cast<std::size_t>(i)] = v;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const double* ap = a.data();
  const double* bp = b.data();
  return blocked_sum(a.size(), [=](std::size_t i) { return ap[i] * bp[i]; });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + beta * y[static_cast<std::size_t>(i)];
  }
}

void scale(double alpha, std::span<double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] *= alpha;
}

double sum_abs_pow(std::span<const double> u, double q) {
  const double* up = u.data();
  if (q == 2.0) return blocked_sum(u.size(), [=](std::size_t i) { return up[i] * up[i]; });
  if (q == 1.0) return blocked_sum(u.size(), [=](std::size_t i) { return std::abs(up[i]); });
  return blocked_sum(u.size(), [=](std::size_t i) { return std::pow(std::abs(up[i]), q); });
}

void positive_pow(std::span<const double> u, double q, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double v = u[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = v > 0.0 ? std::pow(v, q - 1.0) : 0.0;
  }
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace pfreq::kernels
