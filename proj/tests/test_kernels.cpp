#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "pfreq/geometry.hpp"
#include "pfreq/kernels.hpp"
#include "pfreq/pcg.hpp"
#include "pfreq/solver.hpp"

using namespace pfreq;
using doctest::Approx;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Large enough to span several reduction blocks.
const GridDomain& hexagon_domain() {
  static const GridDomain d(regular_polygon(6, 1.0), 1.0 / 96.0);
  return d;
}

struct ThreadGuard {
  int saved = kernels::max_threads();
  ~ThreadGuard() { kernels::set_threads(saved); }
};

}  // namespace

TEST_CASE("stencil is symmetric with a dominant diagonal") {
  const Stencil& a = hexagon_domain().stencil();
  REQUIRE(a.size() > 3 * kernels::kReductionBlock);
  for (std::size_t i = 0; i < a.size(); ++i) {
    int links = 0;
    for (int s = 0; s < 4; ++s) {
      const std::int32_t j = a.nbr[i][s];
      if (j < 0) continue;
      ++links;
      const int back = s ^ 1;  // east <-> west, north <-> south
      CHECK(a.nbr[static_cast<std::size_t>(j)][back] == static_cast<std::int32_t>(i));
    }
    CHECK(a.diag[i] >= 4.0 - 1e-12);
    if (links == 4) CHECK(a.diag[i] == 4.0);
  }
}

TEST_CASE("parallel kernels match the serial reference") {
  ThreadGuard guard;
  const Stencil& a = hexagon_domain().stencil();
  const std::size_t n = a.size();
  const std::vector<double> x = random_vector(n, 1), y0 = random_vector(n, 2);

  std::vector<double> ys(n), yp(n);
  kernels::serial::apply(a, x, ys);
  kernels::parallel::apply(a, x, yp);
  CHECK(ys == yp);

  CHECK(kernels::parallel::dot(x, y0) == Approx(kernels::serial::dot(x, y0)).epsilon(1e-12));
  CHECK(kernels::parallel::sum_abs_pow(x, 1.5) == Approx(kernels::serial::sum_abs_pow(x, 1.5)).epsilon(1e-12));

  std::vector<double> as = y0, ap = y0;
  kernels::serial::axpy(0.3, x, as);
  kernels::parallel::axpy(0.3, x, ap);
  CHECK(as == ap);
  kernels::serial::xpby(x, -1.7, as);
  kernels::parallel::xpby(x, -1.7, ap);
  CHECK(as == ap);
  kernels::serial::scale(2.5, as);
  kernels::parallel::scale(2.5, ap);
  CHECK(as == ap);

  std::vector<double> ps(n), pp(n);
  kernels::serial::positive_pow(x, 2.5, ps);
  kernels::parallel::positive_pow(x, 2.5, pp);
  CHECK(ps == pp);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] <= 0.0) CHECK(ps[i] == 0.0);
  }
}

TEST_CASE("reductions do not depend on the thread count") {
  ThreadGuard guard;
  const std::vector<double> x = random_vector(50000, 3), y = random_vector(50000, 4);
  kernels::set_threads(1);
  const double d1 = kernels::parallel::dot(x, y);
  const double s1 = kernels::parallel::sum_abs_pow(x, 1.3);
  for (int t : {2, 3, 4, 7}) {
    kernels::set_threads(t);
    CHECK(kernels::parallel::dot(x, y) == d1);
    CHECK(kernels::parallel::sum_abs_pow(x, 1.3) == s1);
  }
}

TEST_CASE("PCG solves with every preconditioner") {
  const Stencil& a = hexagon_domain().stencil();
  const std::size_t n = a.size();
  const std::vector<double> b = random_vector(n, 5);
  int iters[3] = {0, 0, 0};
  int k = 0;
  for (PreconditionerKind kind : {PreconditionerKind::kNone, PreconditionerKind::kJacobi, PreconditionerKind::kMic}) {
    const Preconditioner m(a, kind);
    CHECK(m.kind() == kind);
    std::vector<double> x(n, 0.0);
    const CgResult r = pcg(a, m, b, x, {1e-10, 0});
    CHECK(r.converged);
    std::vector<double> ax(n);
    kernels::serial::apply(a, x, ax);
    double res = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res += (ax[i] - b[i]) * (ax[i] - b[i]);
      nb += b[i] * b[i];
    }
    CHECK(std::sqrt(res / nb) < 1e-9);
    iters[k++] = r.iterations;
  }
  CHECK(iters[2] < iters[0]);
}

TEST_CASE("PCG reports non-convergence under a tight iteration cap") {
  const Stencil& a = hexagon_domain().stencil();
  const std::vector<double> b = random_vector(a.size(), 6);
  std::vector<double> x(a.size(), 0.0);
  const CgResult r = pcg(a, Preconditioner(a, PreconditionerKind::kNone), b, x, {1e-12, 3});
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.relative_residual > 1e-12);
}
