#pragma once

// Grid kernels used by the 2D solver. `parallel` is the production path
// (OpenMP, reductions over fixed-size blocks so results do not depend on the
// thread count); `serial` is the straightforward reference the tests and the
// benchmark compare against.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace pfreq {

/// Symmetric 5-point energy operator on the interior nodes of a grid domain:
///   (A u)_i = diag_i * u_i - sum over interior neighbours j of u_j.
/// Neighbour slots are ordered east, west, north, south; -1 marks a node
/// outside the domain.
struct Stencil {
  static constexpr int kEast = 0, kWest = 1, kNorth = 2, kSouth = 3;

  std::vector<double> diag;
  std::vector<std::array<std::int32_t, 4>> nbr;

  std::size_t size() const { return diag.size(); }
};

namespace kernels {

inline constexpr std::size_t kReductionBlock = 4096;

namespace serial {
void apply(const Stencil& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void scale(double alpha, std::span<double> x);
/// sum_i |u_i|^q
double sum_abs_pow(std::span<const double> u, double q);
/// out_i = u_i^{q-1} for u_i > 0, else 0
void positive_pow(std::span<const double> u, double q, std::span<double> out);
}  // namespace serial

namespace parallel {
void apply(const Stencil& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void scale(double alpha, std::span<double> x);
double sum_abs_pow(std::span<const double> u, double q);
void positive_pow(std::span<const double> u, double q, std::span<double> out);
}  // namespace parallel

/// Threads available to the parallel kernels (1 without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace kernels
}  // namespace pfreq
