#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wavekrylov/sparse.hpp"

namespace wavekrylov
{

struct StepperConfig
{
  double tau = 0.0;   // step size
  std::size_t L = 1;  // number of quadrature nodes / time steps
};

// Consecutive states (y_l, y_{l-1}) of the two-step recursion.
struct WavePair
{
  Vector y_curr;
  Vector y_prev;
};

// Initial pair for y_{-1} = y_0 = r.
inline WavePair StartPair(std::span<const double> r)
{
  return {Vector(r.begin(), r.end()), Vector(r.begin(), r.end())};
}

// y_{l+1} = -tau^2 M^{-1} S y_l + 2 y_l - y_{l-1}; returns (y_{l+1}, y_l).
WavePair verlet_step(const DiagInverse &minv, const CsrMatrix &S, const WavePair &state, double tau);

// Buffer-reusing form used by the solver: on return y_prev holds y_{l+1} and
// the caller swaps. work must have the pencil dimension.
void verlet_step_inplace(const DiagInverse &minv, const CsrMatrix &S, std::span<const double> y_curr,
                         std::span<double> y_prev, std::span<double> work, double tau);

// q_0 .. q_{L-1} of q_{l+1} = (2 - tau^2 w^2) q_l - q_{l-1}, q_{-1} = q_0 = 1.
std::vector<double> scalar_q(double omega, double tau, std::size_t L);

// q_l = cos((l + 1/2) theta) / cos(theta / 2) with sin(theta / 2) = tau w / 2.
// Requires 0 < tau w < 2; throws Error("closed form degenerate") otherwise.
double scalar_q_closed_form(double omega, double tau, std::size_t ell);

// Largest pencil frequency from power iteration on M^{-1/2} S M^{-1/2},
// inflated by kPowerIterationInflation.
inline constexpr double kPowerIterationInflation = 1.01;

struct MaxOmegaEstimate
{
  double omega = 0.0;
  std::size_t spmv_count = 0;
};

MaxOmegaEstimate estimate_max_omega_counted(const DiagInverse &minv, const CsrMatrix &S,
                                            std::size_t iters, std::uint64_t seed);
double estimate_max_omega(const DiagInverse &minv, const CsrMatrix &S, std::size_t iters,
                          std::uint64_t seed);

// tau = safety * 2 / omega_max.
double stable_tau(double omega_max, double safety = 0.95);

// Uniform(-1, 1) entries from a seeded 64-bit Mersenne twister. The mapping
// to doubles is spelled out so the stream is identical across standard
// libraries.
Vector random_vector(std::size_t n, std::uint64_t seed);

}  // namespace wavekrylov
