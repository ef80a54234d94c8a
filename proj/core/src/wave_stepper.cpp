#include "wavekrylov/wave_stepper.hpp"

#include <cmath>
#include <random>

#include "wavekrylov/error.hpp"

namespace wavekrylov
{

void verlet_step_inplace(const DiagInverse &minv, const CsrMatrix &S, std::span<const double> y_curr,
                         std::span<double> y_prev, std::span<double> work, double tau)
{
  const auto n = S.Size();
  if (y_curr.size() != n || y_prev.size() != n || work.size() != n || minv.Size() != n)
  {
    throw Error("verlet_step dimension mismatch");
  }
  S.Mult(y_curr, work);
  const auto inv = minv.Values();
  const double tau2 = tau * tau;
  for (std::size_t i = 0; i < n; i++)
  {
    y_prev[i] = -tau2 * (inv[i] * work[i]) + 2.0 * y_curr[i] - y_prev[i];
  }
}

WavePair verlet_step(const DiagInverse &minv, const CsrMatrix &S, const WavePair &state, double tau)
{
  if (state.y_curr.size() != state.y_prev.size())
  {
    throw Error("verlet_step: state vectors differ in length");
  }
  WavePair next{state.y_prev, state.y_curr};
  Vector work(S.Size());
  verlet_step_inplace(minv, S, state.y_curr, next.y_curr, work, tau);
  return next;
}

std::vector<double> scalar_q(double omega, double tau, std::size_t L)
{
  // Extended range keeps unstable runs finite for longer; in double the
  // growth overflows to inf - inf = nan after a few thousand steps.
  std::vector<double> q(L);
  const long double factor = 2.0L - static_cast<long double>(tau) * tau * omega * omega;
  long double prev = 1.0L, curr = 1.0L;
  for (std::size_t l = 0; l < L; l++)
  {
    q[l] = static_cast<double>(curr);
    const long double next = factor * curr - prev;
    prev = curr;
    curr = next;
  }
  return q;
}

double scalar_q_closed_form(double omega, double tau, std::size_t ell)
{
  const double tw = tau * omega;
  if (!(tw > 0.0) || !(tw < 2.0))
  {
    throw Error("closed form degenerate: requires 0 < tau*omega < 2, got " + std::to_string(tw));
  }
  // cos(theta) = 1 - tau^2 w^2 / 2; the half-angle form avoids cancellation
  // for small tau w.
  const double half = std::asin(0.5 * tw);
  const double theta = 2.0 * half;
  return std::cos((static_cast<double>(ell) + 0.5) * theta) / std::cos(half);
}

Vector random_vector(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  Vector r(n);
  for (auto &v : r)
  {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
    v = 2.0 * u - 1.0;
  }
  return r;
}

MaxOmegaEstimate estimate_max_omega_counted(const DiagInverse &minv, const CsrMatrix &S,
                                            std::size_t iters, std::uint64_t seed)
{
  if (iters < 1)
  {
    throw Error("estimate_max_omega requires iters >= 1");
  }
  const auto n = S.Size();
  if (minv.Size() != n)
  {
    throw Error("estimate_max_omega dimension mismatch");
  }
  Vector inv_sqrt(n);
  for (std::size_t i = 0; i < n; i++)
  {
    inv_sqrt[i] = std::sqrt(minv.Values()[i]);
  }
  MaxOmegaEstimate result;
  Vector scaled(n), image(n);
  // y = D S D x with D = M^{-1/2}.
  const auto apply = [&](std::span<const double> x, std::span<double> y)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      scaled[i] = inv_sqrt[i] * x[i];
    }
    S.Mult(scaled, y);
    for (std::size_t i = 0; i < n; i++)
    {
      y[i] *= inv_sqrt[i];
    }
    result.spmv_count++;
  };

  constexpr int max_attempts = 6;
  for (int attempt = 0; attempt < max_attempts; attempt++)
  {
    Vector x = random_vector(n, seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
    double nx = norm2(x);
    if (nx == 0.0)
    {
      continue;
    }
    scale(1.0 / nx, x);
    double rayleigh = 0.0;
    bool collapsed = false;
    for (std::size_t it = 0; it < iters; it++)
    {
      apply(x, image);
      rayleigh = dot(x, image);
      const double ny = norm2(image);
      if (!(ny > 0.0) || !std::isfinite(ny))
      {
        collapsed = true;
        break;
      }
      for (std::size_t i = 0; i < n; i++)
      {
        x[i] = image[i] / ny;
      }
    }
    if (collapsed)
    {
      continue;
    }
    result.omega = std::sqrt(std::max(rayleigh, 0.0)) * kPowerIterationInflation;
    return result;
  }
  throw Error("estimate_max_omega: power iteration collapsed to the zero vector after retries");
}

double estimate_max_omega(const DiagInverse &minv, const CsrMatrix &S, std::size_t iters,
                          std::uint64_t seed)
{
  return estimate_max_omega_counted(minv, S, iters, seed).omega;
}

double stable_tau(double omega_max, double safety)
{
  if (!(omega_max > 0.0))
  {
    throw Error("stable_tau requires omega_max > 0");
  }
  if (!(safety > 0.0 && safety < 1.0))
  {
    throw Error("stable_tau requires 0 < safety < 1");
  }
  return safety * 2.0 / omega_max;
}

}  // namespace wavekrylov
