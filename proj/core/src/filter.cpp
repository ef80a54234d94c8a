#include "wavekrylov/filter.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "wavekrylov/error.hpp"
#include "wavekrylov/wave_stepper.hpp"

namespace wavekrylov
{

double weight_alpha(double t, double omega_min, double omega_max, double T)
{
  if (t < 0.0)
  {
    throw Error("weight_alpha requires t >= 0");
  }
  if (t == 0.0)
  {
    return 2.0 * (omega_max - omega_min) / std::numbers::pi;
  }
  if (t > T)
  {
    return 0.0;
  }
  return 4.0 / (std::numbers::pi * t) * std::sin(0.5 * t * (omega_max - omega_min)) *
         std::cos(0.5 * t * (omega_max + omega_min));
}

namespace
{

void ValidateFilter(double omega_min, double omega_max, double tau, std::size_t L)
{
  if (!(omega_min >= 0.0) || !(omega_min < omega_max))
  {
    throw Error("filter interval must satisfy 0 <= omega_min < omega_max");
  }
  if (!(tau > 0.0) || !std::isfinite(tau))
  {
    throw Error("filter step size tau must be positive");
  }
  if (L < 1)
  {
    throw Error("filter needs at least one time step");
  }
}

}  // namespace

FilterSpec::FilterSpec(double omega_min, double omega_max, double tau, std::size_t L)
  : omega_min(omega_min), omega_max(omega_max), tau(tau)
{
  ValidateFilter(omega_min, omega_max, tau, L);
  const double T = tau * static_cast<double>(L);
  weight = [omega_min, omega_max, T](double t) { return weight_alpha(t, omega_min, omega_max, T); };
  alpha_samples.resize(L);
  for (std::size_t l = 0; l < L; l++)
  {
    alpha_samples[l] = weight(tau * static_cast<double>(l));
  }
}

FilterSpec::FilterSpec(double omega_min, double omega_max, double tau, std::vector<double> samples)
  : omega_min(omega_min), omega_max(omega_max), tau(tau), alpha_samples(std::move(samples))
{
  ValidateFilter(omega_min, omega_max, tau, alpha_samples.size());
}

FilterSpec FilterSpec::FromWeight(double omega_min, double omega_max, double tau, std::size_t L,
                                  const std::function<double(double)> &alpha)
{
  std::vector<double> samples(L);
  for (std::size_t l = 0; l < L; l++)
  {
    samples[l] = alpha(tau * static_cast<double>(l));
  }
  FilterSpec spec(omega_min, omega_max, tau, std::move(samples));
  spec.weight = alpha;
  return spec;
}

double continuous_filter(double s, const FilterSpec &spec, std::size_t quad_points)
{
  if (quad_points < 10)
  {
    throw Error("continuous_filter requires at least 10 quadrature points");
  }
  // Simpson needs an even number of panels.
  const std::size_t panels = (quad_points % 2 == 0) ? quad_points : quad_points + 1;
  if (!spec.Weight())
  {
    throw Error("continuous_filter needs a filter built from a weight function");
  }
  const double T = spec.EndTime();
  const double h = T / static_cast<double>(panels);
  const auto f = [&](double t) { return spec.Weight()(t) * std::cos(t * s); };
  double sum = f(0.0) + f(T);
  for (std::size_t k = 1; k < panels; k++)
  {
    sum += (k % 2 == 1 ? 4.0 : 2.0) * f(h * static_cast<double>(k));
  }
  return sum * h / 3.0;
}

double discrete_filter(double omega, const FilterSpec &spec)
{
  if (omega < 0.0)
  {
    throw Error("discrete_filter requires omega >= 0");
  }
  const auto alpha = spec.AlphaSamples();
  const auto q = scalar_q(omega, spec.Tau(), alpha.size());
  double sum = 0.0;
  for (std::size_t l = 0; l < alpha.size(); l++)
  {
    sum += spec.Tau() * alpha[l] * q[l];
  }
  return sum;
}

std::vector<FilterPoint> filter_curve(const FilterSpec &spec, std::span<const double> omegas)
{
  if (omegas.empty())
  {
    throw Error("filter_curve needs at least one omega");
  }
  std::vector<FilterPoint> curve;
  curve.reserve(omegas.size());
  for (double w : omegas)
  {
    curve.push_back({w, discrete_filter(w, spec)});
  }
  return curve;
}

void write_filter_csv(std::ostream &out, std::span<const FilterPoint> curve)
{
  out << "omega,beta_tilde\n";
  char buf[64];
  for (const auto &p : curve)
  {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.omega, p.beta_tilde);
    out << buf;
  }
}

}  // namespace wavekrylov
