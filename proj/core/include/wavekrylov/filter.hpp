#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace wavekrylov
{

// Band-pass weight for the target interval [omega_min, omega_max]:
//   t = 0       : 2 (omega_max - omega_min) / pi
//   0 < t <= T  : 4/(pi t) sin(t (omega_max - omega_min)/2) cos(t (omega_max + omega_min)/2)
//   t > T       : 0
double weight_alpha(double t, double omega_min, double omega_max, double T);

// Target interval, step size, step count and the L weight samples alpha(l tau).
class FilterSpec
{
public:
  // Samples weight_alpha at t = l tau, l = 0..L-1, with T = L tau.
  FilterSpec(double omega_min, double omega_max, double tau, std::size_t L);

  // Custom weight: samples[l] is used as alpha(l tau). Validates interval,
  // tau and L but not the weight shape. Such a spec has no continuous weight,
  // so continuous_filter rejects it.
  FilterSpec(double omega_min, double omega_max, double tau, std::vector<double> samples);

  // Weight from an arbitrary function of t, sampled at l tau.
  static FilterSpec FromWeight(double omega_min, double omega_max, double tau, std::size_t L,
                               const std::function<double(double)> &alpha);

  double OmegaMin() const { return omega_min; }
  double OmegaMax() const { return omega_max; }
  double Tau() const { return tau; }
  std::size_t Steps() const { return alpha_samples.size(); }
  double EndTime() const { return tau * static_cast<double>(alpha_samples.size()); }
  std::span<const double> AlphaSamples() const { return alpha_samples; }

  // alpha(t) on [0, T]; empty for sample-only specs.
  const std::function<double(double)> &Weight() const { return weight; }

private:
  double omega_min;
  double omega_max;
  double tau;
  std::vector<double> alpha_samples;
  std::function<double(double)> weight;
};

// Composite Simpson rule for int_0^T alpha(t) cos(t s) dt. Reference only;
// the solver never calls it.
double continuous_filter(double s, const FilterSpec &spec, std::size_t quad_points);

// sum_{l=0}^{L-1} tau alpha(l tau) q_l(omega).
double discrete_filter(double omega, const FilterSpec &spec);

struct FilterPoint
{
  double omega;
  double beta_tilde;
};

std::vector<FilterPoint> filter_curve(const FilterSpec &spec, std::span<const double> omegas);

// CSV with header "omega,beta_tilde", 17 significant digits.
void write_filter_csv(std::ostream &out, std::span<const FilterPoint> curve);

}  // namespace wavekrylov
