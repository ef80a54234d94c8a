#include "wavekrylov/model_problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavekrylov/error.hpp"

namespace wavekrylov
{

namespace
{

struct Interval1D
{
  std::vector<Triplet> stiffness;
  std::vector<double> lumped_mass;
  std::vector<double> omegas;
};

Interval1D BuildInterval(std::size_t n_cells, double length)
{
  if (n_cells < 2)
  {
    throw Error("laplacian_1d_neumann requires n_cells >= 2, got " + std::to_string(n_cells));
  }
  if (!(length > 0.0))
  {
    throw Error("laplacian_1d_neumann requires length > 0");
  }
  const double h = length / static_cast<double>(n_cells);
  const std::size_t n = n_cells + 1;
  Interval1D out;
  out.lumped_mass.assign(n, h);
  out.lumped_mass.front() = out.lumped_mass.back() = 0.5 * h;

  // Element-by-element assembly of the P1 stiffness; duplicates summed.
  const double k = 1.0 / h;
  for (std::size_t e = 0; e < n_cells; e++)
  {
    out.stiffness.push_back({e, e, k});
    out.stiffness.push_back({e, e + 1, -k});
    out.stiffness.push_back({e + 1, e, -k});
    out.stiffness.push_back({e + 1, e + 1, k});
  }

  out.omegas.resize(n);
  for (std::size_t m = 0; m < n; m++)
  {
    out.omegas[m] = (2.0 / h) * std::sin(static_cast<double>(m) * std::numbers::pi /
                                         (2.0 * static_cast<double>(n_cells)));
  }
  return out;
}

}  // namespace

Pencil laplacian_1d_neumann(std::size_t n_cells, double length)
{
  auto line = BuildInterval(n_cells, length);
  const auto n = n_cells + 1;
  Pencil p;
  p.stiffness = CsrMatrix::FromTriplets(line.stiffness, n);
  p.mass = CsrMatrix::Diagonal(line.lumped_mass);
  p.label = "laplacian_1d_neumann(n_cells=" + std::to_string(n_cells) +
            ", length=" + std::to_string(length) + ")";
  p.analytic_spectrum = std::move(line.omegas);
  return p;
}

Pencil laplacian_2d_rect(std::size_t nx, std::size_t ny, double lx, double ly, std::size_t max_dim)
{
  if (nx < 2 || ny < 2)
  {
    throw Error("laplacian_2d_rect requires nx, ny >= 2");
  }
  if ((nx + 1) > max_dim / (ny + 1))
  {
    throw Error("laplacian_2d_rect: grid " + std::to_string(nx + 1) + " x " +
                std::to_string(ny + 1) + " exceeds dimension cap " + std::to_string(max_dim));
  }
  const auto x = BuildInterval(nx, lx);
  const auto y = BuildInterval(ny, ly);
  const std::size_t mx = nx + 1, my = ny + 1, n = mx * my;
  const auto index = [my](std::size_t i, std::size_t j) { return i * my + j; };

  // S = Sx (x) My + Mx (x) Sy, M = Mx (x) My.
  std::vector<Triplet> s;
  s.reserve(2 * (x.stiffness.size() * my + y.stiffness.size() * mx));
  for (const auto &t : x.stiffness)
  {
    for (std::size_t j = 0; j < my; j++)
    {
      s.push_back({index(t.row, j), index(t.col, j), t.value * y.lumped_mass[j]});
    }
  }
  for (std::size_t i = 0; i < mx; i++)
  {
    for (const auto &t : y.stiffness)
    {
      s.push_back({index(i, t.row), index(i, t.col), x.lumped_mass[i] * t.value});
    }
  }
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < mx; i++)
  {
    for (std::size_t j = 0; j < my; j++)
    {
      mass[index(i, j)] = x.lumped_mass[i] * y.lumped_mass[j];
    }
  }

  std::vector<double> omegas;
  omegas.reserve(n);
  for (double wx : x.omegas)
  {
    for (double wy : y.omegas)
    {
      omegas.push_back(std::sqrt(wx * wx + wy * wy));
    }
  }
  std::sort(omegas.begin(), omegas.end());

  Pencil p;
  p.stiffness = CsrMatrix::FromTriplets(s, n);
  p.mass = CsrMatrix::Diagonal(mass);
  p.label = "laplacian_2d_rect(nx=" + std::to_string(nx) + ", ny=" + std::to_string(ny) +
            ", lx=" + std::to_string(lx) + ", ly=" + std::to_string(ly) + ")";
  p.analytic_spectrum = std::move(omegas);
  return p;
}

void validate_pencil(const Pencil &pencil)
{
  if (pencil.mass.Size() != pencil.stiffness.Size())
  {
    throw Error("pencil dimension mismatch: S is " + std::to_string(pencil.stiffness.Size()) +
                ", M is " + std::to_string(pencil.mass.Size()));
  }
  if (!check_symmetric(pencil.stiffness, 1e-12))
  {
    throw Error("stiffness matrix is not symmetric within 1e-12");
  }
  // Throws with the offending entry on failure.
  (void)diag_inverse(pencil.mass);
}

std::vector<double> ReferenceEigs::Omegas() const
{
  std::vector<double> w(omega_sq.size());
  std::transform(omega_sq.begin(), omega_sq.end(), w.begin(),
                 [](double w2) { return std::sqrt(std::max(w2, 0.0)); });
  return w;
}

ReferenceEigs dense_reference_eigs(const Pencil &pencil, std::size_t cap)
{
  const auto n = pencil.Size();
  if (n > cap)
  {
    throw Error("dense reference solve: dimension " + std::to_string(n) + " exceeds cap " +
                std::to_string(cap));
  }
  auto eig = generalized_sym_eig(DenseSym(n, pencil.stiffness.ToDense()),
                                 DenseSym(n, pencil.mass.ToDense()));
  for (auto &w2 : eig.omega_sq)
  {
    if (w2 < 0.0 && w2 >= -1e-10)
    {
      w2 = 0.0;
    }
  }
  return {std::move(eig.omega_sq), std::move(eig.vectors)};
}

}  // namespace wavekrylov
