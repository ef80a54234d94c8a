#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wavekrylov/dense_eig.hpp"
#include "wavekrylov/sparse.hpp"

namespace wavekrylov
{

// Generalized eigenproblem S v = w^2 M v with lumped (diagonal) M.
struct Pencil
{
  CsrMatrix stiffness;
  CsrMatrix mass;
  std::string label;
  // Sorted resonances w (not w^2) when known in closed form.
  std::optional<std::vector<double>> analytic_spectrum;

  std::size_t Size() const { return stiffness.Size(); }
};

inline constexpr std::size_t kDefaultDenseCap = 2000;
inline constexpr std::size_t kDefaultGridCap = 10'000'000;

// Lumped P1 Neumann Laplacian on [0, length] with n_cells uniform cells.
Pencil laplacian_1d_neumann(std::size_t n_cells, double length);

// Kronecker sum of two 1D pencils on [0,lx] x [0,ly]. Node (i, j) has global
// index i * (ny + 1) + j.
Pencil laplacian_2d_rect(std::size_t nx, std::size_t ny, double lx, double ly,
                         std::size_t max_dim = kDefaultGridCap);

// Throws Error if S is not symmetric or M is not diagonal-positive.
void validate_pencil(const Pencil &pencil);

// Matrix Market coordinate real files, symmetric or general storage.
Pencil load_matrix_market(const std::filesystem::path &path_S, const std::filesystem::path &path_M);
void save_matrix_market(const Pencil &pencil, const std::filesystem::path &path_S,
                        const std::filesystem::path &path_M);

// Single-matrix variants used by the pencil routines.
CsrMatrix read_matrix_market(const std::filesystem::path &path);
void write_matrix_market(const CsrMatrix &A, const std::filesystem::path &path);

struct ReferenceEigs
{
  std::vector<double> omega_sq;  // ascending, tiny negatives clamped to 0
  DenseMatrix vectors;           // M-orthonormal columns

  std::vector<double> Omegas() const;
};

// Full dense solve of the pencil. Throws Error if Size() > cap.
ReferenceEigs dense_reference_eigs(const Pencil &pencil, std::size_t cap = kDefaultDenseCap);

}  // namespace wavekrylov
