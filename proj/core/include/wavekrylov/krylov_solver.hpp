#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavekrylov/dense_eig.hpp"
#include "wavekrylov/filter.hpp"
#include "wavekrylov/model_problems.hpp"
#include "wavekrylov/sparse.hpp"

namespace wavekrylov
{

struct SolverConfig
{
  FilterSpec filter;
  std::size_t m_max = 40;            // Krylov dimension cap
  std::size_t n_accept_target = 1;   // stop once this many pairs are accepted
  double residual_tol = 1e-5;
  std::uint64_t seed = 0;            // starting vector and power iteration
  std::size_t reorth_passes = 2;     // classical Gram-Schmidt passes
  double breakdown_tol = 1e-12;      // relative to the pre-projection norm
  bool check_cfl = true;             // validate tau against a power-iteration estimate
  std::size_t power_iters = 100;

  void Validate() const;
};

// Orthonormal columns b_0 .. b_{m-1} of the filtered Krylov space.
class KrylovBasis
{
public:
  explicit KrylovBasis(std::size_t n) : n(n) {}

  std::size_t Size() const { return n; }
  std::size_t Dim() const { return columns.size(); }
  std::span<const double> Column(std::size_t k) const { return columns[k]; }

  // The caller guarantees v is unit length and orthogonal to the basis.
  void Append(Vector v);

  // B c for a coefficient vector of length Dim().
  Vector Lift(std::span<const double> coeffs) const;

  // max |B^T B - I|
  double OrthonormalityError() const;

private:
  std::size_t n;
  std::vector<Vector> columns;
};

// sum_{l=0}^{L-1} tau alpha(l tau) y_l(r), with y_{-1} = y_0 = r and exactly
// L - 1 sparse products. Throws Error("time stepping diverged") on non-finite
// output.
Vector apply_filtered_operator(const DiagInverse &minv, const CsrMatrix &S, const FilterSpec &spec,
                               std::span<const double> r);

struct Orthonormalized
{
  Vector vector;
  double norm_before;
};

struct Breakdown
{
  double norm_before;
  double norm_after;
};

// Classical Gram-Schmidt repeated reorth_passes times, then normalization.
// Breakdown when the projected norm drops below breakdown_tol * norm_before.
std::variant<Orthonormalized, Breakdown> orthonormalize_against(std::span<const double> r,
                                                                const KrylovBasis &basis,
                                                                std::size_t reorth_passes,
                                                                double breakdown_tol);

struct ProjectedPencil
{
  DenseSym stiffness;
  DenseSym mass;
};

// B^T S B and B^T M B from scratch.
ProjectedPencil project_pencil(const KrylovBasis &basis, const CsrMatrix &S, const CsrMatrix &M);

// Projection grown one column at a time. Keeps S b_j and M b_j so Ritz
// residuals need no further sparse products.
class IncrementalProjection
{
public:
  IncrementalProjection(const CsrMatrix &S, const CsrMatrix &M) : S(&S), M(&M) {}

  // Adds the row/column for the basis' last column. Call once per Append.
  void Extend(const KrylovBasis &basis);

  std::size_t Dim() const { return s_images.size(); }
  ProjectedPencil Projected() const;
  const std::vector<Vector> &StiffnessImages() const { return s_images; }
  const std::vector<Vector> &MassImages() const { return m_images; }

private:
  const CsrMatrix *S;
  const CsrMatrix *M;
  std::vector<Vector> s_images;
  std::vector<Vector> m_images;
  std::vector<std::vector<double>> s_rows;  // s_rows[j][i] = b_i^T S b_j, i <= j
  std::vector<std::vector<double>> m_rows;
};

struct RitzPair
{
  double omega = 0.0;       // sqrt(max(omega_sq, 0))
  double omega_sq = 0.0;
  double residual = 0.0;    // ||(S - omega_sq M) u||_2, ||u||_2 = 1
  double mu = 0.0;          // discrete filter at omega; informational only
  bool accepted = false;    // residual <= residual_tol
  std::size_t vector_id = 0;
};

struct RitzReport
{
  std::size_t step = 0;               // Krylov dimension at this step
  std::vector<RitzPair> pairs;        // ascending omega
  std::vector<Vector> vectors;        // lifted unit vectors; may be dropped in histories

  std::size_t AcceptedCount() const;
};

// Rayleigh-Ritz on the current basis, lifting and scoring every pair.
RitzReport ritz_step(const KrylovBasis &basis, const CsrMatrix &S, const CsrMatrix &M,
                     const SolverConfig &config);

struct SolveResult
{
  RitzReport final_report;
  std::vector<RitzReport> history;  // one per Krylov dimension, vectors dropped
  KrylovBasis basis{0};
  double omega_max_estimate = 0.0;  // 0 when the CFL check was skipped
  std::size_t spmv_count = 0;       // time stepping plus power iteration
  std::size_t filter_applications = 0;
  bool breakdown = false;
  bool target_reached = false;
  std::optional<std::string> warning;
  // Projected matrices after every step, kept only when requested.
  std::vector<ProjectedPencil> projections;
};

struct SolveOptions
{
  bool keep_projections = false;
};

// Builds the filtered Krylov space one vector at a time and runs ritz_step
// after every extension. Stops on the accepted-count target, on breakdown, or
// at m_max (with a warning, not an error).
SolveResult solve(const Pencil &pencil, const SolverConfig &config, SolveOptions options = {});

}  // namespace wavekrylov
