#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavekrylov
{

// Dense square matrix in column-major order.
struct DenseMatrix
{
  std::size_t n = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n(n), values(n * n, 0.0) {}
  DenseMatrix(std::size_t n, std::vector<double> values);

  static DenseMatrix Identity(std::size_t n);

  double &operator()(std::size_t i, std::size_t j) { return values[j * n + i]; }
  double operator()(std::size_t i, std::size_t j) const { return values[j * n + i]; }

  std::span<double> Column(std::size_t j) { return {values.data() + j * n, n}; }
  std::span<const double> Column(std::size_t j) const { return {values.data() + j * n, n}; }

  double MaxAbs() const;
};

// Symmetric dense matrix. The constructor replaces its input with (A + A^T)/2,
// so the stored array is symmetric bit for bit.
class DenseSym
{
public:
  DenseSym() = default;
  explicit DenseSym(DenseMatrix a);
  DenseSym(std::size_t n, std::vector<double> column_major);

  std::size_t Size() const { return a.n; }
  double operator()(std::size_t i, std::size_t j) const { return a(i, j); }
  const DenseMatrix &Matrix() const { return a; }
  double MaxAbs() const { return a.MaxAbs(); }

private:
  DenseMatrix a;
};

// Lower-triangular Cholesky factor; entries above the diagonal are zero.
struct CholeskyFactor
{
  DenseMatrix lower;
};

struct SymEigResult
{
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix eigenvectors;         // column j pairs with eigenvalues[j]
};

struct GeneralizedEigResult
{
  std::vector<double> omega_sq;  // ascending
  DenseMatrix vectors;           // M-orthonormal columns
};

// Throws Error("matrix not positive definite ...") naming the failing pivot.
CholeskyFactor cholesky(const DenseSym &A);

// Householder tridiagonalization followed by implicit QL with Wilkinson-type
// shifts. Throws Error on non-convergence.
SymEigResult sym_eig(const DenseSym &A);

// S v = w2 M v via Cholesky reduction M = L L^T.
GeneralizedEigResult generalized_sym_eig(const DenseSym &S, const DenseSym &M);

}  // namespace wavekrylov
