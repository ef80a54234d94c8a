#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavekrylov
{

using Vector = std::vector<double>;

struct Triplet
{
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix. Square, real, double precision. Immutable once
// built; construct through FromTriplets or the validating array constructor.
class CsrMatrix
{
public:
  CsrMatrix() = default;

  // Takes ownership of raw CSR arrays. Throws Error if the layout is invalid
  // (offsets not monotone, columns unsorted or out of range).
  CsrMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
            std::vector<std::size_t> col_indices, Vector values);

  // Duplicates are summed. Entries that sum to exactly zero are dropped unless
  // keep_explicit_zeros is set.
  static CsrMatrix FromTriplets(std::span<const Triplet> entries, std::size_t n,
                                bool keep_explicit_zeros = false);

  static CsrMatrix Identity(std::size_t n);
  static CsrMatrix Diagonal(std::span<const double> diag);

  std::size_t Size() const { return n; }
  std::size_t NonZeros() const { return values.size(); }

  std::span<const std::size_t> RowOffsets() const { return row_offsets; }
  std::span<const std::size_t> ColIndices() const { return col_indices; }
  std::span<const double> Values() const { return values; }

  // Stored value at (i, j), zero if the position is not stored.
  double At(std::size_t i, std::size_t j) const;

  bool IsDiagonal() const;

  // Column-major dense copy, n*n entries.
  Vector ToDense() const;

  // y = A x. Row-wise left-to-right summation, bit-reproducible.
  void Mult(std::span<const double> x, std::span<double> y) const;

  friend bool operator==(const CsrMatrix &, const CsrMatrix &) = default;

private:
  std::size_t n = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> col_indices;
  Vector values;
};

// Inverse of a lumped (diagonal) mass matrix.
class DiagInverse
{
public:
  DiagInverse() = default;
  explicit DiagInverse(Vector inv_values);

  std::size_t Size() const { return inv_values.size(); }
  std::span<const double> Values() const { return inv_values; }

  // x <- M^{-1} x
  void ApplyInPlace(std::span<double> x) const;

private:
  Vector inv_values;
};

CsrMatrix csr_from_triplets(std::span<const Triplet> entries, std::size_t n,
                            bool keep_explicit_zeros = false);

Vector spmv(const CsrMatrix &A, std::span<const double> x);

// True iff |A(i,j) - A(j,i)| <= tol over all stored positions.
bool check_symmetric(const CsrMatrix &A, double tol);

DiagInverse diag_inverse(const CsrMatrix &M);

// Small dense-vector helpers shared across modules.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);

}  // namespace wavekrylov
