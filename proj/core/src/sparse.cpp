#include "wavekrylov/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavekrylov/error.hpp"

namespace wavekrylov
{

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                     std::vector<std::size_t> col_indices, Vector values)
  : n(n), row_offsets(std::move(row_offsets)), col_indices(std::move(col_indices)),
    values(std::move(values))
{
  if (this->row_offsets.size() != n + 1 || this->row_offsets.front() != 0 ||
      this->row_offsets.back() != this->values.size() ||
      this->col_indices.size() != this->values.size())
  {
    throw Error("invalid CSR layout: offset/array length mismatch");
  }
  for (std::size_t i = 0; i < n; i++)
  {
    const auto begin = this->row_offsets[i], end = this->row_offsets[i + 1];
    if (end < begin)
    {
      throw Error("invalid CSR layout: row offsets decrease at row " + std::to_string(i));
    }
    for (auto k = begin; k < end; k++)
    {
      if (this->col_indices[k] >= n || (k > begin && this->col_indices[k] <= this->col_indices[k - 1]))
      {
        throw Error("invalid CSR layout: column indices unsorted or out of range in row " +
                    std::to_string(i));
      }
    }
  }
}

CsrMatrix CsrMatrix::FromTriplets(std::span<const Triplet> entries, std::size_t n,
                                  bool keep_explicit_zeros)
{
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  for (const auto &t : sorted)
  {
    if (t.row >= n || t.col >= n)
    {
      std::ostringstream msg;
      msg << "triplet index (" << t.row << ", " << t.col << ") out of range for dimension " << n;
      throw Error(msg.str());
    }
  }
  // Stable so that duplicates are summed in input order.
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet &a, const Triplet &b)
                   { return a.row < b.row || (a.row == b.row && a.col < b.col); });

  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> cols;
  Vector vals;
  cols.reserve(sorted.size());
  vals.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size();)
  {
    const auto row = sorted[k].row, col = sorted[k].col;
    double sum = 0.0;
    for (; k < sorted.size() && sorted[k].row == row && sorted[k].col == col; k++)
    {
      sum += sorted[k].value;
    }
    if (sum == 0.0 && !keep_explicit_zeros)
    {
      continue;
    }
    cols.push_back(col);
    vals.push_back(sum);
    offsets[row + 1]++;
  }
  for (std::size_t i = 0; i < n; i++)
  {
    offsets[i + 1] += offsets[i];
  }
  return CsrMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::Identity(std::size_t n)
{
  return Diagonal(Vector(n, 1.0));
}

CsrMatrix CsrMatrix::Diagonal(std::span<const double> diag)
{
  const auto n = diag.size();
  std::vector<std::size_t> offsets(n + 1), cols(n);
  for (std::size_t i = 0; i < n; i++)
  {
    offsets[i + 1] = i + 1;
    cols[i] = i;
  }
  return CsrMatrix(n, std::move(offsets), std::move(cols), Vector(diag.begin(), diag.end()));
}

double CsrMatrix::At(std::size_t i, std::size_t j) const
{
  const auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
  const auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values[static_cast<std::size_t>(it - col_indices.begin())]
                                  : 0.0;
}

bool CsrMatrix::IsDiagonal() const
{
  for (std::size_t i = 0; i < n; i++)
  {
    for (auto k = row_offsets[i]; k < row_offsets[i + 1]; k++)
    {
      if (col_indices[k] != i)
      {
        return false;
      }
    }
  }
  return true;
}

Vector CsrMatrix::ToDense() const
{
  Vector dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; i++)
  {
    for (auto k = row_offsets[i]; k < row_offsets[i + 1]; k++)
    {
      dense[col_indices[k] * n + i] = values[k];
    }
  }
  return dense;
}

void CsrMatrix::Mult(std::span<const double> x, std::span<double> y) const
{
  if (x.size() != n || y.size() != n)
  {
    throw Error("spmv dimension mismatch: matrix is " + std::to_string(n) + ", vector is " +
                std::to_string(x.size()));
  }
  const double *val = values.data();
  const std::size_t *col = col_indices.data();
  for (std::size_t i = 0; i < n; i++)
  {
    double sum = 0.0;
    for (auto k = row_offsets[i]; k < row_offsets[i + 1]; k++)
    {
      sum += val[k] * x[col[k]];
    }
    y[i] = sum;
  }
}

DiagInverse::DiagInverse(Vector inv_values) : inv_values(std::move(inv_values))
{
  for (std::size_t i = 0; i < this->inv_values.size(); i++)
  {
    if (!std::isfinite(this->inv_values[i]) || !(this->inv_values[i] > 0.0))
    {
      throw Error("inverse mass entry " + std::to_string(i) + " is not finite and positive");
    }
  }
}

void DiagInverse::ApplyInPlace(std::span<double> x) const
{
  if (x.size() != inv_values.size())
  {
    throw Error("inverse mass dimension mismatch");
  }
  for (std::size_t i = 0; i < x.size(); i++)
  {
    x[i] *= inv_values[i];
  }
}

CsrMatrix csr_from_triplets(std::span<const Triplet> entries, std::size_t n,
                            bool keep_explicit_zeros)
{
  return CsrMatrix::FromTriplets(entries, n, keep_explicit_zeros);
}

Vector spmv(const CsrMatrix &A, std::span<const double> x)
{
  Vector y(x.size());
  A.Mult(x, y);
  return y;
}

bool check_symmetric(const CsrMatrix &A, double tol)
{
  const auto offsets = A.RowOffsets();
  const auto cols = A.ColIndices();
  const auto vals = A.Values();
  for (std::size_t i = 0; i < A.Size(); i++)
  {
    for (auto k = offsets[i]; k < offsets[i + 1]; k++)
    {
      if (std::abs(vals[k] - A.At(cols[k], i)) > tol)
      {
        return false;
      }
    }
  }
  return true;
}

DiagInverse diag_inverse(const CsrMatrix &M)
{
  const auto offsets = M.RowOffsets();
  const auto cols = M.ColIndices();
  const auto vals = M.Values();
  Vector inv(M.Size());
  for (std::size_t i = 0; i < M.Size(); i++)
  {
    double d = 0.0;
    for (auto k = offsets[i]; k < offsets[i + 1]; k++)
    {
      if (cols[k] != i)
      {
        throw Error("mass matrix not lumped: off-diagonal entry at (" + std::to_string(i) +
                    ", " + std::to_string(cols[k]) + ")");
      }
      d = vals[k];
    }
    if (!(d > 0.0))
    {
      throw Error("mass matrix not positive definite: diagonal entry " + std::to_string(i) +
                  " is " + std::to_string(d));
    }
    inv[i] = 1.0 / d;
  }
  return DiagInverse(std::move(inv));
}

double dot(std::span<const double> x, std::span<const double> y)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    sum += x[i] * y[i];
  }
  return sum;
}

double norm2(std::span<const double> x)
{
  return std::sqrt(dot(x, x));
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); i++)
  {
    y[i] += a * x[i];
  }
}

void scale(double a, std::span<double> x)
{
  for (auto &v : x)
  {
    v *= a;
  }
}

}  // namespace wavekrylov
