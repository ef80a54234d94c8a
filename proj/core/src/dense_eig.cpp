#include "wavekrylov/dense_eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wavekrylov/error.hpp"

namespace wavekrylov
{

DenseMatrix::DenseMatrix(std::size_t n, std::vector<double> values) : n(n), values(std::move(values))
{
  if (this->values.size() != n * n)
  {
    throw Error("dense matrix storage has " + std::to_string(this->values.size()) +
                " entries, expected " + std::to_string(n * n));
  }
}

DenseMatrix DenseMatrix::Identity(std::size_t n)
{
  DenseMatrix I(n);
  for (std::size_t i = 0; i < n; i++)
  {
    I(i, i) = 1.0;
  }
  return I;
}

double DenseMatrix::MaxAbs() const
{
  double m = 0.0;
  for (double v : values)
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

DenseSym::DenseSym(DenseMatrix a) : a(std::move(a))
{
  const auto n = this->a.n;
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = j + 1; i < n; i++)
    {
      const double avg = 0.5 * (this->a(i, j) + this->a(j, i));
      this->a(i, j) = avg;
      this->a(j, i) = avg;
    }
  }
}

DenseSym::DenseSym(std::size_t n, std::vector<double> column_major)
  : DenseSym(DenseMatrix(n, std::move(column_major)))
{
}

CholeskyFactor cholesky(const DenseSym &A)
{
  const auto n = A.Size();
  DenseMatrix L(n);
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = j; i < n; i++)
    {
      L(i, j) = A(i, j);
    }
  }
  // Right-looking column Cholesky; column j is contiguous.
  for (std::size_t j = 0; j < n; j++)
  {
    const double pivot = L(j, j);
    if (!(pivot > 0.0) || !std::isfinite(pivot))
    {
      throw Error("matrix not positive definite: nonpositive pivot at index " + std::to_string(j));
    }
    const double d = std::sqrt(pivot);
    auto col = L.Column(j);
    col[j] = d;
    for (std::size_t i = j + 1; i < n; i++)
    {
      col[i] /= d;
    }
    for (std::size_t k = j + 1; k < n; k++)
    {
      const double ljk = col[k];
      if (ljk == 0.0)
      {
        continue;
      }
      auto target = L.Column(k);
      for (std::size_t i = k; i < n; i++)
      {
        target[i] -= col[i] * ljk;
      }
    }
  }
  return {std::move(L)};
}

namespace
{

// Householder reduction to tridiagonal form. On exit V holds the orthogonal
// transformation, d the diagonal and e the subdiagonal (e[0] unused).
void Tridiagonalize(DenseMatrix &V, std::vector<double> &d, std::vector<double> &e)
{
  const auto n = V.n;
  for (std::size_t j = 0; j < n; j++)
  {
    d[j] = V(n - 1, j);
  }
  for (std::size_t i = n - 1; i > 0; i--)
  {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; k++)
    {
      scale += std::abs(d[k]);
    }
    if (scale == 0.0)
    {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; j++)
      {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    }
    else
    {
      for (std::size_t k = 0; k < i; k++)
      {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0)
      {
        g = -g;
      }
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      std::fill(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(i), 0.0);

      for (std::size_t j = 0; j < i; j++)
      {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        const auto col = V.Column(j);
        for (std::size_t k = j + 1; k + 1 <= i; k++)
        {
          g += col[k] * d[k];
          e[k] += col[k] * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; j++)
      {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; j++)
      {
        e[j] -= hh * d[j];
      }
      for (std::size_t j = 0; j < i; j++)
      {
        f = d[j];
        g = e[j];
        auto col = V.Column(j);
        for (std::size_t k = j; k + 1 <= i; k++)
        {
          col[k] -= (f * e[k] + g * d[k]);
        }
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  // Accumulate transformations.
  for (std::size_t i = 0; i + 1 < n; i++)
  {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0)
    {
      const auto next = V.Column(i + 1);
      for (std::size_t k = 0; k <= i; k++)
      {
        d[k] = next[k] / h;
      }
      for (std::size_t j = 0; j <= i; j++)
      {
        auto col = V.Column(j);
        double g = 0.0;
        for (std::size_t k = 0; k <= i; k++)
        {
          g += next[k] * col[k];
        }
        for (std::size_t k = 0; k <= i; k++)
        {
          col[k] -= g * d[k];
        }
      }
    }
    for (std::size_t k = 0; k <= i; k++)
    {
      V(k, i + 1) = 0.0;
    }
  }
  for (std::size_t j = 0; j < n; j++)
  {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0.0;
  }
  V(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL iteration on the tridiagonal matrix, accumulating rotations in V.
void TridiagonalQL(DenseMatrix &V, std::vector<double> &d, std::vector<double> &e)
{
  constexpr int max_sweeps = 60;
  const auto n = V.n;
  for (std::size_t i = 1; i < n; i++)
  {
    e[i - 1] = e[i];
  }
  e[n - 1] = 0.0;

  double f = 0.0, tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (std::size_t l = 0; l < n; l++)
  {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n)
    {
      if (std::abs(e[m]) <= eps * tst1)
      {
        break;
      }
      m++;
    }
    if (m > l)
    {
      int sweeps = 0;
      do
      {
        if (++sweeps > max_sweeps)
        {
          throw Error("symmetric eigensolver did not converge for eigenvalue " + std::to_string(l));
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0)
        {
          r = -r;
        }
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; i++)
        {
          d[i] -= h;
        }
        f += h;

        p = d[m];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;)
        {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);

          auto vi = V.Column(i);
          auto vi1 = V.Column(i + 1);
          for (std::size_t k = 0; k < n; k++)
          {
            const double t = vi1[k];
            vi1[k] = s * vi[k] + c * t;
            vi[k] = c * vi[k] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// Solves L x = b in place, L lower triangular column-major.
void ForwardSolve(const DenseMatrix &L, std::span<double> x)
{
  const auto n = L.n;
  for (std::size_t j = 0; j < n; j++)
  {
    x[j] /= L(j, j);
    const double xj = x[j];
    const auto col = L.Column(j);
    for (std::size_t i = j + 1; i < n; i++)
    {
      x[i] -= col[i] * xj;
    }
  }
}

// Solves L^T x = b in place.
void BackSolveTransposed(const DenseMatrix &L, std::span<double> x)
{
  const auto n = L.n;
  for (std::size_t j = n; j-- > 0;)
  {
    const auto col = L.Column(j);
    double sum = x[j];
    for (std::size_t i = j + 1; i < n; i++)
    {
      sum -= col[i] * x[i];
    }
    x[j] = sum / col[j];
  }
}

}  // namespace

SymEigResult sym_eig(const DenseSym &A)
{
  const auto n = A.Size();
  if (n == 0)
  {
    throw Error("sym_eig requires a nonempty matrix");
  }
  DenseMatrix V = A.Matrix();
  std::vector<double> d(n), e(n);
  if (n == 1)
  {
    return {{V(0, 0)}, DenseMatrix::Identity(1)};
  }
  Tridiagonalize(V, d, e);
  TridiagonalQL(V, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });

  SymEigResult result{std::vector<double>(n), DenseMatrix(n)};
  for (std::size_t j = 0; j < n; j++)
  {
    result.eigenvalues[j] = d[order[j]];
    std::ranges::copy(V.Column(order[j]), result.eigenvectors.Column(j).begin());
  }
  return result;
}

GeneralizedEigResult generalized_sym_eig(const DenseSym &S, const DenseSym &M)
{
  const auto n = S.Size();
  if (M.Size() != n)
  {
    throw Error("generalized eigenproblem dimension mismatch");
  }
  const auto L = cholesky(M).lower;

  // X = L^{-1} S, then C = L^{-1} X^T = L^{-1} S L^{-T}.
  DenseMatrix X = S.Matrix();
  for (std::size_t j = 0; j < n; j++)
  {
    ForwardSolve(L, X.Column(j));
  }
  DenseMatrix C(n);
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      C(i, j) = X(j, i);
    }
  }
  for (std::size_t j = 0; j < n; j++)
  {
    ForwardSolve(L, C.Column(j));
  }

  auto eig = sym_eig(DenseSym(std::move(C)));
  for (std::size_t j = 0; j < n; j++)
  {
    BackSolveTransposed(L, eig.eigenvectors.Column(j));
  }
  return {std::move(eig.eigenvalues), std::move(eig.eigenvectors)};
}

}  // namespace wavekrylov
