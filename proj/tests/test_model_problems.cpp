#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wavekrylov/error.hpp"
#include "wavekrylov/model_problems.hpp"

namespace wavekrylov
{
namespace
{

namespace fs = std::filesystem;

class TempDir
{
public:
  TempDir()
  {
    path = fs::temp_directory_path() /
           ("wavekrylov_mm_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

void WriteFile(const fs::path &p, const std::string &content)
{
  std::ofstream(p) << content;
}

// ||S||_max-scaled check of a sorted spectrum against analytic resonances.
// The zero mode is compared in w^2 because sqrt amplifies rounding there.
void ExpectMatchesAnalytic(const Pencil &p, const ReferenceEigs &ref)
{
  const auto &analytic = *p.analytic_spectrum;
  ASSERT_EQ(analytic.size(), ref.omega_sq.size());
  const double snorm = ref.omega_sq.back();
  for (std::size_t i = 0; i < analytic.size(); i++)
  {
    const double a2 = analytic[i] * analytic[i];
    if (analytic[i] == 0.0)
    {
      EXPECT_LE(std::abs(ref.omega_sq[i]), 1e-14 * snorm) << "zero mode";
    }
    else
    {
      EXPECT_LE(std::abs(ref.omega_sq[i] - a2), 1e-10 * a2) << "i=" << i;
    }
  }
}

TEST(Laplacian1D, TwoCellsByHand)
{
  const auto p = laplacian_1d_neumann(2, 2.0);
  // S = [[1,-1,0],[-1,2,-1],[0,-1,1]], M = diag(1/2, 1, 1/2); characteristic
  // polynomial of M^{-1} S is w2 (w2 - 2)(w2 - 4).
  const auto ref = dense_reference_eigs(p);
  ASSERT_EQ(ref.omega_sq.size(), 3u);
  EXPECT_NEAR(ref.omega_sq[0], 0.0, 1e-14);
  EXPECT_NEAR(ref.omega_sq[1], 2.0, 1e-14);
  EXPECT_NEAR(ref.omega_sq[2], 4.0, 1e-14);
  const auto w = ref.Omegas();
  EXPECT_NEAR(w[1], std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(w[2], 2.0, 1e-14);
  EXPECT_NEAR((*p.analytic_spectrum)[1], std::sqrt(2.0), 1e-15);
}

TEST(Laplacian1D, MatchesDenseAssemblyOracle)
{
  oracle::Dense S;
  std::vector<double> mass;
  oracle::DenseNeumann1D(7, 1.3, S, mass);
  const auto p = laplacian_1d_neumann(7, 1.3);
  const auto dense = p.stiffness.ToDense();
  for (std::size_t k = 0; k < S.size(); k++)
  {
    EXPECT_NEAR(dense[k], S[k], 1e-15 * 8 / 1.3);
  }
  for (std::size_t i = 0; i < mass.size(); i++)
  {
    EXPECT_DOUBLE_EQ(p.mass.At(i, i), mass[i]);
  }
}

TEST(Laplacian1D, RowSumsZeroAndConstantKernel)
{
  const auto p = laplacian_1d_neumann(50, 3.0);
  const auto y = spmv(p.stiffness, std::vector<double>(p.Size(), 1.0));
  for (double v : y)
  {
    EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(p.analytic_spectrum->front(), 0.0);
}

TEST(Laplacian1D, FirstResonanceAgainstOracle)
{
  const auto p = laplacian_1d_neumann(100, M_PI);
  const auto ref = dense_reference_eigs(p);
  EXPECT_NEAR(ref.Omegas()[1], (*p.analytic_spectrum)[1], 1e-12);
  ExpectMatchesAnalytic(p, ref);
}

TEST(Laplacian1D, RejectsTooFewCells)
{
  EXPECT_THROW(laplacian_1d_neumann(1, 1.0), Error);
  EXPECT_THROW(laplacian_1d_neumann(4, 0.0), Error);
}

TEST(Laplacian2D, SmallGridKroneckerSpectrum)
{
  const auto p = laplacian_2d_rect(2, 2, 2.0, 2.0);
  const double r2 = std::sqrt(2.0);
  const std::vector<double> expected = {0, r2, r2, 2, 2, 2, std::sqrt(6.0), std::sqrt(6.0), std::sqrt(8.0)};
  const auto &analytic = *p.analytic_spectrum;
  ASSERT_EQ(analytic.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); i++)
  {
    EXPECT_NEAR(analytic[i], expected[i], 1e-14);
  }
  const auto w = dense_reference_eigs(p).Omegas();
  for (std::size_t i = 1; i < expected.size(); i++)
  {
    EXPECT_NEAR(w[i], expected[i], 1e-13);
  }
  EXPECT_EQ(std::count(analytic.begin(), analytic.end(), 0.0), 1);
}

TEST(Laplacian2D, DenseOracleMatchesKroneckerRule)
{
  const auto p = laplacian_2d_rect(40, 30, 4.0, 3.0);
  ASSERT_EQ(p.Size(), 1271u);
  ExpectMatchesAnalytic(p, dense_reference_eigs(p));
}

TEST(Laplacian2D, StructureInvariants)
{
  const auto p = laplacian_2d_rect(6, 5, 1.5, 1.0);
  EXPECT_TRUE(check_symmetric(p.stiffness, 0.0));
  EXPECT_TRUE(p.mass.IsDiagonal());
  const auto y = spmv(p.stiffness, std::vector<double>(p.Size(), 1.0));
  for (double v : y)
  {
    EXPECT_NEAR(v, 0.0, 1e-15);
  }
  // Total lumped mass equals the area.
  double area = 0.0;
  for (double m : p.mass.Values())
  {
    area += m;
  }
  EXPECT_NEAR(area, 1.5, 1e-14);
}

TEST(Laplacian2D, DimensionCap)
{
  EXPECT_THROW(laplacian_2d_rect(100, 100, 1, 1, 1000), Error);
  EXPECT_THROW(laplacian_2d_rect(1, 4, 1, 1), Error);
}

TEST(DenseReference, DefinitionChecks)
{
  const auto p = laplacian_2d_rect(8, 6, 2.0, 1.0);
  const auto ref = dense_reference_eigs(p);
  const auto n = p.Size();
  const double snorm = ref.omega_sq.back();
  for (std::size_t j = 0; j < n; j++)
  {
    const auto v = ref.vectors.Column(j);
    const auto sv = spmv(p.stiffness, v);
    const auto mv = spmv(p.mass, v);
    double res = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      res += std::pow(sv[i] - ref.omega_sq[j] * mv[i], 2);
    }
    EXPECT_LE(std::sqrt(res), 1e-10 * snorm);
    EXPECT_GE(ref.omega_sq[j], 0.0);
    for (std::size_t k = 0; k <= j; k++)
    {
      const double g = dot(ref.vectors.Column(k), mv);
      EXPECT_NEAR(g, k == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(DenseReference, CapExceeded)
{
  const auto p = laplacian_1d_neumann(30, 1.0);
  EXPECT_THROW(dense_reference_eigs(p, 30), Error);
  EXPECT_NO_THROW(dense_reference_eigs(p, 31));
}

TEST(MatrixMarket, RoundTripIdenticalArrays)
{
  TempDir dir;
  const auto p = laplacian_1d_neumann(10, 1.0);
  save_matrix_market(p, dir.path / "S.mtx", dir.path / "M.mtx");
  const auto q = load_matrix_market(dir.path / "S.mtx", dir.path / "M.mtx");
  EXPECT_EQ(p.stiffness, q.stiffness);
  EXPECT_EQ(p.mass, q.mass);
}

TEST(MatrixMarket, RoundTripBitExactAwkwardValues)
{
  TempDir dir;
  const auto p = laplacian_2d_rect(20, 20, 0.7, 1.0 / 3.0);
  save_matrix_market(p, dir.path / "S.mtx", dir.path / "M.mtx");
  const auto q = load_matrix_market(dir.path / "S.mtx", dir.path / "M.mtx");
  ASSERT_EQ(p.stiffness.Values().size(), q.stiffness.Values().size());
  for (std::size_t k = 0; k < p.stiffness.Values().size(); k++)
  {
    ASSERT_EQ(p.stiffness.Values()[k], q.stiffness.Values()[k]);
  }
  EXPECT_EQ(p.mass, q.mass);
  const auto a = dense_reference_eigs(p).omega_sq;
  const auto b = dense_reference_eigs(q).omega_sq;
  EXPECT_EQ(a, b);
}

TEST(MatrixMarket, WritesSeventeenDigitLines)
{
  TempDir dir;
  const std::vector<double> three = {3.0};
  write_matrix_market(CsrMatrix::Diagonal(three), dir.path / "A.mtx");
  std::ifstream in(dir.path / "A.mtx");
  std::string header, size, body;
  std::getline(in, header);
  std::getline(in, size);
  std::getline(in, body);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real symmetric");
  EXPECT_EQ(size, "1 1 1");
  EXPECT_EQ(body, "1 1 3.0000000000000000e+00");
}

TEST(MatrixMarket, SymmetricLowerTriangleMirrored)
{
  TempDir dir;
  WriteFile(dir.path / "S.mtx",
            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 1.0\n2 1 -1.0\n2 2 1.0\n");
  WriteFile(dir.path / "M.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 0.5\n2 2 0.5\n");
  const auto p = load_matrix_market(dir.path / "S.mtx", dir.path / "M.mtx");
  EXPECT_EQ(p.stiffness.At(0, 1), -1.0);
  EXPECT_EQ(p.stiffness.At(1, 0), -1.0);
  EXPECT_EQ(p.stiffness.NonZeros(), 4u);
}

TEST(MatrixMarket, ParseErrorCitesLine)
{
  TempDir dir;
  WriteFile(dir.path / "S.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 2 abc\n");
  try
  {
    read_matrix_market(dir.path / "S.mtx");
    FAIL() << "expected throw";
  }
  catch (const Error &e)
  {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(MatrixMarket, RejectsNonSymmetricStiffness)
{
  TempDir dir;
  WriteFile(dir.path / "S.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 2.0\n");
  WriteFile(dir.path / "M.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 1\n");
  EXPECT_THROW(load_matrix_market(dir.path / "S.mtx", dir.path / "M.mtx"), Error);
}

TEST(MatrixMarket, RejectsNonDiagonalMassNamingEntry)
{
  TempDir dir;
  WriteFile(dir.path / "S.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1.0\n");
  WriteFile(dir.path / "M.mtx",
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 1\n2 1 0.1\n2 2 1\n");
  try
  {
    load_matrix_market(dir.path / "S.mtx", dir.path / "M.mtx");
    FAIL() << "expected throw";
  }
  catch (const Error &e)
  {
    const std::string what = e.what();
    EXPECT_NE(what.find("(2, 1)"), std::string::npos) << what;
    EXPECT_NE(what.find("line 4"), std::string::npos) << what;
  }
}

TEST(MatrixMarket, MissingFile)
{
  EXPECT_THROW(read_matrix_market("/nonexistent/S.mtx"), Error);
}

}  // namespace
}  // namespace wavekrylov
