#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wavekrylov/error.hpp"
#include "wavekrylov/model_problems.hpp"
#include "wavekrylov/wave_stepper.hpp"

namespace wavekrylov
{
namespace
{

DiagInverse InverseOf(std::vector<double> m)
{
  for (auto &v : m)
  {
    v = 1.0 / v;
  }
  return DiagInverse(std::move(m));
}

TEST(Verlet, ZeroStiffnessKeepsConstantState)
{
  const auto S = CsrMatrix::FromTriplets({}, 4);
  const auto minv = InverseOf({1, 2, 3, 4});
  const Vector r = {0.3, -1.0, 2.5, 7.0};
  auto state = StartPair(r);
  for (int l = 0; l < 1000; l++)
  {
    state = verlet_step(minv, S, state, 0.1);
  }
  EXPECT_EQ(state.y_curr, r);
  EXPECT_EQ(state.y_prev, r);
}

TEST(Verlet, OneByOneByHand)
{
  // 2 - tau^2 w^2 = 1, so y = 1, 0, -1, -1, ...
  const std::vector<double> s = {4.0};
  const auto S = CsrMatrix::Diagonal(s);
  const auto minv = InverseOf({1.0});
  auto st = StartPair(Vector{1.0});
  st = verlet_step(minv, S, st, 0.5);
  EXPECT_DOUBLE_EQ(st.y_curr[0], 0.0);
  EXPECT_DOUBLE_EQ(st.y_prev[0], 1.0);
  st = verlet_step(minv, S, st, 0.5);
  EXPECT_DOUBLE_EQ(st.y_curr[0], -1.0);
  st = verlet_step(minv, S, st, 0.5);
  EXPECT_DOUBLE_EQ(st.y_curr[0], -1.0);
}

TEST(Verlet, DiagonalPencilFollowsScalarRecurrence)
{
  const std::vector<double> s = {0.0, 1.0, 8.0, 30.0};
  const std::vector<double> m = {1.0, 0.5, 2.0, 1.5};
  const auto S = CsrMatrix::Diagonal(s);
  const auto minv = InverseOf(m);
  const double tau = 0.2;
  const std::size_t L = 300;
  const Vector r = {1.0, 1.0, 1.0, 1.0};
  std::vector<std::vector<double>> q;
  for (std::size_t i = 0; i < s.size(); i++)
  {
    q.push_back(scalar_q(std::sqrt(s[i] / m[i]), tau, L));
  }
  auto st = StartPair(r);
  for (std::size_t l = 0; l + 1 < L; l++)
  {
    for (std::size_t i = 0; i < s.size(); i++)
    {
      EXPECT_NEAR(st.y_curr[i], q[i][l], 1e-11) << "l=" << l << " i=" << i;
    }
    st = verlet_step(minv, S, st, tau);
  }
}

TEST(Verlet, InplaceMatchesFunctionalForm)
{
  const auto p = laplacian_1d_neumann(20, 1.0);
  const auto minv = diag_inverse(p.mass);
  const auto r = random_vector(p.Size(), 7);
  auto st = StartPair(r);
  Vector cur = r, prev = r, work(r.size());
  for (int l = 0; l < 50; l++)
  {
    st = verlet_step(minv, p.stiffness, st, 0.02);
    verlet_step_inplace(minv, p.stiffness, cur, prev, work, 0.02);
    std::swap(cur, prev);
    ASSERT_EQ(st.y_curr, cur);
    ASSERT_EQ(st.y_prev, prev);
  }
}

TEST(ScalarQ, ZeroFrequencyIsConstant)
{
  for (double v : scalar_q(0.0, 0.3, 100))
  {
    EXPECT_EQ(v, 1.0);
  }
}

TEST(ScalarQ, PeriodFourPatternAtTauSquaredOmegaSquaredTwo)
{
  // 2 - tau^2 w^2 = 0 gives q_{l+1} = -q_{l-1}.
  const auto q = scalar_q(std::sqrt(2.0), 1.0, 9);
  const std::vector<double> expected = {1, -1, -1, 1, 1, -1, -1, 1, 1};
  for (std::size_t l = 0; l < q.size(); l++)
  {
    EXPECT_NEAR(q[l], expected[l], 1e-14) << l;
  }
}

TEST(ScalarQ, ClosedFormSmallIndices)
{
  const double w = 1.7, tau = 0.3;
  EXPECT_NEAR(scalar_q_closed_form(w, tau, 0), 1.0, 1e-15);
  EXPECT_NEAR(scalar_q_closed_form(w, tau, 1), 1.0 - tau * tau * w * w, 1e-14);
}

TEST(ScalarQ, ClosedFormAgreesWithRecurrence)
{
  const auto q = scalar_q(1.0, 0.1, 101);
  EXPECT_NEAR(q[100], scalar_q_closed_form(1.0, 0.1, 100), 1e-10);
  for (double tw : {0.05, 0.7, 1.3, 1.95})
  {
    const auto qq = scalar_q(tw, 1.0, 400);
    for (std::size_t l = 0; l < qq.size(); l += 13)
    {
      EXPECT_NEAR(qq[l], scalar_q_closed_form(tw, 1.0, l), 1e-9) << tw << " " << l;
    }
  }
}

TEST(ScalarQ, ClosedFormRejectsDegenerateArguments)
{
  EXPECT_THROW(scalar_q_closed_form(0.0, 0.1, 3), Error);
  EXPECT_THROW(scalar_q_closed_form(20.0, 0.1, 3), Error);
  EXPECT_THROW(scalar_q_closed_form(25.0, 0.1, 3), Error);
}

// q_l is a polynomial of degree l in x = tau^2 w^2: interpolating at l + 1
// Chebyshev nodes reproduces it at unrelated points.
TEST(ScalarQ, PolynomialDegreeInOmegaSquared)
{
  const double tau = 1.0;
  for (std::size_t l : {1u, 2u, 5u, 12u})
  {
    const auto nodes = oracle::ChebyshevInterpolant::Nodes(l + 1, 0.0, 4.0);
    std::vector<double> vals;
    for (double x : nodes)
    {
      vals.push_back(scalar_q(std::sqrt(x), tau, l + 1)[l]);
    }
    const oracle::ChebyshevInterpolant p(nodes, vals);
    for (double x : {0.013, 0.77, 1.91, 2.5, 3.33, 3.99})
    {
      EXPECT_NEAR(p(x), scalar_q(std::sqrt(x), tau, l + 1)[l], 1e-10) << "l=" << l << " x=" << x;
    }
  }
}

// sup_l |q_l| = 1 / cos(theta/2) for 0 < tau w < 2, sin(theta/2) = tau w / 2.
TEST(ScalarQ, BoundedInsideStabilityRegion)
{
  for (double tw : {0.01, 0.5, 1.5, 1.9, 1.99, 1.999})
  {
    const double bound = 1.0 / std::sqrt(1.0 - tw * tw / 4.0);
    double peak = 0.0;
    for (double v : scalar_q(tw, 1.0, 10000))
    {
      peak = std::max(peak, std::abs(v));
    }
    EXPECT_LE(peak, bound * (1.0 + 1e-9)) << tw;
    EXPECT_GE(peak, 0.9 * bound) << tw;
  }
}

TEST(ScalarQ, GrowsOutsideStabilityRegion)
{
  const auto q = scalar_q(2.01, 1.0, 10000);
  EXPECT_GT(std::abs(q.back()), 1e6);
}

// At a fixed time t = l tau the discrete solution approaches cos(w t) with an
// error proportional to tau: the start y_{-1} = y_0 is only first-order
// consistent with a zero initial velocity.
TEST(ScalarQ, FirstOrderConvergenceAtFixedTime)
{
  const double w = 1.0, t = 5.0;
  std::vector<double> errors;
  for (double tau : {0.1, 0.05, 0.025, 0.0125})
  {
    const auto l = static_cast<std::size_t>(std::lround(t / tau));
    const auto q = scalar_q(w, tau, l + 1);
    errors.push_back(std::abs(q[l] - std::cos(w * t)));
  }
  for (std::size_t k = 0; k + 1 < errors.size(); k++)
  {
    const double ratio = errors[k] / errors[k + 1];
    EXPECT_GT(ratio, 1.8);
    EXPECT_LT(ratio, 2.2);
  }
}

TEST(PowerIteration, OneByOne)
{
  const std::vector<double> s = {4.0};
  EXPECT_NEAR(estimate_max_omega(InverseOf({1.0}), CsrMatrix::Diagonal(s), 10, 0), 2.02, 1e-12);
}

TEST(PowerIteration, BracketsLargestResonance1D)
{
  const auto p = laplacian_1d_neumann(100, 1.0);
  const double wmax = p.analytic_spectrum->back();
  const double est = estimate_max_omega(diag_inverse(p.mass), p.stiffness, 100, 3);
  EXPECT_GE(est, wmax * (1.0 - 1e-3));
  EXPECT_LE(est, wmax * 1.02);
}

TEST(PowerIteration, DiagonalPencil)
{
  const std::vector<double> s = {1.0, 25.0, 100.0};
  const double est = estimate_max_omega(InverseOf({1, 1, 1}), CsrMatrix::Diagonal(s), 200, 0);
  EXPECT_GE(est, 10.0);
  EXPECT_LE(est, 10.2);
}

TEST(PowerIteration, CountsProducts)
{
  const auto p = laplacian_1d_neumann(10, 1.0);
  const auto est = estimate_max_omega_counted(diag_inverse(p.mass), p.stiffness, 25, 0);
  EXPECT_GE(est.spmv_count, 25u);
}

TEST(StableTau, Formula)
{
  EXPECT_DOUBLE_EQ(stable_tau(2.0), 0.95);
  EXPECT_DOUBLE_EQ(stable_tau(400.0), 0.00475);
  EXPECT_DOUBLE_EQ(stable_tau(2.0, 0.5), 0.5);
  EXPECT_THROW(stable_tau(0.0), Error);
  EXPECT_THROW(stable_tau(1.0, 1.5), Error);
}

TEST(StableTau, LongRunStaysBounded)
{
  const auto p = laplacian_2d_rect(12, 10, 1.2, 1.0);
  const auto minv = diag_inverse(p.mass);
  const double tau = stable_tau(estimate_max_omega(minv, p.stiffness, 100, 0));
  const auto r = random_vector(p.Size(), 11);
  Vector cur = r, prev = r, work(r.size());
  double peak = 0.0;
  for (int l = 0; l < 10000; l++)
  {
    verlet_step_inplace(minv, p.stiffness, cur, prev, work, tau);
    std::swap(cur, prev);
    peak = std::max(peak, norm2(cur));
  }
  // Modal amplitudes stay below 1/sqrt(1 - 0.95^2); the mass scaling converts
  // the M-norm bound to the Euclidean one.
  const auto [mmin, mmax] = std::minmax_element(p.mass.Values().begin(), p.mass.Values().end());
  EXPECT_LE(peak, norm2(r) * std::sqrt(*mmax / *mmin) / std::sqrt(1.0 - 0.95 * 0.95));
}

TEST(RandomVector, DeterministicAndInRange)
{
  const auto a = random_vector(1000, 42);
  EXPECT_EQ(a, random_vector(1000, 42));
  EXPECT_NE(a, random_vector(1000, 43));
  for (double v : a)
  {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
}

}  // namespace
}  // namespace wavekrylov
