#include <benchmark/benchmark.h>

#include <random>

#include "wavekrylov/dense_eig.hpp"
#include "wavekrylov/krylov_solver.hpp"
#include "wavekrylov/model_problems.hpp"
#include "wavekrylov/wave_stepper.hpp"

namespace
{

using namespace wavekrylov;

Pencil Square(std::int64_t cells)
{
  const auto c = static_cast<std::size_t>(cells);
  return laplacian_2d_rect(c, c, 1.0, 1.0);
}

void BM_Spmv(benchmark::State &state)
{
  const auto p = Square(state.range(0));
  const auto x = random_vector(p.Size(), 1);
  Vector y(p.Size());
  for (auto _ : state)
  {
    p.stiffness.Mult(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.stiffness.NonZeros()));
}
BENCHMARK(BM_Spmv)->Arg(40)->Arg(200)->Arg(1000);

void BM_VerletStep(benchmark::State &state)
{
  const auto p = Square(state.range(0));
  const auto minv = diag_inverse(p.mass);
  Vector cur = random_vector(p.Size(), 1), prev = cur, work(p.Size());
  for (auto _ : state)
  {
    verlet_step_inplace(minv, p.stiffness, cur, prev, work, 1e-3);
    std::swap(cur, prev);
    benchmark::DoNotOptimize(cur.data());
  }
}
BENCHMARK(BM_VerletStep)->Arg(40)->Arg(200)->Arg(1000);

void BM_FilteredOperator(benchmark::State &state)
{
  const auto p = Square(state.range(0));
  const auto minv = diag_inverse(p.mass);
  const double tau = stable_tau(estimate_max_omega(minv, p.stiffness, 100, 0));
  const FilterSpec spec(0.0, 3.0, tau, 500);
  const auto r = random_vector(p.Size(), 2);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(apply_filtered_operator(minv, p.stiffness, spec, r));
  }
  state.SetItemsProcessed(state.iterations() * 499);
}
BENCHMARK(BM_FilteredOperator)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SymEig(benchmark::State &state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(n);
  for (auto &v : a.values)
  {
    v = u(gen);
  }
  const DenseSym sym(a);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(sym_eig(sym));
  }
}
BENCHMARK(BM_SymEig)->Arg(40)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State &state)
{
  const auto p = laplacian_2d_rect(40, 30, 4.0, 3.0);
  const double tau = stable_tau(estimate_max_omega(diag_inverse(p.mass), p.stiffness, 100, 1));
  SolverConfig cfg{.filter = FilterSpec(0.0, 3.0, tau, 500)};
  cfg.m_max = 40;
  cfg.n_accept_target = 11;
  cfg.seed = 1;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(solve(p, cfg));
  }
}
BENCHMARK(BM_Solve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
