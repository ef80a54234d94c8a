#include "wavekrylov/krylov_solver.hpp"

#include <algorithm>
#include <cmath>

#include "wavekrylov/error.hpp"
#include "wavekrylov/wave_stepper.hpp"

namespace wavekrylov
{

void SolverConfig::Validate() const
{
  if (m_max < 1)
  {
    throw Error("solver config: m_max must be >= 1");
  }
  if (!(residual_tol > 0.0))
  {
    throw Error("solver config: residual_tol must be > 0");
  }
  if (reorth_passes < 1)
  {
    throw Error("solver config: reorth_passes must be >= 1");
  }
  if (!(breakdown_tol >= 0.0))
  {
    throw Error("solver config: breakdown_tol must be >= 0");
  }
}

void KrylovBasis::Append(Vector v)
{
  if (v.size() != n)
  {
    throw Error("Krylov basis column has wrong length");
  }
  columns.push_back(std::move(v));
}

Vector KrylovBasis::Lift(std::span<const double> coeffs) const
{
  if (coeffs.size() != columns.size())
  {
    throw Error("Krylov lift: coefficient count does not match basis dimension");
  }
  Vector u(n, 0.0);
  for (std::size_t k = 0; k < columns.size(); k++)
  {
    axpy(coeffs[k], columns[k], u);
  }
  return u;
}

double KrylovBasis::OrthonormalityError() const
{
  double err = 0.0;
  for (std::size_t i = 0; i < columns.size(); i++)
  {
    for (std::size_t j = i; j < columns.size(); j++)
    {
      const double target = (i == j) ? 1.0 : 0.0;
      err = std::max(err, std::abs(dot(columns[i], columns[j]) - target));
    }
  }
  return err;
}

Vector apply_filtered_operator(const DiagInverse &minv, const CsrMatrix &S, const FilterSpec &spec,
                               std::span<const double> r)
{
  const auto n = S.Size();
  if (r.size() != n || minv.Size() != n)
  {
    throw Error("apply_filtered_operator dimension mismatch");
  }
  const auto alpha = spec.AlphaSamples();
  const double tau = spec.Tau();

  Vector out(r.begin(), r.end());
  scale(tau * alpha[0], out);
  Vector y_curr(r.begin(), r.end()), y_prev(r.begin(), r.end()), work(n);
  for (std::size_t l = 1; l < alpha.size(); l++)
  {
    verlet_step_inplace(minv, S, y_curr, y_prev, work, tau);
    std::swap(y_curr, y_prev);
    axpy(tau * alpha[l], y_curr, out);
  }
  for (double v : out)
  {
    if (!std::isfinite(v))
    {
      throw Error("time stepping diverged: non-finite values in filtered vector (CFL violated?)");
    }
  }
  return out;
}

std::variant<Orthonormalized, Breakdown> orthonormalize_against(std::span<const double> r,
                                                                const KrylovBasis &basis,
                                                                std::size_t reorth_passes,
                                                                double breakdown_tol)
{
  if (r.size() != basis.Size())
  {
    throw Error("orthonormalize_against dimension mismatch");
  }
  Vector v(r.begin(), r.end());
  const double before = norm2(v);
  if (!(before > 0.0))
  {
    return Breakdown{before, 0.0};
  }
  std::vector<double> coeffs(basis.Dim());
  for (std::size_t pass = 0; pass < reorth_passes; pass++)
  {
    // Classical: all coefficients against the same vector, then subtract.
    for (std::size_t k = 0; k < basis.Dim(); k++)
    {
      coeffs[k] = dot(basis.Column(k), v);
    }
    for (std::size_t k = 0; k < basis.Dim(); k++)
    {
      axpy(-coeffs[k], basis.Column(k), v);
    }
  }
  const double after = norm2(v);
  if (!(after >= breakdown_tol * before) || after == 0.0)
  {
    return Breakdown{before, after};
  }
  scale(1.0 / after, v);
  return Orthonormalized{std::move(v), before};
}

ProjectedPencil project_pencil(const KrylovBasis &basis, const CsrMatrix &S, const CsrMatrix &M)
{
  const auto m = basis.Dim();
  if (m == 0)
  {
    throw Error("project_pencil needs a nonempty basis");
  }
  if (S.Size() != basis.Size() || M.Size() != basis.Size())
  {
    throw Error("project_pencil dimension mismatch");
  }
  DenseMatrix sm(m), mm(m);
  Vector sb(basis.Size()), mb(basis.Size());
  for (std::size_t j = 0; j < m; j++)
  {
    S.Mult(basis.Column(j), sb);
    M.Mult(basis.Column(j), mb);
    for (std::size_t i = 0; i < m; i++)
    {
      sm(i, j) = dot(basis.Column(i), sb);
      mm(i, j) = dot(basis.Column(i), mb);
    }
  }
  return {DenseSym(std::move(sm)), DenseSym(std::move(mm))};
}

void IncrementalProjection::Extend(const KrylovBasis &basis)
{
  const auto j = s_images.size();
  if (basis.Dim() != j + 1)
  {
    throw Error("IncrementalProjection::Extend must follow exactly one basis append");
  }
  const auto b = basis.Column(j);
  Vector sb(b.size()), mb(b.size());
  S->Mult(b, sb);
  M->Mult(b, mb);
  std::vector<double> srow(j + 1), mrow(j + 1);
  for (std::size_t i = 0; i <= j; i++)
  {
    srow[i] = dot(basis.Column(i), sb);
    mrow[i] = dot(basis.Column(i), mb);
  }
  s_images.push_back(std::move(sb));
  m_images.push_back(std::move(mb));
  s_rows.push_back(std::move(srow));
  m_rows.push_back(std::move(mrow));
}

ProjectedPencil IncrementalProjection::Projected() const
{
  const auto m = Dim();
  DenseMatrix sm(m), mm(m);
  for (std::size_t j = 0; j < m; j++)
  {
    for (std::size_t i = 0; i <= j; i++)
    {
      sm(i, j) = sm(j, i) = s_rows[j][i];
      mm(i, j) = mm(j, i) = m_rows[j][i];
    }
  }
  return {DenseSym(std::move(sm)), DenseSym(std::move(mm))};
}

std::size_t RitzReport::AcceptedCount() const
{
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const RitzPair &p) { return p.accepted; }));
}

namespace
{

// Shared Rayleigh-Ritz kernel: S b_j and M b_j are supplied by the caller.
RitzReport RitzFromImages(const KrylovBasis &basis, const ProjectedPencil &projected,
                          std::span<const Vector> s_images, std::span<const Vector> m_images,
                          const SolverConfig &config)
{
  const auto m = basis.Dim();
  const auto n = basis.Size();
  const auto eig = generalized_sym_eig(projected.stiffness, projected.mass);

  RitzReport report;
  report.step = m;
  report.pairs.reserve(m);
  report.vectors.reserve(m);
  Vector su(n), mu(n);
  for (std::size_t j = 0; j < m; j++)
  {
    const auto coeffs = eig.vectors.Column(j);
    Vector u = basis.Lift(coeffs);
    const double unorm = norm2(u);
    std::fill(su.begin(), su.end(), 0.0);
    std::fill(mu.begin(), mu.end(), 0.0);
    for (std::size_t k = 0; k < m; k++)
    {
      axpy(coeffs[k] / unorm, s_images[k], su);
      axpy(coeffs[k] / unorm, m_images[k], mu);
    }
    scale(1.0 / unorm, u);

    RitzPair pair;
    pair.omega_sq = eig.omega_sq[j];
    pair.omega = std::sqrt(std::max(pair.omega_sq, 0.0));
    axpy(-pair.omega_sq, mu, su);
    pair.residual = norm2(su);
    pair.mu = discrete_filter(pair.omega, config.filter);
    pair.accepted = pair.residual <= config.residual_tol;
    pair.vector_id = j;
    report.pairs.push_back(pair);
    report.vectors.push_back(std::move(u));
  }
  return report;
}

}  // namespace

RitzReport ritz_step(const KrylovBasis &basis, const CsrMatrix &S, const CsrMatrix &M,
                     const SolverConfig &config)
{
  if (basis.Dim() == 0)
  {
    throw Error("ritz_step needs a nonempty basis");
  }
  std::vector<Vector> s_images, m_images;
  for (std::size_t k = 0; k < basis.Dim(); k++)
  {
    s_images.push_back(spmv(S, basis.Column(k)));
    m_images.push_back(spmv(M, basis.Column(k)));
  }
  return RitzFromImages(basis, project_pencil(basis, S, M), s_images, m_images, config);
}

SolveResult solve(const Pencil &pencil, const SolverConfig &config, SolveOptions options)
{
  config.Validate();
  validate_pencil(pencil);
  const auto &S = pencil.stiffness;
  const auto &M = pencil.mass;
  const auto n = pencil.Size();
  const auto minv = diag_inverse(M);
  const auto &spec = config.filter;

  SolveResult result;
  result.basis = KrylovBasis(n);
  if (config.check_cfl)
  {
    const auto estimate = estimate_max_omega_counted(minv, S, config.power_iters, config.seed);
    result.omega_max_estimate = estimate.omega;
    result.spmv_count += estimate.spmv_count;
    if (!(spec.Tau() * estimate.omega < 2.0))
    {
      throw Error("time stepping diverged: tau = " + std::to_string(spec.Tau()) +
                  " violates the CFL bound 2/omega_max = " + std::to_string(2.0 / estimate.omega));
    }
  }

  Vector r0 = random_vector(n, config.seed);
  const double r0_norm = norm2(r0);
  if (!(r0_norm > 0.0))
  {
    throw Error("random starting vector is zero");
  }
  scale(1.0 / r0_norm, r0);

  auto &basis = result.basis;
  IncrementalProjection projection(S, M);
  basis.Append(std::move(r0));
  projection.Extend(basis);

  while (true)
  {
    auto projected = projection.Projected();
    auto report = RitzFromImages(basis, projected, projection.StiffnessImages(),
                                 projection.MassImages(), config);
    if (options.keep_projections)
    {
      result.projections.push_back(std::move(projected));
    }

    RitzReport summary{report.step, report.pairs, {}};
    result.history.push_back(std::move(summary));
    result.final_report = std::move(report);

    if (result.final_report.AcceptedCount() >= config.n_accept_target)
    {
      result.target_reached = true;
      break;
    }
    if (basis.Dim() >= config.m_max)
    {
      break;
    }

    const auto filtered = apply_filtered_operator(minv, S, spec, basis.Column(basis.Dim() - 1));
    result.filter_applications++;
    result.spmv_count += spec.Steps() - 1;

    auto next = orthonormalize_against(filtered, basis, config.reorth_passes, config.breakdown_tol);
    if (std::holds_alternative<Breakdown>(next))
    {
      result.breakdown = true;
      break;
    }
    basis.Append(std::move(std::get<Orthonormalized>(next).vector));
    projection.Extend(basis);
  }

  if (!result.target_reached)
  {
    result.warning = "accepted " + std::to_string(result.final_report.AcceptedCount()) + " of " +
                     std::to_string(config.n_accept_target) + " requested eigenpairs at m = " +
                     std::to_string(basis.Dim()) + (result.breakdown ? " (Krylov breakdown)" : "");
  }
  return result;
}

}  // namespace wavekrylov
