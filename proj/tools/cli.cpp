#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavekrylov/error.hpp"
#include "wavekrylov/filter.hpp"
#include "wavekrylov/krylov_solver.hpp"
#include "wavekrylov/model_problems.hpp"
#include "wavekrylov/wave_stepper.hpp"

namespace wavekrylov::cli
{
namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

std::string Num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Builtin problems ---------------------------------------------------------

using Params = std::map<std::string, double>;

struct Builtin
{
  const char *name;
  Params defaults;
  std::function<Pencil(const Params &)> make;
};

std::size_t Count(const Params &p, const std::string &key)
{
  const double v = p.at(key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e12)
  {
    throw Error("parameter " + key + " must be a nonnegative integer, got " + Num(v));
  }
  return static_cast<std::size_t>(v);
}

const std::vector<Builtin> &Builtins()
{
  static const std::vector<Builtin> list = {
      {"laplacian_1d_neumann",
       {{"n", 100}, {"length", 1.0}},
       [](const Params &p) { return laplacian_1d_neumann(Count(p, "n"), p.at("length")); }},
      {"laplacian_2d_rect",
       {{"nx", 40}, {"ny", 30}, {"lx", 4.0}, {"ly", 3.0}},
       [](const Params &p) {
         return laplacian_2d_rect(Count(p, "nx"), Count(p, "ny"), p.at("lx"), p.at("ly"));
       }},
  };
  return list;
}

std::string BuiltinNames()
{
  std::string names;
  for (const auto &b : Builtins())
  {
    names += (names.empty() ? "" : ", ") + std::string(b.name);
  }
  return names;
}

const Builtin &FindBuiltin(const std::string &name)
{
  for (const auto &b : Builtins())
  {
    if (name == b.name)
    {
      return b;
    }
  }
  throw Error("unknown problem '" + name + "'; available: " + BuiltinNames());
}

Params ResolveParams(const Builtin &b, const Params &given)
{
  Params p = b.defaults;
  for (const auto &[key, value] : given)
  {
    if (!p.count(key))
    {
      std::string known;
      for (const auto &d : b.defaults)
      {
        known += (known.empty() ? "" : ", ") + d.first;
      }
      throw Error("unknown parameter '" + key + "' for " + b.name + "; expected " + known);
    }
    p[key] = value;
  }
  return p;
}

// Run configuration ---------------------------------------------------------

struct ProblemSpec
{
  std::string name;  // empty for Matrix Market input
  Params params;
  fs::path stiffness;
  fs::path mass;
};

struct RunConfig
{
  json raw;
  fs::path base_dir;
  std::optional<ProblemSpec> problem;
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  std::optional<double> tau;
  std::vector<std::size_t> steps_L;
  std::size_t m_max = 40;
  std::size_t n_accept = 1;
  double residual_tol = 1e-5;
  std::uint64_t seed = 0;
  std::optional<fs::path> output_dir;
  std::size_t power_iters = 100;
  double cfl_safety = 0.95;
  std::optional<std::string> omega_grid;
};

double NumberField(const json &j, const std::string &key)
{
  if (!j.at(key).is_number())
  {
    throw Error("config: '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

std::size_t CountField(const json &j, const std::string &key)
{
  const auto &v = j.at(key);
  if (!v.is_number_unsigned())
  {
    throw Error("config: '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

ProblemSpec ParseProblem(const json &j)
{
  if (!j.is_object())
  {
    throw Error("config: 'problem' must be an object");
  }
  ProblemSpec spec;
  if (j.contains("stiffness") || j.contains("mass"))
  {
    for (const auto &[key, value] : j.items())
    {
      if (key != "stiffness" && key != "mass")
      {
        throw Error("config: unknown key problem." + key);
      }
      if (!value.is_string())
      {
        throw Error("config: problem." + key + " must be a path string");
      }
    }
    if (!j.contains("stiffness") || !j.contains("mass"))
    {
      throw Error("config: Matrix Market input needs both problem.stiffness and problem.mass");
    }
    spec.stiffness = j.at("stiffness").get<std::string>();
    spec.mass = j.at("mass").get<std::string>();
    return spec;
  }
  if (!j.contains("name") || !j.at("name").is_string())
  {
    throw Error("config: problem needs a 'name' (" + BuiltinNames() + ") or stiffness/mass paths");
  }
  spec.name = j.at("name").get<std::string>();
  for (const auto &[key, value] : j.items())
  {
    if (key == "name")
    {
      continue;
    }
    if (!value.is_number())
    {
      throw Error("config: problem." + key + " must be a number");
    }
    spec.params[key] = value.get<double>();
  }
  return spec;
}

RunConfig LoadConfig(const fs::path &path)
{
  std::ifstream in(path);
  if (!fs::is_regular_file(path) || !in)
  {
    throw Error("config not found: " + path.string());
  }
  RunConfig cfg;
  try
  {
    cfg.raw = json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw Error("config parse error in " + path.string() + ": " + e.what());
  }
  if (!cfg.raw.is_object())
  {
    throw Error("config: top level must be a JSON object");
  }
  cfg.base_dir = path.parent_path();
  const json &j = cfg.raw;
  for (const auto &[key, value] : j.items())
  {
    if (key == "problem")
    {
      cfg.problem = ParseProblem(value);
    }
    else if (key == "omega_min")
    {
      cfg.omega_min = NumberField(j, key);
    }
    else if (key == "omega_max")
    {
      cfg.omega_max = NumberField(j, key);
    }
    else if (key == "tau")
    {
      cfg.tau = NumberField(j, key);
    }
    else if (key == "steps_L")
    {
      const json list = value.is_array() ? value : json::array({value});
      for (const auto &v : list)
      {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
        {
          throw Error("config: 'steps_L' must be a positive integer or a list of them");
        }
        cfg.steps_L.push_back(v.get<std::size_t>());
      }
      if (cfg.steps_L.empty())
      {
        throw Error("config: 'steps_L' list is empty");
      }
    }
    else if (key == "m_max")
    {
      cfg.m_max = CountField(j, key);
    }
    else if (key == "n_accept")
    {
      cfg.n_accept = CountField(j, key);
    }
    else if (key == "residual_tol")
    {
      cfg.residual_tol = NumberField(j, key);
    }
    else if (key == "seed")
    {
      if (!value.is_number_unsigned())
      {
        throw Error("config: 'seed' must be a nonnegative integer");
      }
      cfg.seed = value.get<std::uint64_t>();
    }
    else if (key == "output_dir")
    {
      if (!value.is_string())
      {
        throw Error("config: 'output_dir' must be a path string");
      }
      cfg.output_dir = cfg.base_dir / value.get<std::string>();
    }
    else if (key == "power_iters")
    {
      cfg.power_iters = CountField(j, key);
    }
    else if (key == "cfl_safety")
    {
      cfg.cfl_safety = NumberField(j, key);
    }
    else if (key == "omega_grid")
    {
      if (!value.is_string())
      {
        throw Error("config: 'omega_grid' must be a string min:max:count");
      }
      cfg.omega_grid = value.get<std::string>();
    }
    else
    {
      throw Error("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

template <class T>
const T &Require(const std::optional<T> &v, const char *key)
{
  if (!v)
  {
    throw Error(std::string("config: '") + key + "' is required for this command");
  }
  return *v;
}

Pencil LoadPencil(const RunConfig &cfg)
{
  const auto &spec = Require(cfg.problem, "problem");
  if (spec.name.empty())
  {
    return load_matrix_market(cfg.base_dir / spec.stiffness, cfg.base_dir / spec.mass);
  }
  const auto &b = FindBuiltin(spec.name);
  return b.make(ResolveParams(b, spec.params));
}

std::vector<double> ParseGrid(const std::string &text)
{
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos)
  {
    throw Error("omega grid must look like min:max:count, got '" + text + "'");
  }
  double lo = 0, hi = 0;
  long long count = 0;
  try
  {
    std::size_t used = 0;
    const auto s1 = text.substr(0, a), s2 = text.substr(a + 1, b - a - 1), s3 = text.substr(b + 1);
    lo = std::stod(s1, &used);
    if (used != s1.size())
    {
      throw std::invalid_argument(s1);
    }
    hi = std::stod(s2, &used);
    if (used != s2.size())
    {
      throw std::invalid_argument(s2);
    }
    count = std::stoll(s3, &used);
    if (used != s3.size())
    {
      throw std::invalid_argument(s3);
    }
  }
  catch (const std::logic_error &)
  {
    throw Error("omega grid must look like min:max:count, got '" + text + "'");
  }
  if (count < 1 || lo < 0 || hi < lo || (count == 1 && hi != lo) || !std::isfinite(hi))
  {
    throw Error("omega grid needs 0 <= min <= max and count >= 1 (count 1 only with min == max)");
  }
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; k++)
  {
    grid[static_cast<std::size_t>(k)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return grid;
}

fs::path OutputDir(const RunConfig &cfg, const std::optional<std::string> &flag)
{
  fs::path dir = flag ? fs::path(*flag) : cfg.output_dir.value_or(fs::path("."));
  fs::create_directories(dir);
  return dir;
}

void WriteJson(const fs::path &path, const json &j)
{
  std::ofstream out(path);
  if (!out)
  {
    throw Error("cannot write " + path.string());
  }
  out << j.dump(2) << "\n";
}

struct TauChoice
{
  double tau;
  std::string source;
  double omega_max_estimate;  // 0 when tau came from the config
};

TauChoice ResolveTau(const RunConfig &cfg, const Pencil *pencil)
{
  if (cfg.tau)
  {
    return {*cfg.tau, "config", 0.0};
  }
  if (!pencil)
  {
    throw Error("config: 'tau' is required when no problem is given");
  }
  const double est = estimate_max_omega(diag_inverse(pencil->mass), pencil->stiffness, cfg.power_iters, cfg.seed);
  return {stable_tau(est, cfg.cfl_safety), "power_iteration", est};
}

// Commands -------------------------------------------------------------------

struct Flags
{
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> omega_grid;
};

RunConfig LoadWithFlags(const Flags &flags)
{
  auto cfg = LoadConfig(flags.config);
  if (flags.seed)
  {
    cfg.seed = *flags.seed;
    cfg.raw["seed"] = *flags.seed;
  }
  return cfg;
}

int CmdSolve(const Flags &flags, std::ostream &out, std::ostream &err)
{
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = LoadWithFlags(flags);
  if (cfg.steps_L.size() != 1)
  {
    throw Error("config: solve needs a single 'steps_L' value");
  }
  const auto pencil = LoadPencil(cfg);
  const auto tau = ResolveTau(cfg, &pencil);
  const std::size_t L = cfg.steps_L.front();

  SolverConfig sc{.filter = FilterSpec(Require(cfg.omega_min, "omega_min"), Require(cfg.omega_max, "omega_max"),
                                       tau.tau, L)};
  sc.m_max = cfg.m_max;
  sc.n_accept_target = cfg.n_accept;
  sc.residual_tol = cfg.residual_tol;
  sc.seed = cfg.seed;
  sc.power_iters = cfg.power_iters;
  const auto result = solve(pencil, sc);
  const auto dir = OutputDir(cfg, flags.out);

  json accepted = json::array();
  for (const auto &p : result.final_report.pairs)
  {
    if (p.accepted)
    {
      accepted.push_back({{"omega", p.omega}, {"omega_sq", p.omega_sq}, {"residual", p.residual}, {"mu", p.mu}});
    }
  }
  json results = {
      {"config_echo", cfg.raw},
      {"problem", pencil.label},
      {"dimension", pencil.Size()},
      {"tau", tau.tau},
      {"tau_source", tau.source},
      {"omega_max_estimate", result.omega_max_estimate},
      {"L", L},
      {"T", sc.filter.EndTime()},
      {"m_reached", result.basis.Dim()},
      {"spmv_count", result.spmv_count},
      {"filter_applications", result.filter_applications},
      {"breakdown", result.breakdown},
      {"target_reached", result.target_reached},
      {"accepted", accepted},
  };
  if (result.warning)
  {
    results["warning"] = *result.warning;
  }

  std::ofstream hist(dir / "history.csv");
  if (!hist)
  {
    throw Error("cannot write " + (dir / "history.csv").string());
  }
  hist << "step,pair_index,omega,residual,mu,accepted\n";
  for (const auto &rep : result.history)
  {
    for (std::size_t i = 0; i < rep.pairs.size(); i++)
    {
      const auto &p = rep.pairs[i];
      hist << rep.step << ',' << i << ',' << Num(p.omega) << ',' << Num(p.residual) << ',' << Num(p.mu) << ','
           << (p.accepted ? "true" : "false") << '\n';
    }
  }

  results["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  WriteJson(dir / "results.json", results);

  out << "accepted " << accepted.size() << " pair(s) at m = " << result.basis.Dim() << ", tau = " << Num(tau.tau)
      << ", L = " << L << "\n";
  for (const auto &a : accepted)
  {
    out << "  omega = " << Num(a["omega"].get<double>()) << "  residual = " << Num(a["residual"].get<double>())
        << "\n";
  }
  if (result.warning)
  {
    err << "warning: " << *result.warning << "\n";
    return kIncomplete;
  }
  return kOk;
}

int CmdFilterCurve(const Flags &flags, std::ostream &out)
{
  const auto cfg = LoadWithFlags(flags);
  const double lo = Require(cfg.omega_min, "omega_min"), hi = Require(cfg.omega_max, "omega_max");
  if (cfg.steps_L.empty())
  {
    throw Error("config: 'steps_L' is required for this command");
  }
  const auto grid_text = flags.omega_grid ? flags.omega_grid : cfg.omega_grid;
  if (!grid_text)
  {
    throw Error("filter-curve needs --omega-grid min:max:count (or 'omega_grid' in the config)");
  }
  const auto grid = ParseGrid(*grid_text);
  std::optional<Pencil> pencil;
  if (!cfg.tau)
  {
    pencil = LoadPencil(cfg);
  }
  const auto tau = ResolveTau(cfg, pencil ? &*pencil : nullptr);
  const auto dir = OutputDir(cfg, flags.out);
  for (std::size_t L : cfg.steps_L)
  {
    const FilterSpec spec(lo, hi, tau.tau, L);
    const auto name = cfg.steps_L.size() == 1 ? std::string("filter.csv") : "filter_L" + std::to_string(L) + ".csv";
    std::ofstream file(dir / name);
    if (!file)
    {
      throw Error("cannot write " + (dir / name).string());
    }
    write_filter_csv(file, filter_curve(spec, grid));
    out << "wrote " << (dir / name).string() << " (L = " << L << ", T = " << Num(spec.EndTime()) << ")\n";
  }
  return kOk;
}

int CmdSpectrum(const Flags &flags, std::ostream &out)
{
  const auto cfg = LoadWithFlags(flags);
  const auto pencil = LoadPencil(cfg);
  const auto ref = dense_reference_eigs(pencil);
  const auto omegas = ref.Omegas();
  const auto dir = OutputDir(cfg, flags.out);
  const auto &analytic = pencil.analytic_spectrum;

  std::ofstream csv(dir / "spectrum.csv");
  if (!csv)
  {
    throw Error("cannot write " + (dir / "spectrum.csv").string());
  }
  csv << "index,omega,omega_sq" << (analytic ? ",analytic_omega" : "") << "\n";
  double max_dev = 0.0;
  for (std::size_t i = 0; i < omegas.size(); i++)
  {
    csv << i << ',' << Num(omegas[i]) << ',' << Num(ref.omega_sq[i]);
    if (analytic)
    {
      csv << ',' << Num((*analytic)[i]);
      max_dev = std::max(max_dev, std::abs(omegas[i] - (*analytic)[i]));
    }
    csv << '\n';
  }
  json meta = {{"problem", pencil.label}, {"dimension", pencil.Size()}};
  if (analytic)
  {
    meta["max_abs_deviation_omega"] = max_dev;
  }
  WriteJson(dir / "spectrum.json", meta);
  out << "wrote " << omegas.size() << " eigenvalues to " << (dir / "spectrum.csv").string() << "\n";
  return kOk;
}

int CmdGen(const std::string &name, const std::vector<std::string> &assignments,
           const std::optional<std::string> &out_flag, std::ostream &out)
{
  const auto &b = FindBuiltin(name);
  Params given;
  for (const auto &a : assignments)
  {
    const auto eq = a.find('=');
    std::size_t used = 0;
    double value = 0.0;
    try
    {
      if (eq == std::string::npos)
      {
        throw std::invalid_argument(a);
      }
      value = std::stod(a.substr(eq + 1), &used);
    }
    catch (const std::logic_error &)
    {
      throw Error("parameter must look like key=value, got '" + a + "'");
    }
    if (used != a.size() - eq - 1)
    {
      throw Error("parameter must look like key=value, got '" + a + "'");
    }
    given[a.substr(0, eq)] = value;
  }
  const auto params = ResolveParams(b, given);
  const auto pencil = b.make(params);
  const fs::path dir = out_flag.value_or(".");
  fs::create_directories(dir);
  save_matrix_market(pencil, dir / "S.mtx", dir / "M.mtx");
  json side = {{"name", name}, {"params", params}, {"label", pencil.label}, {"dimension", pencil.Size()}};
  if (pencil.analytic_spectrum)
  {
    side["analytic_spectrum"] = *pencil.analytic_spectrum;
  }
  WriteJson(dir / "pencil.json", side);
  out << "wrote " << (dir / "S.mtx").string() << ", " << (dir / "M.mtx").string() << " (N = " << pencil.Size()
      << ")\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Filtered time-domain Krylov eigensolver for sparse pencils (S, M)", "wavekrylov"};
  app.require_subcommand(1);

  Flags flags;
  std::string gen_name;
  std::vector<std::string> gen_params;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", flags.config, "JSON run configuration")->required();
    cmd->add_option("--out", flags.out, "Output directory (overrides output_dir)");
    cmd->add_option("--seed", flags.seed, "Random seed (overrides seed)");
  };
  auto *solve_cmd = app.add_subcommand("solve", "Run the eigensolver; writes results.json and history.csv");
  add_common(solve_cmd);
  auto *filter_cmd = app.add_subcommand("filter-curve", "Tabulate the discrete filter; writes filter*.csv");
  add_common(filter_cmd);
  filter_cmd->add_option("--omega-grid", flags.omega_grid, "Frequency grid min:max:count");
  auto *spectrum_cmd = app.add_subcommand("spectrum", "Dense reference spectrum; writes spectrum.csv");
  add_common(spectrum_cmd);
  auto *gen_cmd = app.add_subcommand("gen", "Write a builtin pencil as Matrix Market files");
  gen_cmd->add_option("problem", gen_name, "Builtin problem: " + BuiltinNames())->required();
  gen_cmd->add_option("params", gen_params, "Parameters as key=value");
  gen_cmd->add_option("--out", flags.out, "Output directory");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try
  {
    if (solve_cmd->parsed())
    {
      return CmdSolve(flags, out, err);
    }
    if (filter_cmd->parsed())
    {
      return CmdFilterCurve(flags, out);
    }
    if (spectrum_cmd->parsed())
    {
      return CmdSpectrum(flags, out);
    }
    return CmdGen(gen_name, gen_params, flags.out, out);
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace wavekrylov::cli
