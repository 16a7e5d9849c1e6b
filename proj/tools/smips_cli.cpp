#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smips/bench.hpp"
#include "smips/lp_io.hpp"
#include "smips/model.hpp"
#include "smips/oracle.hpp"
#include "smips/pbgs.hpp"
#include "smips/penalty.hpp"
#include "smips/ph.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;  // also: no consensus, non-spanning basis
constexpr int kUsage = 2;
constexpr int kInternal = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

void print_vector(const char* label, const std::vector<double>& v) {
  std::cout << label << " [";
  for (size_t i = 0; i < v.size(); ++i) std::cout << (i ? " " : "") << v[i];
  std::cout << "]\n";
}

smips::PositiveBasis load_basis(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  smips::PositiveBasis basis;
  basis.vectors = j.get<std::vector<std::vector<double>>>();
  if (basis.vectors.empty()) throw std::runtime_error("basis file has no vectors");
  basis.m = static_cast<int>(basis.vectors[0].size());
  for (const auto& v : basis.vectors)
    if (static_cast<int>(v.size()) != basis.m)
      throw std::runtime_error("basis vectors have mixed dimensions");
  return basis;
}

// Builtin names: plus_minus_axes:M or axes_and_antidiagonal:M.
smips::PositiveBasis builtin_basis(const std::string& name) {
  const auto colon = name.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("builtin name must look like plus_minus_axes:3");
  const std::string kind = name.substr(0, colon);
  const int m = std::stoi(name.substr(colon + 1));
  if (m < 1) throw std::runtime_error("builtin dimension must be positive");
  if (kind == "plus_minus_axes") return smips::PositiveBasis::plus_minus_axes(m);
  if (kind == "axes_and_antidiagonal")
    return smips::PositiveBasis::axes_and_antidiagonal(m);
  throw std::runtime_error("unknown builtin basis '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario-decomposition solvers for two-stage stochastic MIPs"};
  app.require_subcommand(1);
  std::string solver_cmd;
  app.add_option("--solver-cmd", solver_cmd,
                 "external solver: `CMD problem.lp solution.txt`");

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  std::string gen_family = "sslp_like", gen_out;
  std::vector<int> gen_sizes;
  int gen_scenarios = 1;
  std::uint64_t gen_seed = 0;
  gen->add_option("--family", gen_family, "cap_like | dcap_like | sslp_like")
      ->required();
  gen->add_option("--sizes", gen_sizes, "m n [periods]")
      ->required()
      ->expected(2, 3);
  gen->add_option("--scenarios", gen_scenarios)->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output instance file")->required();

  // solve-exact
  auto* exact = app.add_subcommand("solve-exact", "extensive-form optimum");
  std::string exact_file;
  exact->add_option("file", exact_file)->required();

  // solve-pbgs
  auto* pbgs = app.add_subcommand("solve-pbgs", "penalty-based block Gauss-Seidel");
  std::string pbgs_file, tie_break = "keep", mult_exponent = "kminus1";
  smips::PbgsParams pp;
  double gamma_factor = 1.0;
  pbgs->add_option("file", pbgs_file)->required();
  pbgs->add_option("--rho0", pp.rho0);
  pbgs->add_option("--beta", pp.beta);
  pbgs->add_option("--gamma-factor", gamma_factor);
  pbgs->add_option("--eps", pp.eps);
  pbgs->add_option("--lmax", pp.l_max);
  pbgs->add_option("--kmax", pp.k_max);
  pbgs->add_option("--tie-break", tie_break)
      ->check(CLI::IsMember({"keep", "coin"}));
  pbgs->add_option("--mult-exponent", mult_exponent)
      ->check(CLI::IsMember({"kminus1", "k"}));
  pbgs->add_option("--seed", pp.seed);
  pbgs->add_option("--threads", pp.threads);

  // solve-ph
  auto* ph = app.add_subcommand("solve-ph", "progressive hedging");
  std::string ph_file;
  smips::PhParams hp;
  ph->add_option("file", ph_file)->required();
  ph->add_option("--rho", hp.rho);
  ph->add_option("--eps", hp.eps);
  ph->add_option("--kmax", hp.k_max);
  ph->add_option("--threads", hp.threads);

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment grid");
  std::string bench_grid, bench_out;
  bench->add_option("--grid", bench_grid, "grid JSON file")->required();
  bench->add_option("--out", bench_out, "CSV output file")->required();

  // summarize
  auto* summ = app.add_subcommand("summarize", "aggregate a results CSV");
  std::string summ_file;
  summ->add_option("file", summ_file)->required();

  // verify-penalty
  auto* verify = app.add_subcommand("verify-penalty",
                                    "positive-spanning and growth check");
  std::string verify_basis, verify_builtin;
  auto* opt_basis = verify->add_option("--basis", verify_basis,
                                       "JSON file: array of vectors");
  verify->add_option("--builtin", verify_builtin, "e.g. plus_minus_axes:3")
      ->excludes(opt_basis);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    std::unique_ptr<smips::ExternalBackend> external;
    if (!solver_cmd.empty())
      external = std::make_unique<smips::ExternalBackend>(solver_cmd);
    smips::MilpBackend* backend = external.get();

    if (*gen) {
      smips::GeneratorParams gp;
      gp.family = smips::family_from_string(gen_family);
      gp.m = gen_sizes[0];
      gp.n = gen_sizes[1];
      gp.periods = gen_sizes.size() > 2 ? gen_sizes[2] : 1;
      gp.scenarios = gen_scenarios;
      gp.seed = gen_seed;
      const auto p = smips::generate_instance(gp);
      write_file(gen_out, smips::serialize_instance(p));
      std::cout << "wrote " << p.name << " (" << p.n_x << " first-stage vars, "
                << p.n_y << " recourse vars, " << p.num_scenarios()
                << " scenarios) to " << gen_out << "\n";
      return kOk;
    }

    if (*exact) {
      const auto p = smips::parse_instance(read_file(exact_file));
      const auto sol = smips::solve_exact(p, backend);
      std::cout << "status " << smips::to_string(sol.status) << "\n";
      if (sol.status != smips::SolveStatus::optimal) return kInfeasible;
      std::cout << "objective " << sol.zeta << "\n";
      std::cout << "nodes " << sol.nodes << "\n";
      print_vector("x", sol.x);
      return kOk;
    }

    if (*pbgs) {
      const auto p = smips::parse_instance(read_file(pbgs_file));
      pp.gamma = gamma_factor * pp.rho0;
      pp.tie_break = tie_break == "coin" ? smips::TieBreak::coin_flip
                                         : smips::TieBreak::keep_previous;
      pp.multiplier_exponent = mult_exponent == "k"
                                   ? smips::MultiplierExponent::k
                                   : smips::MultiplierExponent::k_minus_1;
      const auto report = smips::run_pbgs(p, pp, backend);
      const char* term = report.termination == smips::PbgsStop::residual_met
                             ? "residual_met"
                             : report.termination == smips::PbgsStop::k_max
                                   ? "k_max"
                                   : "time_limit";
      long inner = 0;
      for (const auto& it : report.outer) inner += it.inner;
      std::cout << "termination " << term << "\n";
      std::cout << "outer " << report.outer.size() << " inner " << inner << "\n";
      if (!report.outer.empty())
        std::cout << "residual " << report.outer.back().residual << "\n";
      std::cout << "wall_ms " << report.wall_ms << "\n";
      print_vector("z", report.z);
      if (!report.consensus_feasible) {
        std::cout << "consensus infeasible\n";
        return kInfeasible;
      }
      std::cout << "consensus objective " << report.consensus_objective << "\n";
      return kOk;
    }

    if (*ph) {
      const auto p = smips::parse_instance(read_file(ph_file));
      const auto report = smips::run_ph(p, hp, backend);
      const char* term = report.termination == smips::PhStop::residual_met
                             ? "residual_met"
                             : report.termination == smips::PhStop::k_max
                                   ? "k_max"
                                   : "time_limit";
      std::cout << "termination " << term << "\n";
      std::cout << "iterations " << report.residuals.size() << "\n";
      if (!report.residuals.empty())
        std::cout << "residual " << report.residuals.back() << "\n";
      std::cout << "wall_ms " << report.wall_ms << "\n";
      print_vector("z", report.z);
      if (!report.consensus_feasible) {
        std::cout << "consensus infeasible\n";
        return kInfeasible;
      }
      std::cout << "consensus objective " << report.consensus_objective << "\n";
      return kOk;
    }

    if (*bench) {
      const auto grid = smips::parse_grid(read_file(bench_grid));
      std::ofstream out(bench_out);
      if (!out) throw std::runtime_error("cannot open " + bench_out + " for writing");
      const auto rows = smips::run_experiment(grid, backend, &out);
      std::cout << "wrote " << rows.size() << " rows to " << bench_out << "\n";
      return kOk;
    }

    if (*summ) {
      const auto rows = smips::from_csv(read_file(summ_file));
      std::cout << smips::summarize(rows).render();
      return kOk;
    }

    if (*verify) {
      if (verify_basis.empty() == verify_builtin.empty())
        throw CLI::ValidationError("verify-penalty",
                                   "exactly one of --basis/--builtin required");
      const auto basis = verify_basis.empty() ? builtin_basis(verify_builtin)
                                              : load_basis(verify_basis);
      const auto check = smips::is_positive_basis(basis);
      if (!check.spans) {
        std::cout << "not a positive basis\n";
        print_vector("witness", check.witness);
        return kInfeasible;
      }
      std::cout << "positive basis (m=" << basis.m << ", "
                << basis.vectors.size() << " vectors)\n";
      const auto f = smips::AugmentingFunction::psi_inf(basis);
      const auto cert = smips::estimate_growth_constants(f, basis, 1.0, 2000, 0);
      std::cout << "delta " << cert.delta << "\n";
      std::cout << "gamma " << cert.gamma_growth << "\n";
      return kOk;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const smips::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
