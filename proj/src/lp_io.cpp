#include "smips/lp_io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace smips {

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void append_terms(std::string& out, const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  for (const auto& [idx, coef] : terms) {
    if (coef == 0.0) continue;
    if (first) {
      out += coef < 0 ? "- " : "";
      first = false;
    } else {
      out += coef < 0 ? " - " : " + ";
    }
    out += num(std::fabs(coef));
    out += " x";
    out += std::to_string(idx);
  }
  if (first) out += "0 x0";
}

}  // namespace

std::string write_lp(const MilpProblem& p, const std::string& name,
                     bool relax_integrality) {
  std::string out;
  out += "\\ " + name + "\n";
  out += "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < p.num_vars(); ++j) obj.push_back({j, p.objective[j]});
  append_terms(out, obj);
  out += "\nSubject To\n";
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& row = p.rows[i];
    out += " c" + std::to_string(i) + ": ";
    append_terms(out, row.coeffs);
    out += row.sense == Sense::le ? " <= " : row.sense == Sense::ge ? " >= " : " = ";
    out += num(row.rhs);
    out += "\n";
  }
  out += "Bounds\n";
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& v = p.vars[j];
    const std::string xn = "x" + std::to_string(j);
    const bool lo = std::isfinite(v.lb), hi = std::isfinite(v.ub);
    if (lo && hi && v.lb == v.ub) {
      out += " " + xn + " = " + num(v.lb) + "\n";
    } else if (lo && hi) {
      out += " " + num(v.lb) + " <= " + xn + " <= " + num(v.ub) + "\n";
    } else if (lo) {
      out += " " + xn + " >= " + num(v.lb) + "\n";
    } else if (hi) {
      out += " " + xn + " <= " + num(v.ub) + "\n";
    } else {
      out += " " + xn + " free\n";
    }
  }
  if (!relax_integrality) {
    std::string general, binary;
    for (int j = 0; j < p.num_vars(); ++j) {
      if (p.vars[j].kind == VarKind::integer) general += " x" + std::to_string(j) + "\n";
      if (p.vars[j].kind == VarKind::bin) binary += " x" + std::to_string(j) + "\n";
    }
    if (!general.empty()) out += "General\n" + general;
    if (!binary.empty()) out += "Binary\n" + binary;
  }
  out += "End\n";
  return out;
}

ExternalBackend::ExternalBackend(std::string command) : command_(std::move(command)) {
  if (command_.empty())
    throw std::invalid_argument("ExternalBackend: empty solver command");
}

MilpSolution ExternalBackend::solve_milp(const MilpProblem& p,
                                         const SolveOptions&) {
  return run(p, false);
}

MilpSolution ExternalBackend::solve_lp(const MilpProblem& p, const SolveOptions&) {
  return run(p, true);
}

MilpSolution ExternalBackend::run(const MilpProblem& p, bool relax) {
  static std::atomic<unsigned long> counter{0};
  const auto dir = std::filesystem::temp_directory_path();
  const std::string tag =
      "smips_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const auto lp_path = dir / (tag + ".lp");
  const auto sol_path = dir / (tag + ".sol");
  {
    std::ofstream lp(lp_path);
    lp << write_lp(p, tag, relax);
  }
  const std::string cmd =
      command_ + " " + lp_path.string() + " " + sol_path.string();
  const int rc = std::system(cmd.c_str());
  std::ifstream in(sol_path);
  if (rc != 0 || !in)
    throw std::runtime_error("ExternalBackend: solver command failed: " + cmd);

  MilpSolution sol;
  std::string status;
  in >> status;
  if (status == "optimal") {
    sol.status = SolveStatus::optimal;
  } else if (status == "infeasible") {
    sol.status = SolveStatus::infeasible;
  } else if (status == "unbounded") {
    sol.status = SolveStatus::unbounded;
  } else {
    throw std::runtime_error("ExternalBackend: unknown status '" + status + "'");
  }
  if (sol.status == SolveStatus::optimal) {
    std::string key;
    double value = 0.0;
    if (!(in >> key >> value) || key != "objective")
      throw std::runtime_error("ExternalBackend: missing objective line");
    sol.objective = value + p.objective_offset;
    sol.bound = sol.objective;
    sol.x.assign(p.num_vars(), 0.0);
    std::string var;
    while (in >> var >> value) {
      if (var.size() < 2 || var[0] != 'x')
        throw std::runtime_error("ExternalBackend: bad variable '" + var + "'");
      int idx = -1;
      const auto res =
          std::from_chars(var.data() + 1, var.data() + var.size(), idx);
      if (res.ec != std::errc{} || idx < 0 || idx >= p.num_vars())
        throw std::runtime_error("ExternalBackend: bad variable '" + var + "'");
      sol.x[idx] = value;
    }
  }
  std::error_code ec;
  std::filesystem::remove(lp_path, ec);
  std::filesystem::remove(sol_path, ec);
  return sol;
}

}  // namespace smips
