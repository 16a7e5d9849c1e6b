#include "smips/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "smips/oracle.hpp"
#include "smips/pbgs.hpp"
#include "smips/ph.hpp"

namespace smips {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_num(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad numeric CSV field '" + s + "'");
  return v;
}

long parse_long(const std::string& s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer CSV field '" + s + "'");
  return v;
}

// Commas and newlines would break the row format; status text never needs them.
std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

const char* to_string(PbgsStop t) {
  switch (t) {
    case PbgsStop::residual_met: return "residual_met";
    case PbgsStop::k_max: return "k_max";
    case PbgsStop::time_limit: return "time_limit";
  }
  return "?";
}

const char* to_string(PhStop t) {
  switch (t) {
    case PhStop::residual_met: return "residual_met";
    case PhStop::k_max: return "k_max";
    case PhStop::time_limit: return "time_limit";
  }
  return "?";
}

double gap_of(double obj, double exact) {
  if (std::isnan(obj) || std::isnan(exact)) return std::numeric_limits<double>::quiet_NaN();
  return (obj - exact) / std::fabs(exact);
}

struct MeanStdev {
  double mean = 0.0, stdev = 0.0;
};

// Sample standard deviation; zero when fewer than two values.
MeanStdev mean_stdev(const std::vector<double>& v) {
  MeanStdev out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double acc = 0.0;
  for (double x : v) acc += (x - out.mean) * (x - out.mean);
  out.stdev = std::sqrt(acc / static_cast<double>(v.size() - 1));
  return out;
}

}  // namespace

void ExperimentGrid::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("grid: " + msg); };
  if (m < 1 || n < 1 || periods < 1 || scenarios < 1) fail("sizes must be positive");
  if (seeds.empty()) fail("seed list is empty");
  if (methods.empty()) fail("method list is empty");
  for (const auto& method : methods)
    if (method != "pbgs" && method != "ph" && method != "exact")
      fail("unknown method '" + method + "'");
  const bool pbgs = std::count(methods.begin(), methods.end(), "pbgs") > 0;
  const bool ph = std::count(methods.begin(), methods.end(), "ph") > 0;
  if ((pbgs || ph) && rho0_list.empty()) fail("rho0 list is empty");
  if (pbgs && beta_list.empty()) fail("beta list is empty");
  if (pbgs && gamma_factor_list.empty()) fail("gamma_factor list is empty");
  for (double v : rho0_list)
    if (v <= 0) fail("rho0 values must be positive");
  for (double v : beta_list)
    if (v <= 1) fail("beta values must exceed 1");
  for (double v : gamma_factor_list)
    if (v <= 0) fail("gamma_factor values must be positive");
  if (eps <= 0) fail("eps must be positive");
  if (k_max < 1 || l_max < 1) fail("iteration limits must be positive");
  if (time_limit_ms <= 0) fail("time limit must be positive");
  if (threads < 1) fail("threads must be positive");
}

ExperimentGrid parse_grid(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("grid: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("grid: top level must be an object");
  static const std::vector<std::string> known{
      "family", "m", "n", "periods", "scenarios", "seeds", "methods",
      "rho0", "beta", "gamma_factor", "eps", "k_max", "l_max",
      "time_limit_ms", "threads"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("grid: unknown field '" + key + "'");
  for (const auto& key : {"family", "scenarios", "seeds", "methods"})
    if (!j.contains(key))
      throw std::invalid_argument("grid: missing field '" + std::string(key) + "'");

  ExperimentGrid g;
  try {
    g.family = family_from_string(j["family"].get<std::string>());
    g.m = j.value("m", 1);
    g.n = j.value("n", 1);
    g.periods = j.value("periods", 1);
    g.scenarios = j["scenarios"].get<int>();
    g.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    g.methods = j["methods"].get<std::vector<std::string>>();
    g.rho0_list = j.value("rho0", std::vector<double>{});
    g.beta_list = j.value("beta", std::vector<double>{});
    g.gamma_factor_list = j.value("gamma_factor", std::vector<double>{});
    g.eps = j.value("eps", 1e-3);
    g.k_max = j.value("k_max", 50);
    g.l_max = j.value("l_max", 20);
    g.time_limit_ms = j.value("time_limit_ms", 60'000L);
    g.threads = j.value("threads", 1);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("grid: ") + e.what());
  }
  g.validate();
  return g;
}

std::string csv_header() {
  return "instance_id,family,seed,method,rho0,beta,gamma_factor,outer_iters,"
         "inner_iters,wall_ms,residual,objective,exact_objective,gap,converged,"
         "nodes,subproblems,status";
}

std::string to_csv_line(const ResultRow& r) {
  std::string out;
  out += sanitize(r.instance_id) + ",";
  out += sanitize(r.family) + ",";
  out += std::to_string(r.seed) + ",";
  out += sanitize(r.method) + ",";
  out += num(r.rho0) + ",";
  out += num(r.beta) + ",";
  out += num(r.gamma_factor) + ",";
  out += std::to_string(r.outer_iters) + ",";
  out += std::to_string(r.inner_iters) + ",";
  out += num(r.wall_ms) + ",";
  out += num(r.residual) + ",";
  out += num(r.objective) + ",";
  out += num(r.exact_objective) + ",";
  out += num(r.gap) + ",";
  out += r.converged ? "1," : "0,";
  out += std::to_string(r.nodes) + ",";
  out += std::to_string(r.subproblems) + ",";
  out += sanitize(r.status);
  return out;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += to_csv_line(r) + "\n";
  return out;
}

std::vector<ResultRow> from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw std::invalid_argument("csv: missing or mismatched header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 18)
      throw std::invalid_argument("csv: expected 18 fields, got " +
                                  std::to_string(fields.size()));
    ResultRow r;
    r.instance_id = fields[0];
    r.family = fields[1];
    r.seed = static_cast<std::uint64_t>(parse_long(fields[2]));
    r.method = fields[3];
    r.rho0 = parse_num(fields[4]);
    r.beta = parse_num(fields[5]);
    r.gamma_factor = parse_num(fields[6]);
    r.outer_iters = parse_long(fields[7]);
    r.inner_iters = parse_long(fields[8]);
    r.wall_ms = parse_num(fields[9]);
    r.residual = parse_num(fields[10]);
    r.objective = parse_num(fields[11]);
    r.exact_objective = parse_num(fields[12]);
    r.gap = parse_num(fields[13]);
    if (fields[14] != "0" && fields[14] != "1")
      throw std::invalid_argument("csv: converged flag must be 0 or 1");
    r.converged = fields[14] == "1";
    r.nodes = parse_long(fields[15]);
    r.subproblems = parse_long(fields[16]);
    r.status = fields[17];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

void emit(std::vector<ResultRow>& rows, std::ostream* stream, ResultRow row) {
  if (stream) *stream << to_csv_line(row) << "\n" << std::flush;
  rows.push_back(std::move(row));
}

ResultRow base_row(const StochasticProgram& p, std::uint64_t seed,
                   const std::string& method) {
  ResultRow r;
  r.instance_id = p.name;
  r.family = p.name.substr(0, p.name.find("_m"));
  r.seed = seed;
  r.method = method;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.rho0 = r.beta = r.gamma_factor = nan;
  r.objective = r.exact_objective = r.gap = nan;
  return r;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentGrid& grid,
                                      MilpBackend* backend, std::ostream* stream) {
  grid.validate();
  if (stream) *stream << csv_header() << "\n";
  const bool want_pbgs = std::count(grid.methods.begin(), grid.methods.end(), "pbgs") > 0;
  const bool want_ph = std::count(grid.methods.begin(), grid.methods.end(), "ph") > 0;

  std::vector<ResultRow> rows;
  for (std::uint64_t seed : grid.seeds) {
    GeneratorParams gp;
    gp.family = grid.family;
    gp.m = grid.m;
    gp.n = grid.n;
    gp.periods = grid.periods;
    gp.scenarios = grid.scenarios;
    gp.seed = seed;
    const auto p = generate_instance(gp);

    // The exact optimum anchors every gap column, so it is always computed.
    double exact_obj = std::numeric_limits<double>::quiet_NaN();
    {
      ResultRow r = base_row(p, seed, "exact");
      try {
        const auto exact = solve_exact(p, backend);
        r.status = to_string(exact.status);
        r.nodes = exact.nodes;
        r.subproblems = 1;
        if (exact.status == SolveStatus::optimal) {
          exact_obj = exact.zeta;
          r.objective = r.exact_objective = exact.zeta;
          r.gap = 0.0;
          r.converged = true;
        }
      } catch (const std::exception& e) {
        r.status = "error: " + std::string(e.what());
      }
      emit(rows, stream, std::move(r));
    }

    if (want_pbgs) {
      for (double rho0 : grid.rho0_list) {
        for (double beta : grid.beta_list) {
          for (double gf : grid.gamma_factor_list) {
            ResultRow r = base_row(p, seed, "pbgs");
            r.rho0 = rho0;
            r.beta = beta;
            r.gamma_factor = gf;
            try {
              PbgsParams params;
              params.rho0 = rho0;
              params.beta = beta;
              params.gamma = gf * rho0;
              params.eps = grid.eps;
              params.l_max = grid.l_max;
              params.k_max = grid.k_max;
              params.seed = seed;
              params.threads = grid.threads;
              params.time_limit_ms = grid.time_limit_ms;
              const auto report = run_pbgs(p, params, backend);
              r.status = to_string(report.termination);
              r.converged = report.termination == PbgsStop::residual_met;
              r.outer_iters = static_cast<long>(report.outer.size());
              for (const auto& it : report.outer) r.inner_iters += it.inner;
              if (!report.outer.empty()) r.residual = report.outer.back().residual;
              r.wall_ms = report.wall_ms;
              r.nodes = report.total_nodes;
              r.subproblems = report.subproblems_solved;
              if (report.consensus_feasible) r.objective = report.consensus_objective;
              r.exact_objective = exact_obj;
              r.gap = gap_of(r.objective, exact_obj);
            } catch (const std::exception& e) {
              r.status = "error: " + std::string(e.what());
            }
            emit(rows, stream, std::move(r));
          }
        }
      }
    }

    if (want_ph) {
      for (double rho0 : grid.rho0_list) {
        ResultRow r = base_row(p, seed, "ph");
        r.rho0 = rho0;
        try {
          PhParams params;
          params.rho = rho0;
          params.eps = grid.eps;
          params.k_max = grid.k_max;
          params.seed = seed;
          params.threads = grid.threads;
          params.time_limit_ms = grid.time_limit_ms;
          const auto report = run_ph(p, params, backend);
          r.status = to_string(report.termination);
          r.converged = report.termination == PhStop::residual_met;
          r.outer_iters = static_cast<long>(report.residuals.size());
          r.inner_iters = r.outer_iters;
          if (!report.residuals.empty()) r.residual = report.residuals.back();
          r.wall_ms = report.wall_ms;
          r.nodes = report.total_nodes;
          r.subproblems = report.subproblems_solved;
          if (report.consensus_feasible) r.objective = report.consensus_objective;
          r.exact_objective = exact_obj;
          r.gap = gap_of(r.objective, exact_obj);
        } catch (const std::exception& e) {
          r.status = "error: " + std::string(e.what());
        }
        emit(rows, stream, std::move(r));
      }
    }
  }
  return rows;
}

Summary summarize(const std::vector<ResultRow>& rows) {
  // ph rows keyed by (instance, seed, rho0); rho0 serialized to avoid
  // floating-point map keys with distinct NaNs.
  std::map<std::string, const ResultRow*> ph_rows;
  for (const auto& r : rows) {
    if (r.method != "ph") continue;
    const std::string key = r.instance_id + "|" + std::to_string(r.seed) + "|" + num(r.rho0);
    if (!ph_rows.emplace(key, &r).second)
      throw std::invalid_argument("summarize: duplicate ph row for " + key);
  }

  struct Cell {
    std::vector<double> objdiff, speedup;
    int pairs = 0;
    int ph_total = 0, ph_converged = 0;
  };
  std::map<std::tuple<double, double, double>, Cell> cells;
  for (const auto& r : rows) {
    if (r.method != "pbgs") continue;
    auto& cell = cells[{r.rho0, r.beta, r.gamma_factor}];
    if (ph_rows.empty()) continue;
    const std::string key = r.instance_id + "|" + std::to_string(r.seed) + "|" + num(r.rho0);
    const auto it = ph_rows.find(key);
    if (it == ph_rows.end())
      throw std::invalid_argument("summarize: no ph partner for " + key);
    const ResultRow& ph = *it->second;
    cell.pairs += 1;
    cell.ph_total += 1;
    if (ph.converged) cell.ph_converged += 1;
    if (ph.status == "time_limit") continue;  // outlier pair, dropped entirely
    if (!std::isnan(r.objective) && !std::isnan(ph.objective) && ph.objective != 0.0)
      cell.objdiff.push_back((r.objective - ph.objective) / ph.objective);
    if (r.wall_ms > 0.0 && ph.wall_ms > 0.0)
      cell.speedup.push_back(ph.wall_ms / r.wall_ms);
  }

  Summary out;
  for (const auto& [key, cell] : cells) {
    SummaryRow s;
    std::tie(s.rho0, s.beta, s.gamma_factor) = key;
    s.pairs = cell.pairs;
    s.speedup_pairs = static_cast<int>(cell.speedup.size());
    const auto od = mean_stdev(cell.objdiff);
    s.objdiff_mean = od.mean;
    s.objdiff_stdev = od.stdev;
    const auto sp = mean_stdev(cell.speedup);
    s.speedup_mean = sp.mean;
    s.speedup_stdev = sp.stdev;
    s.ph_conv_fraction =
        cell.ph_total > 0
            ? static_cast<double>(cell.ph_converged) / cell.ph_total
            : 0.0;
    out.rows.push_back(s);
  }
  return out;
}

std::string Summary::render() const {
  std::ostringstream os;
  os << "rho0      beta      gamma_f   pairs  obj_diff_mean  obj_diff_sd    "
        "speedup_mean   speedup_sd     ph_conv\n";
  auto col = [&os](double v, int width) {
    std::string s = num(v);
    if (s.empty()) s = "-";
    os << s << std::string(s.size() < static_cast<size_t>(width)
                               ? width - s.size()
                               : 1,
                           ' ');
  };
  for (const auto& r : rows) {
    col(r.rho0, 10);
    col(r.beta, 10);
    col(r.gamma_factor, 10);
    std::string p = std::to_string(r.pairs);
    os << p << std::string(p.size() < 7 ? 7 - p.size() : 1, ' ');
    col(r.objdiff_mean, 15);
    col(r.objdiff_stdev, 15);
    col(r.speedup_mean, 15);
    col(r.speedup_stdev, 15);
    col(r.ph_conv_fraction, 8);
    os << "\n";
  }
  return os.str();
}

}  // namespace smips
