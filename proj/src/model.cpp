#include "smips/model.hpp"

#include <charconv>
#include <cmath>
#include <random>

#include <json.hpp>

namespace smips {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num_repr(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Uniform integer in [lo, hi], portable across standard libraries.
int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

void check_row_indices(const SparseRow& row, int limit, const std::string& where,
                       std::vector<std::string>& out) {
  for (const auto& [j, v] : row.coeffs) {
    if (j < 0 || j >= limit)
      out.push_back(where + ": index " + std::to_string(j) + " out of range [0," +
                    std::to_string(limit) + ")");
    if (!std::isfinite(v)) out.push_back(where + ": non-finite coefficient");
  }
  if (!std::isfinite(row.rhs)) out.push_back(where + ": non-finite rhs");
}

void check_vars(const std::vector<VarSpec>& vars, const std::string& prefix,
                std::vector<std::string>& out) {
  for (size_t j = 0; j < vars.size(); ++j) {
    const VarSpec& v = vars[j];
    if (v.lb > v.ub)
      out.push_back("bound inversion at " + prefix + "_" + std::to_string(j));
    if (v.kind == VarKind::bin && (v.lb < 0.0 || v.ub > 1.0))
      out.push_back("binary bound violation at " + prefix + "_" + std::to_string(j));
  }
}

}  // namespace

std::vector<std::string> validate(const StochasticProgram& p) {
  std::vector<std::string> out;
  if (static_cast<int>(p.c.size()) != p.n_x)
    out.push_back("c has length " + std::to_string(p.c.size()) + ", expected n_x");
  if (static_cast<int>(p.first_stage_vars.size()) != p.n_x)
    out.push_back("first_stage_vars length != n_x");
  check_vars(p.first_stage_vars, "x", out);
  for (size_t i = 0; i < p.first_stage_rows.size(); ++i)
    check_row_indices(p.first_stage_rows[i], p.n_x,
                      "first_stage_rows[" + std::to_string(i) + "]", out);
  double psum = 0.0;
  for (size_t s = 0; s < p.scenarios.size(); ++s) {
    const Scenario& sc = p.scenarios[s];
    const std::string tag = "scenario " + std::to_string(s);
    if (sc.prob <= 0.0) out.push_back(tag + ": probability must be positive");
    psum += sc.prob;
    if (static_cast<int>(sc.q.size()) != p.n_y)
      out.push_back(tag + ": q has length " + std::to_string(sc.q.size()) +
                    ", expected n_y");
    if (static_cast<int>(sc.second_stage_vars.size()) != p.n_y)
      out.push_back(tag + ": second_stage_vars length != n_y");
    check_vars(sc.second_stage_vars, "y", out);
    for (size_t i = 0; i < sc.rows.size(); ++i)
      check_row_indices(sc.rows[i], p.n_x + p.n_y,
                        tag + " rows[" + std::to_string(i) + "]", out);
  }
  if (!p.scenarios.empty() && std::fabs(psum - 1.0) > 1e-12)
    out.push_back("probabilities sum to " + num_repr(psum));
  if (p.scenarios.empty()) out.push_back("no scenarios");
  return out;
}

namespace {

// Equal probabilities that sum to 1 exactly, also for counts like 3.
std::vector<double> equal_probs(int count) {
  std::vector<double> p(count, 1.0 / count);
  double acc = 0.0;
  for (int s = 0; s + 1 < count; ++s) acc += p[s];
  p[count - 1] = 1.0 - acc;
  return p;
}

StochasticProgram gen_cap(const GeneratorParams& gp, std::mt19937_64& rng) {
  const int m = gp.m, n = gp.n, S = gp.scenarios;
  StochasticProgram p;
  p.name = "cap_like_m" + std::to_string(m) + "_n" + std::to_string(n) + "_s" +
           std::to_string(S) + "_seed" + std::to_string(gp.seed);
  p.n_x = m;
  p.n_y = m * n;
  p.first_stage_vars.assign(m, VarSpec{0.0, 1.0, VarKind::bin});
  for (int i = 0; i < m; ++i) p.c.push_back(uniform_int(rng, 20, 50));

  // Demands per client and scenario.
  std::vector<std::vector<int>> d(S, std::vector<int>(n));
  int dmax = 1;
  for (int s = 0; s < S; ++s) {
    int tot = 0;
    for (int j = 0; j < n; ++j) {
      d[s][j] = uniform_int(rng, 1, 5);
      tot += d[s][j];
    }
    dmax = std::max(dmax, tot);
  }
  // Facility 0 can always host every client, so the instance is feasible.
  std::vector<int> cap(m);
  for (int i = 0; i < m; ++i)
    cap[i] = i == 0 ? dmax : std::max(1, dmax * uniform_int(rng, 50, 100) / 100);

  const auto probs = equal_probs(S);
  for (int s = 0; s < S; ++s) {
    Scenario sc;
    sc.prob = probs[s];
    sc.second_stage_vars.assign(p.n_y, VarSpec{0.0, 1.0, VarKind::bin});
    for (int k = 0; k < p.n_y; ++k) sc.q.push_back(uniform_int(rng, 1, 10));
    auto y = [&](int i, int j) { return p.n_x + i * n + j; };
    for (int j = 0; j < n; ++j) {
      SparseRow assign;
      for (int i = 0; i < m; ++i) assign.coeffs.push_back({y(i, j), 1.0});
      assign.sense = Sense::eq;
      assign.rhs = 1.0;
      sc.rows.push_back(std::move(assign));
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        sc.rows.push_back({{{y(i, j), 1.0}, {i, -1.0}}, Sense::le, 0.0});
    for (int i = 0; i < m; ++i) {
      SparseRow capr;
      for (int j = 0; j < n; ++j)
        capr.coeffs.push_back({y(i, j), static_cast<double>(d[s][j])});
      capr.coeffs.push_back({i, static_cast<double>(-cap[i])});
      capr.sense = Sense::le;
      capr.rhs = 0.0;
      sc.rows.push_back(std::move(capr));
    }
    p.scenarios.push_back(std::move(sc));
  }
  return p;
}

StochasticProgram gen_dcap(const GeneratorParams& gp, std::mt19937_64& rng) {
  const int m = gp.m, n = gp.n, T = gp.periods, S = gp.scenarios;
  const int xmax = 4;
  StochasticProgram p;
  p.name = "dcap_like_m" + std::to_string(m) + "_n" + std::to_string(n) + "_t" +
           std::to_string(T) + "_s" + std::to_string(S) + "_seed" +
           std::to_string(gp.seed);
  // Integer capacity x_r plus a continuous cost-linearization component v_r.
  p.n_x = 2 * m;
  p.n_y = m * n * T;
  std::vector<int> kappa(m);
  for (int r = 0; r < m; ++r) {
    p.first_stage_vars.push_back({0.0, static_cast<double>(xmax), VarKind::integer});
    kappa[r] = uniform_int(rng, 2, 6);
  }
  for (int r = 0; r < m; ++r)
    p.first_stage_vars.push_back(
        {0.0, static_cast<double>(kappa[r] * xmax), VarKind::cont});
  for (int r = 0; r < m; ++r) p.c.push_back(uniform_int(rng, 1, 5));
  for (int r = 0; r < m; ++r) p.c.push_back(1.0);
  // v_r >= kappa_r * x_r (acquisition cost linearization).
  for (int r = 0; r < m; ++r)
    p.first_stage_rows.push_back(
        {{{r, static_cast<double>(kappa[r])}, {m + r, -1.0}}, Sense::le, 0.0});

  std::vector<std::vector<int>> d(S, std::vector<int>(n));
  int dtot_max = 1;
  for (int s = 0; s < S; ++s) {
    int tot = 0;
    for (int j = 0; j < n; ++j) {
      d[s][j] = uniform_int(rng, 1, 4);
      tot += d[s][j];
    }
    dtot_max = std::max(dtot_max, tot);
  }
  // One maxed-out resource can host every task in every period.
  const int cap_unit = (dtot_max + xmax - 1) / xmax;

  const auto probs = equal_probs(S);
  for (int s = 0; s < S; ++s) {
    Scenario sc;
    sc.prob = probs[s];
    sc.second_stage_vars.assign(p.n_y, VarSpec{0.0, 1.0, VarKind::bin});
    for (int k = 0; k < p.n_y; ++k) sc.q.push_back(uniform_int(rng, 1, 10));
    auto y = [&](int r, int j, int t) { return p.n_x + (t * n + j) * m + r; };
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < n; ++j) {
        SparseRow assign;
        for (int r = 0; r < m; ++r) assign.coeffs.push_back({y(r, j, t), 1.0});
        assign.sense = Sense::eq;
        assign.rhs = 1.0;
        sc.rows.push_back(std::move(assign));
      }
      for (int r = 0; r < m; ++r) {
        SparseRow capr;
        for (int j = 0; j < n; ++j)
          capr.coeffs.push_back({y(r, j, t), static_cast<double>(d[s][j])});
        capr.coeffs.push_back({r, static_cast<double>(-cap_unit)});
        capr.sense = Sense::le;
        capr.rhs = 0.0;
        sc.rows.push_back(std::move(capr));
      }
    }
    p.scenarios.push_back(std::move(sc));
  }
  return p;
}

StochasticProgram gen_sslp(const GeneratorParams& gp, std::mt19937_64& rng) {
  const int m = gp.m, n = gp.n, S = gp.scenarios;
  StochasticProgram p;
  p.name = "sslp_like_m" + std::to_string(m) + "_n" + std::to_string(n) + "_s" +
           std::to_string(S) + "_seed" + std::to_string(gp.seed);
  p.n_x = m;
  p.n_y = m * n + m;  // assignments plus one overflow per server
  p.first_stage_vars.assign(m, VarSpec{0.0, 1.0, VarKind::bin});
  for (int j = 0; j < m; ++j) p.c.push_back(uniform_int(rng, 5, 15));

  const int u = (n + m - 1) / m + 1;  // per-server capacity, unit demands
  const double overflow_cost = 20.0;

  std::vector<std::vector<int>> revenue(m, std::vector<int>(n));
  for (int j = 0; j < m; ++j)
    for (int c = 0; c < n; ++c) revenue[j][c] = uniform_int(rng, 8, 20);

  const auto probs = equal_probs(S);
  for (int s = 0; s < S; ++s) {
    Scenario sc;
    sc.prob = probs[s];
    std::vector<int> avail(n);
    for (int c = 0; c < n; ++c) avail[c] = uniform_int(rng, 0, 9) < 8 ? 1 : 0;
    auto y = [&](int j, int c) { return p.n_x + j * n + c; };
    auto o = [&](int j) { return p.n_x + m * n + j; };
    sc.second_stage_vars.assign(m * n, VarSpec{0.0, 1.0, VarKind::bin});
    for (int j = 0; j < m; ++j)
      sc.second_stage_vars.push_back(
          {0.0, static_cast<double>(n), VarKind::cont});
    sc.q.assign(p.n_y, 0.0);
    for (int j = 0; j < m; ++j)
      for (int c = 0; c < n; ++c) sc.q[j * n + c] = -revenue[j][c];
    for (int j = 0; j < m; ++j) sc.q[m * n + j] = overflow_cost;
    for (int c = 0; c < n; ++c) {
      SparseRow assign;
      for (int j = 0; j < m; ++j) assign.coeffs.push_back({y(j, c), 1.0});
      assign.sense = Sense::eq;
      assign.rhs = avail[c];
      sc.rows.push_back(std::move(assign));
    }
    for (int j = 0; j < m; ++j)
      for (int c = 0; c < n; ++c)
        sc.rows.push_back({{{y(j, c), 1.0}, {j, -1.0}}, Sense::le, 0.0});
    for (int j = 0; j < m; ++j) {
      SparseRow capr;
      for (int c = 0; c < n; ++c) capr.coeffs.push_back({y(j, c), 1.0});
      capr.coeffs.push_back({o(j), -1.0});
      capr.coeffs.push_back({j, static_cast<double>(-u)});
      capr.sense = Sense::le;
      capr.rhs = 0.0;
      sc.rows.push_back(std::move(capr));
    }
    p.scenarios.push_back(std::move(sc));
  }
  return p;
}

}  // namespace

StochasticProgram generate_instance(const GeneratorParams& gp) {
  if (gp.m < 1 || gp.n < 1 || gp.periods < 1 || gp.scenarios < 1)
    throw std::invalid_argument("generate_instance: all size parameters must be >= 1");
  std::mt19937_64 rng(gp.seed * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL +
                      static_cast<std::uint64_t>(gp.family));
  StochasticProgram p;
  switch (gp.family) {
    case Family::cap_like: p = gen_cap(gp, rng); break;
    case Family::dcap_like: p = gen_dcap(gp, rng); break;
    case Family::sslp_like: p = gen_sslp(gp, rng); break;
  }
  const auto violations = validate(p);
  if (!violations.empty())
    throw std::logic_error("generate_instance produced an invalid instance: " +
                           violations.front());
  return p;
}

// ---------------------------------------------------------------------------
// SMIP-JSON v1
// ---------------------------------------------------------------------------

namespace {

ordered_json var_to_json(const VarSpec& v) {
  ordered_json j;
  j["lb"] = v.lb;
  j["ub"] = v.ub;
  j["kind"] = to_string(v.kind);
  return j;
}

ordered_json row_to_json(const SparseRow& r) {
  ordered_json j;
  ordered_json coeffs = ordered_json::array();
  for (const auto& [idx, v] : r.coeffs) coeffs.push_back({idx, v});
  j["coeffs"] = std::move(coeffs);
  j["sense"] = to_string(r.sense);
  j["rhs"] = r.rhs;
  return j;
}

void expect_keys(const ordered_json& obj, std::initializer_list<const char*> keys,
                 const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys)
      if (key == k) known = true;
    if (!known) throw ParseError(where + ": unknown field \"" + key + "\"");
  }
  for (const char* k : keys)
    if (!obj.contains(k)) throw ParseError(where + ": missing field \"" + k + "\"");
}

double num_field(const ordered_json& j, const std::string& where, double inf_value) {
  if (j.is_null()) return inf_value;  // null encodes an infinite bound
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

VarSpec var_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  expect_keys(j, {"lb", "ub", "kind"}, where);
  VarSpec v;
  v.lb = num_field(j["lb"], where + ".lb", -kInf);
  v.ub = num_field(j["ub"], where + ".ub", kInf);
  const std::string k = j["kind"].get<std::string>();
  if (k == "cont") v.kind = VarKind::cont;
  else if (k == "bin") v.kind = VarKind::bin;
  else if (k == "int") v.kind = VarKind::integer;
  else throw ParseError(where + ".kind: unknown kind \"" + k + "\"");
  return v;
}

SparseRow row_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  expect_keys(j, {"coeffs", "sense", "rhs"}, where);
  SparseRow r;
  if (!j["coeffs"].is_array()) throw ParseError(where + ".coeffs: expected an array");
  for (const auto& pair : j["coeffs"]) {
    if (!pair.is_array() || pair.size() != 2)
      throw ParseError(where + ".coeffs: expected [index, value] pairs");
    r.coeffs.push_back({pair[0].get<int>(), pair[1].get<double>()});
  }
  const std::string s = j["sense"].get<std::string>();
  if (s == "le") r.sense = Sense::le;
  else if (s == "eq") r.sense = Sense::eq;
  else if (s == "ge") r.sense = Sense::ge;
  else throw ParseError(where + ".sense: unknown sense \"" + s + "\"");
  r.rhs = num_field(j["rhs"], where + ".rhs", kInf);
  return r;
}

}  // namespace

std::string serialize_instance(const StochasticProgram& p) {
  ordered_json j;
  j["format"] = "smip-json";
  j["version"] = 1;
  j["name"] = p.name;
  j["n_x"] = p.n_x;
  j["n_y"] = p.n_y;
  j["c"] = p.c;
  j["first_stage_vars"] = ordered_json::array();
  for (const auto& v : p.first_stage_vars) j["first_stage_vars"].push_back(var_to_json(v));
  j["first_stage_rows"] = ordered_json::array();
  for (const auto& r : p.first_stage_rows) j["first_stage_rows"].push_back(row_to_json(r));
  j["scenarios"] = ordered_json::array();
  for (const auto& sc : p.scenarios) {
    ordered_json js;
    js["prob"] = sc.prob;
    js["q"] = sc.q;
    js["second_stage_vars"] = ordered_json::array();
    for (const auto& v : sc.second_stage_vars)
      js["second_stage_vars"].push_back(var_to_json(v));
    js["rows"] = ordered_json::array();
    for (const auto& r : sc.rows) js["rows"].push_back(row_to_json(r));
    j["scenarios"].push_back(std::move(js));
  }
  return j.dump(2) + "\n";
}

StochasticProgram parse_instance(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level: expected an object");
  expect_keys(j,
              {"format", "version", "name", "n_x", "n_y", "c", "first_stage_vars",
               "first_stage_rows", "scenarios"},
              "top level");
  if (j["format"].get<std::string>() != "smip-json")
    throw ParseError("format: expected \"smip-json\"");
  if (j["version"].get<int>() != 1) throw ParseError("version: expected 1");
  StochasticProgram p;
  p.name = j["name"].get<std::string>();
  p.n_x = j["n_x"].get<int>();
  p.n_y = j["n_y"].get<int>();
  p.c = j["c"].get<std::vector<double>>();
  int idx = 0;
  for (const auto& v : j["first_stage_vars"])
    p.first_stage_vars.push_back(
        var_from_json(v, "first_stage_vars[" + std::to_string(idx++) + "]"));
  idx = 0;
  for (const auto& r : j["first_stage_rows"])
    p.first_stage_rows.push_back(
        row_from_json(r, "first_stage_rows[" + std::to_string(idx++) + "]"));
  int sidx = 0;
  for (const auto& js : j["scenarios"]) {
    const std::string where = "scenarios[" + std::to_string(sidx++) + "]";
    if (!js.is_object()) throw ParseError(where + ": expected an object");
    expect_keys(js, {"prob", "q", "second_stage_vars", "rows"}, where);
    Scenario sc;
    sc.prob = js["prob"].get<double>();
    if (sc.prob <= 0.0) throw ParseError(where + ".prob: probability must be positive");
    sc.q = js["q"].get<std::vector<double>>();
    idx = 0;
    for (const auto& v : js["second_stage_vars"])
      sc.second_stage_vars.push_back(
          var_from_json(v, where + ".second_stage_vars[" + std::to_string(idx++) + "]"));
    idx = 0;
    for (const auto& r : js["rows"])
      sc.rows.push_back(row_from_json(r, where + ".rows[" + std::to_string(idx++) + "]"));
    p.scenarios.push_back(std::move(sc));
  }
  return p;
}

}  // namespace smips
