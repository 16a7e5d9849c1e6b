#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "smips/linear.hpp"

namespace smips {

// One realization of uncertainty: probability, recourse costs, second-stage
// variables and the rows that jointly encode Y_s(x). Row indices in
// [0, n_x) address x, [n_x, n_x + n_y) address this scenario's y.
struct Scenario {
  double prob = 0.0;
  std::vector<double> q;
  std::vector<VarSpec> second_stage_vars;
  std::vector<SparseRow> rows;

  bool operator==(const Scenario&) const = default;
};

// Two-stage SMIP instance. Immutable after construction by convention; safe
// to share read-only across threads.
struct StochasticProgram {
  std::string name;
  int n_x = 0;
  int n_y = 0;
  std::vector<double> c;
  std::vector<VarSpec> first_stage_vars;
  std::vector<SparseRow> first_stage_rows;
  std::vector<Scenario> scenarios;

  bool operator==(const StochasticProgram&) const = default;

  int num_scenarios() const { return static_cast<int>(scenarios.size()); }
};

enum class Family { cap_like, dcap_like, sslp_like };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::cap_like: return "cap_like";
    case Family::dcap_like: return "dcap_like";
    case Family::sslp_like: return "sslp_like";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "cap_like") return Family::cap_like;
  if (s == "dcap_like") return Family::dcap_like;
  if (s == "sslp_like") return Family::sslp_like;
  throw std::invalid_argument("unknown instance family '" + s + "'");
}

struct GeneratorParams {
  Family family = Family::sslp_like;
  int m = 1;          // facilities / resources / servers
  int n = 1;          // clients / tasks
  int periods = 1;    // dcap_like only
  int scenarios = 1;
  std::uint64_t seed = 0;
};

// Every invariant violation, with location; empty means valid.
std::vector<std::string> validate(const StochasticProgram& p);

// Deterministic in the seed; the result always passes validate().
StochasticProgram generate_instance(const GeneratorParams& params);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// SMIP-JSON v1. serialize is canonical (fixed field order, shortest
// round-trip decimals); parse(serialize(p)) == p exactly.
std::string serialize_instance(const StochasticProgram& p);
StochasticProgram parse_instance(const std::string& text);

}  // namespace smips
