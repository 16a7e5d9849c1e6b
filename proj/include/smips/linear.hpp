#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace smips {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, eq, ge };
enum class VarKind { cont, bin, integer };

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::le: return "le";
    case Sense::eq: return "eq";
    case Sense::ge: return "ge";
  }
  return "?";
}

inline const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::cont: return "cont";
    case VarKind::bin: return "bin";
    case VarKind::integer: return "int";
  }
  return "?";
}

struct VarSpec {
  double lb = 0.0;
  double ub = kInf;
  VarKind kind = VarKind::cont;

  bool operator==(const VarSpec&) const = default;
};

// One sparse linear row: sum_j coeff_j * x_{idx_j}  (sense)  rhs.
struct SparseRow {
  std::vector<std::pair<int, double>> coeffs;
  Sense sense = Sense::le;
  double rhs = 0.0;

  bool operator==(const SparseRow&) const = default;

  double activity(const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& [j, v] : coeffs) a += v * x[j];
    return a;
  }

  // Signed violation; 0 when satisfied.
  double violation(const std::vector<double>& x) const {
    const double a = activity(x);
    switch (sense) {
      case Sense::le: return a > rhs ? a - rhs : 0.0;
      case Sense::ge: return a < rhs ? rhs - a : 0.0;
      case Sense::eq: return a > rhs ? a - rhs : rhs - a;
    }
    return 0.0;
  }
};

}  // namespace smips
