#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "smips/linear.hpp"

namespace smips {

// Componentwise negative part [v]^- = -min{0, v}.
std::vector<double> neg_part(std::span<const double> v);

struct PositiveBasis {
  int m = 0;
  std::vector<std::vector<double>> vectors;

  static PositiveBasis plus_minus_axes(int m);       // {+-e_i}
  static PositiveBasis axes_and_antidiagonal(int m); // {+e_i} u {-sum e_i}
};

struct SpanCheck {
  bool spans = false;
  std::vector<double> witness;  // direction u with n_i'u <= 0 for all i
};

// Exact LP decision: spans iff no nonzero u has n_i'u <= 0 for every i.
SpanCheck is_positive_basis(const PositiveBasis& basis);

// Norm-like augmenting functions built from a positive basis, the
// asymmetric component-weighted variant, and sum/max compositions of them.
class AugmentingFunction {
 public:
  enum class Kind { psi_inf, psi_one, psi_rho, composed };
  enum class Mode { sum, max };

  static AugmentingFunction psi_inf(PositiveBasis basis);
  static AugmentingFunction psi_one(PositiveBasis basis);
  // rho_lo/rho_hi are flattened over (scenario, component); the discrepancy
  // u uses the same layout.
  static AugmentingFunction psi_rho(std::vector<double> rho_lo,
                                    std::vector<double> rho_hi);
  static AugmentingFunction compose(std::vector<AugmentingFunction> children,
                                    Mode mode);

  double eval(std::span<const double> u) const;
  int dim() const { return m_; }
  Kind kind() const { return kind_; }

 private:
  AugmentingFunction() = default;
  Kind kind_ = Kind::psi_inf;
  Mode mode_ = Mode::sum;
  int m_ = 0;
  PositiveBasis basis_;
  std::vector<double> rho_lo_, rho_hi_;
  std::vector<AugmentingFunction> children_;
};

struct GrowthCertificate {
  double eps_v = 0.0;
  double delta = 0.0;
  double gamma_growth = 0.0;
  long samples = 0;
};

struct GrowthError : std::runtime_error {
  std::vector<double> witness;
  explicit GrowthError(const std::string& msg, std::vector<double> w = {})
      : std::runtime_error(msg), witness(std::move(w)) {}
};

// Estimates delta = min over the l-inf sphere of radius eps_v of psi_inf for
// the basis, via deterministic low-discrepancy sampling plus exact per-face
// coordinate descent; gamma = delta / eps_v. Throws GrowthError when the
// vectors do not positively span.
GrowthCertificate estimate_growth_constants(const AugmentingFunction& f,
                                            const PositiveBasis& basis,
                                            double eps_v, long n_samples,
                                            std::uint64_t seed);

}  // namespace smips
