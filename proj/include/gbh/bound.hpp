#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbh {

/// Raised when an input leaves the region where a formula is defined or
/// where the FDR guarantee holds. `constraint()` names the violated rule.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string constraint, const std::string& detail)
      : std::domain_error(detail), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

struct BoundInput {
  double lambda;
  double rho;
  double alpha;
};

struct BoundOptions {
  /// Evaluate for lambda in (1/2, 1) as well. The result is then flagged as
  /// outside the theorem domain.
  bool force = false;
  /// Cap rho at the rounded 0.34 instead of the exact root of the cubic.
  bool stated_rho_cap = false;
};

enum class Parameterization { kRho, kA };

/// Seven additive terms of B(lambda, rho, alpha), each already multiplied by
/// alpha (1 - lambda). Index 0 is the Phi term; index k (k >= 1) is the
/// contribution of the k-th closed-form integral; the remaining integral
/// (the upper half-line Gaussian) is folded into index 0.
struct BoundBreakdown {
  std::array<double, 7> terms{};
  double total = 0.0;
  double alpha = 0.0;
  Parameterization parameterization = Parameterization::kRho;
  bool in_theorem_domain = true;

  double ratio() const { return total / alpha; }
};

/// a = 1/sqrt(1 - rho), b = -sqrt(rho/(1 - rho)) x0.
struct AParam {
  double a;
  double b;
  static AParam from(double rho, double x0);
};

/// 5a + 1 - 3a^3 - a^2; positive exactly on the admissible a-range above 1.
double domain_cubic(double a);

/// Root in (0.34, 0.35) of the cubic under a = 1/sqrt(1 - rho).
double rho_max();

bool in_theorem_domain(const BoundInput& in, const BoundOptions& opts = {});

/// Upper bound on sup_x (1 - Phi(ax + b)) / (1 - Phi(x)) claimed for the
/// conditional tail ratio.
double m_factor(double rho, double x0);

/// Lower bound on Pr(p > lambda | X0 = x0) for a null p-value.
double p_lower(double lambda, double rho, double x0);

/// Pr(p > lambda | X0 = x0) = Phi(a Phi^{-1}(1 - lambda) + b).
double exact_p_conditional(double lambda, double rho, double x0);

BoundBreakdown fdr_bound(const BoundInput& in, const BoundOptions& opts = {});
BoundBreakdown fdr_bound_aform(const BoundInput& in, const BoundOptions& opts = {});

/// Closed forms of the seven integrals, in order I1..I7.
std::array<double, 7> integrals_closed(double a);

struct CurveRow {
  double lambda;
  double rho;
  double bound;
  double ratio;
};

/// Rows in lambda-major, rho-ascending order. Throws DomainError listing
/// every offending grid point before evaluating anything.
std::vector<CurveRow> bound_curve(std::span<const double> lambdas, std::span<const double> rhos, double alpha,
                                  const BoundOptions& opts = {});

namespace serial {
std::vector<CurveRow> bound_curve(std::span<const double> lambdas, std::span<const double> rhos, double alpha,
                                  const BoundOptions& opts = {});
}  // namespace serial

}  // namespace gbh
