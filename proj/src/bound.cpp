#include "gbh/bound.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gbh/format.hpp"
#include "gbh/stat_normal.hpp"

namespace gbh {

namespace {

constexpr double kStatedRhoCap = 0.34;
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

std::string fmt(double v) { return shortest(v); }

void require_unit_open(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError(std::string(name) + " in (0,1)", std::string(name) + " = " + fmt(v) + " outside (0,1)");
  }
}

double rho_cap(const BoundOptions& opts) {
  return opts.stated_rho_cap && !opts.force ? kStatedRhoCap : rho_max();
}

// Validates and returns whether the point lies in the theorem domain.
bool check_bound_input(const BoundInput& in, const BoundOptions& opts) {
  require_unit_open(in.alpha, "alpha");
  const double cap = rho_cap(opts);
  if (!(in.rho > 0.0 && in.rho < cap)) {
    throw DomainError("rho in (0," + fmt(cap) + ")",
                      "rho = " + fmt(in.rho) + " outside (0, " + fmt(cap) + ")");
  }
  if (opts.force) {
    require_unit_open(in.lambda, "lambda");
    return in_theorem_domain(in, {});
  }
  if (!(in.lambda > 0.0 && in.lambda <= 0.5)) {
    throw DomainError("lambda in (0,1/2]", "lambda = " + fmt(in.lambda) + " outside (0, 1/2]");
  }
  return true;
}

void finish(BoundBreakdown& out, const BoundInput& in) {
  const double scale = in.alpha * (1.0 - in.lambda);
  out.total = 0.0;
  for (double& t : out.terms) {
    t *= scale;
    out.total += t;
  }
  out.alpha = in.alpha;
}

std::vector<CurveRow> checked_grid(std::span<const double> lambdas, std::span<const double> rhos, double alpha,
                                   const BoundOptions& opts) {
  std::ostringstream bad;
  std::size_t n_bad = 0;
  for (double l : lambdas) {
    for (double r : rhos) {
      try {
        check_bound_input({l, r, alpha}, opts);
      } catch (const DomainError& e) {
        if (n_bad < 20) bad << "\n  (lambda=" << fmt(l) << ", rho=" << fmt(r) << "): " << e.what();
        ++n_bad;
      }
    }
  }
  if (n_bad > 0) {
    std::ostringstream msg;
    msg << n_bad << " grid point(s) outside the domain:" << bad.str();
    if (n_bad > 20) msg << "\n  ...";
    throw DomainError("grid", msg.str());
  }
  return std::vector<CurveRow>(lambdas.size() * rhos.size());
}

CurveRow curve_row(double lambda, double rho, double alpha, const BoundOptions& opts) {
  const BoundBreakdown b = fdr_bound({lambda, rho, alpha}, opts);
  return {lambda, rho, b.total, b.ratio()};
}

}  // namespace

AParam AParam::from(double rho, double x0) {
  return {1.0 / std::sqrt(1.0 - rho), -std::sqrt(rho / (1.0 - rho)) * x0};
}

double domain_cubic(double a) { return 5.0 * a + 1.0 - 3.0 * a * a * a - a * a; }

double rho_max() {
  static const double root = [] {
    auto f = [](double rho) { return domain_cubic(1.0 / std::sqrt(1.0 - rho)); };
    double lo = 0.34;  // f > 0
    double hi = 0.35;  // f < 0
    while (hi - lo > 1e-15) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  }();
  return root;
}

bool in_theorem_domain(const BoundInput& in, const BoundOptions& opts) {
  const double cap = opts.stated_rho_cap ? kStatedRhoCap : rho_max();
  return in.lambda > 0.0 && in.lambda <= 0.5 && in.rho > 0.0 && in.rho < cap && in.alpha > 0.0 && in.alpha < 1.0;
}

double m_factor(double rho, double x0) {
  if (!(rho > 0.0 && rho < rho_max())) {
    throw DomainError("rho in (0,rho_max)", "m_factor: rho = " + fmt(rho) + " outside (0, rho_max)");
  }
  const double s = std::sqrt(1.0 - rho);
  if (x0 <= 0.0) return 1.0 / s;
  const double one_minus_s = rho / (1.0 + s);
  const double lead = (4.0 * one_minus_s * one_minus_s + rho * x0 * x0) / (4.0 * (rho - one_minus_s));
  return 1.0 + lead * std::exp(rho * x0 * x0 / (4.0 * one_minus_s + 2.0 * rho));
}

double p_lower(double lambda, double rho, double x0) {
  if (!(lambda > 0.0 && lambda <= 0.5)) {
    throw DomainError("lambda in (0,1/2]", "p_lower: lambda = " + fmt(lambda) + " outside (0, 1/2]");
  }
  require_unit_open(rho, "rho");
  const AParam ab = AParam::from(rho, x0);
  if (ab.b >= 0.0) return norm_cdf(ab.a * norm_quantile(1.0 - lambda));
  return phi(-ab.b) / (1.0 - ab.b);
}

double exact_p_conditional(double lambda, double rho, double x0) {
  require_unit_open(lambda, "lambda");
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw DomainError("rho in [0,1)", "exact_p_conditional: rho = " + fmt(rho) + " outside [0, 1)");
  }
  const AParam ab = AParam::from(rho, x0);
  return norm_cdf(ab.a * norm_quantile(1.0 - lambda) + ab.b);
}

BoundBreakdown fdr_bound(const BoundInput& in, const BoundOptions& opts) {
  BoundBreakdown out;
  out.in_theorem_domain = check_bound_input(in, opts);
  out.parameterization = Parameterization::kRho;

  const double rho = in.rho;
  const double s = std::sqrt(1.0 - rho);
  const double denom = 2.0 - 5.0 * rho - rho * s;
  const double q = (3.0 + s) / denom;
  const double sqrt_rho = std::sqrt(rho);
  const double one_minus_s = rho / (1.0 + s);

  auto& t = out.terms;
  t[0] = 1.0 / (2.0 * s * norm_cdf(norm_quantile(1.0 - in.lambda) / s));
  t[1] = kSqrt2Pi / 2.0 * std::sqrt((1.0 - rho) / (1.0 - 2.0 * rho));
  t[2] = kSqrt2Pi / 2.0 * one_minus_s * std::sqrt(q);
  t[3] = kSqrt2Pi / 8.0 * (1.0 - rho) * (1.0 + s) * std::pow(q, 1.5);
  t[4] = std::sqrt(rho * (1.0 - rho)) / (1.0 - 2.0 * rho);
  t[5] = sqrt_rho * one_minus_s * (3.0 + s) / denom;
  t[6] = 0.5 * sqrt_rho * (1.0 - rho) * (1.0 + s) * q * q;
  finish(out, in);
  return out;
}

BoundBreakdown fdr_bound_aform(const BoundInput& in, const BoundOptions& opts) {
  BoundBreakdown out;
  out.in_theorem_domain = check_bound_input(in, opts);
  out.parameterization = Parameterization::kA;

  const double a = 1.0 / std::sqrt(1.0 - in.rho);
  const double a2m1 = a * a - 1.0;
  const double root_a2m1 = std::sqrt(a2m1);
  const double cubic = domain_cubic(a);
  const double c = a2m1 * (3.0 * a + 1.0) / cubic;

  auto& t = out.terms;
  t[0] = a / (2.0 * norm_cdf(a * norm_quantile(1.0 - in.lambda)));
  t[1] = kSqrt2Pi / (2.0 * std::sqrt(2.0 - a * a));
  t[2] = (a - 1.0) * kSqrt2Pi / 2.0 * std::sqrt((3.0 * a + 1.0) / cubic);
  t[3] = kSqrt2Pi / (8.0 * (a - 1.0) * root_a2m1) * std::pow(c, 1.5);
  t[4] = root_a2m1 / (2.0 - a * a);
  t[5] = (a - 1.0) * root_a2m1 * (3.0 * a + 1.0) / cubic;
  t[6] = 1.0 / (2.0 * (a - 1.0) * root_a2m1) * c * c;
  finish(out, in);
  return out;
}

std::array<double, 7> integrals_closed(double a) {
  if (!(a > 1.0)) throw DomainError("a>1", "integrals_closed: a = " + fmt(a) + " must exceed 1");
  const double a2 = a * a;
  if (!(2.0 - a2 > 0.0)) throw DomainError("2-a^2>0", "integrals_closed: 2 - a^2 <= 0 at a = " + fmt(a));
  const double cubic = domain_cubic(a);
  if (!(cubic > 0.0)) {
    throw DomainError("5a+1-3a^3-a^2>0", "integrals_closed: 5a + 1 - 3a^3 - a^2 <= 0 at a = " + fmt(a));
  }
  const double c = (a2 - 1.0) * (3.0 * a + 1.0) / cubic;
  return {
      kSqrt2Pi / 2.0 * std::sqrt((a2 - 1.0) / (2.0 - a2)),
      (a - 1.0) * kSqrt2Pi / 2.0 * std::sqrt(c),
      1.0 / (4.0 * (a - 1.0)) * kSqrt2Pi / 2.0 * std::pow(c, 1.5),
      (a2 - 1.0) / (2.0 - a2),
      (a - 1.0) * c,
      1.0 / (2.0 * (a - 1.0)) * c * c,
      0.5 * std::sqrt(a2 - 1.0),
  };
}

std::vector<CurveRow> bound_curve(std::span<const double> lambdas, std::span<const double> rhos, double alpha,
                                  const BoundOptions& opts) {
  std::vector<CurveRow> rows = checked_grid(lambdas, rhos, alpha, opts);
  const auto n_rho = static_cast<std::ptrdiff_t>(rhos.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < n; ++idx) {
    rows[idx] = curve_row(lambdas[idx / n_rho], rhos[idx % n_rho], alpha, opts);
  }
  return rows;
}

namespace serial {

std::vector<CurveRow> bound_curve(std::span<const double> lambdas, std::span<const double> rhos, double alpha,
                                  const BoundOptions& opts) {
  std::vector<CurveRow> rows = checked_grid(lambdas, rhos, alpha, opts);
  std::size_t idx = 0;
  for (double l : lambdas) {
    for (double r : rhos) rows[idx++] = curve_row(l, r, alpha, opts);
  }
  return rows;
}

}  // namespace serial

}  // namespace gbh
