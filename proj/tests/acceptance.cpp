// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gbh/bound.hpp"
#include "gbh/procedures.hpp"
#include "gbh/report.hpp"
#include "gbh/simulator.hpp"
#include "gbh/stat_normal.hpp"
#include "gbh/verify.hpp"

using namespace gbh;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.ok) ++failures;
  std::printf("%s  C%-2d %s: %s [%.2fs]\n", o.ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string num(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome bound_limit() {
  const double r = fdr_bound({0.5, 1e-6, 0.05}).ratio();
  return {std::fabs(r - 2.013) <= 0.005, "B/alpha = " + num(r) + ", target 2.013 +/- 0.005"};
}

Outcome curve_shape() {
  std::vector<double> lambdas, rhos;
  for (int i = 1; i <= 10; ++i) lambdas.push_back(i / 20.0);
  for (int k = 1; k <= 67; ++k) rhos.push_back(k / 200.0);
  const auto rows = bound_curve(lambdas, rhos, 0.05);
  const std::size_t nr = rhos.size();
  std::size_t bad_rho = 0, bad_lambda = 0, bad10 = 0, bad20 = 0;
  double max10 = 0.0, max20 = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t k = 0; k < nr; ++k) {
      const CurveRow& r = rows[i * nr + k];
      if (k > 0 && !(r.ratio > rows[i * nr + k - 1].ratio)) ++bad_rho;
      if (i > 0 && !(r.ratio < rows[(i - 1) * nr + k].ratio)) ++bad_lambda;
      if (r.rho <= 0.149) {
        max10 = std::max(max10, r.ratio);
        bad10 += r.ratio < 10.0 ? 0 : 1;
      }
      if (r.rho <= 0.219) {
        max20 = std::max(max20, r.ratio);
        bad20 += r.ratio < 20.0 ? 0 : 1;
      }
    }
  }
  const bool ok = rows.size() == 670 && bad_rho == 0 && bad_lambda == 0 && bad10 == 0 && bad20 == 0;
  return {ok, std::to_string(rows.size()) + " points; monotonicity breaks rho/lambda = " + std::to_string(bad_rho) +
                  "/" + std::to_string(bad_lambda) + "; max B/alpha for rho<=0.149 is " + num(max10) +
                  ", for rho<=0.219 is " + num(max20)};
}

Outcome parameterizations() {
  double worst = 0.0;
  for (int i = 1; i <= 50; ++i) {
    for (int k = 1; k <= 50; ++k) {
      const BoundInput in{0.5 * i / 50.0, 0.34 * k / 51.0, 0.05};
      const BoundBreakdown r = fdr_bound(in);
      const BoundBreakdown a = fdr_bound_aform(in);
      for (std::size_t t = 0; t < 7; ++t) {
        worst = std::max(worst, std::fabs(a.terms[t] - r.terms[t]) / std::fabs(r.terms[t]));
      }
    }
  }
  return {worst <= 1e-12, "max termwise relative gap " + num(worst, "%.3g") + " over 2500 points"};
}

Outcome integral_oracle() {
  const VerifyReport rep = verify_integrals();
  return {rep.passed && rep.grid.size() == 42, "max relative error " + num(rep.max_violation, "%.3g") + " over 6 a-values x 7 integrals"};
}

Outcome domain_boundary() {
  const double r = rho_max();
  const double a_lo = 1.0 / std::sqrt(1.0 - (r - 1e-9));
  const double a_hi = 1.0 / std::sqrt(1.0 - (r + 1e-9));
  const bool sign_change = domain_cubic(a_lo) > 0.0 && domain_cubic(a_hi) < 0.0;
  bool ok34 = true;
  try {
    fdr_bound({0.3, 0.34, 0.05});
  } catch (const DomainError&) {
    ok34 = false;
  }
  bool rejects35 = false;
  try {
    fdr_bound({0.3, 0.35, 0.05});
  } catch (const DomainError&) {
    rejects35 = true;
  }
  const bool ok = r > 0.3435 && r < 0.3445 && sign_change && ok34 && rejects35;
  return {ok, "rho_max = " + num(r, "%.10g") + (sign_change ? ", cubic changes sign" : ", NO sign change") +
                  (ok34 ? ", B(rho=0.34) ok" : ", B(rho=0.34) rejected") +
                  (rejects35 ? ", B(rho=0.35) rejected" : ", B(rho=0.35) accepted")};
}

Outcome procedures() {
  std::size_t grids = 0;
  const double values[3] = {0.01, 0.5, 1.0};
  for (double alpha : {0.05, 0.1, 0.5}) {
    for (std::size_t m = 1; m <= 8; ++m) {
      std::size_t total = 1;
      for (std::size_t i = 0; i < m; ++i) total *= 3;
      for (std::size_t code = 0; code < total; ++code) {
        std::vector<double> s(m);
        std::size_t c = code;
        for (std::size_t i = 0; i < m; ++i, c /= 3) s[i] = values[c % 3];
        const RejectionResult fast = bh_step_up(s, alpha), slow = step_up_oracle(s, alpha);
        if (fast.rejected != slow.rejected || fast.k_star != slow.k_star) {
          return {false, "bh_step_up differs from the oracle at m=" + std::to_string(m)};
        }
        ++grids;
      }
    }
  }

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double alpha = 0.01 + 0.2 * u(rng);
    const double lambda = alpha + (0.95 - alpha) * u(rng);
    std::vector<double> p(1 + trial % 60);
    for (double& v : p) v = u(rng) < 0.3 ? 0.01 * u(rng) : u(rng);
    if (gbh1(GroupedPValues::single_group(p), lambda, alpha).rejected != storey(p, lambda, alpha).rejected) {
      return {false, "gbh1(g=1) differs from storey on trial " + std::to_string(trial)};
    }
  }

  std::mt19937_64 rng2(20240517);
  std::size_t checks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double lambda = 0.05 + 0.9 * u(rng2);
    const std::size_t m = 1 + rng2() % 30;
    const std::size_t g = 1 + rng2() % std::min<std::size_t>(m, 5);
    std::vector<std::size_t> labels(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = i < g ? i : rng2() % g;
    std::vector<double> p(m);
    for (double& v : p) {
      const double r = u(rng2);
      v = r < 0.05 ? lambda : (r < 0.5 ? std::pow(u(rng2), 4.0) : u(rng2));
    }
    const GroupedPValues gp = GroupedPValues::from_labels(p, labels);
    const GBHWeights w = gbh1_weights(gp, lambda);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t j = gp.group_of(k);
      if (!(w.w[j] >= gbh1_weights_loo(gp, lambda, k).w[j] * (1.0 - 1e-14))) {
        return {false, "w_j < w_j^(-k) on trial " + std::to_string(trial)};
      }
      std::vector<double> below = p, above = p;
      below[k] = std::nextafter(lambda, 0.0);
      above[k] = std::nextafter(lambda, 1.0);
      if (!(gbh1_weights(GroupedPValues(below, gp.groups()), lambda).w[j] <=
            gbh1_weights(GroupedPValues(above, gp.groups()), lambda).w[j])) {
        return {false, "weight not monotone in p_k on trial " + std::to_string(trial)};
      }
      checks += 2;
    }
  }
  return {true, std::to_string(grids) + " exhaustive grids, 1000 gbh1/storey instances, " + std::to_string(checks) +
                    " weight checks"};
}

Outcome theorem_probe() {
  std::string detail;
  bool ok = true;
  for (double rho : {0.1, 0.2}) {
    SimConfig c;
    c.rho = rho;
    const SimSummary s = run_mc(c);
    const double bound = fdr_bound({c.lambda, rho, c.alpha}).total;
    const bool pass = s.fdr_hat <= bound + 3.0 * s.fdr_se;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + std::string("rho=") + num(rho) + ": fdr_hat=" + num(s.fdr_hat) +
              " (se " + num(s.fdr_se, "%.3g") + ") vs B=" + num(bound);
  }
  return {ok, detail};
}

Outcome independence() {
  SimConfig c;
  c.rho = 0.0;
  c.procedure = Procedure::kBh;
  const SimSummary s = run_mc(c);
  return {std::fabs(s.fdr_hat - 0.05) <= 3.0 * s.fdr_se,
          "fdr_hat=" + num(s.fdr_hat) + ", se=" + num(s.fdr_se, "%.3g") + ", target 0.05"};
}

Outcome conditional_cdf() {
  SimConfig c;
  c.m = 1;
  c.group_sizes = {1};
  c.nonnull_counts = {0};
  c.rho = 0.2;
  c.seed = 9;
  const std::size_t n = 100000;
  double worst = 0.0;
  bool ok = true;
  for (double x0 : {-2.0, 0.0, 2.0}) {
    const AParam ab = AParam::from(c.rho, x0);
    std::vector<double> p(n);
    for (std::size_t r = 0; r < n; ++r) p[r] = norm_sf(generate_sample(c, r, x0).y[0]);
    for (double t : {0.05, 0.25, 0.5}) {
      const double expect = norm_sf(ab.a * norm_quantile(1.0 - t) + ab.b);
      const double hits = static_cast<double>(std::count_if(p.begin(), p.end(), [t](double v) { return v <= t; }));
      const double se = std::sqrt(expect * (1.0 - expect) / n);
      const double z = std::fabs(hits / n - expect) / se;
      worst = std::max(worst, z);
      ok = ok && z <= 3.0;
    }
  }
  return {ok, "9 cells, 1e5 draws each, worst |z| = " + num(worst, "%.3g")};
}

Outcome lemma_reports() {
  const auto t0 = std::chrono::steady_clock::now();
  const VerifyReport mb = verify_m_bound();
  const VerifyReport mvt = verify_mvt();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool deterministic =
      to_json(mb).dump() == to_json(verify_m_bound()).dump() && to_json(mvt).dump() == to_json(verify_mvt()).dump();

  bool has_violation_field = true;
  double v_02_2 = std::nan("");
  std::size_t exceed = 0;
  for (const auto& p : mb.grid) {
    has_violation_field = has_violation_field && std::isfinite(p.violation);
    if (p.violation > 0.0) ++exceed;
    if (p.coords[0].second == 0.2 && p.coords[1].second == 2.0) v_02_2 = p.violation;
  }
  const bool complete = mb.grid.size() == 54 && mvt.grid.size() == 6 * 10 && has_violation_field;
  const bool ok = complete && deterministic && secs < 10.0 && mb.passed && mvt.passed;
  std::string detail = std::string(deterministic ? "deterministic" : "NOT deterministic") + ", " + num(secs, "%.2f") +
                       "s; findings: sup f exceeds M at " + std::to_string(exceed) + "/54 cells, violation at " +
                       "(rho=0.2, x0=2) = " + num(v_02_2) + "; max |mvt residual| = " + num(mvt.max_violation);
  return {ok, detail};
}

Outcome normal_primitives() {
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = (i + 0.5) / 10000.0;
    worst = std::max(worst, std::fabs(norm_cdf(norm_quantile(p)) - p));
  }
  std::size_t tail_bad = 0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 1000.0;
    if (!(tail_lower_bound(x) < norm_sf(x))) ++tail_bad;
  }
  return {worst <= 1e-9 && tail_bad == 0, "max round-trip error " + num(worst, "%.3g") + " over 1e4 points; tail bound " +
                                              "violations on [0,10] step 0.001: " + std::to_string(tail_bad)};
}

}  // namespace

int main() {
  criterion(1, "bound limit value", bound_limit);
  criterion(2, "bound curve family", curve_shape);
  criterion(3, "parameterization identity", parameterizations);
  criterion(4, "integral oracle", integral_oracle);
  criterion(5, "domain boundary", domain_boundary);
  criterion(6, "procedure correctness", procedures);
  criterion(7, "Monte Carlo FDR vs bound", theorem_probe);
  criterion(8, "independence sanity (BH)", independence);
  criterion(9, "conditional null CDF", conditional_cdf);
  criterion(10, "lemma audit reports", lemma_reports);
  criterion(11, "normal primitives", normal_primitives);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
