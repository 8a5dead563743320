#include "gbh/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbh/bound.hpp"
#include "gbh/format.hpp"
#include "gbh/procedures.hpp"
#include "gbh/report.hpp"
#include "gbh/simulator.hpp"
#include "gbh/verify.hpp"

namespace gbh {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<double> grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw InputError("grid needs step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
  }
  return out;
}

// Writes to `path`, or to `out` when path is "-".
template <class Writer>
void emit(const std::string& path, std::ostream& out, Writer&& write) {
  if (path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

// ---- bound ----------------------------------------------------------------

struct BoundArgs {
  double lambda = 0.0;
  double rho = 0.0;
  double alpha = 0.0;
  bool aform = false;
  bool force = false;
  bool stated_cap = false;
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  const BoundOptions opts{a.force, a.stated_cap};
  const BoundInput in{a.lambda, a.rho, a.alpha};
  const BoundBreakdown rho_form = fdr_bound(in, opts);
  Json j;
  j["lambda"] = a.lambda;
  j["rho"] = a.rho;
  j["alpha"] = a.alpha;
  j["in_theorem_domain"] = rho_form.in_theorem_domain;
  j["bound"] = rho_form.total;
  j["ratio"] = rho_form.ratio();
  j["rho_form"] = to_json(rho_form);
  if (a.aform) j["a_form"] = to_json(fdr_bound_aform(in, opts));
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---- curve ----------------------------------------------------------------

struct CurveArgs {
  double lambda_start = 0.05, lambda_stop = 0.5, lambda_step = 0.05;
  double rho_start = 0.005, rho_stop = 0.335, rho_step = 0.005;
  std::vector<double> lambdas, rhos;
  double alpha = 0.05;
  std::string out = "-";
  bool force = false;
  int threads = 0;
};

int cmd_curve(const CurveArgs& a, std::ostream& out) {
  set_threads(a.threads);
  const std::vector<double> lambdas = a.lambdas.empty() ? grid(a.lambda_start, a.lambda_stop, a.lambda_step) : a.lambdas;
  const std::vector<double> rhos = a.rhos.empty() ? grid(a.rho_start, a.rho_stop, a.rho_step) : a.rhos;
  const std::vector<CurveRow> rows = bound_curve(lambdas, rhos, a.alpha, {a.force, false});
  emit(a.out, out, [&](std::ostream& os) {
    os << "lambda,rho,bound,ratio\n";
    for (const CurveRow& r : rows) {
      os << shortest(r.lambda) << ',' << shortest(r.rho) << ',' << shortest(r.bound) << ',' << shortest(r.ratio)
         << '\n';
    }
  });
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::map<std::string, std::string> overrides;
  std::optional<double> x0;
  std::string log;
  int threads = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  set_threads(a.threads);
  std::map<std::string, std::string> entries;
  if (!a.config.empty()) {
    std::ifstream file(a.config);
    if (!file) throw IoError("cannot read config '" + a.config + "'");
    try {
      entries = parse_key_values(file);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  for (const auto& [k, v] : a.overrides) entries[k] = v;

  SimConfig config;
  try {
    config = build_sim_config(entries);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }
  const SimSummary summary = a.x0 ? run_mc_conditional(config, *a.x0) : run_mc(config);

  Json j = to_json(summary);
  j["metadata"] = {{"config_source", a.config.empty() ? "built-in desk-scale defaults" : "file"},
                   {"settings_origin", "chosen by this tool; not taken from a published study"}};
  out << j.dump(2) << '\n';

  if (!a.log.empty()) {
    std::ifstream probe(a.log, std::ios::ate);
    const bool need_header = !probe || probe.tellg() == 0;
    std::ofstream log(a.log, std::ios::app);
    if (!log) throw IoError("cannot append to log '" + a.log + "'");
    if (need_header) log << kSimLogHeader << '\n';
    log << sim_log_row(summary) << '\n';
    if (!log) throw IoError("failed writing log '" + a.log + "'");
  }
  return kExitOk;
}

// ---- adjust ---------------------------------------------------------------

struct AdjustArgs {
  std::string input;
  std::string out = "-";
  double lambda = 0.5;
  double alpha = 0.05;
  std::string procedure = "gbh1";
};

int cmd_adjust(const AdjustArgs& a, std::ostream& out) {
  Procedure proc;
  try {
    proc = parse_procedure(a.procedure);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::ifstream file(a.input, std::ios::binary);
  if (!file) throw IoError("cannot read input '" + a.input + "'");

  std::string line;
  if (!std::getline(file, line)) throw InputError("line 1: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_csv_line(trim(line));

  std::optional<std::size_t> p_col, g_col;
  std::vector<std::size_t> kept;  // columns echoed to the output
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "pvalue") p_col = c;
    if (header[c] == "group") g_col = c;
    if (header[c] != "weighted_pvalue" && header[c] != "rejected") kept.push_back(c);
  }
  if (!p_col) throw InputError("line 1: no 'pvalue' column");
  if (proc == Procedure::kGbh1 && !g_col) throw InputError("line 1: gbh1 needs a 'group' column");

  std::vector<std::vector<std::string>> rows;
  std::vector<double> pvalues;
  std::vector<std::size_t> labels;
  std::map<std::string, std::size_t> label_index;
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(trim(line));
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    const std::string& text = fields[*p_col];
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !(p >= 0.0 && p <= 1.0)) {
      throw InputError("line " + std::to_string(line_no) + ": pvalue '" + text + "' is not a number in [0, 1]");
    }
    pvalues.push_back(p);
    if (g_col) {
      const auto [it, inserted] = label_index.try_emplace(fields[*g_col], label_index.size());
      labels.push_back(it->second);
    } else {
      labels.push_back(0);
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw InputError("no data rows");

  RejectionResult result;
  try {
    const GroupedPValues gp = GroupedPValues::from_labels(pvalues, labels);
    result = apply_procedure(proc, gp, a.lambda, a.alpha);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::vector<bool> rejected(rows.size(), false);
  for (std::size_t i : result.rejected) rejected[i] = true;

  emit(a.out, out, [&](std::ostream& os) {
    for (std::size_t c : kept) os << header[c] << ',';
    os << "weighted_pvalue,rejected\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c : kept) os << rows[r][c] << ',';
      os << shortest(result.weighted_pvalues[r]) << ',' << (rejected[r] ? "true" : "false") << '\n';
    }
  });
  return kExitOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string section = "all";
  std::uint64_t seed = 20240517;
  std::size_t reps = 100000;
  std::string out = "verify_report.json";
  int threads = 0;
};

void print_table(const std::vector<VerifyReport>& reports, std::ostream& os) {
  os << std::left << std::setw(26) << "section" << std::setw(8) << "points" << std::setw(10) << "asserted"
     << std::setw(8) << "status" << "max_violation\n";
  for (const VerifyReport& r : reports) {
    std::size_t asserted = 0;
    for (const VerifyPoint& p : r.grid) asserted += p.asserted ? 1 : 0;
    os << std::left << std::setw(26) << to_string(r.section) << std::setw(8) << r.grid.size() << std::setw(10)
       << asserted << std::setw(8) << (r.passed ? "ok" : "FAIL") << shortest(r.max_violation) << '\n';
  }
  for (const VerifyReport& r : reports) {
    if (r.section != Section::kMBound) continue;
    for (const VerifyPoint& p : r.grid) {
      if (!p.asserted && p.violation > 0.0) {
        os << "  m_bound exceeded at rho=" << shortest(p.coords[0].second) << " x0=" << shortest(p.coords[1].second)
           << ": sup f=" << shortest(p.observed) << " > M=" << shortest(p.claimed) << '\n';
      }
    }
  }
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  set_threads(a.threads);
  const std::string& s = a.section;
  std::vector<VerifyReport> reports;
  if (s == "integrals" || s == "all") reports.push_back(verify_integrals());
  if (s == "m_bound" || s == "all") reports.push_back(verify_m_bound());
  if (s == "mvt" || s == "all") reports.push_back(verify_mvt());
  if (s == "lemmas" || s == "all") {
    for (VerifyReport& r : verify_lemmas(a.seed, a.reps)) reports.push_back(std::move(r));
  }

  Json j = Json::array();
  for (const VerifyReport& r : reports) j.push_back(to_json(r));
  emit(a.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (a.out != "-") print_table(reports, out);

  for (const VerifyReport& r : reports) {
    if (!r.passed) return kExitVerifyFailed;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive one-way GBH procedure, its FDR bound and audit tools"};
  app.require_subcommand(1);

  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "Evaluate the FDR upper bound B(lambda, rho, alpha)");
  bound->add_option("--lambda", bound_args.lambda, "Tuning parameter")->required();
  bound->add_option("--rho", bound_args.rho, "Equicorrelation")->required();
  bound->add_option("--alpha", bound_args.alpha, "Nominal FDR level")->required();
  bound->add_flag("--aform", bound_args.aform, "Also evaluate the a-parameterized form");
  bound->add_flag("--force", bound_args.force, "Allow lambda in (1/2, 1)");
  bound->add_flag("--stated-rho-cap", bound_args.stated_cap, "Cap rho at 0.34 instead of the exact root");

  CurveArgs curve_args;
  auto* curve = app.add_subcommand("curve", "Export B/alpha over a (lambda, rho) grid as CSV");
  curve->add_option("--lambda-start", curve_args.lambda_start);
  curve->add_option("--lambda-stop", curve_args.lambda_stop);
  curve->add_option("--lambda-step", curve_args.lambda_step);
  curve->add_option("--rho-start", curve_args.rho_start);
  curve->add_option("--rho-stop", curve_args.rho_stop);
  curve->add_option("--rho-step", curve_args.rho_step);
  curve->add_option("--lambdas", curve_args.lambdas, "Explicit lambda values (overrides the range)")->delimiter(',');
  curve->add_option("--rhos", curve_args.rhos, "Explicit rho values (overrides the range)")->delimiter(',');
  curve->add_option("--alpha", curve_args.alpha);
  curve->add_option("--out", curve_args.out, "Output path, '-' for stdout");
  curve->add_flag("--force", curve_args.force, "Allow lambda in (1/2, 1)");
  curve->add_option("--threads", curve_args.threads);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo FDR/power campaign");
  simulate->add_option("--config", sim_args.config, "key=value configuration file");
  const std::vector<std::pair<std::string, std::string>> sim_keys = {
      {"--m", "m"},
      {"--groups", "groups"},
      {"--group-sizes", "group_sizes"},
      {"--nonnull-counts", "nonnull_counts"},
      {"--effect-mu", "effect_mu"},
      {"--rho", "rho"},
      {"--lambda", "lambda"},
      {"--alpha", "alpha"},
      {"--procedure", "procedure"},
      {"--replications", "replications"},
      {"--seed", "seed"},
  };
  std::map<std::string, std::string> sim_flag_values;
  for (const auto& [flag, key] : sim_keys) {
    simulate->add_option(flag, sim_flag_values[key], "Overrides config key '" + key + "'");
  }
  double x0_value = 0.0;
  auto* x0_opt = simulate->add_option("--x0", x0_value, "Pin the common factor X0 (conditional run)");
  simulate->add_option("--log", sim_args.log, "Append a CSV summary row to this file");
  simulate->add_option("--threads", sim_args.threads);

  AdjustArgs adjust_args;
  auto* adjust = app.add_subcommand("adjust", "Apply a procedure to a pvalue,group CSV");
  adjust->add_option("--input", adjust_args.input)->required();
  adjust->add_option("--out", adjust_args.out, "Output path, '-' for stdout");
  adjust->add_option("--lambda", adjust_args.lambda);
  adjust->add_option("--alpha", adjust_args.alpha);
  adjust->add_option("--procedure", adjust_args.procedure)->check(CLI::IsMember({"gbh1", "storey", "bh"}));

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Numerical audit of the bound's building blocks");
  verify->add_option("--section", verify_args.section)->check(CLI::IsMember({"integrals", "m_bound", "mvt", "lemmas", "all"}));
  verify->add_option("--seed", verify_args.seed);
  verify->add_option("--reps", verify_args.reps, "Replications per Monte Carlo lemma check");
  verify->add_option("--out", verify_args.out, "JSON report path, '-' for stdout");
  verify->add_option("--threads", verify_args.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*bound) return cmd_bound(bound_args, out);
    if (*curve) return cmd_curve(curve_args, out);
    if (*simulate) {
      for (const auto& [key, value] : sim_flag_values) {
        if (!value.empty()) sim_args.overrides[key] = value;
      }
      if (x0_opt->count() > 0) sim_args.x0 = x0_value;
      return cmd_simulate(sim_args, out);
    }
    if (*adjust) return cmd_adjust(adjust_args, out);
    if (*verify) return cmd_verify(verify_args, out);
  } catch (const DomainError& e) {
    err << "domain error [" << e.constraint() << "]: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace gbh
