#include "hpl/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hpl/clt_bridge.hpp"
#include "hpl/errors.hpp"
#include "hpl/extremal_search.hpp"
#include "hpl/gauge.hpp"
#include "hpl/report.hpp"
#include "hpl/suites.hpp"

namespace hpl::cli {
namespace {

using nlohmann::json;

struct Options {
  std::optional<int> n;
  std::optional<int> n_min;
  std::optional<int> d;
  std::optional<int> d_min;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> t;
  std::string norm;
  std::optional<std::uint64_t> trials;
  std::size_t quad_nodes = 64;
  std::uint64_t seed = 0;
  double tol_rel = 1e-8;
  bool mc = false;
  std::uint64_t mc_samples = 100000;
  std::string out_path;
  std::string format;  ///< empty: csv for sweep, json otherwise
  bool record_time = false;

  // estimate
  int restarts = 16;
  int iters = 500;
  int polish_iters = 50;
  double smoothing = 64.0;
  std::optional<int> degree_cap;
  std::string step_rule = "backtracking";

  // clt
  std::string function = "linear";
  std::string copies = "4,16,64,256";
  std::uint64_t samples = 100000;

  // sweep
  std::string p_values = "1,1.5,2";
};

struct Artifact {
  std::string command;
  json parameters;
  std::vector<json> records;  ///< JSON Lines body
  std::string csv;            ///< CSV body when format is csv
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> values;
  for (const auto& item : split(text)) {
    std::size_t used = 0;
    T value{};
    try {
      if constexpr (std::is_same_v<T, int>)
        value = std::stoi(item, &used);
      else
        value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty()) throw ParameterError(std::string("cannot parse ") + what + " '" + item + "'");
    values.push_back(value);
  }
  if (values.empty()) throw ParameterError(std::string(what) + " list is empty");
  return values;
}

std::vector<std::string> norm_list(const Options& o, std::vector<std::string> fallback) {
  if (o.norm.empty()) return fallback;
  auto names = split(o.norm);
  for (const auto& name : names) NormSpec::parse(name, 1);
  if (names.empty()) throw ParameterError("norm list is empty");
  return names;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void tally(Artifact& a, const SuiteOutcome& outcome) {
  a.checks += outcome.checks;
  a.violations += outcome.violations;
  for (const auto& r : outcome.records) a.records.push_back(r);
}

std::string verify_csv(const std::vector<json>& records) {
  std::ostringstream out;
  out.precision(17);
  out << "name,instance,lhs,rhs,ratio,satisfied,error_bound\n";
  auto row = [&](const json& r, const json& instance) {
    out << r.value("name", "") << ',';
    if (!instance.is_null()) out << instance.dump();
    out << ',' << r.value("lhs", 0.0) << ',' << r.value("rhs", 0.0) << ',';
    if (r.contains("ratio") && r["ratio"].is_number()) out << r["ratio"].get<double>();
    out << ',' << (r.value("satisfied", false) ? "true" : "false") << ',' << r.value("error_bound", 0.0) << '\n';
  };
  for (const auto& r : records) {
    json instance = nullptr;
    if (r.contains("instance")) instance = r["instance"];
    if (r.contains("params") && r["params"].contains("instance")) instance = r["params"]["instance"];
    if (r.contains("links"))
      for (const auto& link : r["links"]) row(link, instance);
    else
      row(r, instance);
  }
  return out.str();
}

Artifact run_verify(const std::string& suite, const Options& o) {
  const VerifyKind kind = parse_verify_kind(suite);
  SuiteConfig c;
  std::pair<int, int> n_default{1, 6};
  switch (kind) {
    case VerifyKind::probrep: n_default = {1, 10}; break;
    case VerifyKind::pointwise: n_default = {1, 8}; break;
    case VerifyKind::enflo: n_default = {1, 10}; break;
    case VerifyKind::symmetrization: n_default = {1, 4}; break;
    default: break;
  }
  c.n_max = o.n.value_or(n_default.second);
  c.n_min = o.n_min.value_or(o.n ? *o.n : n_default.first);
  c.d_max = o.d.value_or(3);
  c.d_min = o.d_min.value_or(o.d ? *o.d : 1);
  c.p = o.p;
  c.q = o.q;
  c.t = o.t;
  c.norms = norm_list(o, kind == VerifyKind::enflo && !o.p ? std::vector<std::string>{"l2", "l1", "linf"}
                                                           : std::vector<std::string>{"l1", "l2", "linf"});
  c.trials = o.trials.value_or(100);
  c.quad_nodes = o.quad_nodes;
  c.seed = o.seed;
  c.tol_rel = o.tol_rel;
  c.mc = o.mc;
  c.mc_samples = o.mc_samples;

  Artifact a;
  a.command = "verify " + suite;
  a.parameters = {{"suite", suite},         {"n_min", c.n_min},         {"n_max", c.n_max},
                  {"d_min", c.d_min},       {"d_max", c.d_max},         {"p", optional_json(c.p)},
                  {"q", optional_json(c.q)}, {"t", optional_json(c.t)}, {"norms", c.norms},
                  {"trials", c.trials},     {"quad_nodes", c.quad_nodes}, {"seed", c.seed},
                  {"tol_rel", c.tol_rel},   {"tol_abs", c.tol_abs},     {"method", c.mc ? "mc" : "exact"},
                  {"mc_samples", c.mc_samples}};
  tally(a, run_verify_suite(kind, c));
  if (o.format == "csv") a.csv = verify_csv(a.records);
  return a;
}

Artifact run_estimate(const std::string& objective_name, const Options& o) {
  SearchConfig c;
  c.objective = parse_objective(objective_name);
  c.n = o.n.value_or(4);
  const int d = o.d.value_or(c.objective == Objective::type_const || c.objective == Objective::cotype_const ? c.n : 2);
  c.norm = NormSpec::parse(o.norm.empty() ? "l2" : o.norm, d);
  c.exponent = c.objective == Objective::cotype_const ? o.q.value_or(2.0) : o.p.value_or(2.0);
  c.restarts = o.restarts;
  c.max_iters = o.iters;
  c.polish_iters = o.polish_iters;
  c.smoothing = o.smoothing;
  c.degree_cap = o.degree_cap;
  c.step_rule = o.step_rule == "fixed" ? StepRule::fixed : StepRule::backtracking;
  c.seed = o.seed;
  const SearchResult result = run_search(c);

  Artifact a;
  a.command = "estimate " + objective_name;
  a.parameters = to_json(c);
  a.records.push_back(to_json(result));
  if (o.format == "csv") {
    std::ostringstream csv;
    write_trace_csv(result, csv);
    a.csv = csv.str();
  }
  return a;
}

SmoothFunction clt_function(const std::string& name, int n, Eigen::Index d) {
  if (name == "linear") return SmoothFunction::linear(Eigen::MatrixXd::Ones(d, n));
  if (name == "constant") return SmoothFunction::constant(n, Eigen::VectorXd::Ones(d));
  if (name == "sin") return SmoothFunction::sine();
  if (name == "tanh") return SmoothFunction::tanh_map(n);
  if (name == "square") return SmoothFunction::square();
  throw ParameterError("unknown function '" + name + "' (expected linear, constant, sin, tanh, square)");
}

Artifact run_clt(const Options& o) {
  const int n = o.n.value_or(1);
  const SmoothFunction f = clt_function(o.function, n, o.d.value_or(o.function == "tanh" ? n : 1));
  const double p = o.p.value_or(1.0);
  const NormSpec norm = NormSpec::parse(o.norm.empty() ? "l2" : o.norm, f.d);
  const ConvexGauge gauge = ConvexGauge::norm_power(norm, p);
  CltConfig c;
  c.copies = parse_list<int>(o.copies, "N");
  c.samples = o.samples;
  c.seed = o.seed;
  c.quad_nodes = o.quad_nodes;
  const CltTable table = clt_convergence_experiment(f, gauge, c);

  GaussianPisierQuery query{f, gauge, o.samples, o.seed, std::nullopt};
  const InequalityReport gaussian = gaussian_pisier_sides(query);

  Artifact a;
  a.command = "clt";
  a.parameters = {{"function", f.name}, {"n", f.n},          {"d", f.d},       {"norm", norm.name()},
                  {"p", p},             {"copies", c.copies}, {"samples", c.samples},
                  {"seed", c.seed},     {"mean_seed", table.mean_seed},       {"quad_nodes", c.quad_nodes}};
  a.records.push_back(to_json(table));
  a.records.push_back(to_json(gaussian));
  a.checks = 1;
  a.violations = gaussian.satisfied ? 0 : 1;
  if (o.format == "csv") {
    std::ostringstream csv;
    write_csv(table, csv);
    a.csv = csv.str();
  }
  return a;
}

Artifact run_sweep_command(const Options& o) {
  SweepConfig c;
  const int n_max = o.n.value_or(4);
  const int n_min = o.n_min.value_or(o.n ? n_max : 2);
  if (n_min < 1 || n_min > n_max) throw ParameterError("invalid n range");
  c.n_values.clear();
  for (int n = n_min; n <= n_max; ++n) c.n_values.push_back(n);
  c.p_values = o.p ? std::vector<double>{*o.p} : parse_list<double>(o.p_values, "p");
  c.norms = norm_list(o, c.norms);
  c.d = o.d.value_or(2);
  c.trials = o.trials.value_or(20);
  c.quad_nodes = o.quad_nodes;
  c.seed = o.seed;
  c.tol_rel = o.tol_rel;
  const auto rows = run_sweep(c);

  Artifact a;
  a.command = "sweep";
  a.parameters = {{"n_values", c.n_values}, {"p_values", c.p_values}, {"norms", c.norms}, {"d", c.d},
                  {"trials", c.trials},     {"quad_nodes", c.quad_nodes}, {"seed", c.seed}, {"tol_rel", c.tol_rel}};
  for (const auto& r : rows) {
    a.checks += 2 * r.trials;
    a.violations += r.violations;
    a.records.push_back({{"name", "sweep_cell"},
                         {"n", r.n},
                         {"p", r.p},
                         {"norm", r.norm},
                         {"trials", r.trials},
                         {"max_ratio_main", r.max_ratio_main},
                         {"max_ratio_lp", r.max_ratio_lp},
                         {"max_constant_pisier", r.max_constant_pisier},
                         {"max_constant_enflo", r.max_constant_enflo},
                         {"violations", r.violations}});
  }
  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  a.csv = csv.str();
  return a;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buffer;
}

json manifest(const Artifact& a, const Options& o, const std::optional<json>& timing) {
  json m = {{"command", a.command},
            {"parameters", a.parameters},
            {"seed", o.seed},
            {"tool_version", kVersion},
            {"format", o.format},
            {"wall_clock", timing ? *timing : json(nullptr)},
            {"outcome",
             {{"checks", a.checks},
              {"violations", a.violations},
              {"status", a.violations == 0 ? "ok" : "violation"}}}};
  return {{"manifest", std::move(m)}};
}

void emit(const Artifact& a, const Options& o, const std::optional<json>& timing, std::ostream& out) {
  const json head = manifest(a, o, timing);
  if (o.format == "csv") {
    out << "# manifest: " << head.dump() << '\n' << a.csv;
  } else {
    out << head.dump() << '\n';
    for (const auto& r : a.records) out << r.dump() << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Numerical laboratory for dimension-free Pisier inequalities on the discrete cube", "hpl"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--n", o.n, "cube dimension (upper end of the range)");
  app.add_option("--n-min", o.n_min, "lower end of the dimension range");
  app.add_option("--d", o.d, "target dimension (upper end of the range)");
  app.add_option("--d-min", o.d_min, "lower end of the target-dimension range");
  app.add_option("--p", o.p, "moment or gauge exponent");
  app.add_option("--q", o.q, "cotype exponent");
  app.add_option("--t", o.t, "fixed time for the symmetrization suite");
  app.add_option("--norm", o.norm, "lp:<p>|l1|l2|linf, comma-separated for a list");
  app.add_option("--trials", o.trials, "number of random instances");
  app.add_option("--quad-nodes", o.quad_nodes, "nodes of the mu quadrature")->capture_default_str();
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_option("--tol-rel", o.tol_rel, "relative tolerance")->capture_default_str();
  app.add_flag("--mc", o.mc, "force Monte Carlo");
  app.add_option("--mc-samples", o.mc_samples, "Monte Carlo sample count")->capture_default_str();
  app.add_option("--out", o.out_path, "output file (default: standard output)");
  app.add_option("--format", o.format, "json|csv (default: csv for sweep, json otherwise)")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--record-time", o.record_time, "store wall-clock data in the manifest");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "probrep|pointwise|main|lp|enflo|symmetrization|integrals")
      ->required()
      ->check(CLI::IsMember({"probrep", "pointwise", "main", "lp", "enflo", "symmetrization", "integrals"}));

  std::string objective;
  auto* estimate = app.add_subcommand("estimate", "search for large constants");
  estimate->add_option("objective", objective, "type|cotype|pisier|enflo")
      ->required()
      ->check(CLI::IsMember({"type", "cotype", "pisier", "enflo"}));
  estimate->add_option("--restarts", o.restarts)->capture_default_str();
  estimate->add_option("--iters", o.iters)->capture_default_str();
  estimate->add_option("--polish-iters", o.polish_iters)->capture_default_str();
  estimate->add_option("--smoothing", o.smoothing)->capture_default_str();
  estimate->add_option("--degree-cap", o.degree_cap);
  estimate->add_option("--step-rule", o.step_rule)->check(CLI::IsMember({"fixed", "backtracking"}));

  auto* clt = app.add_subcommand("clt", "cube-to-Gauss convergence experiment");
  clt->add_option("--function", o.function, "linear|constant|sin|tanh|square")->capture_default_str();
  clt->add_option("--copies", o.copies, "comma-separated N grid")->capture_default_str();
  clt->add_option("--samples", o.samples)->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "grid over n, p and norm (CSV)");
  sweep->add_option("--p-values", o.p_values, "comma-separated exponents")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream text, errors;
    const int code = app.exit(e, text, errors);
    out << text.str();
    err << errors.str();
    return code == 0 ? kOk : kUsage;
  }

  if (o.format.empty()) o.format = *sweep ? "csv" : "json";
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  try {
    Artifact artifact;
    if (*verify)
      artifact = run_verify(suite, o);
    else if (*estimate)
      artifact = run_estimate(objective, o);
    else if (*clt)
      artifact = run_clt(o);
    else
      artifact = run_sweep_command(o);

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::optional<json> timing;
    if (o.record_time) timing = json{{"started_utc", started}, {"elapsed_seconds", elapsed}};

    if (o.out_path.empty()) {
      emit(artifact, o, timing, out);
    } else {
      std::ofstream file(o.out_path, std::ios::binary);
      if (!file) throw ParameterError("cannot open output file '" + o.out_path + "'");
      emit(artifact, o, timing, file);
    }
    err << artifact.command << ": " << artifact.checks << " checks, " << artifact.violations << " violations ("
        << elapsed << " s)\n";
    return artifact.violations == 0 ? kOk : kViolation;
  } catch (const CapacityError& e) {
    err << "capacity exceeded: " << e.what() << '\n';
    return kCapacity;
  } catch (const std::invalid_argument& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kViolation;
  }
}

}  // namespace hpl::cli
