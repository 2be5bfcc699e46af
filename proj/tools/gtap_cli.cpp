// Command-line driver: forward / optimize runs, order study, benchmark,
// Chapman-Enskog check and scheme classification.

#include "gtap/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gtap;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  std::vector<std::string> schemes;
  std::vector<double> eps;
};

struct Loaded {
  json doc;         // problem keys after CLI overrides
  json experiment;  // the "experiment" object, possibly empty
};

Loaded load(const Options& opt) {
  Loaded l;
  l.doc = json::object();
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw UsageError("cannot open config file '" + opt.config_path + "'");
    try {
      l.doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError(opt.config_path + ": " + e.what());
    }
    if (!l.doc.is_object()) throw UsageError(opt.config_path + ": config key '<root>': expected an object");
  }
  if (l.doc.contains("experiment")) {
    l.experiment = l.doc.at("experiment");
    l.doc.erase("experiment");
    if (!l.experiment.is_object())
      throw UsageError(opt.config_path + ": config key 'experiment': expected an object");
  } else {
    l.experiment = json::object();
  }
  if (!opt.schemes.empty()) l.doc["scheme"] = opt.schemes.front();
  if (!opt.eps.empty()) l.doc["eps"] = opt.eps.front();
  return l;
}

ProblemConfig parse_problem(const Options& opt, json doc, const ProblemConfig* base = nullptr) {
  try {
    return base ? config_from_json(doc, *base) : config_from_json(doc);
  } catch (const ConfigError& e) {
    throw UsageError((opt.config_path.empty() ? std::string("<defaults>") : opt.config_path) + ": " + e.what());
  }
}

template <typename T>
T lookup(const Options& opt, const json& obj, const std::string& prefix, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(opt.config_path + ": config key '" + prefix + key + "': " + e.what());
  }
}

template <typename T>
T experiment_value(const Options& opt, const json& ex, const std::string& key, T fallback) {
  return lookup(opt, ex, "experiment.", key, fallback);
}

template <typename T>
T problem_value(const Options& opt, const json& doc, const std::string& key, T fallback) {
  return lookup(opt, doc, "", key, fallback);
}

std::vector<IMEXPair> schemes_for(const Options& opt, const Loaded& l) {
  std::vector<IMEXPair> out;
  try {
    if (!opt.schemes.empty()) {
      for (const auto& s : opt.schemes) out.push_back(builtin_scheme(s));
    } else if (l.doc.contains("scheme")) {
      out.push_back(parse_scheme(l.doc.at("scheme")));
    }
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  } catch (const ConfigError& e) {
    throw UsageError(opt.config_path + ": " + e.what());
  }
  return out;
}

json meta_for(const std::string& command, const ProblemConfig& config, const json& extra = json::object()) {
  json m;
  m["command"] = command;
  m["config"] = config_to_json(config);
  if (!extra.empty()) m["experiment"] = extra;
  return m;
}

std::vector<double> control_for(const Options& opt, const ProblemConfig& config, const json& ex) {
  const auto n = static_cast<std::size_t>(config.n_steps);
  if (!ex.contains("control"))
    return config.problem == ProblemKind::manufactured ? manufactured_control_samples(config)
                                                       : std::vector<double>(n, 0.0);
  const auto& c = ex.at("control");
  if (c.is_number()) return std::vector<double>(n, c.get<double>());
  if (c.is_string()) {
    if (c == "manufactured") return manufactured_control_samples(config);
    if (c == "zero") return std::vector<double>(n, 0.0);
  }
  if (c.is_array()) {
    auto u = c.get<std::vector<double>>();
    if (u.size() != n)
      throw UsageError(opt.config_path + ": config key 'experiment.control': expected " + std::to_string(n) +
                       " values");
    return u;
  }
  throw UsageError(opt.config_path +
                   ": config key 'experiment.control': expected a number, an array, \"zero\" or \"manufactured\"");
}

// All outputs are produced in memory first; the directory is touched only
// once everything has succeeded.
void emit(const Options& opt, const std::map<std::string, std::string>& files) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
  for (const auto& [name, content] : files) std::cout << "wrote " << (dir / name).string() << '\n';
}

std::string fmt(double v) { return format_number(v); }

int cmd_check_scheme(const std::string& name, const Options& opt) {
  IMEXPair pair;
  try {
    pair = name.empty() ? schemes_for(opt, load(opt)).at(0) : builtin_scheme(name);
  } catch (const std::out_of_range& e) {
    throw UsageError(name.empty() ? "check-scheme needs a scheme name or a config with 'scheme'" : e.what());
  }
  const auto cls = classify(pair);
  std::cout << "scheme   " << pair.name << "\n"
            << "stages   " << pair.stages() << "\n"
            << "type A   " << (cls.type_a ? "yes" : "no") << "\n"
            << "ISA      " << (cls.isa ? "yes" : "no") << "\n"
            << "GSA      " << (cls.gsa ? "yes" : "no") << "\n"
            << "order 2  " << (check_order2(pair) ? "yes" : "no") << "\n";
  return 0;
}

int cmd_forward(const Options& opt) {
  const auto l = load(opt);
  const auto config = parse_problem(opt, l.doc);
  const auto u = control_for(opt, config, l.experiment);
  const auto fwd = solve_forward(config, u);
  const auto adj = solve_adjoint(config, fwd);
  const double J = objective(fwd, u, config);
  const auto meta = meta_for("forward", config, l.experiment);

  std::ostringstream sum;
  sum << "forward run\n" << config_to_json(config).dump(2) << "\n"
      << "J = " << fmt(J) << "\n"
      << "max |rho(T)| = " << fmt(field_norms(config.grid, fwd.rho.back()).linf) << "\n";
  emit(opt, {{"state.csv", state_csv(fwd, config, meta)},
             {"adjoint.csv", adjoint_csv(adj, config, meta)},
             {"control.csv", control_csv(u, config.dt(), meta)},
             {"summary.txt", sum.str()}});
  return 0;
}

int cmd_optimize(const Options& opt) {
  const auto l = load(opt);
  ProblemConfig base;
  base.scheme = builtin_scheme("GSA342");
  base.problem = ProblemKind::tracking;
  base.nu = 0.001;
  base.t_final = 1.58;
  base.n_steps = 100;
  base.grid = Grid1D(50);
  const auto config = parse_problem(opt, l.doc, &base);
  OptimizeOptions oo;
  oo.tolerance = experiment_value(opt, l.experiment, "tolerance", oo.tolerance);
  oo.max_iterations = experiment_value(opt, l.experiment, "max_iterations", oo.max_iterations);
  const auto u0 = l.experiment.contains("control") ? control_for(opt, config, l.experiment)
                                                   : std::vector<double>(config.n_steps, 0.0);
  const auto rep = optimize(config, u0, oo);
  const auto adj = solve_adjoint(config, rep.forward);
  const auto meta = meta_for("optimize", config, l.experiment);

  std::ostringstream sum;
  sum << "optimize run\n" << config_to_json(config).dump(2) << "\n"
      << "J(u*) = " << fmt(rep.j_star) << "\n"
      << "iterations = " << rep.iterations << "\n"
      << "projected gradient norm = " << fmt(rep.grad_norm_history.back()) << "\n"
      << "converged = " << (rep.converged ? "yes" : "no") << "\n";
  emit(opt, {{"control.csv", control_csv(rep.u_star, config.dt(), meta)},
             {"state.csv", state_csv(rep.forward, config, meta)},
             {"adjoint.csv", adjoint_csv(adj, config, meta)},
             {"trace.csv", trace_csv(rep, meta)},
             {"summary.txt", sum.str()}});
  return rep.converged ? 0 : 3;
}

int cmd_order_study(const Options& opt) {
  const auto l = load(opt);
  auto schemes = schemes_for(opt, l);
  if (schemes.empty()) schemes = {builtin_scheme("GSA342"), builtin_scheme("SSP2332")};
  OrderStudySpec spec;
  spec.n_steps = experiment_value(opt, l.experiment, "n_steps", spec.n_steps);
  spec.t_final = problem_value(opt, l.doc, "t_final", spec.t_final);
  spec.workers = experiment_value(opt, l.experiment, "workers", opt.workers);
  const auto sampling = experiment_value<std::string>(opt, l.experiment, "sampling", "stage");
  if (sampling != "stage" && sampling != "step")
    throw UsageError(opt.config_path + ": config key 'experiment.sampling': expected \"stage\" or \"step\"");
  spec.sampling = sampling == "stage" ? ControlSampling::stage : ControlSampling::step;

  std::map<std::string, std::string> files;
  std::ostringstream sum;
  sum << "order study, eps = 0, nu = 0, T = " << spec.t_final << ", cells = N, control sampling = " << sampling
      << "\n";
  for (const auto& scheme : schemes) {
    spec.scheme = scheme;
    const auto rows = run_order_study(spec);
    json extra = {{"n_steps", spec.n_steps}, {"sampling", sampling}};
    const auto meta = meta_for("order-study", order_study_config(scheme, spec.n_steps.front(), spec.t_final), extra);
    const std::string name = schemes.size() == 1 ? "order.csv" : "order_" + scheme.name + ".csv";
    files[name] = order_csv(rows, meta);
    sum << "\n" << scheme.name << "\n  N    rho L1          rho Linf        p L1            p Linf\n";
    for (const auto& r : rows) {
      char line[256];
      std::snprintf(line, sizeof line, "  %-4d %.2e (%4.2f) %.2e (%4.2f) %.2e (%4.2f) %.2e (%4.2f)%s\n", r.n_steps,
                    r.err_rho_l1, r.rate_rho_l1, r.err_rho_linf, r.rate_rho_linf, r.err_p_l1, r.rate_p_l1,
                    r.err_p_linf, r.rate_p_linf, r.error.empty() ? "" : ("  " + r.error).c_str());
      sum << line;
    }
  }
  files["summary.txt"] = sum.str();
  emit(opt, files);
  std::cout << sum.str();
  return 0;
}

int cmd_benchmark(const Options& opt) {
  const auto l = load(opt);
  BenchmarkSpec spec;
  spec.schemes = schemes_for(opt, l);
  if (spec.schemes.empty()) spec.schemes = {builtin_scheme("GSA342"), builtin_scheme("SSP2332")};
  if (!opt.eps.empty()) spec.eps = opt.eps;
  else spec.eps = experiment_value(opt, l.experiment, "eps", spec.eps);
  spec.cells = problem_value(opt, l.doc, "cells", spec.cells);
  if (l.doc.contains("n_steps")) spec.n_steps = problem_value(opt, l.doc, "n_steps", 0);
  spec.t_final = problem_value(opt, l.doc, "t_final", spec.t_final);
  spec.nu = problem_value(opt, l.doc, "nu", spec.nu);
  spec.u_lo = problem_value(opt, l.doc, "u_lo", spec.u_lo);
  spec.u_hi = problem_value(opt, l.doc, "u_hi", spec.u_hi);
  spec.bound = experiment_value(opt, l.experiment, "bound", spec.bound);
  spec.options.tolerance = experiment_value(opt, l.experiment, "tolerance", spec.options.tolerance);
  spec.options.max_iterations = experiment_value(opt, l.experiment, "max_iterations", spec.options.max_iterations);
  spec.workers = experiment_value(opt, l.experiment, "workers", opt.workers);
  for (const auto& s : spec.schemes)
    for (double e : spec.eps) benchmark_config(s, e, spec).validate();

  const auto rows = run_benchmark(spec);
  json extra = {{"eps", spec.eps},          {"cells", spec.cells}, {"t_final", spec.t_final},
                {"nu", spec.nu},            {"u_lo", spec.u_lo},   {"u_hi", spec.u_hi},
                {"bound", spec.bound},      {"tolerance", spec.options.tolerance},
                {"max_iterations", spec.options.max_iterations}};
  json schemes = json::array();
  for (const auto& s : spec.schemes) schemes.push_back({{"name", s.name}, {"n_steps", benchmark_config(s, 0.0, spec).n_steps}});
  extra["schemes"] = schemes;
  json meta = {{"command", "benchmark"}, {"experiment", extra}};

  std::ostringstream sum;
  sum << "benchmark: T = " << spec.t_final << ", nu = " << spec.nu << ", cells = " << spec.cells
      << ", bounds [" << spec.u_lo << ", " << spec.u_hi << "]\n\n";
  for (const auto& r : rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-8s eps=%-4g N=%-4d phi=%-6.4g J=%-12s iters=%-5d %s\n", r.scheme.c_str(),
                  r.eps, r.n_steps, r.phi, r.usable() ? fmt(r.j_star).c_str() : "-", r.iterations,
                  r.status.c_str());
    sum << line;
  }
  emit(opt, {{"benchmark.csv", benchmark_csv(rows, meta)},
             {"benchmark_profiles.csv", benchmark_profiles_csv(rows, meta)},
             {"summary.txt", sum.str()}});
  std::cout << sum.str();
  return 0;
}

int cmd_ce_verify(const Options& opt) {
  const auto l = load(opt);
  auto schemes = schemes_for(opt, l);
  if (schemes.empty()) schemes = {builtin_scheme("GSA342")};
  ChapmanEnskogSpec spec;
  spec.scheme = schemes.front();
  if (!opt.eps.empty()) spec.eps = opt.eps;
  else spec.eps = experiment_value(opt, l.experiment, "eps", spec.eps);
  spec.cells = problem_value(opt, l.doc, "cells", spec.cells);
  spec.n_steps = problem_value(opt, l.doc, "n_steps", spec.n_steps);
  spec.t_final = problem_value(opt, l.doc, "t_final", spec.t_final);
  const auto rows = run_chapman_enskog(spec);
  json meta = {{"command", "ce-verify"},
               {"experiment",
                {{"scheme", spec.scheme.name}, {"eps", spec.eps}, {"cells", spec.cells}, {"n_steps", spec.n_steps},
                 {"t_final", spec.t_final}}}};
  std::ostringstream sum;
  sum << "Chapman-Enskog residual after one step, " << spec.scheme.name << "\n";
  for (const auto& r : rows) sum << "  eps=" << fmt(r.eps) << "  residual=" << fmt(r.residual) << "  rate=" << fmt(r.rate) << "\n";
  emit(opt, {{"ce.csv", chapman_enskog_csv(rows, meta)}, {"summary.txt", sum.str()}});
  std::cout << sum.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX asymptotic-preserving boundary control of the Goldstein-Taylor model"};
  app.require_subcommand(1);
  Options opt;
  std::string scheme_name;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--workers", opt.workers, "threads for sweep rows")->check(CLI::PositiveNumber);
    sub->add_option("--scheme", opt.schemes, "scheme name(s)")->delimiter(',');
    sub->add_option("--eps", opt.eps, "eps value(s), comma separated")->delimiter(',');
  };
  auto* forward = app.add_subcommand("forward", "forward and adjoint solve for a given control");
  auto* optimize_cmd = app.add_subcommand("optimize", "projected-gradient optimisation");
  auto* order = app.add_subcommand("order-study", "convergence study on the manufactured solution");
  auto* bench = app.add_subcommand("benchmark", "optimal-control benchmark over eps");
  auto* ce = app.add_subcommand("ce-verify", "Chapman-Enskog residual scaling");
  auto* check = app.add_subcommand("check-scheme", "print classification flags of a scheme");
  for (auto* sub : {forward, optimize_cmd, order, bench, ce, check}) add_common(sub);
  check->add_option("name", scheme_name, "registry name (GSA342, SSP2332)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*forward) return cmd_forward(opt);
    if (*optimize_cmd) return cmd_optimize(opt);
    if (*order) return cmd_order_study(opt);
    if (*bench) return cmd_benchmark(opt);
    if (*ce) return cmd_ce_verify(opt);
    if (*check) return cmd_check_scheme(scheme_name.empty() && !opt.schemes.empty() ? opt.schemes.front() : scheme_name, opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << "run '" << argv[0] << " --help' for usage\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
