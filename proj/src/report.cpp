#include "gtap/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gtap {

std::string provenance_block(const nlohmann::json& meta) {
  std::ostringstream os;
  std::istringstream lines(meta.dump(2));
  for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
  return os.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

namespace {

struct CsvWriter {
  std::ostringstream os;

  explicit CsvWriter(const nlohmann::json& meta) { os << provenance_block(meta); }

  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((os << (first ? "" : ",") << cell(cells), first = false), ...);
    os << '\n';
  }

  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
};

}  // namespace

std::string order_csv(const std::vector<OrderRow>& rows, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("n_steps", "err_rho_l1", "rate_rho_l1", "err_rho_linf", "rate_rho_linf", "err_p_l1", "rate_p_l1",
        "err_p_linf", "rate_p_linf", "status");
  for (const auto& r : rows)
    w.row(r.n_steps, r.err_rho_l1, r.rate_rho_l1, r.err_rho_linf, r.rate_rho_linf, r.err_p_l1, r.rate_p_l1,
          r.err_p_linf, r.rate_p_linf, r.error.empty() ? std::string("ok") : "error: " + r.error);
  return w.os.str();
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("scheme", "eps", "n_steps", "cells", "phi", "J", "iterations", "grad_norm", "max_rho", "status");
  for (const auto& r : rows)
    w.row(r.scheme, r.eps, r.n_steps, r.cells, r.phi, r.usable() ? format_number(r.j_star) : std::string("-"),
          r.iterations, r.grad_norm, r.max_rho, r.status);
  return w.os.str();
}

std::string benchmark_profiles_csv(const std::vector<BenchmarkRow>& rows, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("scheme", "eps", "curve", "index", "coord", "value");
  for (const auto& r : rows) {
    for (std::size_t n = 0; n < r.u_star.size(); ++n)
      w.row(r.scheme, r.eps, "control", n, (static_cast<double>(n) + 0.5) * r.dt, r.u_star[n]);
    const Grid1D grid(r.cells > 0 ? r.cells : 1);
    for (std::size_t i = 0; i < r.rho_error.size(); ++i)
      w.row(r.scheme, r.eps, "rho_minus_target", i, grid.center(static_cast<int>(i)), r.rho_error[i]);
  }
  return w.os.str();
}

std::string control_csv(std::span<const double> u, double dt, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("n", "t", "u");
  for (std::size_t n = 0; n < u.size(); ++n) w.row(n, static_cast<double>(n) * dt, u[n]);
  return w.os.str();
}

std::string state_csv(const ForwardTrajectory& traj, const ProblemConfig& config, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("n", "t", "x", "rho", "j");
  const double dt = config.dt();
  for (std::size_t n = 0; n < traj.rho.size(); ++n)
    for (int i = 0; i < config.grid.cells; ++i)
      w.row(n, static_cast<double>(n) * dt, config.grid.center(i), traj.rho[n][i], traj.j[n][i]);
  return w.os.str();
}

std::string adjoint_csv(const AdjointTrajectory& adj, const ProblemConfig& config, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("n", "t", "x", "p", "q");
  const double dt = config.dt();
  for (std::size_t n = 0; n < adj.p.size(); ++n)
    for (int i = 0; i < config.grid.cells; ++i)
      w.row(n, static_cast<double>(n) * dt, config.grid.center(i), adj.p[n][i], adj.q[n][i]);
  return w.os.str();
}

std::string trace_csv(const OptimizeReport& report, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("iter", "J", "grad_norm", "step_size");
  for (const auto& t : report.trace) w.row(t.iter, t.value, t.grad_norm, t.step);
  return w.os.str();
}

std::string chapman_enskog_csv(const std::vector<ChapmanEnskogRow>& rows, const nlohmann::json& meta) {
  CsvWriter w(meta);
  w.row("eps", "residual", "observed_rate");
  for (const auto& r : rows) w.row(r.eps, r.residual, r.rate);
  return w.os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gtap
