#pragma once

#include "gtap/adjoint.hpp"
#include "gtap/control.hpp"
#include "gtap/experiments.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace gtap {

/// "# " prefixed lines with the metadata as indented JSON. Every CSV starts
/// with one so a table carries the config that produced it.
std::string provenance_block(const nlohmann::json& meta);

/// %.12e; "nan" and "inf" spelled out.
std::string format_number(double v);

std::string order_csv(const std::vector<OrderRow>& rows, const nlohmann::json& meta);
/// J is "-" for rows that did not converge or blew up.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, const nlohmann::json& meta);
/// Long format (scheme, eps, curve, index, coord, value) with the optimal
/// control over t and rho*(., T) - rho_d over x.
std::string benchmark_profiles_csv(const std::vector<BenchmarkRow>& rows, const nlohmann::json& meta);
std::string control_csv(std::span<const double> u, double dt, const nlohmann::json& meta);
std::string state_csv(const ForwardTrajectory& traj, const ProblemConfig& config, const nlohmann::json& meta);
std::string adjoint_csv(const AdjointTrajectory& adj, const ProblemConfig& config, const nlohmann::json& meta);
std::string trace_csv(const OptimizeReport& report, const nlohmann::json& meta);
std::string chapman_enskog_csv(const std::vector<ChapmanEnskogRow>& rows, const nlohmann::json& meta);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace gtap
