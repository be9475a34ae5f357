#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kc/minimizer.hpp"
#include "kc/spectral.hpp"

namespace kc {

/// JSON text with every number written to 17 significant digits, so that two
/// runs differ textually exactly when they differ numerically.
std::string dump_json(const nlohmann::json& j, int indent = 2);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Raw little-endian float64, row-major with z fastest, plus a sidecar
/// <stem>.json holding {n, L, alpha, axis_order, dtype}.
void write_field(const std::filesystem::path& bin_path, const Field& f, double alpha);
Field read_field(const std::filesystem::path& bin_path);

/// iter,M,J_res,strong_res,t_star,step
void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& history);
/// mu,nu,m,converged,iters
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);

} // namespace kc
