#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rr/chart/field.hpp"
#include "rr/contact/models.hpp"
#include "rr/realization/realization.hpp"

namespace rr::app {

struct VerifyOptions {
  int random_perturbations = 100;
  int jacobi_points = 4;
  double jacobi_time = 1.0;
  double jacobi_step = 1e-3;
};

struct DistanceMetric {
  std::string label;
  std::string lambda = "0";
  std::string eta = "1";
};

struct DistanceOptions {
  std::vector<DistanceMetric> metrics;
  int path_steps = 16;
};

struct RunConfig {
  std::string model = "torus_xi_n";
  contact::ModelParams params;
  chart::Backend backend = chart::Backend::Analytic;
  std::optional<double> fd_step;
  std::optional<double> tolerance;  // overrides the rung's identity tolerance
  std::string f;                    // prescribed function, expression dialect
  std::uint64_t seed = 0;
  VerifyOptions verify;
  std::optional<realization::FlowBox> flow_box;
  realization::RealizeOptions local;
  realization::GlobalOptions global;
  DistanceOptions distance;
};

/// Validates against the published schema; unknown keys and wrong types throw InvalidInput.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace rr::app
