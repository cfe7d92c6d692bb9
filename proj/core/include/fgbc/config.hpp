#pragma once

// INI experiment configuration. Sections and keys:
//
//   [scenario]     id, seed, tolerance, samples
//   [manifold]     type, metric, and numeric metric parameters (eps, g11, g12, g22)
//   [connection]   type, perturbation_amplitude, perturbation_profile, vertical_factor
//   [ehresmann]    type, table (eight comma-separated numbers)
//   [vector_field] type, power, direction, expr_u, expr_v
//   [quadrature]   order_base, order_fiber, order_boundary, epsilon_schedule,
//                  richardson, fd_step, volume_step, threads
//   [output]       dir, format, dump_forms
//
// Unknown sections or keys are rejected.

#include <string>

#include "fgbc/experiment.hpp"

namespace fgbc {

ExperimentConfig parse_config(const std::string& ini_text);
ExperimentConfig load_config(const std::string& path);

/// Range and consistency checks; throws a validation error.
void validate(const ExperimentConfig& config);

std::vector<double> parse_number_list(const std::string& text);
bool parse_switch(const std::string& text);

}  // namespace fgbc
