#pragma once

#include <string>

#include "ldpe/experiments.hpp"
#include "ldpe/protocol.hpp"
#include "ldpe/tree_model.hpp"

namespace ldpe {

// JSON round-trip of a tree model:
// {"d": ..., "edges": [[i, j], ...], "marginal_params": [...], "couplings": [...]}.
std::string tree_model_to_json(const TreeModel& model);
TreeModel tree_model_from_json(const std::string& text);
void save_tree_model(const TreeModel& model, const std::string& path);
TreeModel load_tree_model(const std::string& path);

// Overlays a JSON config document onto `config`: recognized keys mirror the
// CLI flags (task, d, k, epsilon, delta, alpha, b, sample_constant, users,
// trials, seed, threads, scalar_dist, d_grid, budget_grid); missing keys
// keep their current values, unknown keys are an error.
void apply_config_json(ExperimentConfig& config, const std::string& text);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

// JSON audit records for the CLI's side-channel output. Non-finite numbers
// are emitted as strings ("inf", "-inf", "nan") since JSON has no literals
// for them.
std::string report_to_json(const EstimateReport& report);
std::string audit_to_json(const PoolAudit& audit);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ldpe
