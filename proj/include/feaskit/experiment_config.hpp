#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "feaskit/benchmarks.hpp"
#include "feaskit/inventory.hpp"

namespace feaskit {

/// Raised for malformed or schema-violating experiment configs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SourceType { synthetic, inventory };

/// Parsed experiment description. Every run is reconstructible from the
/// canonical form plus the master seed; unknown keys are rejected.
struct ExperimentConfig {
    double alpha = 0.05;
    int c = 1;
    bool independent = false;
    long reps = 1;
    std::uint64_t seed = 0;
    std::vector<double> q;
    std::vector<double> eps;
    SourceType source = SourceType::synthetic;

    // synthetic source
    long k = 1;
    long s = 1;
    MeanConfig mean_cfg;
    VarianceConfig var_cfg;

    // inventory source
    long policy_subset = 0;  // 0 = full grid
    InventoryParams inventory_params;

    std::vector<ProcedurePlan> procedures;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);

    /// Canonical JSON form (sorted keys, effective seed applied).
    nlohmann::json canonical() const;

    /// Stable hash of the canonical form restricted to one procedure row.
    std::string config_id(std::size_t procedure_index) const;
};

struct ExperimentRow {
    std::string procedure;
    std::string config_id;
    MacroStats stats;
};

/// Executes every procedure entry of the config and returns one row each.
std::vector<ExperimentRow> run_config(const ExperimentConfig& config, int workers);

/// Deterministic subset of the policy grid (sorted by grid order).
std::vector<InventoryPolicy> select_policy_subset(long count, SeedSpec seed);

/// Fixed CSV schema shared by the CLI and the harness.
extern const char* const kCsvHeader;

std::string csv_row(const ExperimentRow& row);

/// Full-precision decimal rendering (17 significant digits).
std::string format_full(double value);

/// Appends rows to `path`, writing the header first when the file is new.
void append_csv(const std::string& path, const std::vector<ExperimentRow>& rows);

}  // namespace feaskit
