#include "feaskit/experiment_config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace feaskit {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
}

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
    if (!j[key].is_number()) throw ConfigError("key \"" + std::string(key) + "\" must be a number");
    return j[key].get<double>();
}

long require_integer(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
    if (!j[key].is_number_integer())
        throw ConfigError("key \"" + std::string(key) + "\" must be an integer");
    return j[key].get<long>();
}

std::string require_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
    if (!j[key].is_string()) throw ConfigError("key \"" + std::string(key) + "\" must be a string");
    return j[key].get<std::string>();
}

std::vector<double> number_or_list(const json& value, long count, const char* key) {
    std::vector<double> out;
    if (value.is_number()) {
        out.assign(count, value.get<double>());
    } else if (value.is_array()) {
        if (static_cast<long>(value.size()) != count)
            throw ConfigError(std::string("key \"") + key + "\" must have one entry per constraint");
        for (const auto& v : value) {
            if (!v.is_number()) throw ConfigError(std::string("key \"") + key + "\" must be numeric");
            out.push_back(v.get<double>());
        }
    } else {
        throw ConfigError(std::string("key \"") + key + "\" must be a number or an array");
    }
    return out;
}

MeanKind parse_mean_kind(const std::string& kind) {
    if (kind == "CM") return MeanKind::concentrated;
    if (kind == "SM") return MeanKind::scattered;
    throw ConfigError("means.kind must be \"CM\" or \"SM\"");
}

VarianceKind parse_variance_kind(const std::string& kind) {
    if (kind == "CV") return VarianceKind::constant;
    if (kind == "IV-C") return VarianceKind::increasing_constraint;
    if (kind == "DV-C") return VarianceKind::decreasing_constraint;
    if (kind == "IV-S") return VarianceKind::increasing_system;
    if (kind == "DV-S") return VarianceKind::decreasing_system;
    throw ConfigError("variance.kind must be one of CV, IV-C, DV-C, IV-S, DV-S");
}

ProcedurePlan parse_procedure(const json& j, long s, std::span<const double> eps) {
    if (!j.is_object()) throw ConfigError("procedures entries must be objects");
    const std::string name = require_string(j, "name", "procedures");
    ProcedurePlan plan;
    if (name == "FB") {
        reject_unknown_keys(j, {"name", "n0"}, "FB procedure");
        plan = ProcedurePlan::fb(require_integer(j, "n0", "FB procedure"));
    } else if (name == "IZR") {
        reject_unknown_keys(j, {"name", "n0", "xi", "T", "levels"}, "IZR procedure");
        const long n0 = require_integer(j, "n0", "IZR procedure");
        if (j.contains("levels")) {
            if (j.contains("xi") || j.contains("T"))
                throw ConfigError("IZR: give either explicit levels or (xi, T), not both");
            if (!j["levels"].is_array() || static_cast<long>(j["levels"].size()) != s)
                throw ConfigError("IZR: levels must list one ladder per constraint");
            plan = ProcedurePlan::izr(n0, 2.0, 2);
            plan.label = "IZR";
            plan.explicit_ladders.clear();
            for (long l = 0; l < s; ++l) {
                ToleranceLadder ladder;
                for (const auto& v : j["levels"][l]) {
                    if (!v.is_number()) throw ConfigError("IZR: ladder levels must be numeric");
                    ladder.levels.push_back(v.get<double>());
                }
                try {
                    ladder.validate();
                } catch (const std::exception& e) {
                    throw ConfigError(std::string("IZR: ") + e.what());
                }
                if (ladder.final_level() != eps[l])
                    throw ConfigError("IZR: each ladder must end at the problem tolerance");
                plan.explicit_ladders.push_back(std::move(ladder));
            }
        } else {
            const double xi = require_number(j, "xi", "IZR procedure");
            const long levels = j.contains("T") ? require_integer(j, "T", "IZR procedure") : 2;
            if (xi <= 1.0) throw ConfigError("IZR: xi must exceed 1");
            if (levels < 1) throw ConfigError("IZR: T must be >= 1");
            plan = ProcedurePlan::izr(n0, xi, static_cast<int>(levels));
        }
    } else if (name == "IZE") {
        reject_unknown_keys(j, {"name", "n0_prime", "n0_double_prime", "nu"}, "IZE procedure");
        const long n0p = require_integer(j, "n0_prime", "IZE procedure");
        const long n0pp = require_integer(j, "n0_double_prime", "IZE procedure");
        const double nu = require_number(j, "nu", "IZE procedure");
        if (n0p < 2) throw ConfigError("IZE: n0_prime must be >= 2");
        if (n0pp == 1 || n0pp < 0) throw ConfigError("IZE: n0_double_prime must be 0 or >= 2");
        if (!(nu > 0.5 && nu <= 1.0)) throw ConfigError("IZE: nu must lie in (0.5, 1]");
        plan = ProcedurePlan::ize(n0p, n0pp, nu);
    } else {
        throw ConfigError("procedure name must be FB, IZR, or IZE");
    }
    return plan;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

json procedure_to_json(const ProcedurePlan& plan) {
    json j;
    switch (plan.kind) {
        case ProcedurePlan::Kind::fb:
            j["name"] = "FB";
            j["n0"] = plan.n0;
            break;
        case ProcedurePlan::Kind::izr:
            j["name"] = "IZR";
            j["n0"] = plan.n0;
            if (!plan.explicit_ladders.empty()) {
                json levels = json::array();
                for (const auto& ladder : plan.explicit_ladders) levels.push_back(ladder.levels);
                j["levels"] = levels;
            } else {
                j["xi"] = plan.xi;
                j["T"] = plan.ladder_levels;
            }
            break;
        case ProcedurePlan::Kind::ize:
            j["name"] = "IZE";
            j["n0_prime"] = plan.n0_prime;
            j["n0_double_prime"] = plan.n0_double_prime;
            j["nu"] = plan.nu;
            break;
    }
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(j,
                        {"alpha", "c", "dependence", "reps", "seed", "q", "eps", "source", "k",
                         "s", "means", "variance", "procedures"},
                        "config");
    ExperimentConfig cfg;
    cfg.alpha = require_number(j, "alpha", "config");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    cfg.c = j.contains("c") ? static_cast<int>(require_integer(j, "c", "config")) : 1;
    if (cfg.c < 1) throw ConfigError("c must be >= 1");
    const std::string dependence =
        j.contains("dependence") ? require_string(j, "dependence", "config") : "dependent";
    if (dependence == "independent")
        cfg.independent = true;
    else if (dependence == "dependent")
        cfg.independent = false;
    else
        throw ConfigError("dependence must be \"independent\" or \"dependent\"");
    cfg.reps = require_integer(j, "reps", "config");
    if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
    if (!j.contains("seed")) throw ConfigError("missing key \"seed\" in config");
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
        throw ConfigError("seed must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();

    const json source = j.contains("source") ? j["source"] : json{{"type", "synthetic"}};
    if (!source.is_object()) throw ConfigError("source must be an object");
    const std::string type = require_string(source, "type", "source");
    if (type == "synthetic") {
        reject_unknown_keys(source, {"type"}, "source");
        cfg.source = SourceType::synthetic;
        cfg.k = require_integer(j, "k", "config");
        cfg.s = require_integer(j, "s", "config");
        if (cfg.k < 1 || cfg.s < 1) throw ConfigError("k and s must be >= 1");

        if (!j.contains("means")) throw ConfigError("missing key \"means\" in config");
        const json& means = j["means"];
        reject_unknown_keys(means, {"kind", "b_lower", "b_upper", "m", "d"}, "means");
        cfg.mean_cfg.kind = parse_mean_kind(require_string(means, "kind", "means"));
        cfg.mean_cfg.b_lower = require_integer(means, "b_lower", "means");
        cfg.mean_cfg.b_upper = require_integer(means, "b_upper", "means");
        cfg.mean_cfg.m = means.contains("m") ? require_integer(means, "m", "means") : 0;
        if (!means.contains("d")) throw ConfigError("missing key \"d\" in means");
        cfg.mean_cfg.d = number_or_list(means["d"], cfg.s, "d");

        if (!j.contains("variance")) throw ConfigError("missing key \"variance\" in config");
        const json& variance = j["variance"];
        reject_unknown_keys(variance, {"kind", "sigma2"}, "variance");
        cfg.var_cfg.kind = parse_variance_kind(require_string(variance, "kind", "variance"));
        cfg.var_cfg.sigma2 = require_number(variance, "sigma2", "variance");
        if (!(cfg.var_cfg.sigma2 > 0.0)) throw ConfigError("variance.sigma2 must be positive");
    } else if (type == "inventory") {
        reject_unknown_keys(source, {"type", "policy_subset"}, "source");
        cfg.source = SourceType::inventory;
        cfg.policy_subset =
            source.contains("policy_subset") ? require_integer(source, "policy_subset", "source") : 0;
        if (cfg.policy_subset < 0 || cfg.policy_subset > 2901)
            throw ConfigError("policy_subset must lie in [0, 2901]");
        if (j.contains("k") || j.contains("s") || j.contains("means") || j.contains("variance"))
            throw ConfigError("inventory configs derive k and s; drop k/s/means/variance");
        cfg.s = 2;
        cfg.k = cfg.policy_subset == 0 ? 2901 : cfg.policy_subset;
    } else {
        throw ConfigError("source.type must be \"synthetic\" or \"inventory\"");
    }

    if (!j.contains("q")) throw ConfigError("missing key \"q\" in config");
    cfg.q = number_or_list(j["q"], cfg.s, "q");
    if (!j.contains("eps")) throw ConfigError("missing key \"eps\" in config");
    cfg.eps = number_or_list(j["eps"], cfg.s, "eps");
    for (double e : cfg.eps)
        if (!(e > 0.0)) throw ConfigError("eps entries must be positive");

    if (!j.contains("procedures") || !j["procedures"].is_array() || j["procedures"].empty())
        throw ConfigError("config needs a nonempty \"procedures\" array");
    for (const auto& entry : j["procedures"])
        cfg.procedures.push_back(parse_procedure(entry, cfg.s, cfg.eps));
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

json ExperimentConfig::canonical() const {
    json j;
    j["alpha"] = alpha;
    j["c"] = c;
    j["dependence"] = independent ? "independent" : "dependent";
    j["reps"] = reps;
    j["seed"] = seed;
    j["q"] = q;
    j["eps"] = eps;
    if (source == SourceType::synthetic) {
        j["source"] = {{"type", "synthetic"}};
        j["k"] = k;
        j["s"] = s;
        j["means"] = {{"kind", mean_cfg.kind == MeanKind::concentrated ? "CM" : "SM"},
                      {"b_lower", mean_cfg.b_lower},
                      {"b_upper", mean_cfg.b_upper},
                      {"m", mean_cfg.m},
                      {"d", mean_cfg.d}};
        const char* vk = nullptr;
        switch (var_cfg.kind) {
            case VarianceKind::constant: vk = "CV"; break;
            case VarianceKind::increasing_constraint: vk = "IV-C"; break;
            case VarianceKind::decreasing_constraint: vk = "DV-C"; break;
            case VarianceKind::increasing_system: vk = "IV-S"; break;
            case VarianceKind::decreasing_system: vk = "DV-S"; break;
        }
        j["variance"] = {{"kind", vk}, {"sigma2", var_cfg.sigma2}};
    } else {
        j["source"] = {{"type", "inventory"}, {"policy_subset", policy_subset}};
    }
    json procs = json::array();
    for (const auto& plan : procedures) procs.push_back(procedure_to_json(plan));
    j["procedures"] = procs;
    return j;
}

std::string ExperimentConfig::config_id(std::size_t procedure_index) const {
    json j = canonical();
    j["procedures"] = json::array({procedure_to_json(procedures.at(procedure_index))});
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(j.dump()));
    return std::string(buf, 16);
}

std::vector<InventoryPolicy> select_policy_subset(long count, SeedSpec seed) {
    auto grid = policy_grid();
    if (count <= 0 || count >= static_cast<long>(grid.size())) return grid;
    // Partial Fisher-Yates on a dedicated derivation path that observation
    // streams never use, then restore grid order.
    RandomStream stream(seed, 0xFFFFFFFFull, 0xFFFFFFFFull);
    std::vector<long> indices(grid.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<long>(i);
    for (long i = 0; i < count; ++i) {
        const long j = i + static_cast<long>(stream.next_u64() %
                                             static_cast<std::uint64_t>(indices.size() - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(count);
    std::sort(indices.begin(), indices.end());
    std::vector<InventoryPolicy> subset;
    subset.reserve(count);
    for (long idx : indices) subset.push_back(grid[idx]);
    return subset;
}

std::vector<ExperimentRow> run_config(const ExperimentConfig& config, int workers) {
    std::vector<ExperimentRow> rows;
    ProblemSpec spec;
    spec.k = config.k;
    spec.s = config.s;
    spec.q = config.q;
    spec.eps = config.eps;
    spec.alpha = config.alpha;
    spec.c = config.c;
    spec.independent = config.independent;
    spec.validate();

    if (config.source == SourceType::synthetic) {
        for (std::size_t p = 0; p < config.procedures.size(); ++p) {
            const MacroStats stats =
                run_experiment(config.procedures[p], spec, config.mean_cfg, config.var_cfg,
                               config.reps, SeedSpec{config.seed}, workers);
            rows.push_back({config.procedures[p].label, config.config_id(p), stats});
        }
        return rows;
    }

    const auto policies = select_policy_subset(config.policy_subset, SeedSpec{config.seed});
    std::vector<SystemClass> truth(policies.size());
    std::vector<double> y(2);
    for (std::size_t i = 0; i < policies.size(); ++i) {
        const SteadyStateResult exact = steady_state(policies[i], config.inventory_params);
        y[0] = exact.stockout_probability;
        y[1] = exact.expected_cost;
        truth[i] = classify_system(y, spec.q, spec.eps);
    }
    const InventoryParams params = config.inventory_params;
    const SeedSpec seed{config.seed};
    SourceFactory factory = [&policies, params, seed](std::uint64_t rep) {
        return std::make_unique<InventorySource>(policies, params, seed, rep);
    };
    for (std::size_t p = 0; p < config.procedures.size(); ++p) {
        const MacroStats stats =
            run_macro(config.procedures[p], spec, truth, factory, config.reps, workers);
        rows.push_back({config.procedures[p].label, config.config_id(p), stats});
    }
    return rows;
}

const char* const kCsvHeader =
    "procedure,config_id,reps,obs_mean,obs_se,pcd,pcd_lo,pcd_hi,wall_ms";

std::string format_full(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string csv_row(const ExperimentRow& row) {
    std::string out = row.procedure;
    out += ',';
    out += row.config_id;
    out += ',';
    out += std::to_string(row.stats.reps);
    out += ',';
    out += format_full(row.stats.obs_mean);
    out += ',';
    out += format_full(row.stats.obs_se);
    out += ',';
    out += format_full(row.stats.pcd);
    out += ',';
    out += format_full(row.stats.pcd_lo);
    out += ',';
    out += format_full(row.stats.pcd_hi);
    out += ',';
    out += format_full(row.stats.wall_ms);
    return out;
}

void append_csv(const std::string& path, const std::vector<ExperimentRow>& rows) {
    const bool need_header =
        !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (need_header) out << kCsvHeader << '\n';
    for (const auto& row : rows) out << csv_row(row) << '\n';
}

}  // namespace feaskit
