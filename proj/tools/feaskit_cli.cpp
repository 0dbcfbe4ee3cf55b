#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "feaskit/boundary.hpp"
#include "feaskit/experiment_config.hpp"
#include "feaskit/inventory.hpp"
#include "feaskit/problem.hpp"

namespace {

using namespace feaskit;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parse_number_list(const std::string& text, std::size_t expected,
                                      const char* what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw ConfigError(std::string("malformed ") + what + ": " + text);
        }
        if (used != token.size())
            throw ConfigError(std::string("malformed ") + what + ": " + text);
        values.push_back(v);
    }
    if (expected != 0 && values.size() != expected)
        throw ConfigError(std::string(what) + " must list " + std::to_string(expected) +
                          " comma-separated values");
    return values;
}

int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int cmd_run(const std::string& config_path, const std::string& out_path, int workers) {
    ExperimentConfig config;
    try {
        config = ExperimentConfig::from_file(config_path);
        if (const char* env_seed = std::getenv("FEASKIT_SEED")) {
            std::size_t used = 0;
            config.seed = std::stoull(env_seed, &used);
            if (used != std::string(env_seed).size())
                throw ConfigError("FEASKIT_SEED must be an unsigned integer");
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const auto rows = run_config(config, workers);
        if (!out_path.empty()) append_csv(out_path, rows);
        for (const auto& row : rows) {
            std::printf("%-10s obs_mean=%.1f obs_se=%.2f pcd=%.4f [%.4f, %.4f] (%.0f ms)\n",
                        row.procedure.c_str(), row.stats.obs_mean, row.stats.obs_se,
                        row.stats.pcd, row.stats.pcd_lo, row.stats.pcd_hi, row.stats.wall_ms);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

void print_eta_ratio_table(const std::vector<long>& ks, const std::vector<long>& n0s, long s,
                           long mult, double alpha, bool independent) {
    std::printf("eta ratio, s=%ld, sum(T)=%ldxs, alpha=%g, %s systems\n", s, mult, alpha,
                independent ? "independent" : "dependent");
    std::printf("%8s", "k");
    for (long n0 : n0s) std::printf("  n0=%-8ld", n0);
    std::printf("\n");
    for (long k : ks) {
        std::printf("%8ld", k);
        for (long n0 : n0s)
            std::printf("  %-11.4f", eta_ratio(k, s, n0, alpha, mult * s, independent));
        std::printf("\n");
    }
    std::printf("%8s", "k->inf");
    for (long n0 : n0s) std::printf("  %-11.4f", eta_ratio_limit_k(s, n0, mult * s));
    std::printf("\n\n");
}

int cmd_analyze_eta_ratio(double alpha, bool independent) {
    const std::vector<long> ks = {1, 10, 100, 1000};
    const std::vector<long> n0s = {10, 20, 30, 50};
    for (long mult : {2L, 3L})
        for (long s : {1L, 5L}) print_eta_ratio_table(ks, n0s, s, mult, alpha, independent);
    return 0;
}

int cmd_analyze_approx_obs(double alpha, long n0, double eps, double sigma2, double xi) {
    const double h2_1 = 2.0 * solve_eta(n0 - 1, alpha, 1) * static_cast<double>(n0 - 1);
    const double h2_2 = 2.0 * solve_eta(n0 - 1, alpha / 2.0, 1) * static_cast<double>(n0 - 1);
    std::printf("approximate observations, n0=%ld, alpha=%g, eps=%g, sigma2=%g, xi=%g\n", n0,
                alpha, eps, sigma2, xi);
    std::printf("%10s  %12s  %12s  %12s\n", "delta", "T=1", "T=2@xi*eps", "T=2@eps");
    for (double mult : {1.0, 2.0, 3.0, 5.0, 10.0, 25.0, 50.0}) {
        const double delta = mult * eps;
        const double t1 = approx_obs(delta, sigma2, eps, 1, h2_1, h2_2, xi,
                                     ApproxTermination::single);
        const double t2b = approx_obs(delta, sigma2, eps, 1, h2_1, h2_2, xi,
                                      ApproxTermination::level2);
        std::printf("%10.4f  %12.1f", delta, t1);
        try {
            const double t2a = approx_obs(delta, sigma2, eps, 1, h2_1, h2_2, xi,
                                          ApproxTermination::level1);
            std::printf("  %12.1f", t2a);
        } catch (const std::domain_error&) {
            std::printf("  %12s", "invalid");
        }
        std::printf("  %12.1f\n", t2b);
    }
    return 0;
}

int cmd_inventory_oracle(const std::string& thresholds, const std::string& eps_text,
                         const std::string& out_path) {
    std::vector<double> q, eps;
    try {
        q = parse_number_list(thresholds, 2, "--thresholds");
        eps = parse_number_list(eps_text, 2, "--eps");
        for (double e : eps)
            if (!(e > 0.0)) throw ConfigError("--eps entries must be positive");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << "s,S,p_stockout,cost,class\n";
        const InventoryParams params;
        long counts[3] = {0, 0, 0};
        std::vector<double> y(2);
        for (const InventoryPolicy& policy : policy_grid()) {
            const SteadyStateResult exact = steady_state(policy, params);
            y[0] = exact.stockout_probability;
            y[1] = exact.expected_cost;
            const SystemClass cls = classify_system(y, q, eps);
            const char* label = cls == SystemClass::desirable
                                    ? "D"
                                    : cls == SystemClass::acceptable ? "A" : "U";
            ++counts[static_cast<int>(cls)];
            out << policy.reorder_point << ',' << policy.order_up_to << ','
                << format_full(exact.stockout_probability) << ','
                << format_full(exact.expected_cost) << ',' << label << '\n';
        }
        std::printf("2901 policies: D=%ld A=%ld U=%ld\n", counts[0], counts[1], counts[2]);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "oracle failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

struct CsvRecord {
    std::string procedure;
    std::string config_id;
    long reps = 0;
    double obs_mean = 0.0, obs_se = 0.0, pcd = 0.0, pcd_lo = 0.0, pcd_hi = 0.0;
};

int cmd_report(const std::string& csv_path, const std::string& baseline) {
    std::ifstream in(csv_path);
    if (!in) {
        std::cerr << "cannot read " << csv_path << "\n";
        return kExitRuntime;
    }
    std::string line;
    std::vector<CsvRecord> records;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            continue;  // header
        }
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 9) continue;
        CsvRecord rec;
        rec.procedure = fields[0];
        rec.config_id = fields[1];
        rec.reps = std::stol(fields[2]);
        rec.obs_mean = std::stod(fields[3]);
        rec.obs_se = std::stod(fields[4]);
        rec.pcd = std::stod(fields[5]);
        rec.pcd_lo = std::stod(fields[6]);
        rec.pcd_hi = std::stod(fields[7]);
        records.push_back(rec);
    }
    if (records.empty()) {
        std::cerr << "no data rows in " << csv_path << "\n";
        return kExitRuntime;
    }
    std::size_t base = 0;
    if (!baseline.empty()) {
        const auto it = std::find_if(records.begin(), records.end(), [&](const CsvRecord& r) {
            return r.procedure == baseline;
        });
        if (it == records.end()) {
            std::cerr << "baseline procedure not found: " << baseline << "\n";
            return kExitRuntime;
        }
        base = static_cast<std::size_t>(it - records.begin());
    }
    std::printf("| %-12s | %6s | %12s | %9s | %7s | %-18s |\n", "procedure", "reps", "obs_mean",
                "obs_ratio", "pcd", "pcd 95% CI");
    std::printf("|--------------|--------|--------------|-----------|---------|--------------------|\n");
    for (const auto& rec : records) {
        std::printf("| %-12s | %6ld | %12.1f | %9.3f | %7.4f | [%.4f, %.4f] |\n",
                    rec.procedure.c_str(), rec.reps, rec.obs_mean,
                    rec.obs_mean / records[base].obs_mean, rec.pcd, rec.pcd_lo, rec.pcd_hi);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fully sequential feasibility determination toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    int workers = default_workers();
    auto* run = app.add_subcommand("run", "Execute an experiment config");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("--out", out_path, "CSV output path (appended)");
    run->add_option("--workers", workers, "Worker thread count");

    std::string table = "eta-ratio";
    double alpha = 0.05;
    bool independent = true;
    long n0 = 20;
    double eps = 0.02, sigma2 = 1.0, xi = 2.0;
    auto* analyze = app.add_subcommand("analyze", "Print closed-form analysis tables");
    analyze->add_option("--table", table, "eta-ratio | approx-obs");
    analyze->add_option("--alpha", alpha, "Confidence parameter");
    analyze->add_flag("--dependent", "Use the dependent-systems allocation");
    analyze->add_option("--n0", n0, "Initial sample size (approx-obs)");
    analyze->add_option("--eps", eps, "Tolerance (approx-obs)");
    analyze->add_option("--sigma2", sigma2, "Variance (approx-obs)");
    analyze->add_option("--xi", xi, "Relaxation multiplier (approx-obs)");

    std::string thresholds, oracle_eps = "0.001,0.1", oracle_out = "inventory_oracle.csv";
    auto* oracle = app.add_subcommand("inventory-oracle",
                                      "Export exact (s,S) steady-state performance");
    oracle->add_option("--thresholds", thresholds, "q1,q2")->required();
    oracle->add_option("--eps", oracle_eps, "eps1,eps2");
    oracle->add_option("--out", oracle_out, "CSV output path");

    std::string report_csv, baseline;
    auto* report = app.add_subcommand("report", "Render a results CSV as a table");
    report->add_option("csv", report_csv, "CSV produced by `run`")->required();
    report->add_option("--baseline", baseline, "Baseline procedure for ratios");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, out_path, workers);
    if (analyze->parsed()) {
        independent = analyze->count("--dependent") == 0;
        if (table == "eta-ratio") return cmd_analyze_eta_ratio(alpha, independent);
        if (table == "approx-obs") return cmd_analyze_approx_obs(alpha, n0, eps, sigma2, xi);
        std::cerr << "unknown table: " << table << "\n";
        return kExitConfig;
    }
    if (oracle->parsed()) return cmd_inventory_oracle(thresholds, oracle_eps, oracle_out);
    if (report->parsed()) return cmd_report(report_csv, baseline);
    return kExitConfig;
}
