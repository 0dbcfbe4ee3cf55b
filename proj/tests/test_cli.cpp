#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string cli_path() {
    const char* path = std::getenv("FEASKIT_CLI");
    return path ? path : "";
}

int run_command(const std::string& args, const std::string& stdout_file = "") {
    std::string command = cli_path() + " " + args;
    if (!stdout_file.empty()) command += " > " + stdout_file;
    command += " 2> /dev/null";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_rows_without_wall_ms(const std::string& csv_text) {
    std::vector<std::string> rows;
    std::stringstream ss(csv_text);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (first) {
            first = false;
            continue;
        }
        if (line.empty()) continue;
        rows.push_back(line.substr(0, line.rfind(',')));
    }
    return rows;
}

const char* kTinyConfig = R"({
    "alpha": 0.05,
    "c": 1,
    "dependence": "dependent",
    "reps": 40,
    "seed": 20240605,
    "k": 4,
    "s": 2,
    "q": 0.0,
    "eps": 0.02,
    "means": {"kind": "SM", "b_lower": 1, "b_upper": 2, "m": 1, "d": 0.5},
    "variance": {"kind": "CV", "sigma2": 1.0},
    "procedures": [
        {"name": "FB", "n0": 10},
        {"name": "IZE", "n0_prime": 8, "n0_double_prime": 2, "nu": 0.8}
    ]
})";

}  // namespace

TEST_CASE("cli runs a config and appends reproducible csv rows") {
    REQUIRE_FALSE(cli_path().empty());
    const auto dir = std::filesystem::temp_directory_path() / "feaskit_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto config = (dir / "config.json").string();
    const auto csv_a = (dir / "a.csv").string();
    const auto csv_b = (dir / "b.csv").string();
    {
        std::ofstream out(config);
        out << kTinyConfig;
    }

    CHECK(run_command("run " + config + " --out " + csv_a + " --workers 1") == 0);
    CHECK(run_command("run " + config + " --out " + csv_b + " --workers 3") == 0);

    const auto text_a = slurp(csv_a);
    CHECK(text_a.rfind("procedure,config_id,reps,obs_mean,obs_se,pcd,pcd_lo,pcd_hi,wall_ms",
                       0) == 0);
    const auto rows_a = data_rows_without_wall_ms(text_a);
    const auto rows_b = data_rows_without_wall_ms(slurp(csv_b));
    REQUIRE(rows_a.size() == 2);
    CHECK(rows_a == rows_b);

    // A second run appends identical data rows.
    CHECK(run_command("run " + config + " --out " + csv_a + " --workers 2") == 0);
    const auto rows_again = data_rows_without_wall_ms(slurp(csv_a));
    REQUIRE(rows_again.size() == 4);
    CHECK(rows_again[2] == rows_again[0]);
    CHECK(rows_again[3] == rows_again[1]);

    // report renders the csv with the first row as baseline.
    const auto report_file = (dir / "report.txt").string();
    CHECK(run_command("report " + csv_a, report_file) == 0);
    const auto report = slurp(report_file);
    CHECK(report.find("FB") != std::string::npos);
    CHECK(report.find("1.000") != std::string::npos);
}

TEST_CASE("cli rejects invalid configs with exit code 2") {
    REQUIRE_FALSE(cli_path().empty());
    const auto dir = std::filesystem::temp_directory_path() / "feaskit_cli_test_bad";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto config = (dir / "bad.json").string();
    {
        std::ofstream out(config);
        std::string text = kTinyConfig;
        const auto pos = text.find("\"nu\": 0.8");
        text.replace(pos, 9, "\"nu\": 1.5");
        out << text;
    }
    CHECK(run_command("run " + config) == 2);
    CHECK(run_command("run " + (dir / "missing.json").string()) == 2);
}

TEST_CASE("cli seed override changes the data rows") {
    REQUIRE_FALSE(cli_path().empty());
    const auto dir = std::filesystem::temp_directory_path() / "feaskit_cli_test_seed";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto config = (dir / "config.json").string();
    const auto csv_a = (dir / "a.csv").string();
    const auto csv_b = (dir / "b.csv").string();
    {
        std::ofstream out(config);
        out << kTinyConfig;
    }
    CHECK(run_command("run " + config + " --out " + csv_a) == 0);
    setenv("FEASKIT_SEED", "777", 1);
    CHECK(run_command("run " + config + " --out " + csv_b) == 0);
    unsetenv("FEASKIT_SEED");
    CHECK(data_rows_without_wall_ms(slurp(csv_a)) != data_rows_without_wall_ms(slurp(csv_b)));
}

TEST_CASE("cli analyze prints the tabulated ratio grid") {
    REQUIRE_FALSE(cli_path().empty());
    const auto out = (std::filesystem::temp_directory_path() / "feaskit_analyze.txt").string();
    CHECK(run_command("analyze --table eta-ratio", out) == 0);
    const auto text = slurp(out);
    CHECK(text.find("1.3517") != std::string::npos);
    CHECK(text.find("1.1287") != std::string::npos);
}

TEST_CASE("cli inventory oracle validates thresholds") {
    REQUIRE_FALSE(cli_path().empty());
    CHECK(run_command("inventory-oracle --thresholds nonsense") == 2);
    CHECK(run_command("inventory-oracle --thresholds 0.01") == 2);
}
