#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(PATHWAYS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const std::string kBaseline = std::string(PATHWAYS_SOURCE_DIR) + "/scenarios/nyc_baseline.toml";

} // namespace

TEST_CASE("value subcommand writes the report and boundaries") {
    TempDir out("pathways_cli_value");
    CHECK(run("value --scenario " + kBaseline + " --out " + out.path.string()) == 0);
    CHECK(slurp(out.path / "report.csv").rfind("order,row,project,npv,option_value,difference,selected\n", 0) == 0);
    CHECK(slurp(out.path / "boundaries.csv").rfind("order,stage,project,t_yr,alpha_star_mm,water_level_m\n", 0) == 0);
}

TEST_CASE("damage and plotdata subcommands") {
    TempDir out("pathways_cli_damage");
    CHECK(run("damage --out " + out.path.string()) == 0);
    CHECK(slurp(out.path / "damage_summary.csv").find("expected_damage_B,") != std::string::npos);
    CHECK(run("plotdata --kind damage_curve --out " + out.path.string()) == 0);
    CHECK(slurp(out.path / "damage_curve.csv").find("\n2.506,0\n") != std::string::npos);
    CHECK(run("plotdata --kind nonsense --out " + out.path.string()) == 2);
}

TEST_CASE("sweep subcommand with overrides is reproducible") {
    TempDir out("pathways_cli_sweep");
    const std::string args = "sweep --param mu --values 0 3 --dt 0.5 --horizon 200 --out ";
    CHECK(run(args + out.path.string()) == 0);
    const std::string first = slurp(out.path / "sweep.csv");
    CHECK(run(args + out.path.string()) == 0);
    CHECK(slurp(out.path / "sweep.csv") == first);
    CHECK(first.rfind("param,value,order,npv_total,option_total,difference,selected\n", 0) == 0);
}

TEST_CASE("exit codes") {
    TempDir out("pathways_cli_codes");
    const fs::path bad = out.path / "bad.toml";
    std::ofstream(bad) << "[economics]\nrate = 0.04\ngamma = 0.05\n";
    CHECK(run("value --scenario " + bad.string() + " --out " + out.path.string()) == 2);
    CHECK(run("value --scenario " + (out.path / "missing.toml").string()) == 2);
    CHECK(run("value --dt -1 --out " + out.path.string()) == 2);
    CHECK(run("fit --out " + out.path.string()) == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("") == 2);
}
