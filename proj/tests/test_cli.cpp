#include <doctest.h>

#ifdef HEXCROSS_CLI_PATH

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path scratch() {
    const fs::path p = fs::temp_directory_path() / "hexcross_cli_test";
    fs::create_directories(p);
    return p;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(HEXCROSS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli verify reports a passing fkg check") {
    const auto dir = scratch() / "verify";
    REQUIRE(cli("verify --domain hexagon:1 --n 1 --x 0.5 --check fkg --output-dir " + dir.string()) == 0);
    const json j = json::parse(slurp(dir / "verify.json"));
    CHECK(j["results"][0]["holds"] == true);
    CHECK(j["results"][0]["min_margin"].get<double>() >= -1e-12);
    CHECK(j["run_config"]["command"] == "verify");
    CHECK(j.contains("engine_hash"));
}

TEST_CASE("cli sample output is reproducible from its embedded config") {
    const auto dir = scratch() / "sample";
    const std::string args = "sample --seed 7 --domain box:3x3 --sweeps 300 --burn-in 50 --output-dir " + dir.string();
    REQUIRE(cli(args) <= 1);
    const std::string first = slurp(dir / "sample.json");
    REQUIRE(cli(args) <= 1);
    CHECK(slurp(dir / "sample.json") == first);

    const json j = json::parse(first);
    std::ofstream(dir / "config.json") << j["run_config"].dump();
    REQUIRE(cli("sample --config " + (dir / "config.json").string()) <= 1);
    CHECK(slurp(dir / "sample.json") == first);
}

TEST_CASE("cli csv schema") {
    const auto dir = scratch() / "csv";
    REQUIRE(cli("enumerate --domain box:2x2 --format csv --output-dir " + dir.string()) == 0);
    const std::string csv = slurp(dir / "enumerate.csv");
    CHECK(csv.rfind("run_id,command,n,x,h,h_prime,bc,domain,size,rho,estimate,std_error,flag\n", 0) == 0);
    CHECK(fs::exists(dir / "enumerate.config.json"));
}

TEST_CASE("cli exit codes") {
    const auto dir = scratch() / "codes";
    fs::create_directories(dir);
    CHECK(cli("enumerate --domain hexagon:3 --output-dir " + dir.string()) == 2);  // above the cap
    CHECK(cli("enumerate --no-such-flag") == 2);
    CHECK(cli("enumerate --domain pentagon:2") == 2);
    CHECK(cli("sample --update wolff --n 1.5 --output-dir " + dir.string()) == 2);
    std::ofstream(dir / "bad.json") << "{\"sweeps\": ";
    CHECK(cli("sample --config " + (dir / "bad.json").string()) == 2);
    std::ofstream(dir / "nested.json") << "{\"sweeps\": {\"value\": 3}}";
    CHECK(cli("sample --config " + (dir / "nested.json").string()) == 2);
    // Flags beat the config file.
    std::ofstream(dir / "cfg.json") << "{\"domain\": \"hexagon:3\", \"x\": [0.5]}";
    CHECK(cli("enumerate --config " + (dir / "cfg.json").string() + " --domain box:2x2 --output-dir " + dir.string()) == 0);
}

#endif
