#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <sys/wait.h>

using nlohmann::json;

namespace {

std::string data_path(const std::string& name) {
    return std::string(LAZYSDP_TEST_DATA) + "/" + name;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(LAZYSDP_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) res.out += buf.data();
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("solve: toy instance converges to the analytic optimum with exit 0") {
    CliResult res = run_cli("solve --input " + data_path("toy_n1.dat-s") +
                            " --R 10 --eps 1e-3 --format structured");
    REQUIRE(res.exit_code == 0);
    json doc = json::parse(res.out);
    // max x s.t. 2x = 1: optimum 0.5.
    CHECK(std::fabs(doc["solution"]["objective"].get<double>() - 0.5) < 5e-3);
    CHECK(doc["summary"]["converged"].get<bool>());
}

TEST_CASE("solve: toy instance with all-default flags exits 0") {
    CliResult res = run_cli("solve --input " + data_path("toy_n1.dat-s") + " --R 10");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("converged") != std::string::npos);
}

TEST_CASE("solve: --trace writes a line-delimited JSON file") {
    const std::string trace = std::string(LAZYSDP_TEST_DATA) + "/../tmp_cli_trace.jsonl";
    CliResult res = run_cli("solve --input " + data_path("toy_n1.dat-s") +
                            " --R 10 --eps 1e-3 --check full --trace " + trace);
    REQUIRE(res.exit_code == 0);
    std::ifstream in(trace);
    REQUIRE(in.good());
    std::string line;
    int lines = 0;
    bool saw_summary = false;
    while (std::getline(in, line)) {
        json j = json::parse(line);
        if (j["type"] == "summary") saw_summary = true;
        ++lines;
    }
    CHECK(lines > 100);
    CHECK(saw_summary);
    std::remove(trace.c_str());
}

TEST_CASE("solve: missing --R is a usage error with exit 3") {
    CliResult res = run_cli("solve --input " + data_path("toy_n1.dat-s"));
    CHECK(res.exit_code == 3);
}

TEST_CASE("solve: malformed input maps ParseError to exit 3") {
    CliResult res = run_cli("solve --input " + data_path("malformed/m08_duplicate.dat-s") +
                            " --R 1");
    CHECK(res.exit_code == 3);
}

TEST_CASE("solve: rank-deficient instance fails validation with exit 3") {
    const std::string path = std::string(LAZYSDP_TEST_DATA) + "/../tmp_rankdef.dat-s";
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("2\n1\n2\n1 1\n1 1 1 1 1\n2 1 1 1 1\n", f);  // duplicated constraint
    std::fclose(f);
    CliResult res = run_cli("solve --input " + path + " --R 1");
    CHECK(res.exit_code == 3);
    std::remove(path.c_str());
}

TEST_CASE("solve: invalid eps is a configuration error with exit 3") {
    CliResult res = run_cli("solve --input " + data_path("toy_n1.dat-s") +
                            " --R 10 --eps 0.5");
    CHECK(res.exit_code == 3);
}

TEST_CASE("solve: exhausted budget exits 2") {
    CliResult res = run_cli("solve --input " + data_path("toy_n1.dat-s") +
                            " --R 10 --eps 1e-3 --max-iters 4");
    CHECK(res.exit_code == 2);
}

TEST_CASE("solve: maintained and naive variants agree on the objective") {
    const std::string base = "solve --input " + data_path("trace_n2.dat-s") +
                             " --R 1 --eps 1e-3 --check off --format structured";
    CliResult rm = run_cli(base + " --variant maintained");
    CliResult rn = run_cli(base + " --variant naive");
    REQUIRE(rm.exit_code == 0);
    REQUIRE(rn.exit_code == 0);
    const double om = json::parse(rm.out)["solution"]["objective"].get<double>();
    const double on = json::parse(rn.out)["solution"]["objective"].get<double>();
    CHECK(std::fabs(om - on) < 1e-5);
}

TEST_CASE("solve: structured output is byte-identical outside the timing section") {
    const std::string args = "solve --input " + data_path("diag_lp_n2.dat-s") +
                             " --R 1 --eps 1e-3 --check cheap --format structured";
    CliResult r1 = run_cli(args);
    CliResult r2 = run_cli(args);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    json d1 = json::parse(r1.out);
    json d2 = json::parse(r2.out);
    d1.erase("timing");
    d2.erase("timing");
    CHECK(d1.dump() == d2.dump());
}

TEST_SUITE_END();
