// End-to-end checks of the gkpsim front end: exit codes, report schema,
// determinism, config files and the compile/simulate round trip.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(GKPSIM_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) throw std::runtime_error("popen failed");
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "gkpsim_" + name; }

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, CombReportSchema) {
    auto r = run("comb --delta 0.04 --rounds 2");
    ASSERT_EQ(r.code, 0);
    auto d = json::parse(r.out);
    EXPECT_EQ(d["schema"], "gkpsim.report/1");
    EXPECT_EQ(d["command"], "comb");
    for (const char* k : {"delta", "rounds", "backend", "tol", "seed", "workers", "force"}) EXPECT_TRUE(d["config"].contains(k)) << k;
    EXPECT_EQ(d["report"]["ops"]["total"], 18);
    EXPECT_EQ(d["report"]["L"], 4);
    EXPECT_TRUE(d["timing"].contains("runtime_s"));
    ASSERT_TRUE(d["bounds"].is_array());
    ASSERT_FALSE(d["bounds"].empty());
    for (const auto& b : d["bounds"]) {
        for (const char* k : {"name", "params", "paper_rhs", "measured_lhs", "verdict", "note"}) EXPECT_TRUE(b.contains(k)) << k;
        const std::string v = b["verdict"];
        EXPECT_TRUE(v == "holds" || v == "vacuous" || v == "precondition_unmet" || v == "violated");
    }
    EXPECT_NE(d["circuit"].get<std::string>().find("CIRCUIT modes=1 qubits=1"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("gaussify --kappa 0.2 --L 12 --delta 0.01").code, 2);
    EXPECT_EQ(run("--backend grid gaussify --kappa 0.2 --L 16 --delta 0.01").code, 2);
    EXPECT_EQ(run("gkp --kappa 0.3 --delta 0.01").code, 2);
    EXPECT_EQ(run("comb --delta 0.04").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("simulate --circuit /nonexistent/circuit.txt").code, 2);
    // A negative tolerance forces the lower-bound check to fail: exit 3.
    EXPECT_EQ(run("--tol -100 compile --displacement 3,4").code, 3);
    EXPECT_EQ(run("compile --displacement 3,4").code, 0);
}

TEST(Cli, ForceRunsOutsideRange) {
    auto r = run("--force gkp --kappa 0.3 --delta 0.01");
    ASSERT_EQ(r.code, 0);
    auto d = json::parse(r.out);
    for (const auto& b : d["bounds"]) EXPECT_NE(b["verdict"], "holds") << b["name"];
}

TEST(Cli, GkpReportAndTails) {
    auto r = run("gkp --kappa 0.2 --delta 0.01 --tails 1,2");
    ASSERT_EQ(r.code, 0);
    auto d = json::parse(r.out);
    EXPECT_EQ(d["report"]["L"], 8);
    EXPECT_EQ(d["report"]["ops"]["total"], 35);
    EXPECT_NEAR(d["report"]["p_acc"].get<double>(), 0.2718824, 1e-5);
    EXPECT_NEAR(d["report"]["fidelity"].get<double>(), 0.7261174, 1e-5);
    ASSERT_EQ(d["report"]["tails"].size(), 2u);
    EXPECT_LT(d["report"]["tails"][0]["position_mass"].get<double>(), d["report"]["tails"][1]["position_mass"].get<double>());
}

TEST(Cli, DeterministicAcrossRuns) {
    for (const std::string args : {"gkp --kappa 0.2 --delta 0.01 --samples 5", "comb --delta 0.01 --rounds 3",
                                   "gaussify --kappa 0.2 --L 8 --delta 0.05 --samples 5"}) {
        auto a = json::parse(run(args).out), b = json::parse(run(args).out);
        a.erase("timing");
        b.erase("timing");
        EXPECT_EQ(a, b) << args;
    }
    auto s1 = json::parse(run("--seed 1 gkp --kappa 0.2 --delta 0.01 --samples 5").out);
    auto s2 = json::parse(run("--seed 2 gkp --kappa 0.2 --delta 0.01 --samples 5").out);
    EXPECT_NE(s1["samples"], s2["samples"]);
}

TEST(Cli, CompileSimulateRoundTrip) {
    const std::string path = temp_path("disp.txt");
    auto c = run("compile --displacement 3,4 --circuit-out " + path);
    ASSERT_EQ(c.code, 0);
    auto d = json::parse(c.out);
    EXPECT_LE(d["count"].get<int>(), d["upper_bound"].get<int>());
    EXPECT_EQ(read_file(path), d["circuit"].get<std::string>());
    auto s = run("simulate --circuit " + path + " --dx 0.001953125 --half-extent 16 --target-displacement 3,4");
    ASSERT_EQ(s.code, 0);
    auto sd = json::parse(s.out);
    EXPECT_GE(sd["report"]["fidelity"].get<double>(), 1.0 - 1e-8);
    EXPECT_NEAR(sd["report"]["modes"][0]["Q"].get<double>(), 4.0, 1e-6);
    EXPECT_NEAR(sd["report"]["modes"][0]["P"].get<double>(), 3.0, 1e-6);
    auto g = run("--backend gauss simulate --circuit " + path + " --target-displacement 3,4");
    ASSERT_EQ(g.code, 0);
    EXPECT_GE(json::parse(g.out)["report"]["fidelity"].get<double>(), 1.0 - 1e-10);
}

TEST(Cli, SimulateRejectsMalformedCircuit) {
    const std::string path = temp_path("bad.txt");
    write_file(path, "CIRCUIT modes=1 qubits=0\nFROB m0 1\n");
    EXPECT_EQ(run("simulate --circuit " + path).code, 2);
}

TEST(Cli, DumpStateHeader) {
    const std::string path = temp_path("comb.state");
    ASSERT_EQ(run("comb --delta 0.04 --rounds 2 --dump-state " + path).code, 0);
    const std::string text = read_file(path);
    EXPECT_EQ(text.rfind("GKPSTATE v1 modes=1 qubits=1", 0), 0u);
}

TEST(Cli, SweepRows) {
    auto r = run("sweep --protocol comb --rounds 1,2,3 --delta 0.01,0.04");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("protocol,kappa,Delta,n,L,", 0), 0u);
    int rows = 0;
    while (std::getline(in, line)) rows += !line.empty();
    EXPECT_EQ(rows, 6);
    EXPECT_EQ(run("--workers 2 sweep --protocol comb --rounds 1,2,3 --delta 0.01,0.04").out, r.out);
}

TEST(Cli, ConfigFile) {
    const std::string path = temp_path("cfg.toml");
    write_file(path, "backend = \"gauss\"\n[comb]\ndelta = 0.04\nrounds = 2\n");
    auto r = run("--config " + path + " comb");
    ASSERT_EQ(r.code, 0);
    auto d = json::parse(r.out);
    EXPECT_EQ(d["config"]["backend"], "gauss");
    EXPECT_EQ(d["config"]["rounds"], 2);
    // Flags override the file.
    EXPECT_EQ(json::parse(run("--config " + path + " comb --rounds 3").out)["config"]["rounds"], 3);
    write_file(path, "[comb]\nfrob = 1\n");
    EXPECT_EQ(run("--config " + path + " comb --delta 0.04 --rounds 1").code, 2);
}

TEST(Cli, VerifyFormulas) {
    const std::string csv = temp_path("formulas.csv");
    auto r = run("verify formulas --csv " + csv);
    ASSERT_EQ(r.code, 0);
    auto d = json::parse(r.out);
    EXPECT_EQ(d["summary"]["holds"], 661);
    std::istringstream in(read_file(csv));
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 661);
}
