#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "r1c/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(R1C_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("r1c_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

std::string fixture(const std::string& name) { return std::string(R1C_DATA_DIR) + "/" + name; }

}  // namespace

TEST_F(Cli, CompleteFixture) {
    EXPECT_EQ(run("complete " + fixture("exact4.json") + " -o " + path("out.json")), 0);
    const auto doc = r1c::read_json_file(path("out.json"));
    EXPECT_EQ(doc["status"], "ok");
    EXPECT_EQ(doc["u"].size(), 4u);
}

TEST_F(Cli, AnalyzeFixture) {
    EXPECT_EQ(run("analyze " + fixture("cube333.json")), 0);
}

TEST_F(Cli, EmptyEntriesIsInputError) {
    std::ofstream(path("empty.json")) << R"({"dims": [2, 2], "entries": []})";
    EXPECT_EQ(run("complete " + path("empty.json")), 2);
    EXPECT_EQ(run("analyze " + path("empty.json")), 2);
}

TEST_F(Cli, BadInvocationsAreInputErrors) {
    EXPECT_EQ(run("complete " + path("missing.json")), 2);
    EXPECT_EQ(run("generate --dims 3,0,2"), 2);
    EXPECT_EQ(run("generate --dims 3,4 --eps -1"), 2);
    EXPECT_EQ(run("bench --dims 3,4 --format xml"), 2);
    EXPECT_EQ(run("nosuchcommand"), 2);
    EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, GenerateIsDeterministic) {
    ASSERT_EQ(run("generate --dims 4,5,6 --seed 3 --eps 1e-2 -o " + path("a")), 0);
    ASSERT_EQ(run("generate --dims 4,5,6 --seed 3 --eps 1e-2 -o " + path("b")), 0);
    for (const char* suffix : {"_exact.json", "_noisy.json", "_factors.json"})
        EXPECT_EQ(slurp(path(std::string("a") + suffix)), slurp(path(std::string("b") + suffix))) << suffix;
}

TEST_F(Cli, ZeroEpsGivesIdenticalExactAndNoisy) {
    ASSERT_EQ(run("generate --dims 4,5,6 --seed 8 --eps 0 -o " + path("z")), 0);
    EXPECT_EQ(slurp(path("z_exact.json")), slurp(path("z_noisy.json")));
}

TEST_F(Cli, CompleteWithTruthReportsMetrics) {
    ASSERT_EQ(run("generate --dims 5,6,7 --seed 2 --eps 1e-2 -o " + path("g")), 0);
    ASSERT_EQ(run("complete " + path("g_noisy.json") + " --truth " + path("g_factors.json") + " -o " +
                  path("r.json")),
              0);
    const auto doc = r1c::read_json_file(path("r.json"));
    ASSERT_TRUE(doc.contains("metrics"));
    EXPECT_LT(doc["metrics"]["sin_theta"].get<double>(), 0.1);
}

TEST_F(Cli, BenchWritesCsv) {
    ASSERT_EQ(run("bench --dims 6,7,8 --trials 2 --seed 1 -o " + path("b.csv")), 0);
    const std::string csv = slurp(path("b.csv"));
    EXPECT_EQ(csv.rfind("kind,trial", 0), 0u);
    EXPECT_NE(csv.find("\nmean,"), std::string::npos);
}
