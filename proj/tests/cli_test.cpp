#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string cli = COALVIEW_CLI;
const fs::path corpus = fs::path(COALVIEW_DATA) / "corpus";
const fs::path golden = fs::path(COALVIEW_TEST_DATA) / "golden";

fs::path scratch() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    auto dir = fs::temp_directory_path() / "coalview-cli-test" / (std::string(info->test_suite_name()) + "." + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, ValidateAcceptsTheCorpus) {
    EXPECT_EQ(run("validate " + q(corpus / "i1.json")), 0);
    EXPECT_EQ(run("validate " + q(corpus / "medium_02.json")), 0);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch();
    EXPECT_EQ(run("minimize --bogus"), 1);
    EXPECT_EQ(run("draw " + q(corpus / "i1.json")), 1);  // -o missing
    EXPECT_EQ(run("validate " + q(dir / "missing.json")), 2);
    std::ofstream(dir / "broken.json") << "{\"species\": \"(A,B\"}";
    EXPECT_EQ(run("validate " + q(dir / "broken.json")), 2);
    EXPECT_EQ(run("exact " + q(corpus / "medium_02.json") + " --budget 1"), 3);
}

TEST(Cli, BadSeedIsAUsageError) {
    const std::string env = "COALVIEW_SEED=banana ";
    const int status = std::system((env + cli + " minimize " + q(corpus / "i1.json") + " > /dev/null 2>&1").c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 1);
}

TEST(Cli, ExactLpMatchesGolden) {
    const auto dir = scratch();
    ASSERT_EQ(run("exact " + q(corpus / "i1.json") + " --fixed --emit-lp " + q(dir / "i1.lp")), 0);
    EXPECT_EQ(slurp(dir / "i1.lp"), slurp(golden / "i1.lp"));
}

TEST(Cli, DrawMatchesGolden) {
    const auto dir = scratch();
    ASSERT_EQ(run("draw " + q(corpus / "i1.json") + " -o " + q(dir / "i1.svg")), 0);
    EXPECT_EQ(slurp(dir / "i1.svg"), slurp(golden / "i1_given_rect.svg"));
}

TEST(Cli, MinimizeReportIsReplayable) {
    const auto dir = scratch();
    ASSERT_EQ(run("minimize " + q(corpus / "larger_03.json") + " --seed 11 --restarts 4 --report " + q(dir / "a.json")), 0);
    ASSERT_EQ(run("minimize " + q(corpus / "larger_03.json") + " --seed 11 --restarts 4 --report " + q(dir / "b.json")), 0);
    EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));

    const auto j = nlohmann::json::parse(slurp(dir / "a.json"));
    EXPECT_EQ(j.at("seed"), 11);
    EXPECT_EQ(j.at("restarts"), 4);
    EXPECT_EQ(j.at("mode"), "both");
    EXPECT_LE(j.at("best_crossings").get<int>(), j.at("default_crossings").get<int>());
    EXPECT_EQ(j.at("per_restart").size(), 8u);
    EXPECT_TRUE(j.at("best_embedding").contains("species_order"));
    EXPECT_TRUE(j.at("best_embedding").contains("gene_order"));
}

TEST(Cli, PlanarWritesDot) {
    const auto dir = scratch();
    ASSERT_EQ(run("planar " + q(corpus / "planar_01.json") + " --emit-dot " + q(dir / "d.dot")), 0);
    const auto dot = slurp(dir / "d.dot");
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
}

TEST(Cli, ReduceWritesALoadableBundle) {
    const auto dir = scratch();
    std::ofstream(dir / "k3.txt") << "0 1\n1 2\n0 2\n";
    ASSERT_EQ(run("reduce vtt " + q(dir / "k3.txt") + " --cut 2 --scale reduced -o " + q(dir / "k3.json")), 0);
    EXPECT_EQ(run("validate " + q(dir / "k3.json")), 0);
    EXPECT_EQ(run("reduce ftt " + q(dir / "k3.txt") + " --cut 2 --scale reduced --partition 01x"), 1);
}

TEST(Cli, BenchWritesCsv) {
    const auto dir = scratch();
    fs::create_directories(dir / "in");
    for (const char* f : {"i1.json", "double_cherry.json", "random_01.json"}) fs::copy_file(corpus / f, dir / "in" / f);
    ASSERT_EQ(run("bench " + q(dir / "in") + " --restarts 3 -o " + q(dir / "b.csv")), 0);
    std::istringstream csv(slurp(dir / "b.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "instance,species,genes,default,heuristic_best,exact,gap");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 3);
}
