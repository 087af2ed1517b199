#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

/// Runs the CLI with `args`; stderr is discarded, the cache variable cleared.
Run csk3(const std::string& args) {
    std::string cmd = "env -u CSK3_CACHE " + std::string(CSK3_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("csk3_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(Cli, TwistRank) {
    auto r = csk3("twist-rank 5");
    ASSERT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["command"], "twist-rank");
    EXPECT_EQ(j["verdict"], "certified");
    EXPECT_EQ(j["witness"]["x"], "-4");
    EXPECT_EQ(csk3("twist-rank 1").code, 2);
}

TEST(Cli, InputErrors) {
    EXPECT_EQ(csk3("twist-rank 12").code, 1);
    EXPECT_EQ(csk3("twist-rank 0").code, 1);
    EXPECT_EQ(csk3("twist-rank abc").code, 1);
    EXPECT_EQ(csk3("twist-rank 5 --format xml").code, 1);
    EXPECT_EQ(csk3("twist-rank 5 --height-bound 0").code, 1);
    EXPECT_EQ(csk3("twist-rank 4611686018427387909 --factor-bound 1000").code, 1);
    EXPECT_EQ(csk3("").code, 1);
    EXPECT_EQ(csk3("spr -d 3 -a 2").code, 1);
    EXPECT_EQ(csk3("atlas -d 3 -a 2 -C 5 --grid 0x1").code, 1);
    EXPECT_EQ(csk3("density -d 3 -a 2 -C 5 --lo 2 --hi 1").code, 1);
}

TEST(Cli, Spr) {
    auto ok = csk3("spr -d 3 -a 2 -C 5");
    ASSERT_EQ(ok.code, 0);
    auto j = Json::parse(ok.out);
    EXPECT_EQ(j["certificate"]["verdict"], "certified");

    auto inc = csk3("spr -d 7 -a 1 -C 17");
    EXPECT_EQ(inc.code, 2);
    EXPECT_EQ(Json::parse(inc.out)["certificate"]["legs"]["curve"]["status"], "inconclusive");

    auto ext = csk3("spr -d 7 -a 1 -C 17 --allow-external-facts");
    ASSERT_EQ(ext.code, 0);
    auto e = Json::parse(ext.out);
    EXPECT_EQ(e["certificate"]["uses_external_facts"], true);
    EXPECT_EQ(e["certificate"]["legs"]["curve"]["status"], "external");
}

TEST(Cli, AtlasWithSvg) {
    TempDir dir;
    auto svg = dir.path / "atlas.svg";
    auto r = csk3("atlas -d 3 -a 2 -C 5 --grid 3x2 --svg " + svg.string());
    ASSERT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    EXPECT_GT(j["count"].get<int>(), 0);
    EXPECT_EQ(j["count"], j["verified"]);
    EXPECT_EQ(j["rows"].size(), j["count"].get<std::size_t>());
    auto text = slurp(svg);
    EXPECT_EQ(text.rfind("<?xml", 0), 0u);
    EXPECT_NE(text.find("</svg>"), std::string::npos);
    EXPECT_EQ(csk3("atlas -d 3 -a 2 -C 3 --grid 2x1").code, 2);
}

TEST(Cli, Density) {
    auto r = csk3("density -d 3 -a 2 -C 5 --grids 1x1,10x2");
    ASSERT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 2u);
    EXPECT_EQ(j["rows"][0]["grid"], "1x1");
    EXPECT_EQ(j["rows"][1]["max_gap"], "1");
    EXPECT_EQ(j["rows"][1]["branch_coverage"]["both_Y_signs_present"], true);
}

TEST(Cli, SolubilityAndRootNumber) {
    auto s = csk3("solubility -a 1 -C 17 --brute");
    ASSERT_EQ(s.code, 0);
    auto j = Json::parse(s.out);
    EXPECT_EQ(j["verdict"], "Soluble");
    EXPECT_EQ(j["brute_force"]["everywhere_locally_soluble"], true);
    EXPECT_EQ(csk3("solubility -a 2 -C 21").code, 2);

    auto rn = csk3("root-number -d 7 -a 1 --T 0 1/2 2 --format csv");
    ASSERT_EQ(rn.code, 0);
    EXPECT_EQ(rn.out, "T,fiber_class,root_number\n0,7,-1\n1/2,119,-1\n2,119,-1\n");
}

TEST(Cli, Descent) {
    auto r = csk3("descent 34 --height-bound 200");
    ASSERT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["ledger"]["rank_lower_bound"], 2);
    EXPECT_EQ(j["ledger"]["consistent"], true);
}

TEST(Cli, WarmCacheIsIdempotent) {
    TempDir dir;
    auto cache = (dir.path / "cache.json").string();
    auto cold = csk3("spr -d 3 -a 2 -C 5 --cache " + cache);
    ASSERT_EQ(cold.code, 0);
    ASSERT_TRUE(fs::exists(cache));
    auto cache_after_cold = slurp(cache);
    auto warm = csk3("spr -d 3 -a 2 -C 5 --cache " + cache);
    auto warm2 = csk3("spr -d 3 -a 2 -C 5 --cache " + cache);
    EXPECT_EQ(warm.code, 0);
    EXPECT_EQ(cold.out, warm.out);
    EXPECT_EQ(warm.out, warm2.out);
    EXPECT_EQ(slurp(cache), cache_after_cold);
    EXPECT_EQ(csk3("spr -d 3 -a 2 -C 5").out, cold.out);
}

TEST(Cli, CacheFromEnvironment) {
    TempDir dir;
    auto cache = (dir.path / "env.json").string();
    std::string cmd = "CSK3_CACHE=" + cache + " " + std::string(CSK3_CLI) + " twist-rank 15 >/dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(cache));
}
