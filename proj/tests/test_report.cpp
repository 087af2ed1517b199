#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "csk3/report.hpp"

using namespace csk3;
namespace fs = std::filesystem;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("csk3_report_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST(RunConfig, Validation) {
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    c.format = "xml";
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = RunConfig{};
    c.grid_i = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = RunConfig{};
    c.search_height_bound = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = RunConfig{};
    c.factorization_bound = 1000;
    EXPECT_THROW(c.check_size(1001, "D"), FactorizationBudgetExceeded);
    EXPECT_NO_THROW(c.check_size(-1000, "D"));
}

TEST(Json, CertificateFields) {
    auto cert = spr_check(3, 2, 5, 100);
    Json j = to_json(cert);
    EXPECT_EQ(j["verdict"], "certified");
    EXPECT_EQ(j["uses_external_facts"], false);
    EXPECT_EQ(j["legs"]["torsor"]["witness"]["t"], "1");
    EXPECT_EQ(j["legs"]["jacobian"]["D"], "5");
    EXPECT_EQ(j["legs"]["curve"]["certificate"]["witness"]["x"], "-9");
    EXPECT_EQ(j["legs"]["curve"]["certificate"]["provenance"], to_string(Provenance::Kind::SearchFound));
    EXPECT_EQ(to_json(CurvePoint::infinity()), "O");
    Json env = envelope("spr");
    EXPECT_EQ(env.begin().key(), "schema_version");
    EXPECT_EQ(env["command"], "spr");
}

TEST(Json, ExternalLegIsFlagged) {
    auto facts = ExternalFactTable::load(CSK3_FACT_TABLE);
    Json j = to_json(spr_check(7, 1, 17, 100, &facts));
    EXPECT_EQ(j["uses_external_facts"], true);
    EXPECT_EQ(j["legs"]["curve"]["status"], "external");
    EXPECT_EQ(j["legs"]["curve"]["certificate"]["external"], true);
    EXPECT_TRUE(j["legs"]["curve"]["certificate"].contains("citation"));
}

TEST(Csv, RowsAndFields) {
    Json rows = envelope("root-number");
    rows["rows"] = Json::array({Json{{"T", "1/2"}, {"class", "7"}}, Json{{"T", "a,b"}, {"class", "15"}}});
    EXPECT_EQ(to_csv(rows), "T,class\n1/2,7\n\"a,b\",15\n");

    Json flat = envelope("twist-rank");
    flat["D"] = "5";
    flat["witness"] = Json{{"x", "-4"}, {"y", "6"}};
    EXPECT_EQ(to_csv(flat), "field,value\nschema_version,1\ncommand,twist-rank\nD,5\nwitness.x,-4\nwitness.y,6\n");
}

TEST(Cache, Roundtrip) {
    TempDir dir;
    auto path = dir.file("cache.json");
    {
        PointCache cache(path);
        EXPECT_EQ(cache.size(), 0u);
        EXPECT_TRUE(cache.insert(TwistFamily::Congruent, 5, {CurvePoint(q(-4), q(6)), "search", 100}));
        EXPECT_FALSE(cache.insert(TwistFamily::Congruent, 5, {CurvePoint(q(-4), q(6)), "search", 100}));
        EXPECT_THROW(cache.insert(TwistFamily::Congruent, 5, {CurvePoint(q(1), q(1)), "search", 100}), OffCurve);
        cache.save();
    }
    EXPECT_FALSE(fs::exists(path + ".tmp"));
    PointCache again(path);
    ASSERT_EQ(again.size(), 1u);
    const auto* list = again.lookup(TwistFamily::Congruent, 5);
    ASSERT_TRUE(list);
    EXPECT_EQ((*list)[0].point, CurvePoint(q(-4), q(6)));
    EXPECT_EQ((*list)[0].budget, 100u);
    EXPECT_FALSE(again.lookup(TwistFamily::Plus, 5));
}

TEST(Cache, CorruptEntriesDropped) {
    TempDir dir;
    auto path = dir.file("cache.json");
    std::ofstream(path) << R"({"schema_version": 1, "entries": {
        "x^3-x:5": [
            {"x": "-4", "y": "6", "provenance": "search", "budget": 100},
            {"x": "1", "y": "1", "provenance": "search", "budget": 100},
            {"x": "-8/2", "y": "6", "provenance": "search", "budget": 100},
            {"x": "1/0", "y": "6", "provenance": "search", "budget": 100},
            {"x": "-4"}
        ],
        "bogus:5": [{"x": "-4", "y": "6", "provenance": "search", "budget": 100}],
        "x^3-x:6": "not a list"
    }})";
    std::ostringstream warn;
    PointCache cache(path, &warn);
    EXPECT_EQ(cache.size(), 1u);
    EXPECT_NE(warn.str().find("dropping"), std::string::npos);
}

TEST(Cache, UnreadableFileIgnored) {
    TempDir dir;
    auto path = dir.file("cache.json");
    std::ofstream(path) << "{ not json";
    std::ostringstream warn;
    PointCache cache(path, &warn);
    EXPECT_EQ(cache.size(), 0u);
    EXPECT_NE(warn.str().find("unreadable"), std::string::npos);
}

TEST(Cache, EnvironmentOverride) {
    ::unsetenv("CSK3_CACHE");
    EXPECT_EQ(resolve_cache_path(""), "");
    ::setenv("CSK3_CACHE", "/tmp/from-env.json", 1);
    EXPECT_EQ(resolve_cache_path(""), "/tmp/from-env.json");
    EXPECT_EQ(resolve_cache_path("/tmp/explicit.json"), "/tmp/explicit.json");
    ::unsetenv("CSK3_CACHE");
}

TEST(Cache, CachedSearchMatchesFreshSearch) {
    TempDir dir;
    PointCache cache(dir.file("cache.json"));
    auto first = cached_positive_rank(cache, 15, 100);
    ASSERT_TRUE(first);
    EXPECT_EQ(cache.size(), 1u);
    auto second = cached_positive_rank(cache, 15, 100);
    ASSERT_TRUE(second);
    EXPECT_EQ(*first->witness, *second->witness);
    EXPECT_EQ(*first->witness, *certify_positive_rank(15, TwistFamily::Congruent, 100)->witness);
    EXPECT_FALSE(cached_positive_rank(cache, 1, 50));
}

TEST(Svg, WellFormed) {
    auto atlas = atlas_generate(spr_check(3, 2, 5, 100), 4, 2);
    auto svg = atlas_svg(atlas, q(-2), q(2), 'Y');
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
    EXPECT_NE(svg.find("<circle"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
    auto opens = [&](const std::string& tag) {
        std::size_t n = 0;
        for (auto p = svg.find(tag); p != std::string::npos; p = svg.find(tag, p + 1)) ++n;
        return n;
    };
    EXPECT_EQ(opens("<g "), opens("</g>"));
}

TEST(Files, AtomicWrite) {
    TempDir dir;
    auto path = dir.file("out.txt");
    write_file_atomic(path, "one\n");
    write_file_atomic(path, "two\n");
    EXPECT_EQ(slurp(path), "two\n");
    EXPECT_FALSE(fs::exists(path + ".tmp"));
    EXPECT_THROW(write_file_atomic(dir.file("missing/out.txt"), "x"), Error);
}

TEST(Facts, TableLoads) {
    auto facts = ExternalFactTable::load(CSK3_FACT_TABLE);
    for (long D : {34, 226, 119, 4633}) {
        auto f = facts.lookup(D);
        ASSERT_TRUE(f) << D;
        EXPECT_FALSE(f->citation.empty());
        EXPECT_GE(f->claimed_rank, 1);
    }
    EXPECT_FALSE(facts.lookup(5));
    EXPECT_THROW(ExternalFactTable::load("/nonexistent/facts.txt"), Error);
}
