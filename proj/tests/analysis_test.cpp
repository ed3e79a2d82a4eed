#include "buddy/analysis.hpp"

#include "corpus.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

using namespace buddy;
using nlohmann::json;

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

ExplorationReport check(const char* name, ExplorationConfig cfg = {})
{
    return explore(parse(corpus::read_file(corpus::programs_dir() / name)), cfg);
}

std::size_t count(const std::string& haystack, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1))
        ++n;
    return n;
}

} // namespace

TEST(Bench, UnitLattice)
{
    const auto rows = bench_table(1, 1);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].exhaustive, 2u);
    EXPECT_EQ(rows[0].pruned, 2u);
}

TEST(Bench, ReferenceColumns)
{
    const auto rows = bench_table(3, 8);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].pruned, 18u);
    EXPECT_EQ(rows[2].exhaustive, 420u);
    EXPECT_EQ(rows[2].pruned, 50u);
    for (const auto& row : rows) {
        EXPECT_EQ(row.pruned, 2 * row.n * row.n) << row.n;
        EXPECT_EQ(row.exhaustive, 2 * binomial(2 * row.n, row.n - 1)) << row.n;
        EXPECT_LE(row.pruned, row.exhaustive);
    }
    EXPECT_EQ(rows[5].exhaustive, 22880u);
}

TEST(Bench, WorkloadIsRaceFree)
{
    const auto r = explore(parse(bench_workload_source(4)));
    EXPECT_TRUE(r.races.empty());
    EXPECT_EQ(r.outcomes.size(), 1u);
    EXPECT_EQ(bench_workload_source(3), corpus::read_file(corpus::programs_dir() / "disjoint3.bt").substr(
                                            corpus::read_file(corpus::programs_dir() / "disjoint3.bt").find("var")));
}

TEST(Bench, Errors)
{
    EXPECT_THROW(bench_table(0, 3), std::invalid_argument);
    EXPECT_THROW(bench_table(4, 3), std::invalid_argument);
    EXPECT_THROW(bench_table(8, 8, 1000), BudgetExhausted);
}

TEST(Bench, Rendering)
{
    const auto rows = bench_table(3, 4);
    EXPECT_EQ(render_bench(rows, ReportFormat::Text),
              "   n    exhaustive    pruned\n"
              "   3            30        18\n"
              "   4           112        32\n");
    const auto j = json::parse(render_bench(rows, ReportFormat::Json));
    EXPECT_EQ(j["rows"][1]["n"], 4);
    EXPECT_EQ(j["rows"][1]["exhaustive"], 112);
    EXPECT_EQ(j["rows"][1]["pruned"], 32);
}

TEST(ExitStatus, Precedence)
{
    ExplorationReport r;
    EXPECT_EQ(exit_status(r), 0);
    r.complete = false;
    EXPECT_EQ(exit_status(r), 5);
    r.block_forever.emplace_back();
    EXPECT_EQ(exit_status(r), 3);
    r.deadlocks.emplace_back();
    EXPECT_EQ(exit_status(r), 2);
    r.races.emplace_back();
    EXPECT_EQ(exit_status(r), 1);
}

TEST(Report, RaceFreeHasOneOutcome)
{
    const auto text = render_report(check("disjoint3.bt"), ReportFormat::Text);
    EXPECT_NE(text.find("outcomes (1):"), std::string::npos);
    EXPECT_EQ(count(text, "  [1] trace="), 1u);
    EXPECT_NE(text.find("races (0):"), std::string::npos);
}

TEST(Report, EmptyProgram)
{
    const auto r = check("empty.bt");
    const auto text = render_report(r, ReportFormat::Text);
    EXPECT_NE(text.find("outcomes (1):"), std::string::npos);
    EXPECT_NE(text.find("out=\"\""), std::string::npos);
    EXPECT_EQ(r.stats.total_statements(), 0u);
    const auto j = json::parse(render_report(r, ReportFormat::Json));
    for (const auto& [key, value] : j["stats"].items())
        if (key != "complete_interleavings" && key != "table_entries")
            EXPECT_EQ(value, 0) << key;
}

TEST(Report, Ab12)
{
    const auto text = render_report(check("ab12.bt"), ReportFormat::Text);
    EXPECT_NE(text.find("outcomes (6):"), std::string::npos);
    for (const char* out : {"ab12", "a1b2", "a12b", "1ab2", "1a2b", "12ab"})
        EXPECT_NE(text.find("out=\"" + std::string(out) + "\""), std::string::npos) << out;
    EXPECT_EQ(text.find("races (0):"), std::string::npos);
    EXPECT_NE(text.find("] at <2,2>"), std::string::npos);
    EXPECT_NE(text.find("digest algorithm: sha256-128"), std::string::npos);
}

TEST(Report, DigestModeMarksStoredSide)
{
    ExplorationConfig cfg;
    cfg.digest_mode = true;
    const auto r = check("write_write.bt", cfg);
    const auto text = render_report(r, ReportFormat::Text);
    EXPECT_NE(text.find("digest only"), std::string::npos);
    const auto j = json::parse(render_report(r, ReportFormat::Json));
    EXPECT_TRUE(j["races"][0]["stored"]["snapshot"].is_null());
    EXPECT_EQ(j["races"][0]["stored"]["digest"].get<std::string>().size(), 32u);
    EXPECT_FALSE(j["races"][0]["current"]["snapshot"].is_null());
}

TEST(Report, JsonSchema)
{
    const auto j = json::parse(render_report(check("double_up.bt"), ReportFormat::Json));
    EXPECT_EQ(j["tool"], "buddycheck");
    EXPECT_EQ(j["format_version"], 1);
    EXPECT_EQ(j["digest_algorithm"], "sha256-128");
    EXPECT_EQ(j["exit_code"], 1);
    EXPECT_TRUE(j["complete"]);
    ASSERT_FALSE(j["deadlocks"].empty());
    const auto& d = j["deadlocks"][0];
    EXPECT_EQ(d["witness"]["counter"], json::array({2, 2}));
    EXPECT_EQ(d["witness"]["snapshot"]["status"], json::array({"B0", "B1"}));
    EXPECT_EQ(d["witness"]["snapshot"]["semaphores"], "UU");
}

// Every trace, schedule, counter and canonical snapshot in the JSON
// report also appears in the text report.
TEST(Report, TextAndJsonAgree)
{
    for (const auto& path : corpus::bundled_programs()) {
        const auto r = explore(parse(corpus::read_file(path)));
        const auto text = render_report(r, ReportFormat::Text);
        const auto j = json::parse(render_report(r, ReportFormat::Json));

        EXPECT_NE(text.find("outcomes (" + std::to_string(j["outcomes"].size()) + "):"), std::string::npos);
        EXPECT_NE(text.find("races (" + std::to_string(j["races"].size()) + "):"), std::string::npos);
        EXPECT_NE(text.find("deadlocks (" + std::to_string(j["deadlocks"].size()) + "):"), std::string::npos);
        EXPECT_NE(text.find("block-forever (" + std::to_string(j["block_forever"].size()) + "):"),
                  std::string::npos);

        for (const auto& o : j["outcomes"]) {
            EXPECT_NE(text.find("trace=" + o["trace"].get<std::string>() + " schedule=" +
                                o["schedule"].get<std::string>()),
                      std::string::npos);
            EXPECT_NE(text.find(o["snapshot"]["canonical"].get<std::string>()), std::string::npos);
        }
        auto witness_in_text = [&](const json& w) {
            EXPECT_NE(text.find(" trace=" + w["trace"].get<std::string>() + " schedule=" +
                                w["schedule"].get<std::string>()),
                      std::string::npos);
            if (!w["snapshot"].is_null())
                EXPECT_NE(text.find(w["snapshot"]["canonical"].get<std::string>()), std::string::npos);
        };
        for (const auto& race : j["races"]) {
            const std::string counter = "<" + std::to_string(race["counter"][0].get<int>()) + "," +
                                        std::to_string(race["counter"][1].get<int>()) + ">";
            EXPECT_NE(text.find("at " + counter), std::string::npos);
            witness_in_text(race["stored"]);
            witness_in_text(race["current"]);
        }
        for (const auto& d : j["deadlocks"])
            witness_in_text(d["witness"]);
        for (const auto& b : j["block_forever"])
            witness_in_text(b["witness"]);
        for (const auto& [key, value] : j["stats"].items())
            EXPECT_NE(text.find(key), std::string::npos);
        EXPECT_EQ(j["stats"]["races_found"], r.stats.races_found);
    }
}

TEST(Report, Deterministic)
{
    for (const auto& path : corpus::bundled_programs())
        for (auto format : {ReportFormat::Text, ReportFormat::Json})
            EXPECT_EQ(render_report(explore(parse(corpus::read_file(path))), format),
                      render_report(explore(parse(corpus::read_file(path))), format));
}
