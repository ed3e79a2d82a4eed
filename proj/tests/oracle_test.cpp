// The engine against the brute-force schedule enumerator.

#include "buddy/engine.hpp"

#include "corpus.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace buddy;

namespace {

struct Verdict {
    std::set<std::string> outcomes;
    std::set<std::string> deadlocks;
    std::set<std::string> block_forever;
    bool race = false;
};

Verdict from_engine(const ExplorationReport& r)
{
    Verdict v;
    for (const auto& o : r.outcomes)
        v.outcomes.insert(oracle::outcome_key(o.snapshot));
    for (const auto& d : r.deadlocks)
        v.deadlocks.insert(oracle::state_key(*d.state.snapshot, d.state.counter));
    for (const auto& b : r.block_forever)
        v.block_forever.insert(oracle::state_key(*b.state.snapshot, b.state.counter));
    v.race = !r.races.empty();
    return v;
}

Verdict from_oracle(const oracle::BruteForceResult& r)
{
    return {r.outcomes, r.deadlock_states, r.block_forever_states, r.race()};
}

void expect_same(const Verdict& engine, const Verdict& brute, const std::string& label)
{
    EXPECT_EQ(engine.outcomes, brute.outcomes) << label;
    EXPECT_EQ(engine.deadlocks, brute.deadlocks) << label;
    EXPECT_EQ(engine.block_forever, brute.block_forever) << label;
    EXPECT_EQ(engine.race, brute.race) << label;
}

} // namespace

TEST(Oracle, Ab12SixOutcomes)
{
    const auto r = oracle::enumerate(parse(corpus::read_file(corpus::programs_dir() / "ab12.bt")));
    EXPECT_EQ(r.complete_schedules, 6u);
    EXPECT_EQ(r.outcomes.size(), 6u);
    EXPECT_TRUE(r.race());
    EXPECT_FALSE(r.deadlock());
}

TEST(Oracle, CommutingHasNoRace)
{
    const auto r = oracle::enumerate(parse(corpus::read_file(corpus::programs_dir() / "commuting.bt")));
    EXPECT_EQ(r.complete_schedules, 2u);
    EXPECT_EQ(r.outcomes.size(), 1u);
    EXPECT_FALSE(r.race());
}

TEST(Oracle, DoubleUpDeadlocksOnEverySchedule)
{
    const auto r = oracle::enumerate(parse(corpus::read_file(corpus::programs_dir() / "double_up.bt")));
    EXPECT_EQ(r.complete_schedules, 0u);
    EXPECT_TRUE(r.deadlock());
    // Each thread takes two decisions (raise, then park or deadlock); every
    // one of the C(4,2) orders ends in a deadlock.
    EXPECT_EQ(r.deadlock_schedules, 6u);
}

TEST(Oracle, BundledPrograms)
{
    for (const auto& path : corpus::bundled_programs()) {
        const auto p = parse(corpus::read_file(path));
        const auto brute = from_oracle(oracle::enumerate(p));
        ExplorationConfig off;
        off.pruning = false;
        expect_same(from_engine(explore(p)), brute, path.string());
        expect_same(from_engine(explore(p, off)), brute, path.string());
    }
}

TEST(Oracle, RandomCorpus)
{
    const auto programs = corpus::random_corpus(200, 20260101);
    std::size_t with_semaphores = 0, racy = 0, deadlocking = 0;
    for (const auto& src : programs) {
        const auto p = parse(src);
        const auto brute_result = oracle::enumerate(p);
        const auto brute = from_oracle(brute_result);
        ExplorationConfig off;
        off.pruning = false;
        expect_same(from_engine(explore(p)), brute, src);
        expect_same(from_engine(explore(p, off)), brute, src);

        ExplorationConfig none;
        none.pruning = false;
        none.race_detection = false;
        const auto plain = explore(p, none);
        EXPECT_EQ(plain.stats.complete_interleavings, brute_result.complete_schedules) << src;
        EXPECT_EQ(plain.deadlocks.size(), brute_result.deadlock_schedules) << src;

        with_semaphores += p.num_semaphores > 0;
        racy += brute.race;
        deadlocking += !brute.deadlocks.empty();
    }
    // The corpus has to exercise every verdict to mean anything.
    EXPECT_GT(with_semaphores, 50u);
    EXPECT_GT(racy, 20u);
    EXPECT_GT(deadlocking, 2u);
}
