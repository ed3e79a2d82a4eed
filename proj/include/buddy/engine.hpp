#pragma once

// Depth-first exploration of every interleaving of a two-thread program.
//
// Semaphores follow the checker's own semantics rather than textbook P/V:
// down(k) lowers s_k if it is up and otherwise does nothing; up(k) raises
// s_k if it is down and otherwise parks the thread until the other thread
// lowers s_k, at which point the parked up(k) completes immediately.
// All semaphores start down.

#include "buddy/state.hpp"
#include "buddy/toylang.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace buddy {

enum class StepEffect { Advanced, NowBlocked, Deadlock, CompletedThread };

struct StepResult {
    StepEffect effect = StepEffect::Advanced;
    PartialInterleaving next;
};

struct ExplorationConfig {
    bool pruning = true;
    bool race_detection = true;
    bool digest_mode = false;
    std::uint64_t max_total_steps = 1'000'000;

    /// Throws std::invalid_argument for inconsistent settings.
    void validate() const;
};

struct ExplorationStats {
    std::uint64_t branch_statements = 0;     // executed from nodes with both threads runnable
    std::uint64_t completion_statements = 0; // executed while the other thread is done
    std::uint64_t forced_statements = 0;     // executed while the other thread is parked, incl. wake-ups
    std::uint64_t complete_interleavings = 0;
    std::uint64_t pruned_subtrees = 0;
    std::uint64_t races_found = 0;
    std::uint64_t table_entries = 0;

    std::uint64_t total_statements() const
    {
        return branch_statements + completion_statements + forced_statements;
    }
};

/// A reproducible exploration point. `snapshot` is absent on the stored
/// side of a race found in digest mode, where only `digest` survives.
struct Witness {
    CombinedCounter counter;
    ExecutionTrace trace;
    Schedule schedule;
    std::optional<Snapshot> snapshot;
    std::optional<Digest> digest;
};

struct Outcome {
    Snapshot snapshot;
    ExecutionTrace trace;
    Schedule schedule;
};

struct RaceFinding {
    CombinedCounter counter;
    Witness stored;
    Witness current;
};

/// `state` has both threads parked; its schedule ends with the decision
/// that attempted the second up().
struct DeadlockFinding {
    Witness state;
    ThreadId attempting = 0;
    std::size_t semaphore = 0;
};

/// One thread is done and the other is parked on `semaphore` for good.
struct BlockForeverFinding {
    Witness state;
    ThreadId blocked = 0;
    std::size_t semaphore = 0;
};

struct ExplorationReport {
    ExplorationConfig config;
    std::vector<Outcome> outcomes; // distinct final snapshots, first witness in DFS order
    std::vector<RaceFinding> races;
    std::vector<DeadlockFinding> deadlocks;
    std::vector<BlockForeverFinding> block_forever;
    ExplorationStats stats;
    bool complete = true; // false when the step budget ran out
};

PartialInterleaving initial_interleaving(const ProgramPair& p);

/// Lets `tid` take one scheduling decision. Does not resolve wake-ups of
/// the other thread; see unblock_check. Throws std::logic_error if `tid` is
/// not runnable.
StepResult step(const ProgramPair& p, const PartialInterleaving& i, ThreadId tid);

/// Completes a parked up(k) whose semaphore has since been lowered.
PartialInterleaving unblock_check(const ProgramPair& p, PartialInterleaving i);

/// True when `tid` is runnable and its next statement is up(k) with s_k up.
bool would_block(const ProgramPair& p, const PartialInterleaving& i, ThreadId tid);

class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ExplorationReport explore(const ProgramPair& p, const ExplorationConfig& cfg = {});

class ReplayError : public std::runtime_error {
public:
    ReplayError(const std::string& what, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Re-executes a trace of executed statements. Parked statuses cannot be
/// recovered from a trace alone, so threads come back runnable or done.
PartialInterleaving replay(const ProgramPair& p, const ExecutionTrace& t);

struct ScheduleReplay {
    PartialInterleaving state;
    StepEffect last_effect = StepEffect::Advanced;
};

/// Re-executes scheduler decisions exactly as explore() took them.
ScheduleReplay replay_schedule(const ProgramPair& p, const Schedule& s);

} // namespace buddy
