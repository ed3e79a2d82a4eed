#pragma once

#include "buddy/toylang.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace buddy {

using ThreadId = int; // 0 or 1

enum class SemState : std::uint8_t { Down, Up };

using SemaphoreBank = std::vector<SemState>;

struct ThreadStatus {
    enum class Kind : std::uint8_t { Runnable, Blocked, Done };

    Kind kind = Kind::Runnable;
    std::size_t value = 0; // Runnable: next statement index; Blocked: semaphore index

    static ThreadStatus runnable(std::size_t next) { return {Kind::Runnable, next}; }
    static ThreadStatus blocked(std::size_t sem) { return {Kind::Blocked, sem}; }
    static ThreadStatus done() { return {Kind::Done, 0}; }

    bool is_runnable() const { return kind == Kind::Runnable; }
    bool is_blocked() const { return kind == Kind::Blocked; }
    bool is_done() const { return kind == Kind::Done; }

    bool operator==(const ThreadStatus&) const = default;
};

/// Per-thread execution counters. Each is the number of statements the
/// thread has executed plus one, so a fresh interleaving sits at <1,1>.
struct CombinedCounter {
    std::uint32_t s0 = 1;
    std::uint32_t s1 = 1;

    std::uint32_t operator[](ThreadId tid) const { return tid == 0 ? s0 : s1; }
    std::uint32_t& operator[](ThreadId tid) { return tid == 0 ? s0 : s1; }

    auto operator<=>(const CombinedCounter&) const = default;
    std::string str() const; // "<s0,s1>"
};

struct CombinedCounterHash {
    std::size_t operator()(const CombinedCounter& c) const noexcept
    {
        return (static_cast<std::size_t>(c.s0) << 32) ^ c.s1;
    }
};

/// Which thread executed each statement, in order. Only executed
/// statements appear; a blocked up() contributes nothing until it completes.
struct ExecutionTrace {
    std::string steps;

    void push(ThreadId tid) { steps.push_back(tid == 0 ? '0' : '1'); }
    std::size_t count(ThreadId tid) const;
    bool operator==(const ExecutionTrace&) const = default;
};

/// Scheduler decisions, in order. A decision either executes the chosen
/// thread's next statement or parks it on a raised semaphore. Wake-ups are
/// implied and never appear. Unlike ExecutionTrace this pins down blocked
/// statuses, so it is what witness replay uses for exact reproduction.
struct Schedule {
    std::string choices;

    void push(ThreadId tid) { choices.push_back(tid == 0 ? '0' : '1'); }
    bool operator==(const Schedule&) const = default;
};

struct Variable {
    std::string name;
    std::int64_t value = 0;
    bool operator==(const Variable&) const = default;
};

struct Snapshot {
    std::vector<Variable> variables; // sorted by name
    std::string output;
    SemaphoreBank semaphores;
    std::array<ThreadStatus, 2> status;
};

/// Field-wise equality. Throws std::invalid_argument when the snapshots
/// come from different programs (variable names or semaphore count differ).
bool snapshot_equal(const Snapshot& a, const Snapshot& b);

/// Canonical byte serialization:
///   vars{a=1,b=-2};out="ab";sems=UD;st0=R1;st1=D
std::string serialize(const Snapshot& s);

struct PartialInterleaving {
    Snapshot snapshot;
    ExecutionTrace trace;
    CombinedCounter counter;
    Schedule schedule;
};

struct Digest {
    std::array<std::uint8_t, 16> bytes{};

    std::string hex() const;
    bool operator==(const Digest&) const = default;
};

/// Name of the hash behind digest(), reported in every report header.
inline constexpr std::string_view kDigestAlgorithm = "sha256-128";

/// SHA-256 of serialize(s), truncated to its first 128 bits.
Digest digest(const Snapshot& s);

/// What the table remembers about the first interleaving at a counter.
/// In digest mode `snapshot` is empty and only `digest` is kept.
struct StoredEntry {
    CombinedCounter counter;
    ExecutionTrace trace;
    Schedule schedule;
    std::optional<Snapshot> snapshot;
    std::optional<Digest> digest;
};

struct VisitOutcome {
    enum class Kind { FirstVisit, PrunedEqual, Race };

    Kind kind = Kind::FirstVisit;
    const StoredEntry* stored = nullptr; // set for PrunedEqual and Race

    bool is_race() const { return kind == Kind::Race; }
};

class StateTable {
public:
    explicit StateTable(bool digest_mode = false) : digest_mode_(digest_mode) {}

    /// Stores `i` if its counter is new; otherwise compares against the
    /// stored entry. Never overwrites. The returned pointer stays valid for
    /// the lifetime of the table.
    VisitOutcome visit(const PartialInterleaving& i);

    std::size_t size() const { return entries_.size(); }
    bool digest_mode() const { return digest_mode_; }

private:
    bool digest_mode_;
    std::unordered_map<CombinedCounter, StoredEntry, CombinedCounterHash> entries_;
};

std::string status_code(const ThreadStatus& s); // "R3", "B0", "D"
std::string escape_output(std::string_view text);

} // namespace buddy
