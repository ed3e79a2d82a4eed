#include "buddy/engine.hpp"

#include <string>
#include <unordered_set>
#include <utility>

namespace buddy {

void ExplorationConfig::validate() const
{
    if (digest_mode && !race_detection)
        throw std::invalid_argument("digest mode requires race detection");
}

ReplayError::ReplayError(const std::string& what, std::size_t position)
    : std::runtime_error("position " + std::to_string(position) + ": " + what),
      position_(position)
{
}

PartialInterleaving initial_interleaving(const ProgramPair& p)
{
    PartialInterleaving i;
    i.snapshot.variables.reserve(p.variables.size());
    for (const auto& v : p.variables)
        i.snapshot.variables.push_back({v.name, v.initial});
    i.snapshot.semaphores.assign(p.num_semaphores, SemState::Down);
    for (ThreadId tid = 0; tid < 2; ++tid)
        i.snapshot.status[tid] =
            p.thread(tid).statements.empty() ? ThreadStatus::done() : ThreadStatus::runnable(0);
    return i;
}

namespace {

// Marks the statement at `tid`'s current position as executed.
void retire_statement(const ProgramPair& p, PartialInterleaving& i, ThreadId tid, std::size_t pos)
{
    i.counter[tid] += 1;
    i.trace.push(tid);
    i.snapshot.status[tid] = pos + 1 == p.thread(tid).statements.size() ? ThreadStatus::done()
                                                                        : ThreadStatus::runnable(pos + 1);
}

const Statement& next_statement(const ProgramPair& p, const PartialInterleaving& i, ThreadId tid)
{
    return p.thread(tid).statements.at(i.snapshot.status[tid].value);
}

} // namespace

bool would_block(const ProgramPair& p, const PartialInterleaving& i, ThreadId tid)
{
    if (!i.snapshot.status[tid].is_runnable())
        return false;
    const auto* up = std::get_if<SemUp>(&next_statement(p, i, tid));
    return up && i.snapshot.semaphores.at(up->index) == SemState::Up;
}

StepResult step(const ProgramPair& p, const PartialInterleaving& i, ThreadId tid)
{
    if (tid != 0 && tid != 1)
        throw std::logic_error("step: thread id must be 0 or 1");
    const ThreadStatus& st = i.snapshot.status[tid];
    if (!st.is_runnable())
        throw std::logic_error("step: thread " + std::to_string(tid) + " is not runnable (" + status_code(st) + ")");

    const std::size_t pos = st.value;
    const Statement& stmt = next_statement(p, i, tid);
    StepResult r{StepEffect::Advanced, i};
    Snapshot& s = r.next.snapshot;
    r.next.schedule.push(tid);

    if (const auto* a = std::get_if<Assign>(&stmt)) {
        s.variables[a->slot].value = evaluate(a->expr, [&](std::size_t slot) { return s.variables[slot].value; });
    } else if (const auto* e = std::get_if<Emit>(&stmt)) {
        s.output += e->text;
    } else if (const auto* d = std::get_if<SemDown>(&stmt)) {
        s.semaphores[d->index] = SemState::Down;
    } else if (const auto* u = std::get_if<SemUp>(&stmt)) {
        if (s.semaphores[u->index] == SemState::Up) {
            const bool other_parked = s.status[1 - tid].is_blocked();
            s.status[tid] = ThreadStatus::blocked(u->index);
            r.effect = other_parked ? StepEffect::Deadlock : StepEffect::NowBlocked;
            return r;
        }
        s.semaphores[u->index] = SemState::Up;
    }

    retire_statement(p, r.next, tid, pos);
    if (s.status[tid].is_done())
        r.effect = StepEffect::CompletedThread;
    return r;
}

PartialInterleaving unblock_check(const ProgramPair& p, PartialInterleaving i)
{
    for (ThreadId tid = 0; tid < 2; ++tid) {
        const ThreadStatus st = i.snapshot.status[tid];
        if (!st.is_blocked() || i.snapshot.semaphores[st.value] != SemState::Down)
            continue;
        i.snapshot.semaphores[st.value] = SemState::Up;
        retire_statement(p, i, tid, i.counter[tid] - 1);
    }
    return i;
}

namespace {

Witness witness_of(const PartialInterleaving& i, bool with_digest)
{
    Witness w{i.counter, i.trace, i.schedule, i.snapshot, std::nullopt};
    if (with_digest)
        w.digest = digest(i.snapshot);
    return w;
}

class Explorer {
public:
    Explorer(const ProgramPair& p, const ExplorationConfig& cfg) : p_(p), cfg_(cfg), table_(cfg.digest_mode)
    {
        report_.config = cfg;
    }

    ExplorationReport run()
    {
        visit(initial_interleaving(p_));
        report_.stats.table_entries = table_.size();
        report_.complete = !aborted_;
        return std::move(report_);
    }

private:
    using Bucket = std::uint64_t ExplorationStats::*;

    void visit(const PartialInterleaving& node)
    {
        if (aborted_)
            return;
        if (cfg_.race_detection) {
            VisitOutcome v = table_.visit(node);
            if (v.is_race()) {
                const StoredEntry& e = *v.stored;
                report_.races.push_back(
                    {node.counter, Witness{e.counter, e.trace, e.schedule, e.snapshot, e.digest},
                     witness_of(node, cfg_.digest_mode)});
                ++report_.stats.races_found;
            } else if (v.kind == VisitOutcome::Kind::PrunedEqual && cfg_.pruning) {
                ++report_.stats.pruned_subtrees;
                return;
            }
        }
        expand(node);
    }

    // Scheduling policy for a node that has already been checked.
    void expand(const PartialInterleaving& node)
    {
        const auto& st = node.snapshot.status;
        if (st[0].is_done() && st[1].is_done()) {
            record_outcome(node);
            return;
        }
        if (st[0].is_done() || st[1].is_done()) {
            const ThreadId live = st[0].is_done() ? 1 : 0;
            if (st[live].is_blocked())
                report_.block_forever.push_back({witness_of(node, false), live, st[live].value});
            else
                take(node, live, &ExplorationStats::completion_statements);
            return;
        }
        if (st[0].is_blocked() || st[1].is_blocked()) {
            take(node, st[0].is_blocked() ? 1 : 0, &ExplorationStats::forced_statements);
            return;
        }
        take(node, 0, &ExplorationStats::branch_statements);
        take(node, 1, &ExplorationStats::branch_statements);
    }

    void take(const PartialInterleaving& node, ThreadId tid, Bucket bucket)
    {
        if (aborted_)
            return;
        if (report_.stats.total_statements() >= cfg_.max_total_steps) {
            aborted_ = true;
            return;
        }
        StepResult r = step(p_, node, tid);
        switch (r.effect) {
        case StepEffect::Deadlock:
            report_.deadlocks.push_back({witness_of(r.next, false), tid, r.next.snapshot.status[tid].value});
            return;
        case StepEffect::NowBlocked:
            // Same counter as the parent: nothing executed, nothing to compare.
            expand(r.next);
            return;
        case StepEffect::Advanced:
        case StepEffect::CompletedThread:
            break;
        }
        ++(report_.stats.*bucket);
        const auto executed = r.next.trace.steps.size();
        PartialInterleaving next = unblock_check(p_, std::move(r.next));
        report_.stats.forced_statements += next.trace.steps.size() - executed;
        visit(next);
    }

    void record_outcome(const PartialInterleaving& node)
    {
        ++report_.stats.complete_interleavings;
        if (seen_.insert(serialize(node.snapshot)).second)
            report_.outcomes.push_back({node.snapshot, node.trace, node.schedule});
    }

    const ProgramPair& p_;
    const ExplorationConfig& cfg_;
    StateTable table_;
    ExplorationReport report_;
    std::unordered_set<std::string> seen_;
    bool aborted_ = false;
};

ThreadId thread_of(char c, std::size_t pos)
{
    if (c != '0' && c != '1')
        throw ReplayError(std::string("invalid thread symbol '") + c + "'", pos);
    return c - '0';
}

void require_runnable(const PartialInterleaving& i, ThreadId tid, std::size_t pos)
{
    const ThreadStatus& st = i.snapshot.status[tid];
    if (st.is_done())
        throw ReplayError("thread " + std::to_string(tid) + " has already finished", pos);
    if (st.is_blocked())
        throw ReplayError("thread " + std::to_string(tid) + " is blocked on semaphore " + std::to_string(st.value),
                          pos);
}

} // namespace

ExplorationReport explore(const ProgramPair& p, const ExplorationConfig& cfg)
{
    cfg.validate();
    return Explorer(p, cfg).run();
}

PartialInterleaving replay(const ProgramPair& p, const ExecutionTrace& t)
{
    PartialInterleaving i = initial_interleaving(p);
    for (std::size_t pos = 0; pos < t.steps.size(); ++pos) {
        ThreadId tid = thread_of(t.steps[pos], pos);
        require_runnable(i, tid, pos);
        if (would_block(p, i, tid))
            throw ReplayError("thread " + std::to_string(tid) + " cannot execute up() on a raised semaphore", pos);
        i = step(p, i, tid).next;
    }
    return i;
}

ScheduleReplay replay_schedule(const ProgramPair& p, const Schedule& s)
{
    ScheduleReplay out{initial_interleaving(p), StepEffect::Advanced};
    for (std::size_t pos = 0; pos < s.choices.size(); ++pos) {
        if (out.last_effect == StepEffect::Deadlock)
            throw ReplayError("schedule continues past a deadlock", pos);
        ThreadId tid = thread_of(s.choices[pos], pos);
        require_runnable(out.state, tid, pos);
        StepResult r = step(p, out.state, tid);
        out.last_effect = r.effect;
        out.state = r.effect == StepEffect::Deadlock ? std::move(r.next) : unblock_check(p, std::move(r.next));
    }
    return out;
}

} // namespace buddy
