#include "buddy/analysis.hpp"

#include <json.hpp>

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace buddy {

using ordered_json = nlohmann::ordered_json;

std::string bench_workload_source(std::size_t n)
{
    std::ostringstream src;
    for (int tid = 0; tid < 2; ++tid)
        for (std::size_t k = 1; k <= n; ++k)
            src << "var a_" << tid << "_" << k << ";\n";
    for (int tid = 0; tid < 2; ++tid) {
        src << "thread" << tid << " {\n";
        for (std::size_t k = 1; k <= n; ++k)
            src << "  a_" << tid << "_" << k << " = " << k << ";\n";
        src << "}\n";
    }
    return src.str();
}

std::vector<BenchRow> bench_table(std::size_t n_min, std::size_t n_max, std::uint64_t max_total_steps)
{
    if (n_min < 1 || n_min > n_max)
        throw std::invalid_argument("bench: need 1 <= min <= max");

    std::vector<BenchRow> rows;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        const ProgramPair program = parse(bench_workload_source(n));

        ExplorationConfig exhaustive;
        exhaustive.pruning = false;
        exhaustive.race_detection = false;
        exhaustive.max_total_steps = max_total_steps;

        ExplorationConfig pruned;
        pruned.max_total_steps = max_total_steps;

        auto a = explore(program, exhaustive);
        auto b = explore(program, pruned);
        if (!a.complete || !b.complete)
            throw BudgetExhausted("bench: n=" + std::to_string(n) + " exceeds the step budget of " +
                                  std::to_string(max_total_steps));
        rows.push_back({n, a.stats.completion_statements, b.stats.branch_statements});
    }
    return rows;
}

int exit_status(const ExplorationReport& r)
{
    if (!r.races.empty())
        return 1;
    if (!r.deadlocks.empty())
        return 2;
    if (!r.block_forever.empty())
        return 3;
    if (!r.complete)
        return 5;
    return 0;
}

namespace {

const char* on_off(bool b)
{
    return b ? "on" : "off";
}

ordered_json snapshot_json(const Snapshot& s)
{
    ordered_json vars = ordered_json::object();
    for (const auto& v : s.variables)
        vars[v.name] = v.value;
    std::string sems;
    for (auto sem : s.semaphores)
        sems += sem == SemState::Up ? 'U' : 'D';
    return {
        {"variables", vars},
        {"output", s.output},
        {"semaphores", sems},
        {"status", {status_code(s.status[0]), status_code(s.status[1])}},
        {"canonical", serialize(s)},
    };
}

ordered_json counter_json(const CombinedCounter& c)
{
    return ordered_json::array({c.s0, c.s1});
}

ordered_json witness_json(const Witness& w)
{
    return {
        {"counter", counter_json(w.counter)},
        {"trace", w.trace.steps},
        {"schedule", w.schedule.choices},
        {"snapshot", w.snapshot ? snapshot_json(*w.snapshot) : ordered_json(nullptr)},
        {"digest", w.digest ? ordered_json(w.digest->hex()) : ordered_json(nullptr)},
    };
}

ordered_json stats_json(const ExplorationStats& s)
{
    return {
        {"branch_statements", s.branch_statements},
        {"completion_statements", s.completion_statements},
        {"forced_statements", s.forced_statements},
        {"complete_interleavings", s.complete_interleavings},
        {"pruned_subtrees", s.pruned_subtrees},
        {"races_found", s.races_found},
        {"table_entries", s.table_entries},
    };
}

std::string report_json(const ExplorationReport& r)
{
    ordered_json j;
    j["tool"] = "buddycheck";
    j["format_version"] = 1;
    j["digest_algorithm"] = kDigestAlgorithm;
    j["config"] = {
        {"pruning", r.config.pruning},
        {"race_detection", r.config.race_detection},
        {"digest_mode", r.config.digest_mode},
        {"max_total_steps", r.config.max_total_steps},
    };
    j["complete"] = r.complete;
    j["exit_code"] = exit_status(r);

    ordered_json outcomes = ordered_json::array();
    for (const auto& o : r.outcomes)
        outcomes.push_back(
            {{"trace", o.trace.steps}, {"schedule", o.schedule.choices}, {"snapshot", snapshot_json(o.snapshot)}});
    j["outcomes"] = std::move(outcomes);

    ordered_json races = ordered_json::array();
    for (const auto& race : r.races)
        races.push_back({{"counter", counter_json(race.counter)},
                         {"stored", witness_json(race.stored)},
                         {"current", witness_json(race.current)}});
    j["races"] = std::move(races);

    ordered_json deadlocks = ordered_json::array();
    for (const auto& d : r.deadlocks)
        deadlocks.push_back({{"thread", d.attempting}, {"semaphore", d.semaphore}, {"witness", witness_json(d.state)}});
    j["deadlocks"] = std::move(deadlocks);

    ordered_json forever = ordered_json::array();
    for (const auto& b : r.block_forever)
        forever.push_back({{"thread", b.blocked}, {"semaphore", b.semaphore}, {"witness", witness_json(b.state)}});
    j["block_forever"] = std::move(forever);

    j["stats"] = stats_json(r.stats);
    return j.dump(2) + "\n";
}

void text_witness(std::ostream& out, const char* label, const Witness& w)
{
    out << "      " << label << " trace=" << w.trace.steps << " schedule=" << w.schedule.choices << "\n";
    if (w.snapshot)
        out << "        " << serialize(*w.snapshot) << "\n";
    else if (w.digest)
        out << "        digest " << w.digest->hex() << " (digest only, snapshot not retained)\n";
    if (w.snapshot && w.digest)
        out << "        digest " << w.digest->hex() << "\n";
}

std::string report_text(const ExplorationReport& r)
{
    std::ostringstream out;
    out << "buddycheck report\n";
    out << "digest algorithm: " << kDigestAlgorithm << "\n";
    out << "config: pruning=" << on_off(r.config.pruning) << " race-detection=" << on_off(r.config.race_detection)
        << " digest=" << on_off(r.config.digest_mode) << " max-steps=" << r.config.max_total_steps << "\n";
    out << "exploration: " << (r.complete ? "complete" : "INCOMPLETE (step budget exhausted)") << "\n";

    out << "\noutcomes (" << r.outcomes.size() << "):\n";
    for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
        const auto& o = r.outcomes[i];
        out << "  [" << i + 1 << "] trace=" << o.trace.steps << " schedule=" << o.schedule.choices << "\n";
        out << "      " << serialize(o.snapshot) << "\n";
    }

    out << "\nraces (" << r.races.size() << "):\n";
    for (std::size_t i = 0; i < r.races.size(); ++i) {
        const auto& race = r.races[i];
        out << "  [" << i + 1 << "] at " << race.counter.str() << "\n";
        text_witness(out, "stored: ", race.stored);
        text_witness(out, "current:", race.current);
    }

    out << "\ndeadlocks (" << r.deadlocks.size() << "):\n";
    for (std::size_t i = 0; i < r.deadlocks.size(); ++i) {
        const auto& d = r.deadlocks[i];
        out << "  [" << i + 1 << "] at " << d.state.counter.str() << ": thread " << d.attempting << " up("
            << d.semaphore << ") while the other thread is blocked\n";
        text_witness(out, "state:", d.state);
    }

    out << "\nblock-forever (" << r.block_forever.size() << "):\n";
    for (std::size_t i = 0; i < r.block_forever.size(); ++i) {
        const auto& b = r.block_forever[i];
        out << "  [" << i + 1 << "] at " << b.state.counter.str() << ": thread " << b.blocked << " blocked on up("
            << b.semaphore << ") after the other thread finished\n";
        text_witness(out, "state:", b.state);
    }

    const auto& s = r.stats;
    out << "\nstats:\n";
    auto row = [&](const char* name, std::uint64_t v) { out << "  " << std::left << std::setw(24) << name << v << "\n"; };
    row("branch_statements", s.branch_statements);
    row("completion_statements", s.completion_statements);
    row("forced_statements", s.forced_statements);
    row("complete_interleavings", s.complete_interleavings);
    row("pruned_subtrees", s.pruned_subtrees);
    row("races_found", s.races_found);
    row("table_entries", s.table_entries);
    return out.str();
}

} // namespace

std::string render_report(const ExplorationReport& r, ReportFormat format)
{
    return format == ReportFormat::Json ? report_json(r) : report_text(r);
}

std::string render_bench(const std::vector<BenchRow>& rows, ReportFormat format)
{
    if (format == ReportFormat::Json) {
        ordered_json j;
        j["rows"] = ordered_json::array();
        for (const auto& row : rows)
            j["rows"].push_back({{"n", row.n}, {"exhaustive", row.exhaustive}, {"pruned", row.pruned}});
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << std::right << std::setw(4) << "n" << std::setw(14) << "exhaustive" << std::setw(10) << "pruned" << "\n";
    for (const auto& row : rows)
        out << std::setw(4) << row.n << std::setw(14) << row.exhaustive << std::setw(10) << row.pruned << "\n";
    return out.str();
}

} // namespace buddy
