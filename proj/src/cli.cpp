#include "buddy/cli.hpp"

#include "buddy/analysis.hpp"
#include "buddy/engine.hpp"
#include "buddy/instrument.hpp"
#include "buddy/toylang.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

namespace buddy {

namespace {

constexpr int kExitInputError = 4;
constexpr int kExitBudget = 5;

std::optional<std::string> read_input(const std::string& path, std::ostream& err)
{
    if (path == "-")
        return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "buddycheck: cannot read '" << path << "'\n";
        return std::nullopt;
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

ReportFormat format_of(const std::string& name)
{
    return name == "json" ? ReportFormat::Json : ReportFormat::Text;
}

struct CheckArgs {
    std::string file;
    bool no_prune = false;
    bool no_race_detect = false;
    bool digest = false;
    std::uint64_t max_steps = 1'000'000;
    std::string format = "text";
};

struct BenchArgs {
    std::size_t min = 3;
    std::size_t max = 8;
    std::uint64_t max_steps = 1'000'000;
    std::string format = "text";
};

struct InstrumentArgs {
    std::string file;
    std::string hook_token = "hook();";
    bool skip_redundant = false;
    bool strip = false;
    std::string output;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err)
{
    auto source = read_input(a.file, err);
    if (!source)
        return kExitInputError;

    ProgramPair program;
    try {
        program = parse(*source);
    } catch (const ParseError& e) {
        err << a.file << ":" << e.what() << "\n";
        return kExitInputError;
    }

    ExplorationConfig cfg;
    cfg.pruning = !a.no_prune;
    cfg.race_detection = !a.no_race_detect;
    cfg.digest_mode = a.digest;
    cfg.max_total_steps = a.max_steps;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        err << "buddycheck: " << e.what() << "\n";
        return kExitInputError;
    }

    ExplorationReport report = explore(program, cfg);
    out << render_report(report, format_of(a.format));
    if (!report.complete)
        err << "buddycheck: step budget of " << a.max_steps << " exhausted; report is partial\n";
    return exit_status(report);
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err)
{
    try {
        out << render_bench(bench_table(a.min, a.max, a.max_steps), format_of(a.format));
    } catch (const BudgetExhausted& e) {
        err << "buddycheck: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        err << "buddycheck: " << e.what() << "\n";
        return kExitInputError;
    }
    return 0;
}

int cmd_instrument(const InstrumentArgs& a, std::ostream& out, std::ostream& err)
{
    auto source = read_input(a.file, err);
    if (!source)
        return kExitInputError;

    InstrumentOptions opts;
    opts.hook_token = a.hook_token;
    opts.skip_redundant = a.skip_redundant;
    std::string result;
    try {
        result = a.strip ? strip(*source, opts) : instrument(*source, opts);
    } catch (const InstrumentError& e) {
        err << a.file << ":" << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        err << "buddycheck: " << e.what() << "\n";
        return kExitInputError;
    }

    if (a.output.empty()) {
        out << result;
        return 0;
    }
    std::ofstream file(a.output, std::ios::binary);
    if (!(file << result)) {
        err << "buddycheck: cannot write '" << a.output << "'\n";
        return kExitInputError;
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two-thread interleaving model checker"};
    app.name("buddycheck");
    app.require_subcommand(1);

    CheckArgs check;
    auto* check_cmd = app.add_subcommand("check", "Explore every interleaving of a program");
    check_cmd->add_option("file", check.file, "Program file ('-' for stdin)")->required();
    check_cmd->add_flag("--no-prune", check.no_prune, "Do not cut subtrees at already-seen equal states");
    check_cmd->add_flag("--no-race-detect", check.no_race_detect, "Disable the state table (and with it pruning)");
    check_cmd->add_flag("--digest", check.digest, "Store 128-bit snapshot digests in the state table");
    check_cmd->add_option("--max-steps", check.max_steps, "Budget of executed statements")->capture_default_str();
    check_cmd->add_option("--format", check.format, "Report format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Print the pruning-effectiveness table");
    bench_cmd->add_option("--min", bench.min, "Smallest statements-per-thread")->capture_default_str();
    bench_cmd->add_option("--max", bench.max, "Largest statements-per-thread")->capture_default_str();
    bench_cmd->add_option("--max-steps", bench.max_steps, "Budget of executed statements per run")
        ->capture_default_str();
    bench_cmd->add_option("--format", bench.format, "Table format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    InstrumentArgs instr;
    auto* instr_cmd = app.add_subcommand("instrument", "Insert hook calls before statements of C-like source");
    instr_cmd->add_option("file", instr.file, "Source file ('-' for stdin)")->required();
    instr_cmd->add_option("--hook-token", instr.hook_token, "Text inserted before each statement")
        ->capture_default_str();
    instr_cmd->add_flag("--skip-redundant", instr.skip_redundant,
                        "Skip hooks before control statements and calls to hooked functions");
    instr_cmd->add_flag("--strip", instr.strip, "Remove hook tokens instead of inserting them");
    instr_cmd->add_option("-o,--output", instr.output, "Write to this file instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInputError;
    }

    if (check_cmd->parsed())
        return cmd_check(check, out, err);
    if (bench_cmd->parsed())
        return cmd_bench(bench, out, err);
    return cmd_instrument(instr, out, err);
}

} // namespace buddy
