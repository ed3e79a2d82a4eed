#pragma once

#include "buddy/engine.hpp"
#include "buddy/toylang.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace buddy {

/// One column of the pruning-effectiveness table.
///   exhaustive: completion_statements with pruning off
///   pruned:     branch_statements with pruning and race detection on
struct BenchRow {
    std::size_t n = 0;
    std::uint64_t exhaustive = 0;
    std::uint64_t pruned = 0;
};

/// Source of the benchmark workload: each thread runs `n` assignments
/// `a_<tid>_<k> = k;` over variables no other thread touches.
std::string bench_workload_source(std::size_t n);

/// Throws std::invalid_argument on a bad range and BudgetExhausted when a
/// run does not finish within `max_total_steps`.
std::vector<BenchRow> bench_table(std::size_t n_min, std::size_t n_max,
                                  std::uint64_t max_total_steps = 1'000'000);

enum class ReportFormat { Text, Json };

std::string render_report(const ExplorationReport& r, ReportFormat format);
std::string render_bench(const std::vector<BenchRow>& rows, ReportFormat format);

/// Exit status of `check`: 0 clean, 1 race, 2 deadlock, 3 block-forever,
/// 5 budget exhausted. With several findings the lowest nonzero code wins.
int exit_status(const ExplorationReport& r);

} // namespace buddy
