#include "corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace corpus {

std::filesystem::path programs_dir()
{
    return BUDDY_PROGRAMS_DIR;
}

std::vector<std::filesystem::path> bundled_programs()
{
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(programs_dir()))
        if (entry.is_regular_file() && entry.path().extension() == ".bt")
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::string random_operand(std::mt19937_64& rng)
{
    static const char* kOperands[] = {"x", "y", "0", "1", "2", "3"};
    return kOperands[pick(rng, 6)];
}

std::string random_expr(std::mt19937_64& rng)
{
    switch (pick(rng, 4)) {
    case 0: return random_operand(rng);
    case 1: return random_operand(rng) + " + " + random_operand(rng);
    case 2: return random_operand(rng) + " * " + random_operand(rng);
    default: return "(" + random_operand(rng) + " - " + random_operand(rng) + ") * " + random_operand(rng);
    }
}

std::string random_statement(std::mt19937_64& rng, std::size_t semaphores)
{
    // up() is weighted double so that deadlocks and parked threads are common.
    const std::size_t kinds = semaphores > 0 ? 5 : 2;
    switch (pick(rng, kinds)) {
    case 0: return std::string(pick(rng, 2) ? "x" : "y") + " = " + random_expr(rng) + ";";
    case 1: return std::string("emit \"") + "abc"[pick(rng, 3)] + "\";";
    case 2:
    case 3: return "up(" + std::to_string(pick(rng, semaphores)) + ");";
    default: return "down(" + std::to_string(pick(rng, semaphores)) + ");";
    }
}

std::string assemble(std::size_t semaphores, const std::vector<std::string>& t0, const std::vector<std::string>& t1)
{
    std::ostringstream src;
    src << "var x;\nvar y;\n";
    if (semaphores > 0)
        src << "semaphores " << semaphores << ";\n";
    src << "thread0 {\n";
    for (const auto& s : t0)
        src << "  " << s << "\n";
    src << "}\nthread1 {\n";
    for (const auto& s : t1)
        src << "  " << s << "\n";
    src << "}\n";
    return src.str();
}

} // namespace

std::string random_program(std::mt19937_64& rng, const Shape& shape)
{
    const std::size_t semaphores = pick(rng, shape.max_semaphores + 1);
    std::vector<std::string> threads[2];
    for (auto& t : threads) {
        const std::size_t len = pick(rng, shape.max_statements + 1);
        for (std::size_t i = 0; i < len; ++i)
            t.push_back(random_statement(rng, semaphores));
    }
    return assemble(semaphores, threads[0], threads[1]);
}

std::vector<std::string> random_corpus(std::size_t count, std::uint64_t seed, const Shape& shape)
{
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(random_program(rng, shape));
    return out;
}

std::string straight_line(std::mt19937_64& rng, std::size_t m, std::size_t n)
{
    std::vector<std::string> t0, t1;
    for (std::size_t i = 0; i < m; ++i)
        t0.push_back(random_statement(rng, 0));
    for (std::size_t i = 0; i < n; ++i)
        t1.push_back(random_statement(rng, 0));
    return assemble(0, t0, t1);
}

} // namespace corpus
