#pragma once

// A minimal deterministic two-thread language. Every statement is one
// scheduling point: the interpreter yields before each one, which is the
// toy-language equivalent of calling hook() before every statement.
//
//   var x = 1;            # shared variables, default 0
//   semaphores 2;         # number of semaphores, default 0
//   thread0 { x = x + 1; emit "a"; up(0); }
//   thread1 { repeat 3 { down(0); } }

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace buddy {

struct Expr {
    enum class Kind { Literal, Variable, Add, Sub, Mul };

    Kind kind = Kind::Literal;
    std::int64_t value = 0;     // Literal
    std::string name;           // Variable
    std::size_t slot = 0;       // Variable: index into the sorted variable list
    std::vector<Expr> operands; // binary ops: exactly two

    static Expr literal(std::int64_t v);
    static Expr variable(std::string name, std::size_t slot);
    static Expr binary(Kind op, Expr lhs, Expr rhs);

    bool operator==(const Expr&) const = default;
};

struct Assign {
    std::string target;
    std::size_t slot = 0;
    Expr expr;
    bool operator==(const Assign&) const = default;
};

struct Emit {
    std::string text;
    bool operator==(const Emit&) const = default;
};

struct SemUp {
    std::size_t index = 0;
    bool operator==(const SemUp&) const = default;
};

struct SemDown {
    std::size_t index = 0;
    bool operator==(const SemDown&) const = default;
};

using Statement = std::variant<Assign, Emit, SemUp, SemDown>;

struct ThreadProgram {
    std::vector<Statement> statements;
    bool operator==(const ThreadProgram&) const = default;
};

struct VariableDecl {
    std::string name;
    std::int64_t initial = 0;
    bool operator==(const VariableDecl&) const = default;
};

struct ProgramPair {
    ThreadProgram thread0;
    ThreadProgram thread1;
    std::size_t num_semaphores = 0;
    std::vector<VariableDecl> variables; // sorted by name; slots index this list

    const ThreadProgram& thread(int tid) const { return tid == 0 ? thread0 : thread1; }
    bool operator==(const ProgramPair&) const = default;
};

struct ParseOptions {
    std::size_t max_statements_per_thread = 1024;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses a program and unrolls every `repeat k { ... }` in place.
/// Throws ParseError (with 1-based line/column) on any violation.
ProgramPair parse(std::string_view source, const ParseOptions& opts = {});

std::size_t statement_count(const ThreadProgram& p);

/// Canonical source text; parse(render(p)) == p.
std::string render(const ProgramPair& p);
std::string render(const Expr& e);
std::string render(const Statement& s);

/// Expression evaluation with 64-bit two's complement wrap-around.
/// `read` maps a variable slot to its current value.
std::int64_t evaluate(const Expr& e, const std::function<std::int64_t(std::size_t)>& read);

std::string quote_string(std::string_view text);

} // namespace buddy
