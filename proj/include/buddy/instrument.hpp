#pragma once

// Token-level hook insertion for brace-and-semicolon source (C and
// friends). There is no parser: the scanner only understands comments,
// string and character literals, preprocessor lines, parentheses and
// braces. It inserts the hook token before each statement inside function
// bodies and otherwise leaves every input byte alone.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace buddy {

struct InstrumentOptions {
    std::string hook_token = "hook();";
    /// Calls that belong to the checker runtime and never get a hook.
    std::string done_token = "done();";
    /// Also skip hooks that only add overhead: before control statements
    /// (for/while/do/if/switch) and before bare calls to functions in the
    /// same file whose bodies already schedule.
    bool skip_redundant = false;
};

class InstrumentError : public std::runtime_error {
public:
    InstrumentError(const std::string& what, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Throws InstrumentError on unbalanced braces or unterminated literals
/// and comments.
std::string instrument(std::string_view source, const InstrumentOptions& opts = {});

/// Removes standalone hook tokens outside literals and comments. A line
/// left holding nothing but whitespace is removed with its newline.
std::string strip(std::string_view source, const InstrumentOptions& opts = {});

bool equal_modulo_whitespace(std::string_view a, std::string_view b);

} // namespace buddy
