#include "buddy/instrument.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace buddy {

InstrumentError::InstrumentError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column)
{
}

namespace {

enum class TokKind { Ident, Number, Literal, Punct, Directive };

struct Token {
    TokKind kind;
    std::size_t offset;
    std::size_t length;
    std::string_view text;
};

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

[[noreturn]] void fail_at(std::string_view src, std::size_t offset, const std::string& what)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
        if (src[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    throw InstrumentError(what, line, col);
}

std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    bool line_start = true; // only whitespace seen since the last newline
    auto emit = [&](TokKind k, std::size_t b) { out.push_back({k, b, i - b, src.substr(b, i - b)}); };

    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            line_start = true;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t b = i;
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n')
                ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            auto end = src.find("*/", i + 2);
            if (end == std::string_view::npos)
                fail_at(src, b, "unterminated comment");
            i = end + 2;
            continue;
        }
        const bool directive = c == '#' && line_start;
        line_start = false;
        if (directive) {
            while (i < src.size() && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] == '\n')
                    ++i;
                ++i;
            }
            emit(TokKind::Directive, b);
        } else if (c == '"' || c == '\'') {
            ++i;
            for (;;) {
                if (i >= src.size() || src[i] == '\n')
                    fail_at(src, b, c == '"' ? "unterminated string literal" : "unterminated character literal");
                if (src[i] == '\\') {
                    i += 2;
                    continue;
                }
                if (src[i++] == c)
                    break;
            }
            emit(TokKind::Literal, b);
        } else if (ident_start(c)) {
            while (i < src.size() && ident_char(src[i]))
                ++i;
            emit(TokKind::Ident, b);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < src.size() && (ident_char(src[i]) || src[i] == '.'))
                ++i;
            emit(TokKind::Number, b);
        } else {
            static constexpr std::string_view kMulti[] = {"...", "++", "--", "->", "::"};
            std::size_t len = 1;
            for (auto m : kMulti)
                if (src.substr(i, m.size()) == m) {
                    len = m.size();
                    break;
                }
            i += len;
            emit(TokKind::Punct, b);
        }
    }
    return out;
}

const std::set<std::string_view> kDeclKeywords = {
    "int",    "char",   "short",    "long",    "float",  "double", "void",   "signed",   "unsigned", "struct",
    "union",  "enum",   "const",    "volatile", "static", "extern", "register", "auto",   "typedef", "_Bool",
    "bool",   "inline",
};

const std::set<std::string_view> kControlKeywords = {"for", "while", "do", "if", "switch"};

enum class Frame { Function, Block, Aggregate };

struct Candidate {
    std::size_t offset;
    std::size_t function;           // index of the enclosing function
    std::optional<std::string> callee; // set when the statement is a bare call `f(...);`
    bool control = false;
};

struct FunctionInfo {
    std::string name;
    bool has_hook = false;      // hook token already present in the body
    bool has_statement = false; // receives a non-call hook
};

class Scanner {
public:
    Scanner(std::string_view src, const InstrumentOptions& opts) : src_(src), opts_(opts), toks_(tokenize(src)) {}

    std::vector<std::size_t> insertion_points()
    {
        walk();
        for (const auto& c : candidates_)
            if (!c.callee && !(opts_.skip_redundant && c.control))
                functions_[c.function].has_statement = true;

        std::map<std::string, bool, std::less<>> scheduling;
        for (const auto& f : functions_)
            scheduling[f.name] = scheduling[f.name] || f.has_hook || f.has_statement;

        std::vector<std::size_t> out;
        for (const auto& c : candidates_) {
            if (opts_.skip_redundant) {
                if (c.control)
                    continue;
                if (c.callee) {
                    auto it = scheduling.find(*c.callee);
                    if (it != scheduling.end() && it->second)
                        continue;
                }
            }
            out.push_back(c.offset);
        }
        return out;
    }

private:
    bool starts_with_at(std::size_t offset, std::string_view what) const
    {
        return !what.empty() && src_.substr(offset, what.size()) == what;
    }

    bool is_punct(std::size_t i, std::string_view p) const
    {
        return i < toks_.size() && toks_[i].kind == TokKind::Punct && toks_[i].text == p;
    }

    bool preceded_by_hook(std::size_t offset) const
    {
        std::string_view before = src_.substr(0, offset);
        while (!before.empty() && std::isspace(static_cast<unsigned char>(before.back())))
            before.remove_suffix(1);
        return before.size() >= opts_.hook_token.size() &&
               before.substr(before.size() - opts_.hook_token.size()) == opts_.hook_token;
    }

    // Index of the token after the parenthesis group opened at `open`.
    std::size_t skip_parens(std::size_t open) const
    {
        int depth = 0;
        for (std::size_t i = open; i < toks_.size(); ++i) {
            if (is_punct(i, "("))
                ++depth;
            else if (is_punct(i, ")") && --depth == 0)
                return i + 1;
        }
        return toks_.size();
    }

    std::optional<std::string> bare_call(std::size_t i) const
    {
        if (toks_[i].kind != TokKind::Ident || !is_punct(i + 1, "("))
            return std::nullopt;
        std::size_t after = skip_parens(i + 1);
        if (!is_punct(after, ";"))
            return std::nullopt;
        return std::string(toks_[i].text);
    }

    // Decides whether token `i` opens a statement that should get a hook.
    void consider(std::size_t i, bool do_tail)
    {
        const Token& t = toks_[i];
        const std::string_view text = t.text;
        if (t.kind == TokKind::Punct) {
            if (text == "(" || text == "*" || text == "++" || text == "--")
                add(i, false);
            return;
        }
        if (t.kind != TokKind::Ident)
            return;
        if (text == "case" || text == "default") {
            in_case_label_ = true;
            return;
        }
        if (text == "else" || (text == "while" && do_tail) || kDeclKeywords.count(text))
            return;
        if (starts_with_at(t.offset, opts_.hook_token) || starts_with_at(t.offset, opts_.done_token))
            return;
        add(i, kControlKeywords.count(text) > 0);
    }

    void add(std::size_t i, bool control)
    {
        if (preceded_by_hook(toks_[i].offset))
            return;
        candidates_.push_back({toks_[i].offset, current_function_, control ? std::nullopt : bare_call(i), control});
    }

    bool in_body() const { return !stack_.empty() && stack_.back().kind != Frame::Aggregate; }

    void walk()
    {
        std::vector<std::size_t> paren_opens;
        int paren = 0;
        bool boundary = false;
        bool do_tail = false;
        std::optional<std::size_t> prev;

        for (std::size_t i = 0; i < toks_.size(); ++i) {
            const Token& t = toks_[i];
            if (t.kind == TokKind::Directive)
                continue;
            if (boundary && in_body() && paren == 0) {
                boundary = false;
                consider(i, do_tail);
            }
            boundary = false;
            do_tail = false;

            auto prev_is = [&](std::string_view s) { return prev && toks_[*prev].text == s; };

            if (t.kind == TokKind::Punct && t.text == "(") {
                ++paren;
                paren_opens.push_back(i);
            } else if (t.kind == TokKind::Punct && t.text == ")") {
                if (paren > 0) {
                    --paren;
                    last_group_open_ = paren_opens.back();
                    paren_opens.pop_back();
                }
            } else if (t.kind == TokKind::Punct && t.text == "{") {
                Frame kind = Frame::Aggregate;
                bool after_do = false;
                if (stack_.empty()) {
                    if (prev_is(")") && paren == 0) {
                        kind = Frame::Function;
                        FunctionInfo f;
                        if (last_group_open_ > 0 && toks_[last_group_open_ - 1].kind == TokKind::Ident)
                            f.name = std::string(toks_[last_group_open_ - 1].text);
                        body_start_ = t.offset;
                        functions_.push_back(std::move(f));
                        current_function_ = functions_.size() - 1;
                    }
                } else if (in_body() && paren == 0) {
                    if (!prev || prev_is(")") || prev_is("else") || prev_is("do") || prev_is("{") || prev_is("}") ||
                        prev_is(";") || prev_is(":")) {
                        kind = Frame::Block;
                        after_do = prev_is("do");
                    }
                }
                stack_.push_back({kind, after_do, t.offset});
                boundary = kind != Frame::Aggregate;
            } else if (t.kind == TokKind::Punct && t.text == "}") {
                if (stack_.empty())
                    fail_at(src_, t.offset, "unbalanced braces: '}' without a matching '{'");
                Open closed = stack_.back();
                stack_.pop_back();
                if (closed.kind == Frame::Function) {
                    functions_[current_function_].has_hook = has_hook_token(body_start_, t.offset);
                } else if (closed.kind == Frame::Block && in_body()) {
                    boundary = true;
                    do_tail = closed.after_do;
                }
            } else if (t.kind == TokKind::Punct && t.text == ";") {
                if (paren == 0 && in_body()) {
                    boundary = true;
                    in_case_label_ = false;
                }
            } else if (t.kind == TokKind::Punct && t.text == ":") {
                if (paren == 0 && in_body() && in_case_label_) {
                    in_case_label_ = false;
                    boundary = true;
                }
            }
            prev = i;
        }
        if (!stack_.empty())
            fail_at(src_, stack_.back().offset, "unbalanced braces: '{' is never closed");
    }

    bool has_hook_token(std::size_t begin, std::size_t end) const
    {
        for (const auto& t : toks_)
            if (t.offset >= begin && t.offset < end && t.kind != TokKind::Literal &&
                starts_with_at(t.offset, opts_.hook_token))
                return true;
        return false;
    }

    struct Open {
        Frame kind;
        bool after_do;
        std::size_t offset;
    };

    std::string_view src_;
    const InstrumentOptions& opts_;
    std::vector<Token> toks_;
    std::vector<Open> stack_;
    std::vector<Candidate> candidates_;
    std::vector<FunctionInfo> functions_;
    std::size_t current_function_ = 0;
    std::size_t last_group_open_ = 0;
    std::size_t body_start_ = 0;
    bool in_case_label_ = false;
};

void check_options(const InstrumentOptions& opts)
{
    if (opts.hook_token.empty())
        throw std::invalid_argument("hook token must not be empty");
}

} // namespace

std::string instrument(std::string_view source, const InstrumentOptions& opts)
{
    check_options(opts);
    Scanner scanner(source, opts);
    std::vector<std::size_t> points = scanner.insertion_points();

    std::string out;
    out.reserve(source.size() + points.size() * (opts.hook_token.size() + 1));
    std::size_t copied = 0;
    for (std::size_t at : points) {
        out.append(source.substr(copied, at - copied));
        out.append(opts.hook_token);
        out.push_back(' ');
        copied = at;
    }
    out.append(source.substr(copied));
    return out;
}

std::string strip(std::string_view source, const InstrumentOptions& opts)
{
    check_options(opts);
    const std::vector<Token> toks = tokenize(source);

    std::string out;
    out.reserve(source.size());
    std::size_t copied = 0;
    for (const auto& t : toks) {
        if (t.offset < copied || t.kind == TokKind::Literal || t.kind == TokKind::Directive)
            continue;
        if (source.substr(t.offset, opts.hook_token.size()) != opts.hook_token)
            continue;
        if (t.offset > 0 && ident_char(source[t.offset - 1]) && ident_char(opts.hook_token.front()))
            continue;

        std::size_t end = t.offset + opts.hook_token.size();
        while (end < source.size() && (source[end] == ' ' || source[end] == '\t'))
            ++end;

        std::size_t line_begin = t.offset;
        while (line_begin > 0 && source[line_begin - 1] != '\n')
            --line_begin;
        const bool alone_before =
            line_begin >= copied &&
            source.substr(line_begin, t.offset - line_begin).find_first_not_of(" \t") == std::string_view::npos;
        const bool alone_after = end >= source.size() || source[end] == '\n';
        if (alone_before && alone_after) {
            out.append(source.substr(copied, line_begin - copied));
            copied = end < source.size() ? end + 1 : end;
        } else {
            out.append(source.substr(copied, t.offset - copied));
            copied = end;
        }
    }
    out.append(source.substr(copied));
    return out;
}

bool equal_modulo_whitespace(std::string_view a, std::string_view b)
{
    auto squeeze = [](std::string_view s) {
        std::string out;
        for (char c : s)
            if (!std::isspace(static_cast<unsigned char>(c)))
                out += c;
        return out;
    };
    return squeeze(a) == squeeze(b);
}

} // namespace buddy
