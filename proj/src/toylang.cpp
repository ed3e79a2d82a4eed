#include "buddy/toylang.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace buddy {

Expr Expr::literal(std::int64_t v)
{
    Expr e;
    e.kind = Kind::Literal;
    e.value = v;
    return e;
}

Expr Expr::variable(std::string name, std::size_t slot)
{
    Expr e;
    e.kind = Kind::Variable;
    e.name = std::move(name);
    e.slot = slot;
    return e;
}

Expr Expr::binary(Kind op, Expr lhs, Expr rhs)
{
    Expr e;
    e.kind = op;
    e.operands.reserve(2);
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column)
{
}

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "var", "semaphores", "thread0", "thread1", "emit", "up", "down", "repeat",
};

enum class Tok { Ident, Int, String, LBrace, RBrace, LParen, RParen, Semi, Assign, Plus, Minus, Star, End };

struct Token {
    Tok kind = Tok::End;
    std::string text; // identifier name or decoded string literal
    std::uint64_t number = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

const char* describe(Tok t)
{
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string literal";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::Assign: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (is_ident_start(c)) {
                std::size_t b = pos_;
                while (pos_ < src_.size() && is_ident_char(src_[pos_]))
                    advance();
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(b, pos_ - b));
            } else if (c >= '0' && c <= '9') {
                std::size_t b = pos_;
                while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9')
                    advance();
                if (pos_ < src_.size() && is_ident_char(src_[pos_]))
                    throw ParseError("malformed integer literal", t.line, t.column);
                auto digits = src_.substr(b, pos_ - b);
                auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.number);
                if (ec != std::errc())
                    throw ParseError("integer literal out of range", t.line, t.column);
                t.kind = Tok::Int;
            } else if (c == '"') {
                t.kind = Tok::String;
                t.text = lex_string(t);
            } else {
                switch (c) {
                case '{': t.kind = Tok::LBrace; break;
                case '}': t.kind = Tok::RBrace; break;
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                case ';': t.kind = Tok::Semi; break;
                case '=': t.kind = Tok::Assign; break;
                case '+': t.kind = Tok::Plus; break;
                case '-': t.kind = Tok::Minus; break;
                case '*': t.kind = Tok::Star; break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
                }
                advance();
            }
            out.push_back(std::move(t));
        }
    }

private:
    static bool is_ident_start(char c)
    {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else {
                return;
            }
        }
    }

    std::string lex_string(const Token& start)
    {
        std::string text;
        advance(); // opening quote
        for (;;) {
            if (pos_ >= src_.size() || src_[pos_] == '\n')
                throw ParseError("unterminated string literal", start.line, start.column);
            char c = src_[pos_];
            if (c == '"') {
                advance();
                return text;
            }
            if (c == '\\') {
                std::size_t l = line_, col = col_;
                advance();
                if (pos_ >= src_.size())
                    throw ParseError("unterminated string literal", start.line, start.column);
                switch (src_[pos_]) {
                case '"': text += '"'; break;
                case '\\': text += '\\'; break;
                case 'n': text += '\n'; break;
                case 't': text += '\t'; break;
                default: throw ParseError("unknown escape sequence", l, col);
                }
                advance();
                continue;
            }
            text += c;
            advance();
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> toks, const ParseOptions& opts) : toks_(std::move(toks)), opts_(opts) {}

    ProgramPair program()
    {
        ProgramPair p;
        parse_decls(p);
        expect_keyword("thread0");
        parse_thread(p.thread0, p.num_semaphores);
        expect_keyword("thread1");
        parse_thread(p.thread1, p.num_semaphores);
        if (peek().kind != Tok::End)
            fail("expected end of input after thread1 block");
        return p;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg, const Token* at = nullptr) const
    {
        const Token& t = at ? *at : peek();
        throw ParseError(msg, t.line, t.column);
    }

    const Token& expect(Tok kind)
    {
        if (peek().kind != kind)
            fail(std::string("expected ") + describe(kind) + ", found " + describe(peek().kind));
        return next();
    }

    bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    void expect_keyword(std::string_view kw)
    {
        if (!at_keyword(kw))
            fail("expected '" + std::string(kw) + "'");
        next();
    }

    std::int64_t signed_int()
    {
        bool negative = false;
        if (peek().kind == Tok::Minus) {
            negative = true;
            next();
        }
        const Token& t = expect(Tok::Int);
        constexpr auto max = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        if (t.number > max + (negative ? 1 : 0))
            fail("integer literal out of range", &t);
        if (negative)
            return static_cast<std::int64_t>(0 - t.number);
        return static_cast<std::int64_t>(t.number);
    }

    void parse_decls(ProgramPair& p)
    {
        bool saw_semaphores = false;
        std::vector<VariableDecl> decls;
        for (;;) {
            if (at_keyword("var")) {
                next();
                const Token& name = expect(Tok::Ident);
                if (kKeywords.count(name.text))
                    fail("'" + name.text + "' is a reserved word", &name);
                if (slots_.count(name.text))
                    fail("duplicate declaration of '" + name.text + "'", &name);
                VariableDecl d{name.text, 0};
                if (peek().kind == Tok::Assign) {
                    next();
                    d.initial = signed_int();
                }
                expect(Tok::Semi);
                slots_[d.name] = 0;
                decls.push_back(std::move(d));
            } else if (at_keyword("semaphores")) {
                if (saw_semaphores)
                    fail("duplicate 'semaphores' declaration");
                saw_semaphores = true;
                next();
                const Token& n = expect(Tok::Int);
                if (n.number > (1u << 20))
                    fail("semaphore count too large", &n);
                p.num_semaphores = static_cast<std::size_t>(n.number);
                expect(Tok::Semi);
            } else {
                break;
            }
        }
        std::sort(decls.begin(), decls.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        for (std::size_t i = 0; i < decls.size(); ++i)
            slots_[decls[i].name] = i;
        p.variables = std::move(decls);
    }

    void parse_thread(ThreadProgram& t, std::size_t num_semaphores)
    {
        num_semaphores_ = num_semaphores;
        parse_block(t.statements);
    }

    void parse_block(std::vector<Statement>& out)
    {
        expect(Tok::LBrace);
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::End)
                fail("unbalanced braces: expected '}' before end of input");
            parse_statement(out);
        }
        next();
    }

    std::size_t semaphore_index()
    {
        expect(Tok::LParen);
        const Token& idx = expect(Tok::Int);
        if (idx.number >= num_semaphores_)
            fail("semaphore index " + std::to_string(idx.number) + " out of range (" +
                     std::to_string(num_semaphores_) + " declared)",
                 &idx);
        expect(Tok::RParen);
        expect(Tok::Semi);
        return static_cast<std::size_t>(idx.number);
    }

    void push(std::vector<Statement>& out, Statement s, const Token& at)
    {
        if (out.size() + 1 > opts_.max_statements_per_thread)
            fail("thread exceeds the unroll limit of " + std::to_string(opts_.max_statements_per_thread) +
                     " statements",
                 &at);
        out.push_back(std::move(s));
    }

    void parse_statement(std::vector<Statement>& out)
    {
        const Token& head = peek();
        if (head.kind != Tok::Ident)
            fail(std::string("expected a statement, found ") + describe(head.kind));
        if (head.text == "emit") {
            next();
            const Token& str = expect(Tok::String);
            if (str.text.empty())
                fail("emit text must not be empty", &str);
            expect(Tok::Semi);
            push(out, Emit{str.text}, head);
        } else if (head.text == "up") {
            next();
            push(out, SemUp{semaphore_index()}, head);
        } else if (head.text == "down") {
            next();
            push(out, SemDown{semaphore_index()}, head);
        } else if (head.text == "repeat") {
            next();
            const Token& count_tok = peek();
            std::int64_t count = signed_int();
            if (count < 0)
                fail("repeat count must be non-negative", &count_tok);
            std::vector<Statement> body;
            parse_block(body);
            auto k = static_cast<std::uint64_t>(count);
            if (!body.empty() && (k > opts_.max_statements_per_thread ||
                                  out.size() + body.size() * k > opts_.max_statements_per_thread))
                fail("thread exceeds the unroll limit of " + std::to_string(opts_.max_statements_per_thread) +
                         " statements",
                     &head);
            for (std::uint64_t i = 0; i < k; ++i)
                out.insert(out.end(), body.begin(), body.end());
        } else if (kKeywords.count(head.text)) {
            fail("unexpected '" + head.text + "'");
        } else {
            const Token& target = next();
            auto slot = lookup(target);
            expect(Tok::Assign);
            Expr e = expr();
            expect(Tok::Semi);
            push(out, Assign{target.text, slot, std::move(e)}, head);
        }
    }

    std::size_t lookup(const Token& name) const
    {
        auto it = slots_.find(name.text);
        if (it == slots_.end())
            fail("undeclared variable '" + name.text + "'", &name);
        return it->second;
    }

    Expr expr()
    {
        Expr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            auto op = next().kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
            lhs = Expr::binary(op, std::move(lhs), term());
        }
        return lhs;
    }

    Expr term()
    {
        Expr lhs = factor();
        while (peek().kind == Tok::Star) {
            next();
            lhs = Expr::binary(Expr::Kind::Mul, std::move(lhs), factor());
        }
        return lhs;
    }

    Expr factor()
    {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Int: {
            next();
            if (t.number > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
                fail("integer literal out of range", &t);
            return Expr::literal(static_cast<std::int64_t>(t.number));
        }
        case Tok::Ident: {
            if (kKeywords.count(t.text))
                fail("unexpected '" + t.text + "' in expression");
            next();
            return Expr::variable(t.text, lookup(t));
        }
        case Tok::LParen: {
            next();
            Expr e = expr();
            expect(Tok::RParen);
            return e;
        }
        default:
            fail(std::string("expected an expression, found ") + describe(t.kind));
        }
    }

    std::vector<Token> toks_;
    const ParseOptions& opts_;
    std::size_t pos_ = 0;
    std::size_t num_semaphores_ = 0;
    std::map<std::string, std::size_t, std::less<>> slots_;
};

std::string render_operand(const Expr& e)
{
    if (e.kind == Expr::Kind::Literal || e.kind == Expr::Kind::Variable)
        return render(e);
    return "(" + render(e) + ")";
}

} // namespace

ProgramPair parse(std::string_view source, const ParseOptions& opts)
{
    Parser parser(Lexer(source).run(), opts);
    return parser.program();
}

std::size_t statement_count(const ThreadProgram& p)
{
    return p.statements.size();
}

std::string quote_string(std::string_view text)
{
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string render(const Expr& e)
{
    switch (e.kind) {
    case Expr::Kind::Literal: return std::to_string(e.value);
    case Expr::Kind::Variable: return e.name;
    case Expr::Kind::Add: return render_operand(e.operands[0]) + " + " + render_operand(e.operands[1]);
    case Expr::Kind::Sub: return render_operand(e.operands[0]) + " - " + render_operand(e.operands[1]);
    case Expr::Kind::Mul: return render_operand(e.operands[0]) + " * " + render_operand(e.operands[1]);
    }
    return {};
}

std::string render(const Statement& s)
{
    struct Visitor {
        std::string operator()(const Assign& a) const { return a.target + " = " + render(a.expr) + ";"; }
        std::string operator()(const Emit& e) const { return "emit " + quote_string(e.text) + ";"; }
        std::string operator()(const SemUp& u) const { return "up(" + std::to_string(u.index) + ");"; }
        std::string operator()(const SemDown& d) const { return "down(" + std::to_string(d.index) + ");"; }
    };
    return std::visit(Visitor{}, s);
}

std::string render(const ProgramPair& p)
{
    std::ostringstream out;
    for (const auto& v : p.variables)
        out << "var " << v.name << " = " << v.initial << ";\n";
    if (p.num_semaphores > 0)
        out << "semaphores " << p.num_semaphores << ";\n";
    for (int tid = 0; tid < 2; ++tid) {
        out << "thread" << tid << " {\n";
        for (const auto& s : p.thread(tid).statements)
            out << "  " << render(s) << "\n";
        out << "}\n";
    }
    return out.str();
}

std::int64_t evaluate(const Expr& e, const std::function<std::int64_t(std::size_t)>& read)
{
    auto wrap = [](std::uint64_t v) { return static_cast<std::int64_t>(v); };
    switch (e.kind) {
    case Expr::Kind::Literal: return e.value;
    case Expr::Kind::Variable: return read(e.slot);
    default: break;
    }
    auto lhs = static_cast<std::uint64_t>(evaluate(e.operands[0], read));
    auto rhs = static_cast<std::uint64_t>(evaluate(e.operands[1], read));
    switch (e.kind) {
    case Expr::Kind::Add: return wrap(lhs + rhs);
    case Expr::Kind::Sub: return wrap(lhs - rhs);
    case Expr::Kind::Mul: return wrap(lhs * rhs);
    default: return 0;
    }
}

} // namespace buddy
