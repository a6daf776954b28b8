#include "dynsem/imp_syntax.hpp"

#include <cctype>
#include <limits>
#include <sstream>
#include <utility>

#include "dynsem/error.hpp"

namespace dynsem::imp {

Expr Expr::literal(std::int64_t v) {
    Expr e;
    e.op = Op::Literal;
    e.value = v;
    return e;
}

Expr Expr::identifier(std::string name, int decl) {
    Expr e;
    e.op = Op::Identifier;
    e.name = std::move(name);
    e.decl = decl;
    return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
    Expr e;
    e.op = op;
    e.operands = {std::move(a), std::move(b)};
    return e;
}

Expr Expr::square(Expr a) {
    Expr e;
    e.op = Op::Square;
    e.operands = {std::move(a)};
    return e;
}

Expr Expr::negate(Expr a) {
    Expr e;
    e.op = Op::Negate;
    e.operands = {std::move(a)};
    return e;
}

BoolExpr BoolExpr::constant(bool v) {
    BoolExpr b;
    b.op = v ? Op::True : Op::False;
    return b;
}

BoolExpr BoolExpr::compare(Op op, Expr a, Expr b) {
    BoolExpr out;
    out.op = op;
    out.operands = {std::move(a), std::move(b)};
    return out;
}

BoolExpr BoolExpr::conjunction(BoolExpr a, BoolExpr b) {
    BoolExpr out;
    out.op = Op::And;
    out.subs = {std::move(a), std::move(b)};
    return out;
}

BoolExpr BoolExpr::disjunction(BoolExpr a, BoolExpr b) {
    BoolExpr out;
    out.op = Op::Or;
    out.subs = {std::move(a), std::move(b)};
    return out;
}

BoolExpr BoolExpr::negation(BoolExpr a) {
    BoolExpr out;
    out.op = Op::Not;
    out.subs = {std::move(a)};
    return out;
}

Stmt Stmt::skip() { return Stmt{}; }

Stmt Stmt::assign(std::string name, Expr e, int decl) {
    Stmt s;
    s.kind = Kind::Assign;
    s.name = std::move(name);
    s.expr = std::move(e);
    s.decl = decl;
    return s;
}

Stmt Stmt::random_assign(std::string name, int decl) {
    Stmt s;
    s.kind = Kind::RandomAssign;
    s.name = std::move(name);
    s.decl = decl;
    return s;
}

Stmt Stmt::seq(Stmt a, Stmt b) {
    Stmt s;
    s.kind = Kind::Seq;
    s.body = {std::move(a), std::move(b)};
    return s;
}

Stmt Stmt::if_then_else(BoolExpr c, Stmt a, Stmt b) {
    Stmt s;
    s.kind = Kind::If;
    s.cond = std::move(c);
    s.body = {std::move(a), std::move(b)};
    return s;
}

Stmt Stmt::while_do(BoolExpr c, Stmt body) {
    Stmt s;
    s.kind = Kind::While;
    s.cond = std::move(c);
    s.body = {std::move(body)};
    return s;
}

Stmt Stmt::block(std::string name, Expr init, Stmt body, int decl) {
    Stmt s;
    s.kind = Kind::Block;
    s.name = std::move(name);
    s.expr = std::move(init);
    s.init = Init::Value;
    s.body = {std::move(body)};
    s.decl = decl;
    return s;
}

Stmt Stmt::random_block(std::string name, Stmt body, int decl) {
    Stmt s;
    s.kind = Kind::Block;
    s.name = std::move(name);
    s.init = Init::Random;
    s.body = {std::move(body)};
    s.decl = decl;
    return s;
}

Stmt Stmt::print(Expr e) {
    Stmt s;
    s.kind = Kind::Print;
    s.expr = std::move(e);
    return s;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct Tok {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Tok> lex(std::string_view src) {
    std::vector<Tok> out;
    std::size_t i = 0, line = 1, col = 1;
    auto bump = [&](std::size_t n) {
        i += n;
        col += n;
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        Tok t{Tok::Kind::Punct, {}, line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            col += i - start;
            t.kind = Tok::Kind::Ident;
            t.text = std::string(src.substr(start, i - start));
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            col += i - start;
            t.kind = Tok::Kind::Number;
            t.text = std::string(src.substr(start, i - start));
        } else if (src.substr(i, 2) == "\xC2\xB2") {
            // superscript two
            t.text = "^2";
            i += 2;
            ++col;
        } else {
            static const char* two[] = {":=", "<=", ">=", "<>", "!="};
            bool matched = false;
            for (const char* p : two) {
                if (src.substr(i, 2) == p) {
                    t.text = p;
                    bump(2);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                if (std::string_view("?;()+-*^=<>").find(c) == std::string_view::npos) {
                    throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
                }
                t.text = std::string(1, c);
                bump(1);
            }
        }
        out.push_back(std::move(t));
    }
    out.push_back(Tok{Tok::Kind::End, {}, line, col});
    return out;
}

bool is_reserved(const std::string& s) {
    static const char* words[] = {"begin", "end", "int", "integer", "print", "if", "then", "else", "fi", "while",
                                  "do", "od", "skip", "true", "false", "and", "or", "not"};
    for (const char* w : words) {
        if (s == w) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    Parser(std::string_view text, bool resolve) : toks_(lex(text)), resolve_(resolve) {}

    void declare_globals(const std::vector<std::string>& globals) {
        for (const auto& g : globals) scope_.emplace_back(g, next_decl_++);
    }

    Stmt program() {
        Stmt s = statements();
        expect_end();
        return s;
    }

    BoolExpr condition_only() {
        BoolExpr b = condition();
        expect_end();
        return b;
    }

    Expr expr_only() {
        Expr e = expr();
        expect_end();
        return e;
    }

private:
    const Tok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(std::string_view text) const { return peek().kind != Tok::Kind::End && peek().text == text; }
    bool at_ident(std::string_view text) const { return peek().kind == Tok::Kind::Ident && peek().text == text; }

    Tok take() {
        Tok t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const Tok& t, const std::string& what) const {
        if (t.kind == Tok::Kind::End) throw SyntaxError(what + " (unexpected end of input)", t.line, t.column);
        throw SyntaxError(what + ", found '" + t.text + "'", t.line, t.column);
    }

    void expect(std::string_view text) {
        if (!at(text)) fail(peek(), "expected '" + std::string(text) + "'");
        take();
    }

    void expect_end() {
        if (peek().kind != Tok::Kind::End) fail(peek(), "unexpected trailing input");
    }

    std::string identifier() {
        const Tok& t = peek();
        if (t.kind != Tok::Kind::Ident || is_reserved(t.text)) fail(t, "expected identifier");
        return take().text;
    }

    int lookup(const Tok& t) const {
        if (!resolve_) return -1;
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
            if (it->first == t.text) return it->second;
        }
        if (open_) {
            open_->insert(t.text);
            return -1;
        }
        throw ScopeError("undeclared identifier '" + t.text + "' at line " + std::to_string(t.line) + ", column " +
                         std::to_string(t.column));
    }

    bool at_terminator() const {
        return peek().kind == Tok::Kind::End || at_ident("end") || at_ident("else") || at_ident("fi") ||
               at_ident("od");
    }

    // stmt (';' stmt)*, trailing ';' allowed; empty sequence is skip.
    Stmt statements() {
        std::vector<Stmt> parts;
        while (!at_terminator()) {
            if (at(";")) {
                take();
                continue;
            }
            if (at_ident("begin")) {
                parts.push_back(block());
            } else {
                parts.push_back(statement());
            }
            if (!at_terminator() && !at(";")) fail(peek(), "expected ';'");
        }
        return fold(std::move(parts));
    }

    static Stmt fold(std::vector<Stmt> parts) {
        if (parts.empty()) return Stmt::skip();
        Stmt out = std::move(parts.back());
        for (std::size_t i = parts.size() - 1; i-- > 0;) out = Stmt::seq(std::move(parts[i]), std::move(out));
        return out;
    }

    Stmt statement() {
        const Tok& t = peek();
        if (t.kind != Tok::Kind::Ident) fail(t, "expected statement");
        if (t.text == "skip") {
            take();
            return Stmt::skip();
        }
        if (t.text == "print") {
            take();
            return Stmt::print(expr());
        }
        if (t.text == "if") {
            take();
            BoolExpr c = condition();
            expect_word("then");
            Stmt a = statements();
            expect_word("else");
            Stmt b = statements();
            expect_word("fi");
            return Stmt::if_then_else(std::move(c), std::move(a), std::move(b));
        }
        if (t.text == "while") {
            take();
            BoolExpr c = condition();
            expect_word("do");
            Stmt body = statements();
            expect_word("od");
            return Stmt::while_do(std::move(c), std::move(body));
        }
        if (t.text == "int" || t.text == "integer") fail(t, "declaration outside 'begin'");
        Tok target = peek();
        std::string name = identifier();
        expect(":=");
        if (at("?")) {
            take();
            return Stmt::random_assign(name, lookup(target));
        }
        int decl = lookup(target);
        return Stmt::assign(name, expr(), decl);
    }

    void expect_word(std::string_view w) {
        if (!at_ident(w)) fail(peek(), "expected '" + std::string(w) + "'");
        take();
    }

    bool at_declaration() const { return at_ident("int") || at_ident("integer"); }

    // begin DECL; DECL; ... stmts end. Each declaration opens a block nested
    // in the previous one.
    Stmt block() {
        expect_word("begin");
        if (!at_declaration()) fail(peek(), "expected declaration after 'begin'");
        Stmt s = declarations();
        expect_word("end");
        return s;
    }

    Stmt declarations() {
        take();  // int / integer
        Tok name_tok = peek();
        std::string name = identifier();
        enum class InitKind { Given, Random, Missing } kind = InitKind::Missing;
        Expr init = Expr::literal(0);
        if (at(":=")) {
            take();
            if (at("?")) {
                take();
                kind = InitKind::Random;
            } else {
                init = expr();
                kind = InitKind::Given;
            }
        }
        if (!at_terminator() && !at(";")) fail(peek(), "expected ';'");
        while (at(";")) take();

        if (kind == InitKind::Missing && peek().kind == Tok::Kind::Ident && peek().text == name && peek(1).text == ":=") {
            // Fold `int x; x := e` into the declaration when e does not read x.
            std::size_t save = pos_;
            take();
            take();
            if (at("?")) {
                take();
                kind = InitKind::Random;
            } else {
                scope_.emplace_back(name, -1);
                Expr e = expr();
                scope_.pop_back();
                if (identifiers(e).count(name)) {
                    pos_ = save;
                } else {
                    init = std::move(e);
                    kind = InitKind::Given;
                }
            }
            if (pos_ != save) {
                if (!at_terminator() && !at(";")) fail(peek(), "expected ';'");
            }
        }

        int decl = next_decl_++;
        scope_.emplace_back(name, decl);
        Stmt body = at_declaration() ? declarations() : statements();
        scope_.pop_back();
        if (kind == InitKind::Random) return Stmt::random_block(name, std::move(body), decl);
        return Stmt::block(name, std::move(init), std::move(body), decl);
    }

    BoolExpr condition() {
        BoolExpr b = conjunction();
        while (at_ident("or")) {
            take();
            b = BoolExpr::disjunction(std::move(b), conjunction());
        }
        return b;
    }

    BoolExpr conjunction() {
        BoolExpr b = negation();
        while (at_ident("and")) {
            take();
            b = BoolExpr::conjunction(std::move(b), negation());
        }
        return b;
    }

    BoolExpr negation() {
        if (at_ident("not")) {
            take();
            return BoolExpr::negation(negation());
        }
        return bool_atom();
    }

    BoolExpr bool_atom() {
        if (at_ident("true")) {
            take();
            return BoolExpr::constant(true);
        }
        if (at_ident("false")) {
            take();
            return BoolExpr::constant(false);
        }
        if (at("(")) {
            // Either a parenthesized condition or a comparison whose left
            // operand starts with '('.
            std::size_t save = pos_;
            try {
                return comparison();
            } catch (const SyntaxError&) {
                pos_ = save;
            }
            take();
            BoolExpr b = condition();
            expect(")");
            return b;
        }
        return comparison();
    }

    BoolExpr comparison() {
        Expr a = expr();
        const Tok& t = peek();
        BoolExpr::Op op;
        if (t.text == "=") op = BoolExpr::Op::Eq;
        else if (t.text == "<>" || t.text == "!=") op = BoolExpr::Op::Ne;
        else if (t.text == "<") op = BoolExpr::Op::Lt;
        else if (t.text == "<=") op = BoolExpr::Op::Le;
        else if (t.text == ">") op = BoolExpr::Op::Gt;
        else if (t.text == ">=") op = BoolExpr::Op::Ge;
        else fail(t, "expected comparison operator");
        take();
        return BoolExpr::compare(op, std::move(a), expr());
    }

    Expr expr() {
        Expr e = term();
        while (at("+") || at("-")) {
            auto op = take().text == "+" ? Expr::Op::Add : Expr::Op::Sub;
            e = Expr::binary(op, std::move(e), term());
        }
        return e;
    }

    Expr term() {
        Expr e = power();
        while (at("*")) {
            take();
            e = Expr::binary(Expr::Op::Mul, std::move(e), power());
        }
        return e;
    }

    Expr power() {
        Expr e = unary();
        for (;;) {
            if (at("^2")) {
                take();
            } else if (at("^")) {
                take();
                if (peek().kind != Tok::Kind::Number || peek().text != "2") fail(peek(), "only squaring (^2) is supported");
                take();
            } else {
                break;
            }
            e = Expr::square(std::move(e));
        }
        return e;
    }

    Expr unary() {
        if (at("-")) {
            take();
            return Expr::negate(unary());
        }
        return primary();
    }

    Expr primary() {
        const Tok& t = peek();
        if (t.kind == Tok::Kind::Number) {
            Tok n = take();
            std::int64_t v = 0;
            for (char c : n.text) {
                if (v > (std::numeric_limits<std::int64_t>::max() - (c - '0')) / 10) {
                    throw SyntaxError("integer literal too large", n.line, n.column);
                }
                v = v * 10 + (c - '0');
            }
            return Expr::literal(v);
        }
        if (at("(")) {
            take();
            Expr e = expr();
            expect(")");
            return e;
        }
        if (t.kind == Tok::Kind::Ident && !is_reserved(t.text)) {
            Tok id = take();
            return Expr::identifier(id.text, lookup(id));
        }
        fail(t, "expected expression");
    }

public:
    // Collects undeclared identifiers instead of rejecting them.
    std::set<std::string>* open_ = nullptr;

private:
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    bool resolve_;
    std::vector<std::pair<std::string, int>> scope_;
    int next_decl_ = 0;
};

void collect(const Expr& e, std::set<std::string>& out) {
    if (e.op == Expr::Op::Identifier) out.insert(e.name);
    for (const auto& o : e.operands) collect(o, out);
}

void collect(const BoolExpr& b, std::set<std::string>& out) {
    for (const auto& o : b.operands) collect(o, out);
    for (const auto& s : b.subs) collect(s, out);
}

}  // namespace

Program parse_program(std::string_view text, const std::vector<std::string>& globals) {
    Parser p(text, true);
    p.declare_globals(globals);
    return p.program();
}

std::set<std::string> free_identifiers(std::string_view text) {
    std::set<std::string> out;
    Parser p(text, true);
    p.open_ = &out;
    p.program();
    return out;
}

BoolExpr parse_condition(std::string_view text) { return Parser(text, false).condition_only(); }

Expr parse_expr(std::string_view text) { return Parser(text, false).expr_only(); }

std::set<std::string> identifiers(const Expr& e) {
    std::set<std::string> out;
    collect(e, out);
    return out;
}

std::set<std::string> identifiers(const BoolExpr& b) {
    std::set<std::string> out;
    collect(b, out);
    return out;
}

int declaration_count(const Program& p, int globals) {
    int n = globals;
    if (p.kind == Stmt::Kind::Block) n = std::max(n, p.decl + 1);
    for (const auto& s : p.body) n = std::max(n, declaration_count(s, globals));
    return n;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render(const Expr& e) {
    switch (e.op) {
    case Expr::Op::Literal:
        // Negative literals only arise from constructed ASTs.
        return e.value < 0 ? "(" + std::to_string(e.value) + ")" : std::to_string(e.value);
    case Expr::Op::Identifier:
        return e.name;
    case Expr::Op::Add:
        return "(" + render(e.operands[0]) + " + " + render(e.operands[1]) + ")";
    case Expr::Op::Sub:
        return "(" + render(e.operands[0]) + " - " + render(e.operands[1]) + ")";
    case Expr::Op::Mul:
        return "(" + render(e.operands[0]) + " * " + render(e.operands[1]) + ")";
    case Expr::Op::Square:
        return "(" + render(e.operands[0]) + " ^ 2)";
    case Expr::Op::Negate:
        return "(-" + render(e.operands[0]) + ")";
    }
    return {};
}

std::string render(const BoolExpr& b) {
    auto cmp = [&](const char* op) { return render(b.operands[0]) + " " + op + " " + render(b.operands[1]); };
    switch (b.op) {
    case BoolExpr::Op::True:
        return "true";
    case BoolExpr::Op::False:
        return "false";
    case BoolExpr::Op::Eq:
        return cmp("=");
    case BoolExpr::Op::Ne:
        return cmp("<>");
    case BoolExpr::Op::Lt:
        return cmp("<");
    case BoolExpr::Op::Le:
        return cmp("<=");
    case BoolExpr::Op::Gt:
        return cmp(">");
    case BoolExpr::Op::Ge:
        return cmp(">=");
    case BoolExpr::Op::And:
        return "(" + render(b.subs[0]) + " and " + render(b.subs[1]) + ")";
    case BoolExpr::Op::Or:
        return "(" + render(b.subs[0]) + " or " + render(b.subs[1]) + ")";
    case BoolExpr::Op::Not:
        return "(not " + render(b.subs[0]) + ")";
    }
    return {};
}

namespace {

void render_stmt(std::ostream& os, const Stmt& s, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    switch (s.kind) {
    case Stmt::Kind::Skip:
        os << pad << "skip";
        return;
    case Stmt::Kind::Assign:
        os << pad << s.name << " := " << render(s.expr);
        return;
    case Stmt::Kind::RandomAssign:
        os << pad << s.name << " := ?";
        return;
    case Stmt::Kind::Print:
        os << pad << "print " << render(s.expr);
        return;
    case Stmt::Kind::Seq:
        render_stmt(os, s.body[0], indent);
        os << ";\n";
        render_stmt(os, s.body[1], indent);
        return;
    case Stmt::Kind::If:
        os << pad << "if " << render(s.cond) << " then\n";
        render_stmt(os, s.body[0], indent + 1);
        os << '\n' << pad << "else\n";
        render_stmt(os, s.body[1], indent + 1);
        os << '\n' << pad << "fi";
        return;
    case Stmt::Kind::While:
        os << pad << "while " << render(s.cond) << " do\n";
        render_stmt(os, s.body[0], indent + 1);
        os << '\n' << pad << "od";
        return;
    case Stmt::Kind::Block:
        os << pad << "begin int " << s.name << " := ";
        if (s.init == Stmt::Init::Random) os << '?';
        else os << render(s.expr);
        os << ";\n";
        render_stmt(os, s.body[0], indent + 1);
        os << '\n' << pad << "end";
        return;
    }
}

}  // namespace

std::string render(const Program& p) {
    std::ostringstream os;
    render_stmt(os, p, 0);
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Program& p) { return os << render(p); }

}  // namespace dynsem::imp
