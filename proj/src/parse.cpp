#include <algorithm>
#include <array>
#include <cctype>

#include "dynsem/error.hpp"
#include "dynsem/syntax.hpp"

namespace dynsem {

namespace {

constexpr std::array<std::string_view, 9> kKeywords{"and", "or", "not", "implies", "ex", "all", "rnd", "eps", "="};

bool is_keyword(std::string_view s) {
    return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '\'';
}

struct Token {
    enum class Kind { Open, Close, Symbol, End };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Reader {
public:
    Reader(std::string_view text, const Signature* sig) : text_(text), sig_(sig) { advance(); }

    Formula formula() {
        Token tok = take();
        if (tok.kind == Token::Kind::Symbol) {
            check_identifier(tok);
            check_predicate(tok, 0);
            return Formula::atom(tok.text, {});
        }
        if (tok.kind != Token::Kind::Open) fail_at(tok, "expected formula");
        Token head = take();
        if (head.kind != Token::Kind::Symbol) fail_at(head, "expected connective or predicate after '('");
        Formula out;
        if (head.text == "and" || head.text == "or" || head.text == "implies") {
            Formula a = formula();
            Formula b = formula();
            out = head.text == "and"  ? Formula::conjunction(std::move(a), std::move(b))
                  : head.text == "or" ? Formula::disjunction(std::move(a), std::move(b))
                                      : Formula::implication(std::move(a), std::move(b));
        } else if (head.text == "not") {
            out = Formula::negation(formula());
        } else if (head.text == "ex" || head.text == "all") {
            std::string var = variable_name();
            bound_.push_back(var);
            Formula body = formula();
            bound_.pop_back();
            out = head.text == "ex" ? Formula::exists(var, std::move(body)) : Formula::forall(var, std::move(body));
        } else if (head.text == "rnd") {
            out = Formula::random_assign(variable_name());
        } else if (head.text == "=") {
            Term a = term();
            Term b = term();
            out = Formula::equal(std::move(a), std::move(b));
        } else if (head.text == "eps") {
            fail_at(head, "epsilon term used as a formula");
        } else {
            check_identifier(head);
            std::vector<Term> args;
            while (peek().kind != Token::Kind::Close && peek().kind != Token::Kind::End) args.push_back(term());
            check_predicate(head, args.size());
            out = Formula::atom(head.text, std::move(args));
        }
        expect_close();
        return out;
    }

    Term term() {
        Token tok = take();
        if (tok.kind == Token::Kind::Symbol) {
            check_identifier(tok);
            bool bound = std::find(bound_.begin(), bound_.end(), tok.text) != bound_.end();
            if (!bound && sig_ && sig_->is_constant(tok.text)) return Term::constant(tok.text);
            if (!bound && sig_ && sig_->functions.count(tok.text)) {
                fail_at(tok, "function '" + tok.text + "' used without arguments", true);
            }
            return Term::variable(tok.text);
        }
        if (tok.kind != Token::Kind::Open) fail_at(tok, "expected term");
        Token head = take();
        if (head.kind != Token::Kind::Symbol) fail_at(head, "expected function symbol after '('");
        Term out;
        if (head.text == "eps") {
            std::string var = variable_name();
            bound_.push_back(var);
            Formula m = formula();
            bound_.pop_back();
            out = Term::epsilon(var, std::move(m));
        } else {
            check_identifier(head);
            std::vector<Term> args;
            while (peek().kind != Token::Kind::Close && peek().kind != Token::Kind::End) args.push_back(term());
            if (args.empty()) fail_at(head, "function application needs arguments");
            if (sig_) {
                auto it = sig_->functions.find(head.text);
                if (it != sig_->functions.end() && it->second != static_cast<int>(args.size())) {
                    fail_at(head,
                            "function '" + head.text + "' expects " + std::to_string(it->second) + " arguments, got " +
                                std::to_string(args.size()),
                            true);
                }
            }
            out = Term::function(head.text, std::move(args));
        }
        expect_close();
        return out;
    }

    void expect_end() {
        if (peek().kind != Token::Kind::End) fail_at(peek(), "unexpected trailing input");
    }

private:
    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    void expect_close() {
        Token t = take();
        if (t.kind != Token::Kind::Close) fail_at(t, "expected ')'");
    }

    std::string variable_name() {
        Token t = take();
        if (t.kind != Token::Kind::Symbol) fail_at(t, "expected variable");
        check_identifier(t);
        return t.text;
    }

    void check_identifier(const Token& t) const {
        if (is_keyword(t.text)) fail_at(t, "keyword '" + t.text + "' used as identifier");
        if (!ident_start(t.text[0])) fail_at(t, "bad identifier '" + t.text + "'");
    }

    void check_predicate(const Token& t, std::size_t arity) const {
        if (!sig_) return;
        auto it = sig_->predicates.find(t.text);
        if (it != sig_->predicates.end() && it->second != static_cast<int>(arity)) {
            fail_at(t,
                    "predicate '" + t.text + "' expects " + std::to_string(it->second) + " arguments, got " +
                        std::to_string(arity),
                    true);
        }
        if (sig_->functions.count(t.text)) fail_at(t, "function '" + t.text + "' used as predicate", true);
    }

    [[noreturn]] void fail_at(const Token& t, const std::string& what, bool signature = false) const {
        std::string msg = t.kind == Token::Kind::End ? what + " (unexpected end of input)" : what;
        if (signature) {
            throw SignatureError(msg + " at line " + std::to_string(t.line) + ", column " + std::to_string(t.column));
        }
        throw SyntaxError(msg, t.line, t.column);
    }

    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
            } else {
                break;
            }
        }
        current_ = Token{Token::Kind::End, {}, line_, col_};
        if (pos_ >= text_.size()) return;
        char c = text_[pos_];
        if (c == '(' || c == ')') {
            current_.kind = c == '(' ? Token::Kind::Open : Token::Kind::Close;
            current_.text = std::string(1, c);
            ++pos_;
            ++col_;
            return;
        }
        std::size_t start = pos_;
        if (c == '=') {
            ++pos_;
        } else {
            while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
            if (pos_ == start) throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
        }
        current_.kind = Token::Kind::Symbol;
        current_.text = std::string(text_.substr(start, pos_ - start));
        col_ += pos_ - start;
    }

    std::string_view text_;
    const Signature* sig_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    Token current_{Token::Kind::End, {}, 1, 1};
    std::vector<std::string> bound_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Signature* sig) {
    Reader r(text, sig);
    Formula f = r.formula();
    r.expect_end();
    return f;
}

Term parse_term(std::string_view text, const Signature* sig) {
    Reader r(text, sig);
    Term t = r.term();
    r.expect_end();
    return t;
}

}  // namespace dynsem
