#pragma once

// The while-language with blocks: integer expressions, boolean conditions,
// statements. Identifiers carry the id of their statically enclosing
// declaration, filled in by the parser.

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dynsem::imp {

struct Expr {
    enum class Op { Literal, Identifier, Add, Sub, Mul, Square, Negate };

    Op op = Op::Literal;
    std::int64_t value = 0;
    std::string name;
    // Declaration id for identifiers; -1 when unresolved.
    int decl = -1;
    std::vector<Expr> operands;

    static Expr literal(std::int64_t v);
    static Expr identifier(std::string name, int decl = -1);
    static Expr binary(Op op, Expr a, Expr b);
    static Expr square(Expr a);
    static Expr negate(Expr a);

    friend bool operator==(const Expr&, const Expr&) = default;
};

struct BoolExpr {
    enum class Op { True, False, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not };

    Op op = Op::True;
    std::vector<Expr> operands;
    std::vector<BoolExpr> subs;

    static BoolExpr constant(bool v);
    static BoolExpr compare(Op op, Expr a, Expr b);
    static BoolExpr conjunction(BoolExpr a, BoolExpr b);
    static BoolExpr disjunction(BoolExpr a, BoolExpr b);
    static BoolExpr negation(BoolExpr a);

    friend bool operator==(const BoolExpr&, const BoolExpr&) = default;
};

struct Stmt {
    enum class Kind { Skip, Assign, RandomAssign, Seq, If, While, Block, Print };
    enum class Init { Value, Random };

    Kind kind = Kind::Skip;
    // Target of Assign/RandomAssign, declared name of Block.
    std::string name;
    int decl = -1;
    // Assigned value, printed value, or Block initializer when init == Value.
    Expr expr;
    Init init = Init::Value;
    BoolExpr cond;
    // Seq: two parts; If: then/else; While and Block: body.
    std::vector<Stmt> body;

    static Stmt skip();
    static Stmt assign(std::string name, Expr e, int decl = -1);
    static Stmt random_assign(std::string name, int decl = -1);
    static Stmt seq(Stmt a, Stmt b);
    static Stmt if_then_else(BoolExpr c, Stmt a, Stmt b);
    static Stmt while_do(BoolExpr c, Stmt body);
    static Stmt block(std::string name, Expr init, Stmt body, int decl = -1);
    static Stmt random_block(std::string name, Stmt body, int decl = -1);
    static Stmt print(Expr e);

    friend bool operator==(const Stmt&, const Stmt&) = default;
};

using Program = Stmt;

// Parses a statement sequence. `globals` are identifiers declared outside
// the text (Hoare-triple inputs); they receive declaration ids 0..k-1 and
// blocks are numbered after them in textual order. A declaration without
// initializer followed directly by an assignment to the same identifier
// (whose right side does not mention it) takes that assignment as its
// initializer; otherwise it starts at 0.
Program parse_program(std::string_view text, const std::vector<std::string>& globals = {});

// Identifiers the program uses without declaring them.
std::set<std::string> free_identifiers(std::string_view text);

// Parses a condition; identifiers stay unresolved (decl == -1).
BoolExpr parse_condition(std::string_view text);
Expr parse_expr(std::string_view text);

std::set<std::string> identifiers(const BoolExpr& b);
std::set<std::string> identifiers(const Expr& e);
// Number of declaration ids used: globals plus blocks.
int declaration_count(const Program& p, int globals = 0);

std::string render(const Expr& e);
std::string render(const BoolExpr& b);
std::string render(const Program& p);
std::ostream& operator<<(std::ostream& os, const Program& p);

}  // namespace dynsem::imp
