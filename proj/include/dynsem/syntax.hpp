#pragma once

// First-order terms and formulas shared by every module: classical
// formulas, DPL programs (same syntax, dynamic reading) and epsilon terms.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dynsem {

struct Formula;

struct Term {
    enum class Kind { Variable, Constant, Parameter, Function, Epsilon };

    Kind kind = Kind::Variable;
    // Symbol name; for Epsilon the bound variable.
    std::string name;
    std::vector<Term> args;
    // Set only for Epsilon.
    std::shared_ptr<const Formula> matrix;

    static Term variable(std::string name);
    static Term constant(std::string name);
    // Proof parameters: atomic, unbindable, not interpreted by models.
    static Term parameter(std::string name);
    static Term function(std::string name, std::vector<Term> args);
    static Term epsilon(std::string var, Formula matrix);

    bool is_variable() const noexcept { return kind == Kind::Variable; }
};

bool operator==(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

struct Formula {
    enum class Kind { Atom, Equal, Not, And, Or, Implies, Exists, Forall, RandomAssign };

    Kind kind = Kind::Atom;
    // Predicate name for Atom; bound (or assigned) variable for Exists,
    // Forall and RandomAssign; empty otherwise.
    std::string name;
    std::vector<Term> terms;
    std::vector<Formula> subs;

    static Formula atom(std::string pred, std::vector<Term> args);
    static Formula equal(Term lhs, Term rhs);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);
    static Formula exists(std::string var, Formula body);
    static Formula forall(std::string var, Formula body);
    static Formula random_assign(std::string var);

    const Formula& left() const { return subs.at(0); }
    const Formula& right() const { return subs.at(1); }
    const Formula& body() const { return subs.at(0); }

    bool is_binder() const noexcept { return kind == Kind::Exists || kind == Kind::Forall; }
    bool is_binary() const noexcept {
        return kind == Kind::And || kind == Kind::Or || kind == Kind::Implies;
    }
};

bool operator==(const Formula& a, const Formula& b);
inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

// Predicate and function symbols with arities. Constants are functions of
// arity 0. Names are unique across the two kinds.
struct Signature {
    std::map<std::string, int> predicates;
    std::map<std::string, int> functions;
    // Preferred domain size for tools that need one; 0 means unspecified.
    int domain_hint = 0;

    void add_predicate(const std::string& name, int arity);
    void add_function(const std::string& name, int arity);
    void add_constant(const std::string& name) { add_function(name, 0); }
    void merge(const Signature& other);

    bool is_constant(std::string_view name) const;
    bool empty() const noexcept { return predicates.empty() && functions.empty(); }
};

bool operator==(const Signature& a, const Signature& b);

// Collects the predicate, function and constant symbols used in `f`.
// Variables are not symbols; identifiers parsed without a signature are
// variables, so constants only appear here when the AST marks them.
Signature infer_signature(const Formula& f);
void collect_signature(const Formula& f, Signature& into);

std::set<std::string> free_variables(const Formula& f);
std::set<std::string> free_variables(const Term& t);
// Free plus bound variable names, including RandomAssign targets.
std::set<std::string> all_variables(const Formula& f);
std::set<std::string> parameters(const Formula& f);
bool occurs_parameter(const Formula& f, std::string_view name);
bool occurs_free(const Formula& f, std::string_view var);

// Number of nested Exists/Forall (epsilon matrices count as well).
int quantifier_depth(const Formula& f);
// Symbol length: connectives, predicates and term symbols count 1,
// quantifiers and RandomAssign count 2 (operator plus variable).
int formula_size(const Formula& f);
bool is_quantifier_free(const Formula& f);
bool has_epsilon(const Formula& f);
bool has_random_assign(const Formula& f);

// Capture-avoiding substitution of `t` for the free occurrences of `var`.
// Bound variables that would capture are renamed to the stem of the name
// plus the smallest numeric suffix unused in the surrounding formula.
Formula substitute(const Formula& f, const std::string& var, const Term& t);
Term substitute(const Term& s, const std::string& var, const Term& t);

// Replaces every occurrence of parameter `name` by `t`.
Formula replace_parameter(const Formula& f, const std::string& name, const Term& t);
// Turns free Variable occurrences named in `names` into Parameters.
Formula mark_parameters(const Formula& f, const std::set<std::string>& names);

// Equality up to renaming of bound variables (quantifiers and epsilon).
bool alpha_equal(const Formula& a, const Formula& b);
bool alpha_equal(const Term& a, const Term& b);

// Finds t with substitute(pattern, var, t) alpha-equal to `instance`.
// When `var` is not free in `pattern` any t works and Variable(var) is returned.
std::optional<Term> match_instance(const Formula& pattern, const std::string& var,
                                   const Formula& instance);

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

std::string render(const Term& t);
std::string render(const Formula& f);
std::ostream& operator<<(std::ostream& os, const Term& t);
std::ostream& operator<<(std::ostream& os, const Formula& f);

// S-expression reader. With a signature, identifiers declared as constants
// become Constants (unless bound) and arities are checked.
Formula parse_formula(std::string_view text, const Signature* sig = nullptr);
Term parse_term(std::string_view text, const Signature* sig = nullptr);

// Converts free Variables whose names are constants of `sig` into Constants.
Formula resolve_constants(const Formula& f, const Signature& sig);

struct FormulaFamilyOptions {
    std::vector<std::string> variables{"x", "y"};
    int max_size = 5;
    // Include RandomAssign atoms (the DPL reading).
    bool random_assign = false;
    bool disjunction = true;
    bool universal = true;
};

// Every formula over `sig` of symbol length <= max_size, ordered by size
// then by construction order (atoms, negation, quantifiers, binaries).
std::vector<Formula> enumerate_formulas(const Signature& sig, const FormulaFamilyOptions& opts);
// All atoms over the signature with variable (and constant) arguments.
std::vector<Formula> enumerate_atoms(const Signature& sig, const std::vector<std::string>& variables);

}  // namespace dynsem
