#include "dynsem/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <utility>

#include "dynsem/error.hpp"

namespace dynsem {

// ---------------------------------------------------------------------------
// Construction

Term Term::variable(std::string name) {
    Term t;
    t.kind = Kind::Variable;
    t.name = std::move(name);
    return t;
}

Term Term::constant(std::string name) {
    Term t;
    t.kind = Kind::Constant;
    t.name = std::move(name);
    return t;
}

Term Term::parameter(std::string name) {
    Term t;
    t.kind = Kind::Parameter;
    t.name = std::move(name);
    return t;
}

Term Term::function(std::string name, std::vector<Term> args) {
    if (args.empty()) return constant(std::move(name));
    Term t;
    t.kind = Kind::Function;
    t.name = std::move(name);
    t.args = std::move(args);
    return t;
}

Term Term::epsilon(std::string var, Formula matrix) {
    Term t;
    t.kind = Kind::Epsilon;
    t.name = std::move(var);
    t.matrix = std::make_shared<const Formula>(std::move(matrix));
    return t;
}

bool operator==(const Term& a, const Term& b) {
    if (a.kind != b.kind || a.name != b.name || a.args != b.args) return false;
    if (a.kind != Term::Kind::Epsilon) return true;
    return a.matrix == b.matrix || *a.matrix == *b.matrix;
}

namespace {

Formula make(Formula::Kind kind, std::string name, std::vector<Term> terms, std::vector<Formula> subs) {
    Formula f;
    f.kind = kind;
    f.name = std::move(name);
    f.terms = std::move(terms);
    f.subs = std::move(subs);
    return f;
}

}  // namespace

Formula Formula::atom(std::string pred, std::vector<Term> args) {
    return make(Kind::Atom, std::move(pred), std::move(args), {});
}
Formula Formula::equal(Term lhs, Term rhs) {
    return make(Kind::Equal, {}, {std::move(lhs), std::move(rhs)}, {});
}
Formula Formula::negation(Formula f) { return make(Kind::Not, {}, {}, {std::move(f)}); }
Formula Formula::conjunction(Formula a, Formula b) {
    return make(Kind::And, {}, {}, {std::move(a), std::move(b)});
}
Formula Formula::disjunction(Formula a, Formula b) {
    return make(Kind::Or, {}, {}, {std::move(a), std::move(b)});
}
Formula Formula::implication(Formula a, Formula b) {
    return make(Kind::Implies, {}, {}, {std::move(a), std::move(b)});
}
Formula Formula::exists(std::string var, Formula body) {
    return make(Kind::Exists, std::move(var), {}, {std::move(body)});
}
Formula Formula::forall(std::string var, Formula body) {
    return make(Kind::Forall, std::move(var), {}, {std::move(body)});
}
Formula Formula::random_assign(std::string var) { return make(Kind::RandomAssign, std::move(var), {}, {}); }

bool operator==(const Formula& a, const Formula& b) {
    return a.kind == b.kind && a.name == b.name && a.terms == b.terms && a.subs == b.subs;
}

// ---------------------------------------------------------------------------
// Signatures

void Signature::add_predicate(const std::string& name, int arity) {
    if (functions.count(name)) throw SignatureError("symbol '" + name + "' used as both function and predicate");
    auto [it, inserted] = predicates.emplace(name, arity);
    if (!inserted && it->second != arity) {
        throw SignatureError("predicate '" + name + "' used with arities " + std::to_string(it->second) +
                             " and " + std::to_string(arity));
    }
}

void Signature::add_function(const std::string& name, int arity) {
    if (predicates.count(name)) throw SignatureError("symbol '" + name + "' used as both predicate and function");
    auto [it, inserted] = functions.emplace(name, arity);
    if (!inserted && it->second != arity) {
        throw SignatureError("function '" + name + "' used with arities " + std::to_string(it->second) +
                             " and " + std::to_string(arity));
    }
}

void Signature::merge(const Signature& other) {
    for (const auto& [name, arity] : other.predicates) add_predicate(name, arity);
    for (const auto& [name, arity] : other.functions) add_function(name, arity);
    if (domain_hint == 0) domain_hint = other.domain_hint;
}

bool Signature::is_constant(std::string_view name) const {
    auto it = functions.find(std::string(name));
    return it != functions.end() && it->second == 0;
}

bool operator==(const Signature& a, const Signature& b) {
    return a.predicates == b.predicates && a.functions == b.functions;
}

namespace {

void collect_term_signature(const Term& t, Signature& into) {
    switch (t.kind) {
    case Term::Kind::Constant:
        into.add_function(t.name, 0);
        break;
    case Term::Kind::Function:
        into.add_function(t.name, static_cast<int>(t.args.size()));
        for (const auto& a : t.args) collect_term_signature(a, into);
        break;
    case Term::Kind::Epsilon:
        collect_signature(*t.matrix, into);
        break;
    default:
        break;
    }
}

}  // namespace

void collect_signature(const Formula& f, Signature& into) {
    if (f.kind == Formula::Kind::Atom) into.add_predicate(f.name, static_cast<int>(f.terms.size()));
    for (const auto& t : f.terms) collect_term_signature(t, into);
    for (const auto& s : f.subs) collect_signature(s, into);
}

Signature infer_signature(const Formula& f) {
    Signature sig;
    collect_signature(f, sig);
    return sig;
}

// ---------------------------------------------------------------------------
// Variables

namespace {

void free_vars_term(const Term& t, std::set<std::string>& bound, std::set<std::string>& out);

void free_vars(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (f.kind) {
    case Formula::Kind::RandomAssign:
        if (!bound.count(f.name)) out.insert(f.name);
        return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        bool added = bound.insert(f.name).second;
        free_vars(f.body(), bound, out);
        if (added) bound.erase(f.name);
        return;
    }
    default:
        for (const auto& t : f.terms) free_vars_term(t, bound, out);
        for (const auto& s : f.subs) free_vars(s, bound, out);
    }
}

void free_vars_term(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (t.kind) {
    case Term::Kind::Variable:
        if (!bound.count(t.name)) out.insert(t.name);
        break;
    case Term::Kind::Function:
        for (const auto& a : t.args) free_vars_term(a, bound, out);
        break;
    case Term::Kind::Epsilon: {
        bool added = bound.insert(t.name).second;
        free_vars(*t.matrix, bound, out);
        if (added) bound.erase(t.name);
        break;
    }
    default:
        break;
    }
}

void all_vars_term(const Term& t, std::set<std::string>& out);

void all_vars(const Formula& f, std::set<std::string>& out) {
    if (f.kind == Formula::Kind::RandomAssign || f.is_binder()) out.insert(f.name);
    for (const auto& t : f.terms) all_vars_term(t, out);
    for (const auto& s : f.subs) all_vars(s, out);
}

void all_vars_term(const Term& t, std::set<std::string>& out) {
    switch (t.kind) {
    case Term::Kind::Variable:
        out.insert(t.name);
        break;
    case Term::Kind::Function:
        for (const auto& a : t.args) all_vars_term(a, out);
        break;
    case Term::Kind::Epsilon:
        out.insert(t.name);
        all_vars(*t.matrix, out);
        break;
    default:
        break;
    }
}

void params_term(const Term& t, std::set<std::string>& out);

void params(const Formula& f, std::set<std::string>& out) {
    for (const auto& t : f.terms) params_term(t, out);
    for (const auto& s : f.subs) params(s, out);
}

void params_term(const Term& t, std::set<std::string>& out) {
    if (t.kind == Term::Kind::Parameter) out.insert(t.name);
    for (const auto& a : t.args) params_term(a, out);
    if (t.matrix) params(*t.matrix, out);
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
    std::set<std::string> bound, out;
    free_vars(f, bound, out);
    return out;
}

std::set<std::string> free_variables(const Term& t) {
    std::set<std::string> bound, out;
    free_vars_term(t, bound, out);
    return out;
}

std::set<std::string> all_variables(const Formula& f) {
    std::set<std::string> out;
    all_vars(f, out);
    return out;
}

std::set<std::string> parameters(const Formula& f) {
    std::set<std::string> out;
    params(f, out);
    return out;
}

bool occurs_parameter(const Formula& f, std::string_view name) {
    return parameters(f).count(std::string(name)) > 0;
}

bool occurs_free(const Formula& f, std::string_view var) {
    return free_variables(f).count(std::string(var)) > 0;
}

namespace {

int term_depth(const Term& t) {
    int d = 0;
    for (const auto& a : t.args) d = std::max(d, term_depth(a));
    if (t.matrix) d = std::max(d, 1 + quantifier_depth(*t.matrix));
    return d;
}

int term_size(const Term& t) {
    int n = 1;
    for (const auto& a : t.args) n += term_size(a);
    if (t.matrix) n += 1 + formula_size(*t.matrix);
    return n;
}

bool term_has_epsilon(const Term& t) {
    if (t.kind == Term::Kind::Epsilon) return true;
    return std::any_of(t.args.begin(), t.args.end(), term_has_epsilon);
}

}  // namespace

int quantifier_depth(const Formula& f) {
    int d = 0;
    for (const auto& t : f.terms) d = std::max(d, term_depth(t));
    for (const auto& s : f.subs) d = std::max(d, quantifier_depth(s));
    return f.is_binder() ? d + 1 : d;
}

int formula_size(const Formula& f) {
    switch (f.kind) {
    case Formula::Kind::Atom:
    case Formula::Kind::Equal: {
        int n = 1;
        for (const auto& t : f.terms) n += term_size(t);
        return n;
    }
    case Formula::Kind::RandomAssign:
        return 2;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
        return 2 + formula_size(f.body());
    default: {
        int n = 1;
        for (const auto& s : f.subs) n += formula_size(s);
        return n;
    }
    }
}

bool is_quantifier_free(const Formula& f) {
    if (f.is_binder()) return false;
    return std::all_of(f.subs.begin(), f.subs.end(), is_quantifier_free);
}

bool has_epsilon(const Formula& f) {
    if (std::any_of(f.terms.begin(), f.terms.end(), term_has_epsilon)) return true;
    return std::any_of(f.subs.begin(), f.subs.end(), [](const Formula& s) { return has_epsilon(s); });
}

bool has_random_assign(const Formula& f) {
    if (f.kind == Formula::Kind::RandomAssign) return true;
    return std::any_of(f.subs.begin(), f.subs.end(), [](const Formula& s) { return has_random_assign(s); });
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::size_t stem_len = base.size();
    while (stem_len > 1 && std::isdigit(static_cast<unsigned char>(base[stem_len - 1]))) --stem_len;
    const std::string stem = base.substr(0, stem_len);
    for (int k = 1;; ++k) {
        std::string candidate = stem + std::to_string(k);
        if (!avoid.count(candidate)) return candidate;
    }
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

// Shared binder logic for quantifiers and epsilon terms. Returns the new
// bound name and body.
std::pair<std::string, Formula> substitute_under_binder(const std::string& bound, const Formula& body,
                                                        const std::string& var, const Term& t) {
    if (bound == var || !occurs_free(body, var)) return {bound, body};
    auto t_free = free_variables(t);
    if (!t_free.count(bound)) return {bound, substitute(body, var, t)};
    std::set<std::string> avoid = all_variables(body);
    avoid.insert(t_free.begin(), t_free.end());
    avoid.insert(var);
    std::string renamed = fresh_name(bound, avoid);
    Formula body2 = substitute(body, bound, Term::variable(renamed));
    return {renamed, substitute(body2, var, t)};
}

}  // namespace

Term substitute(const Term& s, const std::string& var, const Term& t) {
    switch (s.kind) {
    case Term::Kind::Variable:
        return s.name == var ? t : s;
    case Term::Kind::Function: {
        Term out = s;
        for (auto& a : out.args) a = substitute(a, var, t);
        return out;
    }
    case Term::Kind::Epsilon: {
        auto [name, body] = substitute_under_binder(s.name, *s.matrix, var, t);
        return Term::epsilon(std::move(name), std::move(body));
    }
    default:
        return s;
    }
}

Formula substitute(const Formula& f, const std::string& var, const Term& t) {
    switch (f.kind) {
    case Formula::Kind::RandomAssign:
        return f;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        auto [name, body] = substitute_under_binder(f.name, f.body(), var, t);
        Formula out = f;
        out.name = std::move(name);
        out.subs[0] = std::move(body);
        return out;
    }
    default: {
        Formula out = f;
        for (auto& term : out.terms) term = substitute(term, var, t);
        for (auto& sub : out.subs) sub = substitute(sub, var, t);
        return out;
    }
    }
}

namespace {

Term replace_parameter_term(const Term& s, const std::string& name, const Term& t) {
    if (s.kind == Term::Kind::Parameter) return s.name == name ? t : s;
    Term out = s;
    for (auto& a : out.args) a = replace_parameter_term(a, name, t);
    if (out.matrix) out.matrix = std::make_shared<const Formula>(replace_parameter(*out.matrix, name, t));
    return out;
}

Formula mark_parameters_rec(const Formula& f, const std::set<std::string>& names, std::set<std::string>& bound);

Term mark_parameters_term(const Term& s, const std::set<std::string>& names, std::set<std::string>& bound) {
    if (s.kind == Term::Kind::Variable) {
        return (names.count(s.name) && !bound.count(s.name)) ? Term::parameter(s.name) : s;
    }
    Term out = s;
    for (auto& a : out.args) a = mark_parameters_term(a, names, bound);
    if (out.matrix) {
        bool added = bound.insert(s.name).second;
        out.matrix = std::make_shared<const Formula>(mark_parameters_rec(*s.matrix, names, bound));
        if (added) bound.erase(s.name);
    }
    return out;
}

Formula mark_parameters_rec(const Formula& f, const std::set<std::string>& names, std::set<std::string>& bound) {
    Formula out = f;
    bool added = f.is_binder() && bound.insert(f.name).second;
    for (auto& t : out.terms) t = mark_parameters_term(t, names, bound);
    for (auto& s : out.subs) s = mark_parameters_rec(s, names, bound);
    if (added) bound.erase(f.name);
    return out;
}

}  // namespace

Formula replace_parameter(const Formula& f, const std::string& name, const Term& t) {
    Formula out = f;
    for (auto& term : out.terms) term = replace_parameter_term(term, name, t);
    for (auto& sub : out.subs) sub = replace_parameter(sub, name, t);
    return out;
}

Formula mark_parameters(const Formula& f, const std::set<std::string>& names) {
    std::set<std::string> bound;
    return mark_parameters_rec(f, names, bound);
}

}  // namespace dynsem
