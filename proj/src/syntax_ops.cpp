#include <algorithm>
#include <sstream>
#include <utility>

#include "dynsem/error.hpp"
#include "dynsem/syntax.hpp"

namespace dynsem {

// ---------------------------------------------------------------------------
// Alpha equality

namespace {

using Scope = std::vector<std::string>;

// Position of the innermost binding of `name`, counted from the inside, or -1.
int binding_index(const Scope& scope, const std::string& name) {
    for (std::size_t i = scope.size(); i-- > 0;) {
        if (scope[i] == name) return static_cast<int>(scope.size() - 1 - i);
    }
    return -1;
}

bool alpha_formula(const Formula& a, const Formula& b, Scope& sa, Scope& sb);

bool alpha_term(const Term& a, const Term& b, Scope& sa, Scope& sb) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Term::Kind::Variable: {
        int ia = binding_index(sa, a.name);
        int ib = binding_index(sb, b.name);
        if (ia != ib) return false;
        return ia >= 0 || a.name == b.name;
    }
    case Term::Kind::Constant:
    case Term::Kind::Parameter:
        return a.name == b.name;
    case Term::Kind::Function:
        if (a.name != b.name || a.args.size() != b.args.size()) return false;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (!alpha_term(a.args[i], b.args[i], sa, sb)) return false;
        }
        return true;
    case Term::Kind::Epsilon: {
        sa.push_back(a.name);
        sb.push_back(b.name);
        bool eq = alpha_formula(*a.matrix, *b.matrix, sa, sb);
        sa.pop_back();
        sb.pop_back();
        return eq;
    }
    }
    return false;
}

bool alpha_formula(const Formula& a, const Formula& b, Scope& sa, Scope& sb) {
    if (a.kind != b.kind || a.terms.size() != b.terms.size() || a.subs.size() != b.subs.size()) return false;
    switch (a.kind) {
    case Formula::Kind::Atom:
        if (a.name != b.name) return false;
        break;
    case Formula::Kind::RandomAssign: {
        int ia = binding_index(sa, a.name);
        int ib = binding_index(sb, b.name);
        return ia == ib && (ia >= 0 || a.name == b.name);
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        sa.push_back(a.name);
        sb.push_back(b.name);
        bool eq = alpha_formula(a.body(), b.body(), sa, sb);
        sa.pop_back();
        sb.pop_back();
        return eq;
    }
    default:
        break;
    }
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (!alpha_term(a.terms[i], b.terms[i], sa, sb)) return false;
    }
    for (std::size_t i = 0; i < a.subs.size(); ++i) {
        if (!alpha_formula(a.subs[i], b.subs[i], sa, sb)) return false;
    }
    return true;
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
    Scope sa, sb;
    return alpha_formula(a, b, sa, sb);
}

bool alpha_equal(const Term& a, const Term& b) {
    Scope sa, sb;
    return alpha_term(a, b, sa, sb);
}

// ---------------------------------------------------------------------------
// Instance matching

namespace {

struct Matcher {
    const std::string& var;
    std::optional<Term> candidate;

    bool term(const Term& p, const Term& i, bool shadowed) {
        if (!shadowed && p.kind == Term::Kind::Variable && p.name == var) {
            if (!candidate) {
                candidate = i;
                return true;
            }
            return alpha_equal(*candidate, i);
        }
        if (p.kind != i.kind || p.args.size() != i.args.size()) return false;
        for (std::size_t k = 0; k < p.args.size(); ++k) {
            if (!term(p.args[k], i.args[k], shadowed)) return false;
        }
        if (p.kind == Term::Kind::Epsilon) return formula(*p.matrix, *i.matrix, shadowed || p.name == var);
        return true;
    }

    bool formula(const Formula& p, const Formula& i, bool shadowed) {
        if (p.kind != i.kind || p.terms.size() != i.terms.size() || p.subs.size() != i.subs.size()) return false;
        if (p.is_binder()) shadowed = shadowed || p.name == var;
        for (std::size_t k = 0; k < p.terms.size(); ++k) {
            if (!term(p.terms[k], i.terms[k], shadowed)) return false;
        }
        for (std::size_t k = 0; k < p.subs.size(); ++k) {
            if (!formula(p.subs[k], i.subs[k], shadowed)) return false;
        }
        return true;
    }
};

}  // namespace

std::optional<Term> match_instance(const Formula& pattern, const std::string& var, const Formula& instance) {
    Matcher m{var, std::nullopt};
    if (!m.formula(pattern, instance, false)) return std::nullopt;
    if (!m.candidate) {
        if (alpha_equal(pattern, instance)) return Term::variable(var);
        return std::nullopt;
    }
    if (alpha_equal(substitute(pattern, var, *m.candidate), instance)) return m.candidate;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_term(std::ostream& os, const Term& t);

void render_formula(std::ostream& os, const Formula& f) {
    switch (f.kind) {
    case Formula::Kind::Atom:
        if (f.terms.empty()) {
            os << f.name;
            return;
        }
        os << '(' << f.name;
        for (const auto& t : f.terms) {
            os << ' ';
            render_term(os, t);
        }
        os << ')';
        return;
    case Formula::Kind::Equal:
        os << "(= ";
        render_term(os, f.terms[0]);
        os << ' ';
        render_term(os, f.terms[1]);
        os << ')';
        return;
    case Formula::Kind::Not:
        os << "(not ";
        render_formula(os, f.body());
        os << ')';
        return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
        os << (f.kind == Formula::Kind::And ? "(and " : f.kind == Formula::Kind::Or ? "(or " : "(implies ");
        render_formula(os, f.left());
        os << ' ';
        render_formula(os, f.right());
        os << ')';
        return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
        os << (f.kind == Formula::Kind::Exists ? "(ex " : "(all ") << f.name << ' ';
        render_formula(os, f.body());
        os << ')';
        return;
    case Formula::Kind::RandomAssign:
        os << "(rnd " << f.name << ')';
        return;
    }
}

void render_term(std::ostream& os, const Term& t) {
    switch (t.kind) {
    case Term::Kind::Variable:
    case Term::Kind::Constant:
    case Term::Kind::Parameter:
        os << t.name;
        return;
    case Term::Kind::Function:
        os << '(' << t.name;
        for (const auto& a : t.args) {
            os << ' ';
            render_term(os, a);
        }
        os << ')';
        return;
    case Term::Kind::Epsilon:
        os << "(eps " << t.name << ' ';
        render_formula(os, *t.matrix);
        os << ')';
        return;
    }
}

}  // namespace

std::string render(const Term& t) {
    std::ostringstream os;
    render_term(os, t);
    return os.str();
}

std::string render(const Formula& f) {
    std::ostringstream os;
    render_formula(os, f);
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
    render_term(os, t);
    return os;
}

std::ostream& operator<<(std::ostream& os, const Formula& f) {
    render_formula(os, f);
    return os;
}

// ---------------------------------------------------------------------------
// Constant resolution

namespace {

Formula resolve_rec(const Formula& f, const Signature& sig, std::set<std::string>& bound);

Term resolve_term(const Term& t, const Signature& sig, std::set<std::string>& bound) {
    if (t.kind == Term::Kind::Variable) {
        return (!bound.count(t.name) && sig.is_constant(t.name)) ? Term::constant(t.name) : t;
    }
    Term out = t;
    for (auto& a : out.args) a = resolve_term(a, sig, bound);
    if (t.matrix) {
        bool added = bound.insert(t.name).second;
        out.matrix = std::make_shared<const Formula>(resolve_rec(*t.matrix, sig, bound));
        if (added) bound.erase(t.name);
    }
    return out;
}

Formula resolve_rec(const Formula& f, const Signature& sig, std::set<std::string>& bound) {
    Formula out = f;
    bool added = f.is_binder() && bound.insert(f.name).second;
    for (auto& t : out.terms) t = resolve_term(t, sig, bound);
    for (auto& s : out.subs) s = resolve_rec(s, sig, bound);
    if (added) bound.erase(f.name);
    return out;
}

}  // namespace

Formula resolve_constants(const Formula& f, const Signature& sig) {
    std::set<std::string> bound;
    return resolve_rec(f, sig, bound);
}

// ---------------------------------------------------------------------------
// Enumeration

std::vector<Formula> enumerate_atoms(const Signature& sig, const std::vector<std::string>& variables) {
    std::vector<Term> pool;
    for (const auto& v : variables) pool.push_back(Term::variable(v));
    for (const auto& [name, arity] : sig.functions) {
        if (arity == 0) pool.push_back(Term::constant(name));
    }
    std::vector<Formula> out;
    for (const auto& [pred, arity] : sig.predicates) {
        if (arity > 0 && pool.empty()) continue;
        std::size_t total = 1;
        for (int k = 0; k < arity; ++k) total *= pool.size();
        // Tuples in lexicographic order, last argument fastest.
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<Term> args(static_cast<std::size_t>(arity));
            std::size_t rest = code;
            for (std::size_t k = args.size(); k-- > 0;) {
                args[k] = pool[rest % pool.size()];
                rest /= pool.size();
            }
            out.push_back(Formula::atom(pred, std::move(args)));
        }
    }
    return out;
}

std::vector<Formula> enumerate_formulas(const Signature& sig, const FormulaFamilyOptions& opts) {
    const int max_size = opts.max_size;
    std::vector<std::vector<Formula>> by_size(static_cast<std::size_t>(std::max(max_size, 0)) + 1);
    for (auto& atom : enumerate_atoms(sig, opts.variables)) {
        int s = formula_size(atom);
        if (s <= max_size) by_size[static_cast<std::size_t>(s)].push_back(std::move(atom));
    }
    if (opts.random_assign && max_size >= 2) {
        for (const auto& v : opts.variables) by_size[2].push_back(Formula::random_assign(v));
    }
    for (int s = 1; s <= max_size; ++s) {
        auto& bucket = by_size[static_cast<std::size_t>(s)];
        if (s >= 2) {
            for (const auto& f : by_size[static_cast<std::size_t>(s - 1)]) bucket.push_back(Formula::negation(f));
        }
        if (s >= 3) {
            const auto& inner = by_size[static_cast<std::size_t>(s - 2)];
            for (const auto& v : opts.variables) {
                for (const auto& f : inner) bucket.push_back(Formula::exists(v, f));
            }
            if (opts.universal) {
                for (const auto& v : opts.variables) {
                    for (const auto& f : inner) bucket.push_back(Formula::forall(v, f));
                }
            }
        }
        std::vector<Formula::Kind> ops{Formula::Kind::And};
        if (opts.disjunction) ops.push_back(Formula::Kind::Or);
        ops.push_back(Formula::Kind::Implies);
        for (auto op : ops) {
            for (int i = 1; i < s - 1; ++i) {
                int j = s - 1 - i;
                for (const auto& a : by_size[static_cast<std::size_t>(i)]) {
                    for (const auto& b : by_size[static_cast<std::size_t>(j)]) {
                        Formula f;
                        f.kind = op;
                        f.subs = {a, b};
                        bucket.push_back(std::move(f));
                    }
                }
            }
        }
    }
    std::vector<Formula> out;
    for (auto& bucket : by_size) {
        for (auto& f : bucket) out.push_back(std::move(f));
    }
    return out;
}

}  // namespace dynsem
