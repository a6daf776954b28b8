#include "dynsem/epsilon.hpp"

#include <algorithm>
#include <set>

#include "dynsem/error.hpp"

namespace dynsem::eps {

Formula eps_translate(const Formula& f) {
    switch (f.kind) {
    case Formula::Kind::Atom:
    case Formula::Kind::Equal:
        return f;
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
        Formula out = f;
        for (auto& s : out.subs) s = eps_translate(s);
        return out;
    }
    case Formula::Kind::Exists: {
        Formula body = eps_translate(f.body());
        return substitute(body, f.name, Term::epsilon(f.name, body));
    }
    case Formula::Kind::Forall: {
        Formula body = eps_translate(f.body());
        return substitute(body, f.name, Term::epsilon(f.name, Formula::negation(body)));
    }
    case Formula::Kind::RandomAssign:
        throw Error("random assignment has no epsilon translation");
    }
    return f;
}

std::string to_string(Failure f) {
    switch (f) {
    case Failure::None:
        return "none";
    case Failure::Conflict:
        return "conflict";
    case Failure::Cycle:
        return "cycle";
    case Failure::Premise:
        return "premise";
    case Failure::Premature:
        return "premature";
    case Failure::Shape:
        return "shape";
    }
    return "?";
}

namespace {

struct Constraint {
    std::string var;
    int line;
    // Bound variable and matrix of the epsilon term, before expansion.
    std::string bound;
    Formula matrix;
};

Disabbreviation failed(Failure f, std::vector<std::string> vars, std::string message) {
    Disabbreviation d;
    d.ok = false;
    d.failure = f;
    d.variables = std::move(vars);
    d.message = std::move(message);
    return d;
}

}  // namespace

Disabbreviation disabbreviate(const nd::LinearDerivation& d) {
    std::vector<Constraint> constraints;
    std::map<std::string, int> first_line;
    for (const auto& l : d.lines) {
        if (l.flag.empty()) continue;
        const std::string& v = l.flag;
        std::string where = "line " + std::to_string(l.number);
        for (const auto& p : d.lines) {
            if (p.rule == nd::LineRule::Premise && occurs_free(p.formula, v)) {
                return failed(Failure::Premise, {v}, where + ": " + v + " is free in premise " + std::to_string(p.number));
            }
        }
        const Formula& q = l.rule == nd::LineRule::ExInst ? d.line(l.refs.at(0)).formula : l.formula;
        if (l.rule == nd::LineRule::ExInst) {
            if (q.kind != Formula::Kind::Exists) return failed(Failure::Shape, {v}, where + ": ExInst needs an existential");
            for (int k = 1; k < l.number; ++k) {
                if (occurs_free(d.line(k).formula, v)) {
                    return failed(Failure::Premature, {v},
                                  where + ": " + v + " already occurs free in line " + std::to_string(k));
                }
            }
            constraints.push_back({v, l.number, q.name, q.body()});
        } else {
            if (q.kind != Formula::Kind::Forall) return failed(Failure::Shape, {v}, where + ": UG needs a universal");
            constraints.push_back({v, l.number, q.name, Formula::negation(q.body())});
        }
        first_line.emplace(v, l.number);
    }

    // v -> letters its term mentions.
    std::map<std::string, std::set<std::string>> deps;
    for (const auto& [v, line] : first_line) deps[v];
    for (const auto& c : constraints) {
        for (const auto& u : free_variables(Term::epsilon(c.bound, c.matrix))) {
            if (first_line.count(u)) deps[c.var].insert(u);
        }
    }
    // Kahn: a variable is ready once nothing still pending mentions it.
    std::map<std::string, int> indegree;
    for (const auto& [v, ds] : deps) {
        indegree[v];
        for (const auto& u : ds) ++indegree[u];
    }
    auto by_line = [&](const std::string& a, const std::string& b) { return first_line[a] < first_line[b]; };
    std::set<std::string, decltype(by_line)> ready(by_line);
    for (const auto& [v, deg] : indegree) {
        if (deg == 0) ready.insert(v);
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (const auto& u : deps[v]) {
            if (--indegree[u] == 0) ready.insert(u);
        }
    }
    if (order.size() != deps.size()) {
        std::vector<std::string> stuck;
        for (const auto& [v, deg] : indegree) {
            if (deg > 0) stuck.push_back(v);
        }
        std::string names;
        for (const auto& s : stuck) names += (names.empty() ? "" : ", ") + s;
        return failed(Failure::Cycle, stuck, "abbreviations depend on each other: {" + names + "}");
    }

    // Expand dependencies first.
    std::map<std::string, Term> expanded;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::string& v = *it;
        for (const auto& c : constraints) {
            if (c.var != v) continue;
            Formula m = c.matrix;
            for (const auto& u : deps[v]) m = substitute(m, u, expanded.at(u));
            Term t = Term::epsilon(c.bound, m);
            auto [pos, inserted] = expanded.emplace(v, t);
            if (!inserted && !alpha_equal(pos->second, t)) {
                return failed(Failure::Conflict, {v},
                              v + " abbreviates both " + render(pos->second) + " and " + render(t));
            }
        }
    }
    Disabbreviation out;
    out.solution.terms = std::move(expanded);
    out.solution.order = std::move(order);
    return out;
}

bool check_eps_axiom(const Model& m, ChoiceSource& c, const Formula& matrix, const std::string& var,
                     const Term& witness, const Assignment& g) {
    Formula antecedent = substitute(matrix, var, witness);
    Formula consequent = substitute(matrix, var, Term::epsilon(var, matrix));
    return !eval_with_epsilon(antecedent, m, c, g) || eval_with_epsilon(consequent, m, c, g);
}

bool check_eps_axiom(const Model& m, ChoiceSource& c, const Formula& matrix, const Term& witness) {
    auto free = free_variables(matrix);
    if (free.size() != 1) throw Error("the matrix must have exactly one free variable");
    return check_eps_axiom(m, c, matrix, *free.begin(), witness);
}

std::vector<Formula> sentence_family(const Signature& sig, int depth, int max_size,
                                     const std::vector<std::string>& variables) {
    FormulaFamilyOptions opts;
    opts.variables = variables;
    opts.max_size = max_size;
    std::vector<Formula> out;
    for (auto& f : enumerate_formulas(sig, opts)) {
        if (free_variables(f).empty() && quantifier_depth(f) <= depth) out.push_back(std::move(f));
    }
    return out;
}

ConservativityReport conservativity_scan(const std::vector<Formula>& sentences, const Signature& sig, int max_n,
                                         int cap) {
    ConservativityReport r;
    r.sentences = sentences.size();
    std::vector<Formula> translated;
    for (const auto& s : sentences) {
        if (!free_variables(s).empty()) throw Error("conservativity scan takes sentences: " + render(s));
        translated.push_back(eps_translate(s));
    }
    const Assignment empty;
    enumerate_models(
        sig, max_n,
        [&](const Model& m) {
            ++r.models;
            const std::uint64_t functions = intended_choice_count(m.size());
            for (std::size_t i = 0; i < sentences.size(); ++i) {
                const bool classical = eval_classical(sentences[i], m, empty);
                std::uint64_t covered = 0;
                r.branches += for_each_choice_branch(
                    m.size(), [&](ChoiceSource& c) { return eval_with_epsilon(translated[i], m, c, empty); },
                    [&](bool outcome, std::uint64_t weight) {
                        covered += weight;
                        if (outcome == classical) return;
                        r.mismatches += weight;
                        if (!r.first_mismatch) r.first_mismatch = Mismatch{sentences[i], m, classical};
                    });
                if (covered != functions) throw Error("choice branches do not cover every intended function");
                r.combinations += covered;
            }
            return true;
        },
        cap);
    return r;
}

}  // namespace dynsem::eps
