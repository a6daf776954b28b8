#include <algorithm>
#include <cctype>
#include <sstream>

#include "dynsem/error.hpp"
#include "dynsem/proofs.hpp"

namespace dynsem::nd {

std::string to_string(LineRule r) {
    switch (r) {
    case LineRule::Premise:
        return "Premise";
    case LineRule::UI:
        return "UI";
    case LineRule::EG:
        return "EG";
    case LineRule::ExInst:
        return "ExInst";
    case LineRule::UG:
        return "UG";
    case LineRule::TautCon:
        return "TautCon";
    }
    return "?";
}

std::string to_string(QuineStatus s) {
    switch (s) {
    case QuineStatus::Accepted:
        return "accepted";
    case QuineStatus::Unfinished:
        return "unfinished";
    case QuineStatus::Rejected:
        return "rejected";
    }
    return "?";
}

std::vector<Formula> LinearDerivation::premises() const {
    std::vector<Formula> out;
    for (const auto& l : lines) {
        if (l.rule == LineRule::Premise) out.push_back(l.formula);
    }
    return out;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

LineRule rule_named(const std::string& name, std::size_t lineno) {
    if (name == "Premise" || name == "P") return LineRule::Premise;
    if (name == "UI") return LineRule::UI;
    if (name == "EG") return LineRule::EG;
    if (name == "ExInst" || name == "EI") return LineRule::ExInst;
    if (name == "UG") return LineRule::UG;
    if (name == "TautCon" || name == "TC") return LineRule::TautCon;
    throw SyntaxError("unknown rule '" + name + "'", lineno, 1);
}

std::string header_value(const std::string& comment, std::string_view key) {
    auto pos = comment.find(key);
    if (pos == std::string::npos) return {};
    return trim(std::string_view(comment).substr(pos + key.size()));
}

bool identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    });
}

}  // namespace

LinearDerivation parse_linear(std::string_view text) {
    LinearDerivation d;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string v = header_value(line, "expect:");
            if (!v.empty()) d.expect = v;
            continue;
        }
        auto dot = line.find('.');
        if (dot == std::string::npos) throw SyntaxError("expected 'N. FORMULA ; RULE'", lineno, 1);
        int number = 0;
        try {
            std::size_t used = 0;
            number = std::stoi(line.substr(0, dot), &used);
            if (used != trim(line.substr(0, dot)).size()) throw std::invalid_argument("number");
        } catch (const std::exception&) {
            throw SyntaxError("expected a line number", lineno, 1);
        }
        auto semi = line.rfind(';');
        if (semi == std::string::npos || semi < dot) throw SyntaxError("missing ';' before the rule", lineno, dot + 1);
        Line l;
        l.number = number;
        try {
            l.formula = parse_formula(line.substr(dot + 1, semi - dot - 1));
        } catch (const SyntaxError& e) {
            throw SyntaxError(std::string("in formula: ") + e.what(), lineno, dot + 2);
        }
        std::string just = trim(std::string_view(line).substr(semi + 1));
        auto bang = just.find('!');
        if (bang != std::string::npos) {
            l.flag = trim(std::string_view(just).substr(bang + 1));
            if (!identifier(l.flag)) throw SyntaxError("bad flag variable '" + l.flag + "'", lineno, semi + 1);
            just = trim(std::string_view(just).substr(0, bang));
        }
        auto open = just.find('(');
        std::string name = trim(std::string_view(just).substr(0, open));
        l.rule = rule_named(name, lineno);
        if (open != std::string::npos) {
            auto close = just.find(')', open);
            if (close == std::string::npos || trim(std::string_view(just).substr(close + 1)).size()) {
                throw SyntaxError("bad reference list", lineno, semi + 1);
            }
            std::string inner = just.substr(open + 1, close - open - 1);
            std::replace(inner.begin(), inner.end(), ',', ' ');
            std::istringstream refs(inner);
            std::string r;
            while (refs >> r) {
                try {
                    l.refs.push_back(std::stoi(r));
                } catch (const std::exception&) {
                    throw SyntaxError("bad line reference '" + r + "'", lineno, semi + 1);
                }
            }
        }
        d.lines.push_back(std::move(l));
    }
    if (d.lines.empty()) throw MalformedError("derivation has no lines");
    for (std::size_t i = 0; i < d.lines.size(); ++i) {
        const Line& l = d.lines[i];
        std::string where = "line " + std::to_string(l.number);
        if (l.number != static_cast<int>(i + 1)) {
            throw MalformedError(where + ": lines must be numbered 1, 2, ... in order");
        }
        for (int r : l.refs) {
            if (r < 1 || r >= l.number) throw MalformedError(where + ": reference " + std::to_string(r) + " is not an earlier line");
        }
        bool flagging = l.rule == LineRule::ExInst || l.rule == LineRule::UG;
        if (flagging && l.flag.empty()) throw MalformedError(where + ": " + to_string(l.rule) + " needs a flag");
        if (!flagging && !l.flag.empty()) throw MalformedError(where + ": only ExInst and UG flag variables");
        std::size_t want = l.rule == LineRule::Premise ? 0 : 1;
        if (l.rule != LineRule::TautCon && l.refs.size() != want) {
            throw MalformedError(where + ": " + to_string(l.rule) + " cites " + std::to_string(want) + " line(s)");
        }
        if (has_random_assign(l.formula) || has_epsilon(l.formula)) {
            throw MalformedError(where + ": derivations are first-order");
        }
    }
    return d;
}

std::string render(const LinearDerivation& d) {
    std::ostringstream os;
    if (!d.expect.empty()) os << "# expect: " << d.expect << '\n';
    for (const auto& l : d.lines) {
        os << l.number << ". " << render(l.formula) << " ; " << to_string(l.rule);
        if (!l.refs.empty()) {
            os << '(';
            for (std::size_t i = 0; i < l.refs.size(); ++i) os << (i ? "," : "") << l.refs[i];
            os << ')';
        }
        if (!l.flag.empty()) os << " !" << l.flag;
        os << '\n';
    }
    return os.str();
}

FlagRecord flag_record(const LinearDerivation& d) {
    FlagRecord out;
    for (const auto& l : d.lines) {
        if (!l.flag.empty()) out[l.flag].push_back(l.number);
    }
    return out;
}

std::set<std::pair<std::string, std::string>> ordering_constraints(const LinearDerivation& d) {
    std::set<std::pair<std::string, std::string>> out;
    FlagRecord flags = flag_record(d);
    for (const auto& l : d.lines) {
        if (l.flag.empty()) continue;
        for (const auto& u : free_variables(l.formula)) {
            if (u != l.flag && flags.count(u)) out.emplace(l.flag, u);
        }
    }
    return out;
}

bool respects_constraints(const std::vector<std::string>& order,
                          const std::set<std::pair<std::string, std::string>>& constraints) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& [before, after] : constraints) {
        if (!pos.count(before) || !pos.count(after) || pos[before] >= pos[after]) return false;
    }
    return true;
}

Ordering ordering_witness(const LinearDerivation& d) {
    FlagRecord flags = flag_record(d);
    auto edges = ordering_constraints(d);
    std::map<std::string, std::set<std::string>> succ;
    std::map<std::string, int> indegree;
    for (const auto& [v, lines] : flags) indegree[v] = 0;
    for (const auto& [a, b] : edges) {
        if (succ[a].insert(b).second) ++indegree[b];
    }
    Ordering o;
    std::set<std::string> ready;
    for (const auto& [v, deg] : indegree) {
        if (deg == 0) ready.insert(v);
    }
    while (!ready.empty()) {
        std::string v = *ready.begin();
        ready.erase(ready.begin());
        o.order.push_back(v);
        for (const auto& u : succ[v]) {
            if (--indegree[u] == 0) ready.insert(u);
        }
    }
    if (o.order.size() == indegree.size()) return o;
    o.acyclic = false;
    // Every remaining vertex has a remaining predecessor; walk backwards
    // until a vertex repeats.
    std::map<std::string, std::string> pred;
    for (const auto& [a, b] : edges) {
        if (indegree[a] > 0 && indegree[b] > 0) pred[b] = a;
    }
    std::string v;
    for (const auto& [name, deg] : indegree) {
        if (deg > 0) {
            v = name;
            break;
        }
    }
    std::vector<std::string> walk;
    std::map<std::string, std::size_t> seen;
    while (!seen.count(v)) {
        seen[v] = walk.size();
        walk.push_back(v);
        v = pred.at(v);
    }
    o.cycle.assign(walk.begin() + static_cast<std::ptrdiff_t>(seen[v]), walk.end());
    std::reverse(o.cycle.begin(), o.cycle.end());
    o.order.clear();
    return o;
}

// ---------------------------------------------------------------------------
// Truth-functional consequence

namespace {

class Letters {
public:
    int index(const Formula& f) {
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (alpha_equal(letters_[i], f)) return static_cast<int>(i);
        }
        letters_.push_back(f);
        if (letters_.size() > static_cast<std::size_t>(kMaxTautLetters)) {
            throw CapError("more than " + std::to_string(kMaxTautLetters) + " propositional letters");
        }
        return static_cast<int>(letters_.size() - 1);
    }

    void collect(const Formula& f) {
        switch (f.kind) {
        case Formula::Kind::Not:
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            for (const auto& s : f.subs) collect(s);
            return;
        default:
            index(f);
        }
    }

    bool eval(const Formula& f, std::uint32_t row) {
        switch (f.kind) {
        case Formula::Kind::Not:
            return !eval(f.body(), row);
        case Formula::Kind::And:
            return eval(f.left(), row) && eval(f.right(), row);
        case Formula::Kind::Or:
            return eval(f.left(), row) || eval(f.right(), row);
        case Formula::Kind::Implies:
            return !eval(f.left(), row) || eval(f.right(), row);
        default:
            return (row >> index(f)) & 1u;
        }
    }

    std::size_t size() const noexcept { return letters_.size(); }

private:
    std::vector<Formula> letters_;
};

}  // namespace

bool tautological_consequence(const std::vector<Formula>& premises, const Formula& conclusion) {
    Letters letters;
    for (const auto& p : premises) letters.collect(p);
    letters.collect(conclusion);
    const std::uint32_t rows = 1u << letters.size();
    for (std::uint32_t row = 0; row < rows; ++row) {
        bool all = std::all_of(premises.begin(), premises.end(), [&](const Formula& p) { return letters.eval(p, row); });
        if (all && !letters.eval(conclusion, row)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Checker

namespace {

std::string shape_message(const Line& l) {
    return "line " + std::to_string(l.number) + " does not follow by " + to_string(l.rule);
}

bool shape_ok(const LinearDerivation& d, const Line& l) {
    auto cited = [&](std::size_t i) -> const Formula& { return d.line(l.refs.at(i)).formula; };
    switch (l.rule) {
    case LineRule::Premise:
        return true;
    case LineRule::UI: {
        const Formula& q = cited(0);
        return q.kind == Formula::Kind::Forall && match_instance(q.body(), q.name, l.formula).has_value();
    }
    case LineRule::EG: {
        const Formula& q = l.formula;
        return q.kind == Formula::Kind::Exists && match_instance(q.body(), q.name, cited(0)).has_value();
    }
    case LineRule::ExInst: {
        const Formula& q = cited(0);
        return q.kind == Formula::Kind::Exists &&
               alpha_equal(substitute(q.body(), q.name, Term::variable(l.flag)), l.formula);
    }
    case LineRule::UG: {
        const Formula& q = l.formula;
        return q.kind == Formula::Kind::Forall &&
               alpha_equal(substitute(q.body(), q.name, Term::variable(l.flag)), cited(0));
    }
    case LineRule::TautCon: {
        std::vector<Formula> from;
        for (std::size_t i = 0; i < l.refs.size(); ++i) from.push_back(cited(i));
        return tautological_consequence(from, l.formula);
    }
    }
    return false;
}

}  // namespace

bool QuineVerdict::flagging_layer_accepts() const {
    if (!ordering.acyclic) return false;
    return std::none_of(violations.begin(), violations.end(), [](const Violation& v) {
        return v.code == "reflagged" || v.code == "flag-in-premise" || v.code == "flag-free-above" ||
               v.code == "flag-free-in-result";
    });
}

QuineVerdict check_quine(const LinearDerivation& d) {
    QuineVerdict v;
    v.flags = flag_record(d);
    std::vector<const Line*> premise_lines;
    for (const auto& l : d.lines) {
        if (l.rule == LineRule::Premise) premise_lines.push_back(&l);
    }
    std::set<std::string> flagged;
    for (const auto& l : d.lines) {
        bool ok;
        try {
            ok = shape_ok(d, l);
        } catch (const CapError& e) {
            v.violations.push_back({"tautcon-letters", l.number, e.what()});
            continue;
        }
        if (!ok) v.violations.push_back({"shape", l.number, shape_message(l)});
        if (l.flag.empty()) continue;
        const std::string& f = l.flag;
        if (!flagged.insert(f).second) {
            v.violations.push_back({"reflagged", l.number, "variable " + f + " is flagged a second time"});
        }
        for (const Line* p : premise_lines) {
            if (occurs_free(p->formula, f)) {
                v.violations.push_back({"flag-in-premise", l.number,
                                        "flagged variable " + f + " is free in premise " + std::to_string(p->number)});
                break;
            }
        }
        if (l.rule == LineRule::ExInst) {
            for (int k = 1; k < l.number; ++k) {
                if (occurs_free(d.line(k).formula, f)) {
                    v.violations.push_back({"flag-free-above", l.number,
                                            "flagged variable " + f + " is already free in line " + std::to_string(k)});
                    break;
                }
            }
        } else if (occurs_free(l.formula, f)) {
            v.violations.push_back({"flag-free-in-result", l.number, "flagged variable " + f + " stays free after UG"});
        }
    }
    v.ordering = ordering_witness(d);
    if (!v.ordering.acyclic) {
        std::string names;
        for (const auto& c : v.ordering.cycle) names += (names.empty() ? "" : ", ") + c;
        v.violations.push_back({"ordering-cycle", 0, "no ordering of the flagged variables exists: cycle {" + names + "}"});
    }
    for (const auto& [var, lines] : v.flags) {
        if (occurs_free(d.conclusion(), var)) v.pending.push_back(var);
    }
    if (!v.violations.empty()) {
        v.status = QuineStatus::Rejected;
    } else if (!v.pending.empty()) {
        v.status = QuineStatus::Unfinished;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Oracle

EntailmentVerdict entailment_oracle(const std::vector<Formula>& premises, const Formula& conclusion,
                                    const Signature& sig, int max_n, int cap) {
    Signature full = sig;
    std::set<std::string> free;
    for (const auto& p : premises) {
        collect_signature(p, full);
        for (const auto& x : free_variables(p)) free.insert(x);
    }
    collect_signature(conclusion, full);
    for (const auto& x : free_variables(conclusion)) free.insert(x);
    if (!parameters(conclusion).empty() ||
        std::any_of(premises.begin(), premises.end(), [](const Formula& p) { return !parameters(p).empty(); })) {
        throw Error("the entailment oracle takes parameter-free formulas");
    }
    std::vector<std::string> vars(free.begin(), free.end());
    EntailmentVerdict out;
    enumerate_models(
        full, max_n,
        [&](const Model& m) {
            ++out.models_checked;
            bool found = false;
            for_each_assignment(vars, m.size(), [&](const Assignment& g) {
                if (found) return;
                for (const auto& p : premises) {
                    if (!eval_classical(p, m, g)) return;
                }
                if (!eval_classical(conclusion, m, g)) {
                    found = true;
                    out.assignment = g;
                }
            });
            if (found) {
                out.entailed = false;
                out.countermodel = m;
                return false;
            }
            return true;
        },
        cap);
    return out;
}

}  // namespace dynsem::nd
