#include <algorithm>
#include <cctype>
#include <functional>
#include <regex>
#include <sstream>

#include "dynsem/error.hpp"
#include "dynsem/proofs.hpp"

namespace dynsem::nd {

namespace {

constexpr std::pair<TreeRule, std::string_view> kRuleNames[] = {
    {TreeRule::Assumption, "assume"}, {TreeRule::AndI, "AndI"}, {TreeRule::AndE, "AndE"},
    {TreeRule::ImpI, "ImpI"},         {TreeRule::ImpE, "ImpE"}, {TreeRule::OrI, "OrI"},
    {TreeRule::OrE, "OrE"},           {TreeRule::NotI, "NotI"}, {TreeRule::NotE, "NotE"},
    {TreeRule::AllI, "AllI"},         {TreeRule::AllE, "AllE"}, {TreeRule::ExI, "ExI"},
    {TreeRule::ExE, "ExE"},           {TreeRule::Reiterate, "Reit"},
};

std::size_t premise_count(TreeRule r) {
    switch (r) {
    case TreeRule::Assumption:
        return 0;
    case TreeRule::AndI:
    case TreeRule::ImpE:
    case TreeRule::NotI:
    case TreeRule::ExE:
        return 2;
    case TreeRule::OrE:
        return 3;
    default:
        return 1;
    }
}

std::size_t discharge_count(TreeRule r) {
    switch (r) {
    case TreeRule::ImpI:
    case TreeRule::NotI:
    case TreeRule::ExE:
        return 1;
    case TreeRule::OrE:
        return 2;
    default:
        return 0;
    }
}

bool has_parameter(TreeRule r) { return r == TreeRule::AllI || r == TreeRule::ExE; }

// Premise indices within which the k-th discharged label is in scope.
std::vector<std::size_t> discharge_scope(TreeRule r, std::size_t k) {
    switch (r) {
    case TreeRule::ImpI:
        return {0};
    case TreeRule::NotI:
        return {0, 1};
    case TreeRule::ExE:
        return {1};
    case TreeRule::OrE:
        return {k + 1};
    default:
        return {};
    }
}

// Premise indices in which a proper parameter is confined.
std::vector<std::size_t> parameter_scope(TreeRule r) {
    if (r == TreeRule::AllI) return {0};
    if (r == TreeRule::ExE) return {1};
    return {};
}

struct Entry {
    std::size_t indent;
    TreeNode node;
};

TreeNode parse_node(const std::string& text, std::size_t lineno) {
    auto semi = text.rfind(';');
    if (semi == std::string::npos) throw SyntaxError("expected 'FORMULA ; RULE'", lineno, 1);
    TreeNode n;
    n.source_line = lineno;
    try {
        n.formula = parse_formula(text.substr(0, semi));
    } catch (const SyntaxError& e) {
        throw SyntaxError(std::string("in formula: ") + e.what(), lineno, 1);
    }
    if (has_random_assign(n.formula) || has_epsilon(n.formula)) {
        throw MalformedError("line " + std::to_string(lineno) + ": derivations are first-order");
    }
    n.formula = mark_parameters(n.formula, free_variables(n.formula));
    std::string just = text.substr(semi + 1);
    static const std::regex assume_re(R"(^\s*\[?\s*assume(?:\s+(\d+))?\s*\]?\s*$)");
    static const std::regex rule_re(R"(^\s*([A-Za-z]+)\s*(?:\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*\))?\s*(?:\[\s*discharge\s+([0-9,\s]+)\])?\s*$)");
    std::smatch m;
    if (std::regex_match(just, m, assume_re)) {
        n.rule = TreeRule::Assumption;
        if (m[1].matched) n.label = std::stoi(m[1].str());
        if (m[1].matched && n.label == 0) throw SyntaxError("assumption labels start at 1", lineno, semi + 1);
        return n;
    }
    if (!std::regex_match(just, m, rule_re)) throw SyntaxError("bad rule annotation '" + just + "'", lineno, semi + 1);
    std::string name = m[1].str();
    auto it = std::find_if(std::begin(kRuleNames), std::end(kRuleNames), [&](const auto& p) { return p.second == name; });
    if (it == std::end(kRuleNames) || it->first == TreeRule::Assumption) {
        throw SyntaxError("unknown rule '" + name + "'", lineno, semi + 1);
    }
    n.rule = it->first;
    if (m[2].matched) n.parameter = m[2].str();
    if (m[3].matched) {
        std::string labels = m[3].str();
        std::replace(labels.begin(), labels.end(), ',', ' ');
        std::istringstream in(labels);
        int k;
        while (in >> k) n.discharges.push_back(k);
    }
    return n;
}

TreeNode build(std::vector<Entry>& entries, std::size_t& i) {
    Entry& e = entries[i++];
    TreeNode node = std::move(e.node);
    if (i < entries.size() && entries[i].indent > e.indent) {
        std::size_t child_indent = entries[i].indent;
        while (i < entries.size() && entries[i].indent > e.indent) {
            if (entries[i].indent != child_indent) {
                throw MalformedError("line " + std::to_string(entries[i].node.source_line) +
                                     ": inconsistent indentation among premises");
            }
            node.premises.push_back(build(entries, i));
        }
    }
    return node;
}

void validate(const TreeNode& n, std::vector<int>& active) {
    std::string where = "line " + std::to_string(n.source_line);
    if (n.premises.size() != premise_count(n.rule)) {
        throw MalformedError(where + ": " + to_string(n.rule) + " takes " + std::to_string(premise_count(n.rule)) +
                             " premise(s)");
    }
    if (n.discharges.size() != discharge_count(n.rule)) {
        throw MalformedError(where + ": " + to_string(n.rule) + " discharges " +
                             std::to_string(discharge_count(n.rule)) + " label(s)");
    }
    if (has_parameter(n.rule) == n.parameter.empty()) {
        throw MalformedError(where + (n.parameter.empty() ? ": rule needs a proper parameter" : ": rule takes no parameter"));
    }
    if (n.rule == TreeRule::Assumption) {
        if (n.label != 0 && std::find(active.begin(), active.end(), n.label) == active.end()) {
            throw MalformedError(where + ": dangling discharge label " + std::to_string(n.label));
        }
        return;
    }
    for (std::size_t p = 0; p < n.premises.size(); ++p) {
        std::size_t pushed = 0;
        for (std::size_t k = 0; k < n.discharges.size(); ++k) {
            auto scope = discharge_scope(n.rule, k);
            if (std::find(scope.begin(), scope.end(), p) != scope.end()) {
                active.push_back(n.discharges[k]);
                ++pushed;
            }
        }
        validate(n.premises[p], active);
        active.resize(active.size() - pushed);
    }
}

// Assumption leaves not discharged inside `n`.
void collect_open(const TreeNode& n, std::vector<int>& discharged, std::vector<const TreeNode*>& out) {
    if (n.rule == TreeRule::Assumption) {
        if (n.label == 0 || std::find(discharged.begin(), discharged.end(), n.label) == discharged.end()) {
            out.push_back(&n);
        }
        return;
    }
    for (std::size_t p = 0; p < n.premises.size(); ++p) {
        std::size_t pushed = 0;
        for (std::size_t k = 0; k < n.discharges.size(); ++k) {
            auto scope = discharge_scope(n.rule, k);
            if (std::find(scope.begin(), scope.end(), p) != scope.end()) {
                discharged.push_back(n.discharges[k]);
                ++pushed;
            }
        }
        collect_open(n.premises[p], discharged, out);
        discharged.resize(discharged.size() - pushed);
    }
}

std::vector<const TreeNode*> open_leaves(const TreeNode& n) {
    std::vector<int> discharged;
    std::vector<const TreeNode*> out;
    collect_open(n, discharged, out);
    return out;
}

class Checker {
public:
    explicit Checker(GentzenVerdict& v) : v_(v) {}

    void check(const TreeNode& n) {
        for (const auto& p : n.premises) check(p);
        rule(n);
    }

private:
    void fail(const TreeNode& n, std::string code, std::string message) {
        v_.violations.push_back({std::move(code), static_cast<int>(n.source_line),
                                 "line " + std::to_string(n.source_line) + ": " + std::move(message)});
    }

    void shape(const TreeNode& n) { fail(n, "shape", render(n.formula) + " does not follow by " + to_string(n.rule)); }

    // Assumptions with `label` open in premise p must be `expected`.
    void discharged(const TreeNode& n, std::size_t p, int label, const Formula& expected) {
        for (const TreeNode* leaf : open_leaves(n.premises[p])) {
            if (leaf->label == label && !alpha_equal(leaf->formula, expected)) {
                fail(*leaf, "discharge-mismatch",
                     "assumption " + std::to_string(label) + " should be " + render(expected));
            }
        }
    }

    void rule(const TreeNode& n) {
        const Formula& c = n.formula;
        auto prem = [&](std::size_t i) -> const Formula& { return n.premises[i].formula; };
        switch (n.rule) {
        case TreeRule::Assumption:
            return;
        case TreeRule::AndI:
            if (!alpha_equal(c, Formula::conjunction(prem(0), prem(1)))) shape(n);
            return;
        case TreeRule::AndE:
            if (prem(0).kind != Formula::Kind::And ||
                !(alpha_equal(c, prem(0).left()) || alpha_equal(c, prem(0).right()))) {
                shape(n);
            }
            return;
        case TreeRule::ImpI:
            if (c.kind != Formula::Kind::Implies || !alpha_equal(c.right(), prem(0))) {
                shape(n);
                return;
            }
            discharged(n, 0, n.discharges[0], c.left());
            return;
        case TreeRule::ImpE: {
            auto fits = [&](const Formula& a, const Formula& imp) {
                return imp.kind == Formula::Kind::Implies && alpha_equal(imp.left(), a) && alpha_equal(imp.right(), c);
            };
            if (!fits(prem(0), prem(1)) && !fits(prem(1), prem(0))) shape(n);
            return;
        }
        case TreeRule::OrI:
            if (c.kind != Formula::Kind::Or || !(alpha_equal(c.left(), prem(0)) || alpha_equal(c.right(), prem(0)))) {
                shape(n);
            }
            return;
        case TreeRule::OrE:
            if (prem(0).kind != Formula::Kind::Or || !alpha_equal(prem(1), c) || !alpha_equal(prem(2), c)) {
                shape(n);
                return;
            }
            discharged(n, 1, n.discharges[0], prem(0).left());
            discharged(n, 2, n.discharges[1], prem(0).right());
            return;
        case TreeRule::NotI:
            if (c.kind != Formula::Kind::Not || !alpha_equal(prem(1), Formula::negation(prem(0)))) {
                shape(n);
                return;
            }
            discharged(n, 0, n.discharges[0], c.body());
            discharged(n, 1, n.discharges[0], c.body());
            return;
        case TreeRule::NotE:
            if (prem(0).kind != Formula::Kind::Not || prem(0).body().kind != Formula::Kind::Not ||
                !alpha_equal(prem(0).body().body(), c)) {
                shape(n);
            }
            return;
        case TreeRule::AllE:
            if (prem(0).kind != Formula::Kind::Forall || !match_instance(prem(0).body(), prem(0).name, c)) shape(n);
            return;
        case TreeRule::ExI:
            if (c.kind != Formula::Kind::Exists || !match_instance(c.body(), c.name, prem(0))) shape(n);
            return;
        case TreeRule::AllI: {
            const Term a = Term::parameter(n.parameter);
            if (c.kind != Formula::Kind::Forall || !alpha_equal(substitute(c.body(), c.name, a), prem(0))) {
                shape(n);
                return;
            }
            if (occurs_parameter(c, n.parameter)) {
                fail(n, "parameter-escapes", "proper parameter " + n.parameter + " occurs in the conclusion");
            }
            for (const TreeNode* leaf : open_leaves(n.premises[0])) {
                if (occurs_parameter(leaf->formula, n.parameter)) {
                    fail(n, "parameter-in-assumption",
                         "proper parameter " + n.parameter + " occurs in open assumption " + render(leaf->formula));
                }
            }
            return;
        }
        case TreeRule::ExE: {
            const Formula& ex = prem(0);
            if (ex.kind != Formula::Kind::Exists || !alpha_equal(prem(1), c)) {
                shape(n);
                return;
            }
            const int label = n.discharges[0];
            discharged(n, 1, label, substitute(ex.body(), ex.name, Term::parameter(n.parameter)));
            if (occurs_parameter(c, n.parameter)) {
                fail(n, "parameter-escapes", "proper parameter " + n.parameter + " occurs in the conclusion");
            }
            if (occurs_parameter(ex, n.parameter)) {
                fail(n, "parameter-in-premise", "proper parameter " + n.parameter + " occurs in the existential premise");
            }
            for (const TreeNode* leaf : open_leaves(n.premises[1])) {
                if (leaf->label == label) continue;
                if (occurs_parameter(leaf->formula, n.parameter)) {
                    fail(n, "parameter-in-assumption",
                         "proper parameter " + n.parameter + " occurs in open assumption " + render(leaf->formula));
                }
            }
            return;
        }
        case TreeRule::Reiterate:
            if (!alpha_equal(c, prem(0))) shape(n);
            return;
        }
    }

    GentzenVerdict& v_;
};

void walk(const TreeNode& n, const std::function<void(const TreeNode&)>& f) {
    f(n);
    for (const auto& p : n.premises) walk(p, f);
}

// Whether `name` occurs anywhere outside the scopes of the applications
// that use it as their proper parameter.
bool occurs_outside_scopes(const TreeNode& n, const std::string& name) {
    if (occurs_parameter(n.formula, name)) return true;
    auto scope = n.parameter == name ? parameter_scope(n.rule) : std::vector<std::size_t>{};
    for (std::size_t p = 0; p < n.premises.size(); ++p) {
        if (std::find(scope.begin(), scope.end(), p) != scope.end()) continue;
        if (occurs_outside_scopes(n.premises[p], name)) return true;
    }
    return false;
}

void rename_in(TreeNode& n, const std::string& from, const std::string& to) {
    n.formula = replace_parameter(n.formula, from, Term::parameter(to));
    if (n.parameter == from) n.parameter = to;
    for (auto& p : n.premises) rename_in(p, from, to);
}

void collect_applications(TreeNode& n, std::vector<TreeNode*>& out) {
    if (has_parameter(n.rule)) out.push_back(&n);
    for (auto& p : n.premises) collect_applications(p, out);
}

void collect_names(const Formula& f, std::set<std::string>& out) {
    for (const auto& p : parameters(f)) out.insert(p);
    for (const auto& v : all_variables(f)) out.insert(v);
}

}  // namespace

std::string to_string(TreeRule r) {
    for (const auto& [rule, name] : kRuleNames) {
        if (rule == r) return std::string(name);
    }
    return "?";
}

TreeDerivation parse_tree(std::string_view text) {
    TreeDerivation d;
    std::vector<Entry> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::size_t indent = 0;
        while (indent < raw.size() && raw[indent] == ' ') ++indent;
        if (indent < raw.size() && raw[indent] == '\t') throw SyntaxError("tabs are not allowed for indentation", lineno, indent + 1);
        std::string rest = raw.substr(indent);
        while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.pop_back();
        if (rest.empty()) continue;
        if (rest[0] == '#') {
            auto pos = rest.find("expect:");
            if (pos != std::string::npos) {
                std::string v = rest.substr(pos + 7);
                v.erase(0, v.find_first_not_of(' '));
                d.expect = v;
            }
            continue;
        }
        entries.push_back(Entry{indent, parse_node(rest, lineno)});
    }
    if (entries.empty()) throw MalformedError("derivation has no nodes");
    std::size_t i = 0;
    d.root = build(entries, i);
    if (i != entries.size()) {
        throw MalformedError("line " + std::to_string(entries[i].node.source_line) + ": more than one root");
    }
    std::vector<int> active;
    validate(d.root, active);
    return d;
}

std::string render(const TreeDerivation& d) {
    std::ostringstream os;
    if (!d.expect.empty()) os << "# expect: " << d.expect << '\n';
    std::function<void(const TreeNode&, std::size_t)> emit = [&](const TreeNode& n, std::size_t depth) {
        os << std::string(2 * depth, ' ') << render(n.formula) << " ; ";
        if (n.rule == TreeRule::Assumption) {
            os << "assume";
            if (n.label) os << ' ' << n.label;
        } else {
            os << to_string(n.rule);
            if (!n.parameter.empty()) os << '(' << n.parameter << ')';
            if (!n.discharges.empty()) {
                os << " [discharge ";
                for (std::size_t k = 0; k < n.discharges.size(); ++k) os << (k ? "," : "") << n.discharges[k];
                os << ']';
            }
        }
        os << '\n';
        for (const auto& p : n.premises) emit(p, depth + 1);
    };
    emit(d.root, 0);
    return os.str();
}

std::vector<Formula> open_assumptions(const TreeNode& n) {
    std::vector<Formula> out;
    for (const TreeNode* leaf : open_leaves(n)) out.push_back(leaf->formula);
    return out;
}

GentzenVerdict check_gentzen(const TreeDerivation& d) {
    std::vector<int> active;
    validate(d.root, active);
    GentzenVerdict v;
    Checker(v).check(d.root);
    v.conclusion = d.root.formula;
    v.assumptions = open_assumptions(d.root);
    if (!parameters(v.conclusion).empty()) {
        v.violations.push_back({"parameter-in-conclusion", static_cast<int>(d.root.source_line),
                                "the conclusion " + render(v.conclusion) + " is not a sentence"});
    }
    for (const TreeNode* leaf : open_leaves(d.root)) {
        if (!parameters(leaf->formula).empty()) {
            v.violations.push_back({"parameter-in-open-assumption", static_cast<int>(leaf->source_line),
                                    "the open assumption " + render(leaf->formula) + " is not a sentence"});
        }
    }
    walk(d.root, [&](const TreeNode& n) {
        if (has_parameter(n.rule)) ++v.proper_parameters[n.parameter];
    });
    for (const auto& [name, uses] : v.proper_parameters) {
        if (uses != 1 || occurs_outside_scopes(d.root, name)) v.pure = false;
    }
    v.accepted = v.violations.empty();
    return v;
}

TreeDerivation purify(const TreeDerivation& d) {
    if (!check_gentzen(d).accepted) throw Error("purify needs an accepted derivation");
    TreeDerivation out = d;
    std::vector<TreeNode*> apps;
    collect_applications(out.root, apps);
    std::set<std::string> used;
    walk(out.root, [&](const TreeNode& n) { collect_names(n.formula, used); });
    for (const TreeNode* a : apps) used.insert(a->parameter);
    std::set<std::string> claimed;
    std::vector<std::string> target(apps.size());
    for (std::size_t i = 0; i < apps.size(); ++i) {
        const std::string& name = apps[i]->parameter;
        if (!claimed.count(name) && !occurs_outside_scopes(out.root, name)) {
            claimed.insert(name);
            target[i] = name;
        } else {
            target[i] = fresh_name(name, used);
            used.insert(target[i]);
        }
    }
    // Innermost applications first, so an outer renaming never touches an
    // inner application's new name.
    for (std::size_t i = apps.size(); i-- > 0;) {
        TreeNode& app = *apps[i];
        const std::string from = app.parameter;
        if (target[i] == from) continue;
        app.parameter = target[i];
        for (std::size_t p : parameter_scope(app.rule)) rename_in(app.premises[p], from, target[i]);
    }
    return out;
}

}  // namespace dynsem::nd
