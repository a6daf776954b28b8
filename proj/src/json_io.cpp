#include "dynsem/json_io.hpp"

#include "dynsem/error.hpp"

namespace dynsem {

namespace {

std::vector<int> tuple_of(std::size_t code, int arity, int n) {
    std::vector<int> args(static_cast<std::size_t>(arity));
    for (int i = arity - 1; i >= 0; --i) {
        args[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::size_t>(n));
        code /= static_cast<std::size_t>(n);
    }
    return args;
}

int element(const json& v, int n, const std::string& where) {
    if (!v.is_number_integer()) throw Error(where + ": expected an integer");
    int x = v.get<int>();
    if (x < 0 || x >= n) throw Error(where + ": element " + std::to_string(x) + " is outside the domain");
    return x;
}

int arity_of(const json& entry, const std::string& name) {
    if (!entry.is_object() || !entry.contains("arity") || !entry["arity"].is_number_integer()) {
        throw Error("symbol '" + name + "' needs an integer arity");
    }
    int a = entry["arity"].get<int>();
    if (a < 0) throw Error("symbol '" + name + "' has a negative arity");
    return a;
}

}  // namespace

json to_json(const Model& m) {
    json j;
    j["domain"] = m.size();
    json preds = json::object();
    for (const auto& t : m.predicates()) {
        preds[t.name] = {{"arity", t.arity}, {"tuples", m.extension(t.name)}};
    }
    j["predicates"] = preds;
    json funcs = json::object();
    for (const auto& t : m.functions()) {
        json rows = json::array();
        for (std::size_t code = 0; code < t.cells.size(); ++code) {
            auto row = tuple_of(code, t.arity, m.size());
            row.push_back(t.cells[code]);
            rows.push_back(row);
        }
        funcs[t.name] = {{"arity", t.arity}, {"table", rows}};
    }
    j["functions"] = funcs;
    return j;
}

Model model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("domain")) throw Error("model: missing 'domain'");
    if (!j["domain"].is_number_integer() || j["domain"].get<int>() < 1) throw Error("model: domain must be a positive integer");
    const int n = j["domain"].get<int>();
    if (n > default_domain_cap()) {
        throw CapError("model: domain " + std::to_string(n) + " exceeds the cap " + std::to_string(default_domain_cap()));
    }
    Signature sig;
    const json preds = j.value("predicates", json::object());
    const json funcs = j.value("functions", json::object());
    for (const auto& [name, entry] : preds.items()) sig.add_predicate(name, arity_of(entry, name));
    for (const auto& [name, entry] : funcs.items()) sig.add_function(name, arity_of(entry, name));
    Model m(sig, n);
    for (const auto& [name, entry] : preds.items()) {
        const int arity = arity_of(entry, name);
        for (const auto& tuple : entry.value("tuples", json::array())) {
            if (!tuple.is_array() || static_cast<int>(tuple.size()) != arity) {
                throw Error("predicate '" + name + "': tuple of the wrong length");
            }
            std::vector<int> args;
            for (const auto& v : tuple) args.push_back(element(v, n, "predicate '" + name + "'"));
            m.set(name, args);
        }
    }
    for (const auto& [name, entry] : funcs.items()) {
        const int arity = arity_of(entry, name);
        for (const auto& row : entry.value("table", json::array())) {
            if (!row.is_array() || static_cast<int>(row.size()) != arity + 1) {
                throw Error("function '" + name + "': row of the wrong length");
            }
            std::vector<int> args;
            for (int i = 0; i < arity; ++i) args.push_back(element(row[static_cast<std::size_t>(i)], n, "function '" + name + "'"));
            m.define(name, args, element(row.back(), n, "function '" + name + "'"));
        }
    }
    return m;
}

json to_json(const Assignment& g) {
    json j = json::object();
    for (std::size_t i = 0; i < g.variables().size(); ++i) j[g.variables()[i]] = g.values()[i];
    return j;
}

json to_json(const ChoiceFunction& c) { return {{"domain", c.domain_size()}, {"choices", c.choices()}}; }

ChoiceFunction choice_from_json(const json& j) {
    if (!j.is_object() || !j.contains("domain") || !j.contains("choices")) {
        throw Error("choice function: expected 'domain' and 'choices'");
    }
    if (!j["domain"].is_number_integer() || !j["choices"].is_array()) throw Error("choice function: bad field types");
    std::vector<int> choices;
    for (const auto& v : j["choices"]) {
        if (!v.is_number_integer()) throw Error("choice function: choices must be integers");
        choices.push_back(v.get<int>());
    }
    return ChoiceFunction(j["domain"].get<int>(), std::move(choices));
}

json to_json(const drt::DRS& d) {
    json conds = json::array();
    for (const auto& c : d.conditions) conds.push_back(drt::render(c));
    return {{"markers", d.markers}, {"conditions", conds}};
}

json to_json(const nd::Violation& v) { return {{"code", v.code}, {"line", v.line}, {"message", v.message}}; }

json to_json(const nd::QuineVerdict& v) {
    json j;
    j["verdict"] = nd::to_string(v.status);
    json violations = json::array();
    for (const auto& x : v.violations) violations.push_back(to_json(x));
    j["violations"] = violations;
    json flags = json::object();
    for (const auto& [var, lines] : v.flags) flags[var] = lines;
    j["flags"] = flags;
    if (v.ordering.acyclic) {
        j["order"] = v.ordering.order;
    } else {
        j["cycle"] = v.ordering.cycle;
    }
    j["pending"] = v.pending;
    return j;
}

json to_json(const nd::GentzenVerdict& v) {
    json j;
    j["verdict"] = v.accepted ? "accepted" : "rejected";
    j["pure"] = v.pure;
    json violations = json::array();
    for (const auto& x : v.violations) violations.push_back(to_json(x));
    j["violations"] = violations;
    j["proper_parameters"] = v.proper_parameters;
    json assumptions = json::array();
    for (const auto& a : v.assumptions) assumptions.push_back(render(a));
    j["assumptions"] = assumptions;
    j["conclusion"] = render(v.conclusion);
    return j;
}

json to_json(const eps::Disabbreviation& d) {
    json j;
    j["ok"] = d.ok;
    if (d.ok) {
        json terms = json::object();
        for (const auto& [v, t] : d.solution.terms) terms[v] = render(t);
        j["solution"] = terms;
        j["order"] = d.solution.order;
    } else {
        j["failure"] = eps::to_string(d.failure);
        j["variables"] = d.variables;
        j["message"] = d.message;
    }
    return j;
}

}  // namespace dynsem
