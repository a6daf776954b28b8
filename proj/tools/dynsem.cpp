// Command-line front end. Exit codes: 0 success or positive verdict,
// 1 negative verdict, 2 usage or input error.

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynsem/dpl.hpp"
#include "dynsem/drt.hpp"
#include "dynsem/epsilon.hpp"
#include "dynsem/error.hpp"
#include "dynsem/json_io.hpp"
#include "dynsem/proofs.hpp"
#include "dynsem/storelang.hpp"

using namespace dynsem;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Formula files may carry '#' comment lines.
std::string strip_comments(const std::string& text) {
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
        auto start = line.find_first_not_of(" \t");
        if (start != std::string::npos && line[start] == '#') continue;
        out += line + '\n';
    }
    return out;
}

Formula read_formula(const std::string& path, const Signature* sig = nullptr) {
    return parse_formula(strip_comments(read_file(path)), sig);
}

// "P/1,R/2,c/0": names starting with a lowercase letter are functions.
Signature parse_signature(const std::string& text) {
    Signature sig;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto slash = item.find('/');
        if (slash == std::string::npos || slash == 0) throw Error("bad signature entry '" + item + "'");
        std::string name = item.substr(0, slash);
        int arity = 0;
        try {
            arity = std::stoi(item.substr(slash + 1));
        } catch (const std::exception&) {
            throw Error("bad arity in '" + item + "'");
        }
        if (std::islower(static_cast<unsigned char>(name[0]))) {
            sig.add_function(name, arity);
        } else {
            sig.add_predicate(name, arity);
        }
    }
    return sig;
}

Assignment parse_assignment(const std::vector<std::string>& universe, const std::vector<std::string>& pairs, int n) {
    Assignment g(universe);
    for (const auto& p : pairs) {
        auto eq = p.find('=');
        if (eq == std::string::npos) throw Error("expected VAR=VALUE, got '" + p + "'");
        std::string var = p.substr(0, eq);
        int value = 0;
        try {
            value = std::stoi(p.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error("bad value in '" + p + "'");
        }
        if (!g.has(var)) throw Error("variable '" + var + "' does not occur in the formula");
        if (value < 0 || value >= n) throw Error("value " + std::to_string(value) + " is outside the domain");
        g.set(var, value);
    }
    return g;
}

struct Output {
    bool json_mode = false;
    json doc = json::object();

    void text(const std::string& line) const {
        if (!json_mode) std::cout << line << '\n';
    }
    int finish(int code) const {
        if (json_mode) std::cout << doc.dump(2) << '\n';
        return code;
    }
};

// ---- dpl ----

struct DplOptions {
    std::string first, second, model;
    std::vector<std::string> assign;
    int max_n = 2;
    int depth = 1;
    int size = 5;
    std::string signature = "P/1,R/2";
};

int dpl_truth_cmd(const DplOptions& o, Output& out) {
    Model m = model_from_json(json::parse(read_file(o.model)));
    Formula f = read_formula(o.first, &m.signature());
    auto universe = dpl::universe_of({f});
    Assignment g = parse_assignment(universe, o.assign, m.size());
    bool truth = dpl::dpl_truth(f, m, g);
    auto outputs = dpl::dpl_outputs(f, m, g);
    out.doc["formula"] = render(f);
    out.doc["input"] = to_json(g);
    out.doc["truth"] = truth;
    out.doc["outputs"] = json::array();
    for (const auto& h : outputs) out.doc["outputs"].push_back(to_json(h));
    out.text(truth ? "true" : "false");
    for (const auto& h : outputs) out.text("  output " + describe(h));
    return out.finish(truth ? kOk : kNegative);
}

std::pair<Formula, Formula> read_pair(const DplOptions& o, Signature& sig) {
    Formula a = read_formula(o.first);
    Formula b = read_formula(o.second);
    collect_signature(a, sig);
    collect_signature(b, sig);
    return {resolve_constants(a, sig), resolve_constants(b, sig)};
}

int dpl_equiv_cmd(const DplOptions& o, Output& out) {
    Signature sig;
    auto [a, b] = read_pair(o, sig);
    auto v = dpl::dpl_equivalent(a, b, sig, o.max_n);
    out.doc["equivalent"] = v.equal;
    out.doc["universe"] = v.universe;
    out.doc["models_checked"] = v.models_checked;
    if (!v.equal) {
        out.doc["model"] = to_json(*v.model);
        out.doc["input"] = to_json(*v.input);
        out.doc["output"] = to_json(*v.output);
        out.doc["only_in"] = v.in_first ? "first" : "second";
    }
    if (v.equal) {
        out.text("equivalent (" + std::to_string(v.models_checked) + " models)");
    } else {
        out.text("inequivalent");
        out.text("model: " + describe(*v.model));
        out.text("pair " + describe(*v.input) + " -> " + describe(*v.output) + " only in the " +
                 (v.in_first ? "first" : "second") + " formula");
    }
    return out.finish(v.equal ? kOk : kNegative);
}

int dpl_context_cmd(const DplOptions& o, Output& out) {
    Signature sig;
    auto [a, b] = read_pair(o, sig);
    auto v = dpl::contextual_equivalent(a, b, sig, o.max_n, o.depth);
    out.doc["equivalent"] = v.equal;
    out.doc["universe"] = v.universe;
    out.doc["contexts_checked"] = v.contexts_checked;
    if (!v.equal) {
        out.doc["context"] = render(*v.context);
        out.doc["model"] = to_json(*v.model);
        out.doc["input"] = to_json(*v.input);
        out.doc["first_truth"] = v.first_truth;
        out.doc["second_truth"] = v.second_truth;
    }
    if (v.equal) {
        out.text("contextually equivalent (" + std::to_string(v.contexts_checked) + " contexts)");
    } else {
        out.text("distinguished by " + render(*v.context));
        out.text("model: " + describe(*v.model));
        out.text("input " + describe(*v.input) + ": " + (v.first_truth ? "true" : "false") + " vs " +
                 (v.second_truth ? "true" : "false"));
    }
    return out.finish(v.equal ? kOk : kNegative);
}

int dpl_abstraction_cmd(const DplOptions& o, Output& out) {
    Signature sig = parse_signature(o.signature);
    auto r = dpl::abstraction_report(sig, o.max_n, o.depth, o.size);
    out.doc["formulas"] = r.formulas;
    out.doc["contexts"] = r.contexts;
    out.doc["models"] = r.models;
    out.doc["total_pairs"] = r.total_pairs;
    out.doc["denotation_classes"] = r.denotation_classes;
    out.doc["behavior_classes"] = r.behavior_classes;
    json violations = json::array();
    for (const auto& [a, b] : r.correctness_violations) violations.push_back(json::array({render(a), render(b)}));
    out.doc["correctness_violations"] = violations;
    json groups = json::array();
    for (const auto& g : r.candidate_groups) {
        json classes = json::array();
        for (const auto& cls : g) {
            json members = json::array();
            for (const auto& f : cls) members.push_back(render(f));
            classes.push_back(members);
        }
        groups.push_back(classes);
    }
    out.doc["candidate_groups"] = groups;
    out.doc["candidate_pairs"] = r.candidate_pairs;
    out.text(std::to_string(r.formulas) + " formulas, " + std::to_string(r.contexts) + " contexts, " +
             std::to_string(r.models) + " models");
    out.text("denotation classes " + std::to_string(r.denotation_classes) + ", behavior classes " +
             std::to_string(r.behavior_classes));
    out.text("correctness violations: " + std::to_string(r.correctness_violations.size()));
    for (const auto& [a, b] : r.correctness_violations) out.text("  " + render(a) + "  vs  " + render(b));
    out.text("full-abstraction candidates: " + std::to_string(r.candidate_pairs) + " pairs");
    for (const auto& g : r.candidate_groups) {
        std::string line = " ";
        for (const auto& cls : g) line += " {" + render(cls.front()) + (cls.size() > 1 ? ", ...}" : "}");
        out.text(line);
    }
    return out.finish(r.correctness_violations.empty() ? kOk : kNegative);
}

// ---- imp ----

struct ImpOptions {
    std::string program;
    std::string policy = "lexical";
    int bound = 1;
    int fuel = 1000;
    bool gc = false;
    bool trace = false;
    std::string pre = "true", post = "true";
};

std::string list(const std::vector<std::int64_t>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + std::to_string(xs[i]);
    return s + "]";
}

std::string locations(const std::set<imp::Location>& ls) {
    std::string s = "{";
    bool first = true;
    for (auto l : ls) {
        s += (first ? "" : ", ") + std::to_string(l);
        first = false;
    }
    return s + "}";
}

int imp_run_cmd(const ImpOptions& o, Output& out) {
    imp::Program p = imp::parse_program(read_file(o.program));
    imp::RunOptions ro;
    ro.policy = imp::parse_policy(o.policy);
    ro.value_bound = o.bound;
    ro.fuel = o.fuel;
    ro.gc_every_step = o.gc;
    auto traces = imp::run(p, ro);
    bool finished = true;
    out.doc["policy"] = imp::to_string(ro.policy);
    out.doc["branches"] = json::array();
    for (const auto& t : traces) {
        finished = finished && t.status == imp::Status::Finished;
        json b = {{"output", t.output}, {"status", imp::to_string(t.status)}, {"steps", t.states.size()}};
        if (o.trace) {
            json allocs = json::array();
            for (const auto& s : t.states) allocs.push_back(s.allocated);
            b["allocated"] = allocs;
        }
        out.doc["branches"].push_back(b);
        out.text(list(t.output) + (t.status == imp::Status::Finished ? "" : "  (fuel exhausted)"));
        if (o.trace) {
            for (std::size_t i = 0; i < t.states.size(); ++i) {
                out.text("  " + std::to_string(i) + ": allocated " + locations(t.states[i].allocated));
            }
        }
    }
    return out.finish(finished ? kOk : kNegative);
}

int imp_hoare_cmd(const ImpOptions& o, Output& out) {
    auto t = imp::make_triple(o.pre, read_file(o.program), o.post);
    auto v = imp::check_partial_correctness(t, o.bound, o.fuel);
    out.doc["holds"] = v.holds;
    out.doc["globals"] = t.globals;
    out.doc["initial_stores"] = v.initial_stores;
    out.doc["terminated"] = v.terminated;
    out.doc["exhausted"] = v.exhausted;
    if (!v.holds) {
        out.doc["counterexample"] = {{"initial", v.initial}, {"final", v.final_values}, {"output", v.output}};
    }
    if (v.holds) {
        out.text("holds (" + std::to_string(v.initial_stores) + " initial stores, " + std::to_string(v.terminated) +
                 " terminating branches, " + std::to_string(v.exhausted) + " out of fuel)");
    } else {
        auto show = [](const std::map<std::string, std::int64_t>& m) {
            std::string s;
            for (const auto& [k, x] : m) s += (s.empty() ? "" : ", ") + k + "=" + std::to_string(x);
            return s;
        };
        out.text("counterexample: initial " + show(v.initial) + ", final " + show(v.final_values));
    }
    return out.finish(v.holds ? kOk : kNegative);
}

// ---- drt ----

struct DrtOptions {
    std::string discourse, lexicon, contexts;
    std::string first, second;
};

int drt_run_cmd(const DrtOptions& o, Output& out) {
    auto lex = drt::parse_lexicon(read_file(o.lexicon));
    try {
        drt::DRS d = drt::run_discourse(read_file(o.discourse), lex);
        out.doc["drs"] = to_json(d);
        out.text(drt::render(d));
        return out.finish(kOk);
    } catch (const drt::UnresolvedPronoun& e) {
        out.doc["unresolved"] = e.what();
        out.text(std::string("unresolved pronoun: ") + e.what());
        return out.finish(kNegative);
    }
}

json observation_json(const drt::Observation& obs) {
    if (obs.drs) return {{"drs", to_json(*obs.drs)}};
    return {{"unresolved_sentence", obs.unresolved_sentence}, {"message", obs.message}};
}

std::string observation_text(const drt::Observation& obs) {
    if (obs.drs) return drt::render(*obs.drs);
    return "unresolved pronoun in sentence " + std::to_string(obs.unresolved_sentence);
}

int drt_equiv_cmd(const DrtOptions& o, Output& out) {
    auto lex = drt::parse_lexicon(read_file(o.lexicon));
    std::vector<drt::TextContext> contexts =
        o.contexts.empty() ? std::vector<drt::TextContext>{drt::TextContext{}} : drt::parse_text_contexts(read_file(o.contexts));
    auto v = drt::sentence_equivalent(o.first, o.second, contexts, lex);
    out.doc["equivalent"] = v.equivalent;
    out.doc["contexts_checked"] = v.contexts_checked;
    if (!v.equivalent) {
        out.doc["context"] = contexts.at(*v.context).render();
        out.doc["first"] = observation_json(v.first);
        out.doc["second"] = observation_json(v.second);
        out.text("distinguished by context " + contexts.at(*v.context).render());
        out.text("  first:  " + observation_text(v.first));
        out.text("  second: " + observation_text(v.second));
    } else {
        out.text("equivalent (" + std::to_string(v.contexts_checked) + " contexts)");
    }
    return out.finish(v.equivalent ? kOk : kNegative);
}

// ---- nd ----

struct NdOptions {
    std::string file;
    int max_n = 3;
};

int nd_quine_cmd(const NdOptions& o, Output& out) {
    auto d = nd::parse_linear(read_file(o.file));
    auto v = nd::check_quine(d);
    out.doc.update(to_json(v));
    out.text(nd::to_string(v.status));
    for (const auto& x : v.violations) out.text("  line " + std::to_string(x.line) + " [" + x.code + "] " + x.message);
    if (!v.ordering.acyclic) {
        std::string c;
        for (const auto& s : v.ordering.cycle) c += (c.empty() ? "" : " -> ") + s;
        out.text("  flagged-variable cycle: " + c);
    } else if (!v.ordering.order.empty()) {
        std::string c;
        for (const auto& s : v.ordering.order) c += (c.empty() ? "" : ", ") + s;
        out.text("  ordering: " + c);
    }
    for (const auto& p : v.pending) out.text("  " + p + " is still free in the last line");
    return out.finish(v.status == nd::QuineStatus::Accepted ? kOk : kNegative);
}

int nd_ordering_cmd(const NdOptions& o, Output& out) {
    auto d = nd::parse_linear(read_file(o.file));
    auto constraints = nd::ordering_constraints(d);
    auto w = nd::ordering_witness(d);
    out.doc["constraints"] = json::array();
    for (const auto& [a, b] : constraints) {
        out.doc["constraints"].push_back(json::array({a, b}));
        out.text(a + " < " + b);
    }
    out.doc["acyclic"] = w.acyclic;
    std::string joined;
    const auto& names = w.acyclic ? w.order : w.cycle;
    for (const auto& s : names) joined += (joined.empty() ? "" : w.acyclic ? ", " : " -> ") + s;
    if (w.acyclic) {
        out.doc["order"] = w.order;
        out.text("order: " + joined);
    } else {
        out.doc["cycle"] = w.cycle;
        out.text("cycle: " + joined);
    }
    return out.finish(w.acyclic ? kOk : kNegative);
}

int nd_gentzen_cmd(const NdOptions& o, Output& out) {
    auto d = nd::parse_tree(read_file(o.file));
    auto v = nd::check_gentzen(d);
    out.doc.update(to_json(v));
    out.text(std::string(v.accepted ? "accepted" : "rejected") + (v.accepted ? (v.pure ? " pure" : " impure") : ""));
    for (const auto& x : v.violations) out.text("  line " + std::to_string(x.line) + " [" + x.code + "] " + x.message);
    return out.finish(v.accepted ? kOk : kNegative);
}

int nd_purify_cmd(const NdOptions& o, Output& out) {
    auto d = nd::parse_tree(read_file(o.file));
    auto before = nd::check_gentzen(d);
    if (!before.accepted) {
        out.doc.update(to_json(before));
        out.text("rejected; nothing to purify");
        for (const auto& x : before.violations) out.text("  line " + std::to_string(x.line) + " [" + x.code + "] " + x.message);
        return out.finish(kNegative);
    }
    auto p = nd::purify(d);
    auto after = nd::check_gentzen(p);
    p.expect = after.pure ? "accepted pure" : "accepted impure";
    out.doc["derivation"] = nd::render(p);
    out.doc["verdict"] = to_json(after);
    out.text(nd::render(p));
    return out.finish(kOk);
}

int nd_entails_cmd(const NdOptions& o, Output& out) {
    auto d = nd::parse_linear(read_file(o.file));
    std::vector<Formula> premises = d.premises();
    Signature sig;
    for (const auto& p : premises) collect_signature(p, sig);
    collect_signature(d.conclusion(), sig);
    auto v = nd::entailment_oracle(premises, d.conclusion(), sig, o.max_n);
    out.doc["entailed"] = v.entailed;
    out.doc["models_checked"] = v.models_checked;
    if (!v.entailed) {
        out.doc["countermodel"] = to_json(*v.countermodel);
        if (v.assignment) out.doc["assignment"] = to_json(*v.assignment);
        out.text("not entailed; countermodel " + describe(*v.countermodel));
    } else {
        out.text("entailed (" + std::to_string(v.models_checked) + " models)");
    }
    return out.finish(v.entailed ? kOk : kNegative);
}

// ---- eps ----

struct EpsOptions {
    std::string file, witness, model, choice;
    int max_n = 3;
    int depth = 2;
    int size = 7;
    std::string signature = "P/1,R/2";
};

int eps_translate_cmd(const EpsOptions& o, Output& out) {
    Formula f = read_formula(o.file);
    Formula t = eps::eps_translate(f);
    out.doc["formula"] = render(f);
    out.doc["translation"] = render(t);
    out.text(render(t));
    return out.finish(kOk);
}

int eps_disabbrev_cmd(const EpsOptions& o, Output& out) {
    auto r = eps::disabbreviate(nd::parse_linear(read_file(o.file)));
    out.doc.update(to_json(r));
    if (r.ok) {
        for (const auto& v : r.solution.order) out.text(v + " := " + render(r.solution.terms.at(v)));
    } else {
        out.text("failed (" + eps::to_string(r.failure) + "): " + r.message);
    }
    return out.finish(r.ok ? kOk : kNegative);
}

int eps_conservativity_cmd(const EpsOptions& o, Output& out) {
    Signature sig = parse_signature(o.signature);
    auto family = eps::sentence_family(sig, o.depth, o.size);
    auto r = eps::conservativity_scan(family, sig, o.max_n);
    out.doc["sentences"] = r.sentences;
    out.doc["models"] = r.models;
    out.doc["combinations"] = r.combinations;
    out.doc["branches"] = r.branches;
    out.doc["mismatches"] = r.mismatches;
    if (r.first_mismatch) {
        out.doc["first_mismatch"] = {{"sentence", render(r.first_mismatch->sentence)},
                                     {"model", to_json(r.first_mismatch->model)},
                                     {"classical", r.first_mismatch->classical}};
    }
    out.text(std::to_string(r.sentences) + " sentences, " + std::to_string(r.models) + " models, " +
             std::to_string(r.combinations) + " combinations, " + std::to_string(r.mismatches) + " mismatches");
    if (r.first_mismatch) out.text("first mismatch: " + render(r.first_mismatch->sentence));
    return out.finish(r.mismatches == 0 ? kOk : kNegative);
}

int eps_axiom_cmd(const EpsOptions& o, Output& out) {
    Model m = model_from_json(json::parse(read_file(o.model)));
    Formula a = read_formula(o.file, &m.signature());
    Term w = parse_term(o.witness, &m.signature());
    auto free = free_variables(a);
    if (free.size() != 1) throw Error("the matrix must have exactly one free variable");
    const std::string var = *free.begin();
    out.doc["matrix"] = render(a);
    out.doc["witness"] = render(w);
    if (!o.choice.empty()) {
        ChoiceFunction c = choice_from_json(json::parse(read_file(o.choice)));
        if (c.domain_size() != m.size()) throw Error("choice function and model have different domains");
        bool holds = eps::check_eps_axiom(m, c, a, w);
        out.doc["intended"] = c.intended();
        out.doc["holds"] = holds;
        out.text(std::string(holds ? "holds" : "fails") + " (choice function " + (c.intended() ? "" : "not ") + "intended)");
        return out.finish(holds ? kOk : kNegative);
    }
    std::uint64_t failing = 0;
    std::uint64_t total = 0;
    for_each_choice_branch(
        m.size(), [&](ChoiceSource& c) { return eps::check_eps_axiom(m, c, a, var, w); },
        [&](bool holds, std::uint64_t weight) {
            total += weight;
            if (!holds) failing += weight;
        });
    out.doc["intended_functions"] = total;
    out.doc["failing"] = failing;
    out.doc["holds"] = failing == 0;
    out.text(failing == 0 ? "holds under all " + std::to_string(total) + " intended choice functions"
                          : "fails under " + std::to_string(failing) + " of " + std::to_string(total) +
                                " intended choice functions");
    return out.finish(failing == 0 ? kOk : kNegative);
}

// ---- ladder ----

int ladder_cmd(Output& out) {
    struct Rung {
        const char* notion;
        const char* module;
    };
    const Rung rungs[] = {
        {"semantic scope of a noun phrase or quantifier", "dpl, drt"},
        {"scope of a program variable", "storelang"},
        {"extent of an identifier", "storelang"},
        {"interpretation of a parameter or flagged variable", "proofs"},
        {"matrix of an epsilon term", "epsilon"},
    };
    out.doc["ladder"] = json::array();
    int i = 1;
    for (const auto& r : rungs) {
        out.doc["ladder"].push_back({{"notion", r.notion}, {"module", r.module}});
        out.text(std::to_string(i++) + ". " + r.notion + "  [" + r.module + "]");
    }
    return out.finish(kOk);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic semantics toolkit"};
    app.require_subcommand(1);
    Output out;
    int code = kOk;

    auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", out.json_mode, "Print a JSON document"); };
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, auto action) {
        auto* sub = parent->add_subcommand(name, help);
        add_json(sub);
        const std::string path = parent->get_parent() ? parent->get_name() + " " + name : name;
        sub->callback([&code, &out, action, path] {
            out.doc["command"] = path;
            code = action(out);
        });
        return sub;
    };

    DplOptions dpl;
    auto* dpl_cmd = app.add_subcommand("dpl", "Dynamic predicate logic");
    dpl_cmd->require_subcommand(1);
    {
        auto* s = leaf(dpl_cmd, "truth", "Truth of a formula in a model", [&](Output& o) { return dpl_truth_cmd(dpl, o); });
        s->add_option("formula", dpl.first, "Formula file")->required()->check(CLI::ExistingFile);
        s->add_option("--model", dpl.model, "Model JSON file")->required()->check(CLI::ExistingFile);
        s->add_option("--assign", dpl.assign, "Input assignment entries VAR=VALUE");
        s = leaf(dpl_cmd, "equiv", "Denotational equivalence up to a domain size",
                 [&](Output& o) { return dpl_equiv_cmd(dpl, o); });
        s->add_option("first", dpl.first)->required()->check(CLI::ExistingFile);
        s->add_option("second", dpl.second)->required()->check(CLI::ExistingFile);
        s->add_option("--max-n", dpl.max_n, "Largest domain size")->check(CLI::Range(1, 64));
        s = leaf(dpl_cmd, "context-equiv", "Equivalence in all contexts up to a depth",
                 [&](Output& o) { return dpl_context_cmd(dpl, o); });
        s->add_option("first", dpl.first)->required()->check(CLI::ExistingFile);
        s->add_option("second", dpl.second)->required()->check(CLI::ExistingFile);
        s->add_option("--max-n", dpl.max_n, "Largest domain size")->check(CLI::Range(1, 64));
        s->add_option("--depth", dpl.depth, "Context depth")->check(CLI::Range(0, 8));
        s = leaf(dpl_cmd, "abstraction", "Correctness and full-abstraction scan",
                 [&](Output& o) { return dpl_abstraction_cmd(dpl, o); });
        s->add_option("--max-n", dpl.max_n, "Largest domain size")->check(CLI::Range(1, 64));
        s->add_option("--depth", dpl.depth, "Context depth")->check(CLI::Range(0, 8));
        s->add_option("--size", dpl.size, "Formula size bound")->check(CLI::Range(1, 12));
        s->add_option("--signature", dpl.signature, "Signature, e.g. P/1,R/2");
    }

    ImpOptions imp;
    auto* imp_cmd = app.add_subcommand("imp", "While-language store machine");
    imp_cmd->require_subcommand(1);
    {
        auto* s = leaf(imp_cmd, "run", "Run a program", [&](Output& o) { return imp_run_cmd(imp, o); });
        s->add_option("program", imp.program)->required()->check(CLI::ExistingFile);
        s->add_option("--policy", imp.policy, "lexical or indefinite");
        s->add_option("--bound", imp.bound, "Random values range over [-bound, bound]")->check(CLI::Range(0, 1000));
        s->add_option("--fuel", imp.fuel, "Step limit per branch")->check(CLI::Range(1, 100000000));
        s->add_flag("--gc", imp.gc, "Collect garbage after every step");
        s->add_flag("--trace", imp.trace, "Show allocated locations at every step");
        s = leaf(imp_cmd, "hoare", "Check a partial-correctness triple", [&](Output& o) { return imp_hoare_cmd(imp, o); });
        s->add_option("program", imp.program)->required()->check(CLI::ExistingFile);
        s->add_option("--pre", imp.pre, "Precondition");
        s->add_option("--post", imp.post, "Postcondition");
        s->add_option("--bound", imp.bound, "Values range over [-bound, bound]")->check(CLI::Range(0, 1000));
        s->add_option("--fuel", imp.fuel, "Step limit per branch")->check(CLI::Range(1, 100000000));
    }

    DrtOptions drt;
    auto* drt_cmd = app.add_subcommand("drt", "Discourse representation structures");
    drt_cmd->require_subcommand(1);
    {
        auto* s = leaf(drt_cmd, "run", "Build the DRS of a discourse", [&](Output& o) { return drt_run_cmd(drt, o); });
        s->add_option("discourse", drt.discourse)->required()->check(CLI::ExistingFile);
        s->add_option("--lexicon", drt.lexicon)->required()->check(CLI::ExistingFile);
        s = leaf(drt_cmd, "equiv", "Compare two sentences in text contexts", [&](Output& o) { return drt_equiv_cmd(drt, o); });
        s->add_option("first", drt.first, "Sentence")->required();
        s->add_option("second", drt.second, "Sentence")->required();
        s->add_option("--lexicon", drt.lexicon)->required()->check(CLI::ExistingFile);
        s->add_option("--contexts", drt.contexts, "Context file; defaults to the empty context")->check(CLI::ExistingFile);
    }

    NdOptions nd;
    auto* nd_cmd = app.add_subcommand("nd", "Natural deduction checkers");
    nd_cmd->require_subcommand(1);
    {
        auto* s = leaf(nd_cmd, "check-quine", "Check a linear derivation", [&](Output& o) { return nd_quine_cmd(nd, o); });
        s->add_option("file", nd.file)->required()->check(CLI::ExistingFile);
        s = leaf(nd_cmd, "ordering", "Flagged-variable ordering", [&](Output& o) { return nd_ordering_cmd(nd, o); });
        s->add_option("file", nd.file)->required()->check(CLI::ExistingFile);
        s = leaf(nd_cmd, "check-gentzen", "Check a tree derivation", [&](Output& o) { return nd_gentzen_cmd(nd, o); });
        s->add_option("file", nd.file)->required()->check(CLI::ExistingFile);
        s = leaf(nd_cmd, "purify", "Give every proper parameter its own name", [&](Output& o) { return nd_purify_cmd(nd, o); });
        s->add_option("file", nd.file)->required()->check(CLI::ExistingFile);
        s = leaf(nd_cmd, "entails", "Do a derivation's premises entail its last line",
                 [&](Output& o) { return nd_entails_cmd(nd, o); });
        s->add_option("file", nd.file)->required()->check(CLI::ExistingFile);
        s->add_option("--max-n", nd.max_n, "Largest domain size")->check(CLI::Range(1, 64));
    }

    EpsOptions eps;
    auto* eps_cmd = app.add_subcommand("eps", "Epsilon terms");
    eps_cmd->require_subcommand(1);
    {
        auto* s = leaf(eps_cmd, "translate", "Replace quantifiers by epsilon terms",
                       [&](Output& o) { return eps_translate_cmd(eps, o); });
        s->add_option("formula", eps.file)->required()->check(CLI::ExistingFile);
        s = leaf(eps_cmd, "disabbrev", "Epsilon terms abbreviated by flagged variables",
                 [&](Output& o) { return eps_disabbrev_cmd(eps, o); });
        s->add_option("file", eps.file)->required()->check(CLI::ExistingFile);
        s = leaf(eps_cmd, "conservativity", "Compare classical truth with the translation",
                 [&](Output& o) { return eps_conservativity_cmd(eps, o); });
        s->add_option("--max-n", eps.max_n, "Largest domain size")->check(CLI::Range(1, 64));
        s->add_option("--depth", eps.depth, "Quantifier depth")->check(CLI::Range(0, 8));
        s->add_option("--size", eps.size, "Sentence size bound")->check(CLI::Range(1, 12));
        s->add_option("--signature", eps.signature, "Signature, e.g. P/1,R/2");
        s = leaf(eps_cmd, "axiom", "Check A[t] -> A[(eps x A)] in a model", [&](Output& o) { return eps_axiom_cmd(eps, o); });
        s->add_option("matrix", eps.file, "Formula file with one free variable")->required()->check(CLI::ExistingFile);
        s->add_option("--witness", eps.witness, "Term substituted in the antecedent")->required();
        s->add_option("--model", eps.model, "Model JSON file")->required()->check(CLI::ExistingFile);
        s->add_option("--choice", eps.choice, "Choice function JSON; default is every intended one")
            ->check(CLI::ExistingFile);
    }

    leaf(&app, "ladder", "Print the analogy ladder", [](Output& o) { return ladder_cmd(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "dynsem: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "dynsem: " << e.what() << '\n';
        return kInputError;
    } catch (const json::exception& e) {
        std::cerr << "dynsem: invalid JSON: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "dynsem: " << e.what() << '\n';
        return kInputError;
    }
    return code;
}
