#include "dynsem/dpl.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <unordered_map>

#include "dynsem/error.hpp"

namespace dynsem::dpl {

// ---------------------------------------------------------------------------
// States and relations

StateSpace::StateSpace(std::vector<std::string> universe, int domain_size)
    : vars_(std::move(universe)), n_(domain_size), size_(1) {
    std::sort(vars_.begin(), vars_.end());
    vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
    if (n_ < 1) throw CapError("domain size must be at least 1");
    stride_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 0;) {
        stride_[i] = size_;
        size_ *= static_cast<std::size_t>(n_);
        if (size_ > (std::size_t{1} << 20)) throw CapError("state space too large");
    }
}

Assignment StateSpace::state(std::size_t index) const {
    std::vector<int> values(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) values[i] = value(index, i);
    return Assignment(vars_, std::move(values));
}

std::size_t StateSpace::index(const Assignment& g) const {
    std::size_t out = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        int v = g.at(vars_[i]);
        if (v < 0 || v >= n_) throw EvalError("assignment value outside the domain");
        out += static_cast<std::size_t>(v) * stride_[i];
    }
    return out;
}

int StateSpace::value(std::size_t index, std::size_t var) const {
    return static_cast<int>(index / stride_[var] % static_cast<std::size_t>(n_));
}

std::size_t StateSpace::with(std::size_t index, std::size_t var, int v) const {
    return index - static_cast<std::size_t>(value(index, var)) * stride_[var] + static_cast<std::size_t>(v) * stride_[var];
}

std::size_t StateSpace::variable(const std::string& name) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), name);
    if (it == vars_.end() || *it != name) throw ScopeError("variable '" + name + "' is outside the universe");
    return static_cast<std::size_t>(it - vars_.begin());
}

StateRelation::StateRelation(std::size_t states)
    : states_(states), words_((states + 63) / 64), bits_(states * words_, 0) {}

StateRelation StateRelation::identity(std::size_t states) {
    StateRelation r(states);
    for (std::size_t i = 0; i < states; ++i) r.insert(i, i);
    return r;
}

StateRelation StateRelation::test(const std::vector<bool>& keep) {
    StateRelation r(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) r.insert(i, i);
    }
    return r;
}

bool StateRelation::contains(std::size_t from, std::size_t to) const {
    return bits_[from * words_ + to / 64] >> (to % 64) & 1u;
}

void StateRelation::insert(std::size_t from, std::size_t to) { bits_[from * words_ + to / 64] |= std::uint64_t{1} << (to % 64); }

bool StateRelation::has_output(std::size_t from) const {
    for (std::size_t w = 0; w < words_; ++w) {
        if (bits_[from * words_ + w]) return true;
    }
    return false;
}

std::vector<bool> StateRelation::domain() const {
    std::vector<bool> out(states_);
    for (std::size_t i = 0; i < states_; ++i) out[i] = has_output(i);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> StateRelation::pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < states_; ++i) {
        for (std::size_t j = 0; j < states_; ++j) {
            if (contains(i, j)) out.emplace_back(i, j);
        }
    }
    return out;
}

std::size_t StateRelation::count() const {
    std::size_t total = 0;
    for (auto w : bits_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

bool StateRelation::subset_of_identity() const {
    for (std::size_t i = 0; i < states_; ++i) {
        for (std::size_t j = 0; j < states_; ++j) {
            if (i != j && contains(i, j)) return false;
        }
    }
    return true;
}

StateRelation StateRelation::compose(const StateRelation& next) const {
    if (next.states_ != states_) throw Error("composing relations over different state spaces");
    StateRelation out(states_);
    for (std::size_t i = 0; i < states_; ++i) {
        std::uint64_t* row = &out.bits_[i * words_];
        for (std::size_t k = 0; k < states_; ++k) {
            if (!contains(i, k)) continue;
            const std::uint64_t* mid = &next.bits_[k * words_];
            for (std::size_t w = 0; w < words_; ++w) row[w] |= mid[w];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Relational semantics

namespace {

void check_universe(const Formula& f, const std::vector<std::string>& universe) {
    for (const auto& v : all_variables(f)) {
        if (!std::binary_search(universe.begin(), universe.end(), v)) {
            throw ScopeError("variable '" + v + "' of the formula is outside the universe");
        }
    }
}

class RelationalEvaluator {
public:
    RelationalEvaluator(const Model& m, const StateSpace& space) : m_(m), space_(space) {
        for (std::size_t i = 0; i < space.size(); ++i) states_.push_back(space.state(i));
    }

    StateRelation eval(const Formula& f) {
        const std::size_t n = space_.size();
        switch (f.kind) {
        case Formula::Kind::Atom:
        case Formula::Kind::Equal: {
            std::vector<bool> keep(n);
            for (std::size_t i = 0; i < n; ++i) keep[i] = eval_classical(f, m_, states_[i]);
            return StateRelation::test(keep);
        }
        case Formula::Kind::Not: {
            std::vector<bool> keep = eval(f.body()).domain();
            keep.flip();
            return StateRelation::test(keep);
        }
        case Formula::Kind::And:
            return eval(f.left()).compose(eval(f.right()));
        case Formula::Kind::Implies: {
            StateRelation a = eval(f.left());
            std::vector<bool> continues = eval(f.right()).domain();
            std::vector<bool> keep(n, true);
            for (auto [i, j] : a.pairs()) {
                if (!continues[j]) keep[i] = false;
            }
            return StateRelation::test(keep);
        }
        case Formula::Kind::Or: {
            std::vector<bool> a = eval(f.left()).domain();
            std::vector<bool> b = eval(f.right()).domain();
            for (std::size_t i = 0; i < n; ++i) a[i] = a[i] || b[i];
            return StateRelation::test(a);
        }
        case Formula::Kind::RandomAssign:
            return reset(f.name);
        case Formula::Kind::Exists:
            return reset(f.name).compose(eval(f.body()));
        case Formula::Kind::Forall:
            return eval(Formula::negation(Formula::exists(f.name, Formula::negation(f.body()))));
        }
        return StateRelation(n);
    }

private:
    StateRelation reset(const std::string& var) {
        std::size_t v = space_.variable(var);
        StateRelation r(space_.size());
        for (std::size_t i = 0; i < space_.size(); ++i) {
            for (int d = 0; d < space_.domain_size(); ++d) r.insert(i, space_.with(i, v, d));
        }
        return r;
    }

    const Model& m_;
    const StateSpace& space_;
    std::vector<Assignment> states_;
};

}  // namespace

StateRelation dpl_eval(const Formula& f, const Model& m, const StateSpace& space) {
    if (space.domain_size() != m.size()) throw EvalError("state space and model disagree on the domain size");
    check_universe(f, space.universe());
    return RelationalEvaluator(m, space).eval(f);
}

StateRelation dpl_eval(const Formula& f, const Model& m, const std::vector<std::string>& universe) {
    return dpl_eval(f, m, StateSpace(universe, m.size()));
}

// ---------------------------------------------------------------------------
// Direct semantics: outputs explored depth-first with a continuation.

namespace {

using Continuation = std::function<bool(Assignment&)>;

class OutputSearch {
public:
    explicit OutputSearch(const Model& m) : m_(m) {}

    // True iff `k` accepts some output of f from g. g is restored on return.
    bool run(const Formula& f, Assignment& g, const Continuation& k) {
        static const Continuation any = [](Assignment&) { return true; };
        switch (f.kind) {
        case Formula::Kind::Atom:
        case Formula::Kind::Equal:
            return eval_classical(f, m_, g) && k(g);
        case Formula::Kind::Not:
            return !run(f.body(), g, any) && k(g);
        case Formula::Kind::And:
            return run(f.left(), g, [&](Assignment& h) { return run(f.right(), h, k); });
        case Formula::Kind::Implies: {
            bool blocked = run(f.left(), g, [&](Assignment& h) { return !run(f.right(), h, any); });
            return !blocked && k(g);
        }
        case Formula::Kind::Or:
            return (run(f.left(), g, any) || run(f.right(), g, any)) && k(g);
        case Formula::Kind::RandomAssign:
            return each_value(f.name, g, [&](Assignment& h) { return k(h); });
        case Formula::Kind::Exists:
            return each_value(f.name, g, [&](Assignment& h) { return run(f.body(), h, k); });
        case Formula::Kind::Forall: {
            bool counter = each_value(f.name, g, [&](Assignment& h) { return !run(f.body(), h, any); });
            return !counter && k(g);
        }
        }
        return false;
    }

private:
    bool each_value(const std::string& var, Assignment& g, const Continuation& k) {
        int saved = g.at(var);
        for (int d = 0; d < m_.size(); ++d) {
            g.set(var, d);
            if (k(g)) {
                g.set(var, saved);
                return true;
            }
        }
        g.set(var, saved);
        return false;
    }

    const Model& m_;
};

std::vector<std::string> sorted_universe(const Assignment& g) {
    std::vector<std::string> u = g.variables();
    std::sort(u.begin(), u.end());
    return u;
}

}  // namespace

bool dpl_truth(const Formula& f, const Model& m, const Assignment& g) {
    check_universe(f, sorted_universe(g));
    Assignment h = g;
    return OutputSearch(m).run(f, h, [](Assignment&) { return true; });
}

std::vector<Assignment> dpl_outputs(const Formula& f, const Model& m, const Assignment& g) {
    check_universe(f, sorted_universe(g));
    Assignment h = g;
    std::vector<Assignment> out;
    OutputSearch(m).run(f, h, [&](Assignment& o) {
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
        return false;
    });
    return out;
}

std::vector<std::string> universe_of(const std::vector<Formula>& fs) {
    std::set<std::string> vars;
    for (const auto& f : fs) {
        for (const auto& v : all_variables(f)) vars.insert(v);
    }
    return {vars.begin(), vars.end()};
}

namespace {

std::vector<std::string> normalize(std::vector<std::string> universe, const std::vector<Formula>& fs) {
    std::set<std::string> vars(universe.begin(), universe.end());
    for (const auto& v : universe_of(fs)) vars.insert(v);
    return {vars.begin(), vars.end()};
}

}  // namespace

EquivalenceVerdict dpl_equivalent(const Formula& f1, const Formula& f2, const Signature& sig, int max_n,
                                  std::vector<std::string> universe) {
    EquivalenceVerdict v;
    v.universe = normalize(std::move(universe), {f1, f2});
    ModelEnumerator models(sig, max_n);
    std::optional<StateSpace> space;
    while (models.next()) {
        const Model& m = models.current();
        if (!space || space->domain_size() != m.size()) space.emplace(v.universe, m.size());
        ++v.models_checked;
        StateRelation a = dpl_eval(f1, m, *space);
        StateRelation b = dpl_eval(f2, m, *space);
        if (a == b) continue;
        v.equal = false;
        v.model = m;
        for (std::size_t i = 0; i < space->size() && !v.input; ++i) {
            for (std::size_t j = 0; j < space->size(); ++j) {
                if (a.contains(i, j) != b.contains(i, j)) {
                    v.input = space->state(i);
                    v.output = space->state(j);
                    v.in_first = a.contains(i, j);
                    break;
                }
            }
        }
        return v;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Contexts

namespace {

bool is_hole(const Formula& f) { return f.kind == Formula::Kind::Atom && f.name == kHole && f.terms.empty(); }

Formula plug_rec(const Formula& shape, const Formula& f) {
    if (is_hole(shape)) return f;
    Formula out = shape;
    for (auto& s : out.subs) s = plug_rec(s, f);
    return out;
}

int holes(const Formula& f) {
    int n = is_hole(f) ? 1 : 0;
    for (const auto& s : f.subs) n += holes(s);
    return n;
}

int hole_depth(const Formula& f) {
    if (is_hole(f)) return 0;
    for (const auto& s : f.subs) {
        if (holes(s)) return 1 + hole_depth(s);
    }
    return 0;
}

}  // namespace

Formula plug(const Context& c, const Formula& f) { return plug_rec(c.shape, f); }

std::string render(const Context& c) { return dynsem::render(c.shape); }

Context parse_context(const std::string& text, const Signature* sig) {
    std::string replaced;
    std::size_t found = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text.compare(i, 2, kHole) == 0) {
            replaced += " __hole__ ";
            ++i;
            ++found;
        } else {
            replaced += text[i];
        }
    }
    if (found != 1) throw MalformedError("a context needs exactly one hole '[]'");
    Formula shape = parse_formula(replaced, sig);
    std::function<void(Formula&)> mark = [&](Formula& f) {
        if (f.kind == Formula::Kind::Atom && f.name == "__hole__" && f.terms.empty()) f.name = kHole;
        for (auto& s : f.subs) mark(s);
    };
    mark(shape);
    if (holes(shape) != 1) throw MalformedError("the hole must stand in formula position");
    return Context{std::move(shape)};
}

int context_depth(const Context& c) { return hole_depth(c.shape); }

std::vector<Context> enumerate_contexts(const Signature& sig, const std::vector<std::string>& universe, int depth) {
    std::vector<Formula> fillers = enumerate_atoms(sig, universe);
    std::vector<Formula> level{Formula::atom(kHole, {})};
    for (int d = 1; d <= depth; ++d) {
        std::vector<Formula> next{Formula::atom(kHole, {})};
        for (const auto& c : level) {
            for (const auto& f : fillers) next.push_back(Formula::conjunction(c, f));
            for (const auto& f : fillers) next.push_back(Formula::conjunction(f, c));
            for (const auto& f : fillers) next.push_back(Formula::implication(f, c));
            for (const auto& f : fillers) next.push_back(Formula::implication(c, f));
            next.push_back(Formula::negation(c));
            for (const auto& v : universe) next.push_back(Formula::exists(v, c));
        }
        level = std::move(next);
    }
    std::vector<Context> out;
    out.reserve(level.size());
    for (auto& f : level) out.push_back(Context{std::move(f)});
    return out;
}

namespace {

// Observations of f in context c: truth from every state of every model.
std::vector<bool> behavior(const Formula& plugged, const std::vector<Model>& models, const std::vector<std::string>& universe) {
    std::vector<bool> out;
    for (const auto& m : models) {
        for_each_assignment(universe, m.size(), [&](const Assignment& g) { out.push_back(dpl_truth(plugged, m, g)); });
    }
    return out;
}

}  // namespace

ContextVerdict contextual_equivalent(const Formula& f1, const Formula& f2, const Signature& sig, int max_n, int depth,
                                     std::vector<std::string> universe) {
    ContextVerdict v;
    v.universe = normalize(std::move(universe), {f1, f2});
    std::vector<Model> models = all_models(sig, max_n);
    for (const auto& c : enumerate_contexts(sig, v.universe, depth)) {
        ++v.contexts_checked;
        Formula a = plug(c, f1);
        Formula b = plug(c, f2);
        for (const auto& m : models) {
            bool differs = false;
            for_each_assignment(v.universe, m.size(), [&](const Assignment& g) {
                if (differs) return;
                bool ta = dpl_truth(a, m, g);
                bool tb = dpl_truth(b, m, g);
                if (ta != tb) {
                    differs = true;
                    v.input = g;
                    v.first_truth = ta;
                    v.second_truth = tb;
                }
            });
            if (differs) {
                v.equal = false;
                v.context = c;
                v.model = m;
                return v;
            }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Correctness and full abstraction at bounds

AbstractionReport abstraction_report(const Signature& sig, int max_n, int depth, int size_bound,
                                     std::vector<std::string> universe) {
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

    AbstractionReport r;
    r.max_n = max_n;
    r.depth = depth;
    r.size_bound = size_bound;
    r.universe = universe;

    FormulaFamilyOptions opts;
    opts.variables = universe;
    opts.max_size = size_bound;
    opts.random_assign = true;
    std::vector<Formula> formulas = enumerate_formulas(sig, opts);
    std::vector<Model> models = all_models(sig, max_n);
    std::vector<Context> contexts = enumerate_contexts(sig, universe, depth);
    r.formulas = formulas.size();
    r.models = models.size();
    r.contexts = contexts.size();
    r.total_pairs = static_cast<std::uint64_t>(formulas.size()) * (formulas.size() - (formulas.empty() ? 0 : 1)) / 2;

    std::vector<StateSpace> spaces;
    for (int n = 1; n <= max_n; ++n) spaces.emplace_back(universe, n);

    std::map<std::vector<std::uint64_t>, std::size_t> den_ids;
    std::map<std::vector<bool>, std::size_t> beh_ids;
    std::vector<std::size_t> den(formulas.size()), beh(formulas.size());
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        std::vector<std::uint64_t> dkey;
        for (const auto& m : models) {
            StateRelation rel = dpl_eval(formulas[i], m, spaces[static_cast<std::size_t>(m.size() - 1)]);
            dkey.insert(dkey.end(), rel.bits().begin(), rel.bits().end());
        }
        den[i] = den_ids.emplace(std::move(dkey), den_ids.size()).first->second;

        std::vector<bool> bkey;
        for (const auto& c : contexts) {
            std::vector<bool> obs = behavior(plug(c, formulas[i]), models, universe);
            bkey.insert(bkey.end(), obs.begin(), obs.end());
        }
        beh[i] = beh_ids.emplace(std::move(bkey), beh_ids.size()).first->second;
    }
    r.denotation_classes = den_ids.size();
    r.behavior_classes = beh_ids.size();

    // Correctness: a denotation class must sit inside one behavior class.
    std::map<std::size_t, std::vector<std::size_t>> by_den;
    for (std::size_t i = 0; i < formulas.size(); ++i) by_den[den[i]].push_back(i);
    for (const auto& [id, members] : by_den) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (beh[members[a]] != beh[members[b]]) {
                    r.correctness_violations.emplace_back(formulas[members[a]], formulas[members[b]]);
                }
            }
        }
    }

    std::map<std::size_t, std::map<std::size_t, std::vector<Formula>>> groups;
    for (std::size_t i = 0; i < formulas.size(); ++i) groups[beh[i]][den[i]].push_back(formulas[i]);
    for (auto& [id, split] : groups) {
        if (split.size() < 2) continue;
        std::vector<std::vector<Formula>> group;
        std::uint64_t members = 0, within = 0;
        for (auto& [d, fs] : split) {
            members += fs.size();
            within += static_cast<std::uint64_t>(fs.size()) * (fs.size() - 1) / 2;
            group.push_back(std::move(fs));
        }
        r.candidate_pairs += members * (members - 1) / 2 - within;
        r.candidate_groups.push_back(std::move(group));
    }
    return r;
}

}  // namespace dynsem::dpl
