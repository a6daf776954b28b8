#include "dynsem/models.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include "dynsem/error.hpp"

namespace dynsem {

int default_domain_cap() {
    if (const char* env = std::getenv("DYNSEM_MAX_DOMAIN")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 31) return static_cast<int>(v);
    }
    return 4;
}

namespace {

std::size_t power(int n, int k) {
    std::size_t out = 1;
    for (int i = 0; i < k; ++i) out *= static_cast<std::size_t>(n);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Model

Model::Model(const Signature& sig, int domain_size) : sig_(sig), n_(domain_size) {
    if (domain_size < 1) throw CapError("domain size must be at least 1");
    for (const auto& [name, arity] : sig.predicates) {
        preds_.push_back(Table{name, arity, std::vector<int>(power(n_, arity), 0)});
    }
    for (const auto& [name, arity] : sig.functions) {
        funcs_.push_back(Table{name, arity, std::vector<int>(power(n_, arity), 0)});
    }
}

int Model::predicate_index(std::string_view name) const {
    for (std::size_t i = 0; i < preds_.size(); ++i) {
        if (preds_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

int Model::function_index(std::string_view name) const {
    for (std::size_t i = 0; i < funcs_.size(); ++i) {
        if (funcs_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::size_t Model::offset(const Table& t, std::span<const int> args) const {
    if (static_cast<int>(args.size()) != t.arity) {
        throw SignatureError("'" + t.name + "' expects " + std::to_string(t.arity) + " arguments, got " +
                             std::to_string(args.size()));
    }
    std::size_t off = 0;
    for (int a : args) {
        if (a < 0 || a >= n_) throw EvalError("element " + std::to_string(a) + " outside the domain");
        off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a);
    }
    return off;
}

bool Model::holds(int pred, std::span<const int> args) const {
    const Table& t = preds_.at(static_cast<std::size_t>(pred));
    return t.cells[offset(t, args)] != 0;
}

bool Model::holds(std::string_view pred, std::span<const int> args) const {
    int i = predicate_index(pred);
    if (i < 0) throw SignatureError("predicate '" + std::string(pred) + "' is not interpreted by the model");
    return holds(i, args);
}

int Model::apply(int fn, std::span<const int> args) const {
    const Table& t = funcs_.at(static_cast<std::size_t>(fn));
    return t.cells[offset(t, args)];
}

int Model::apply(std::string_view fn, std::span<const int> args) const {
    int i = function_index(fn);
    if (i < 0) throw SignatureError("function '" + std::string(fn) + "' is not interpreted by the model");
    return apply(i, args);
}

void Model::set(std::string_view pred, std::span<const int> args, bool value) {
    int i = predicate_index(pred);
    if (i < 0) throw SignatureError("predicate '" + std::string(pred) + "' is not interpreted by the model");
    Table& t = preds_[static_cast<std::size_t>(i)];
    t.cells[offset(t, args)] = value ? 1 : 0;
}

void Model::define(std::string_view fn, std::span<const int> args, int value) {
    int i = function_index(fn);
    if (i < 0) throw SignatureError("function '" + std::string(fn) + "' is not interpreted by the model");
    if (value < 0 || value >= n_) throw EvalError("value " + std::to_string(value) + " outside the domain");
    Table& t = funcs_[static_cast<std::size_t>(i)];
    t.cells[offset(t, args)] = value;
}

std::vector<std::vector<int>> Model::extension(std::string_view pred) const {
    int i = predicate_index(pred);
    if (i < 0) throw SignatureError("predicate '" + std::string(pred) + "' is not interpreted by the model");
    const Table& t = preds_[static_cast<std::size_t>(i)];
    std::vector<std::vector<int>> out;
    for (std::size_t code = 0; code < t.cells.size(); ++code) {
        if (!t.cells[code]) continue;
        std::vector<int> tuple(static_cast<std::size_t>(t.arity));
        std::size_t rest = code;
        for (std::size_t k = tuple.size(); k-- > 0;) {
            tuple[k] = static_cast<int>(rest % static_cast<std::size_t>(n_));
            rest /= static_cast<std::size_t>(n_);
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

std::string describe(const Model& m) {
    std::ostringstream os;
    os << "|D|=" << m.size();
    for (const auto& t : m.predicates()) {
        os << ' ' << t.name << "={";
        bool first = true;
        for (const auto& tuple : m.extension(t.name)) {
            os << (first ? "" : ",");
            first = false;
            if (tuple.size() == 1) {
                os << tuple[0];
                continue;
            }
            os << '(';
            for (std::size_t i = 0; i < tuple.size(); ++i) os << (i ? "," : "") << tuple[i];
            os << ')';
        }
        os << '}';
    }
    for (const auto& t : m.functions()) {
        if (t.arity == 0) {
            os << ' ' << t.name << '=' << t.cells[0];
            continue;
        }
        os << ' ' << t.name << "=[";
        for (std::size_t i = 0; i < t.cells.size(); ++i) os << (i ? "," : "") << t.cells[i];
        os << ']';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Assignment

Assignment::Assignment(std::vector<std::string> vars, std::vector<int> values)
    : vars_(std::move(vars)), values_(std::move(values)) {
    if (vars_.size() != values_.size()) throw Error("assignment needs one value per variable");
}

Assignment::Assignment(std::vector<std::string> vars) : vars_(std::move(vars)), values_(vars_.size(), 0) {}

bool Assignment::has(std::string_view var) const {
    return std::find(vars_.begin(), vars_.end(), var) != vars_.end();
}

int Assignment::at(std::string_view var) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == var) return values_[i];
    }
    throw ScopeError("variable '" + std::string(var) + "' is not in the assignment's universe");
}

void Assignment::set(std::string_view var, int value) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == var) {
            values_[i] = value;
            return;
        }
    }
    throw ScopeError("variable '" + std::string(var) + "' is not in the assignment's universe");
}

void Assignment::bind(const std::string& var, int value) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == var) {
            values_[i] = value;
            return;
        }
    }
    vars_.push_back(var);
    values_.push_back(value);
}

std::string describe(const Assignment& g) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < g.variables().size(); ++i) {
        os << (i ? ", " : "") << g.variables()[i] << "=" << g.values()[i];
    }
    os << '}';
    return os.str();
}

void for_each_assignment(const std::vector<std::string>& vars, int n, const std::function<void(const Assignment&)>& visit) {
    Assignment g(vars);
    std::vector<int> values(vars.size(), 0);
    for (;;) {
        visit(g);
        std::size_t k = vars.size();
        while (k > 0) {
            --k;
            if (++values[k] < n) break;
            values[k] = 0;
            if (k == 0) return;
        }
        if (vars.empty()) return;
        g = Assignment(vars, values);
    }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {


// Variable bindings as a stack: the assignment first, quantifier and
// epsilon bindings pushed on top and looked up innermost first.
class Evaluator {
public:
    Evaluator(const Model& m, ChoiceSource* choice, const Assignment& g) : m_(m), choice_(choice) {
        for (std::size_t i = 0; i < g.variables().size(); ++i) env_.emplace_back(g.variables()[i], g.values()[i]);
    }

    bool formula(const Formula& f) {
        switch (f.kind) {
        case Formula::Kind::Atom: {
            int p = m_.predicate_index(f.name);
            if (p < 0) throw SignatureError("predicate '" + f.name + "' is not interpreted by the model");
            Args args;
            return m_.holds(p, values(f.terms, args));
        }
        case Formula::Kind::Equal:
            return term(f.terms[0]) == term(f.terms[1]);
        case Formula::Kind::Not:
            return !formula(f.body());
        case Formula::Kind::And:
            return formula(f.left()) && formula(f.right());
        case Formula::Kind::Or:
            return formula(f.left()) || formula(f.right());
        case Formula::Kind::Implies:
            return !formula(f.left()) || formula(f.right());
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            bool want = f.kind == Formula::Kind::Exists;
            env_.emplace_back(f.name, 0);
            bool result = !want;
            for (int d = 0; d < m_.size(); ++d) {
                env_.back().second = d;
                if (formula(f.body()) == want) {
                    result = want;
                    break;
                }
            }
            env_.pop_back();
            return result;
        }
        case Formula::Kind::RandomAssign:
            throw EvalError("random assignment has no static truth value");
        }
        return false;
    }

    int term(const Term& t) {
        switch (t.kind) {
        case Term::Kind::Variable:
        case Term::Kind::Parameter:
            return lookup(t.name);
        case Term::Kind::Constant:
        case Term::Kind::Function: {
            int fn = m_.function_index(t.name);
            if (fn < 0) throw SignatureError("function '" + t.name + "' is not interpreted by the model");
            Args args;
            return m_.apply(fn, values(t.args, args));
        }
        case Term::Kind::Epsilon: {
            if (!choice_) throw EvalError("epsilon term needs a choice function");
            if (m_.size() > 31) throw CapError("domain too large for choice functions");
            env_.emplace_back(t.name, 0);
            std::uint32_t subset = 0;
            for (int d = 0; d < m_.size(); ++d) {
                env_.back().second = d;
                if (formula(*t.matrix)) subset |= 1u << d;
            }
            env_.pop_back();
            int v = choice_->choose(subset);
            if (v < 0 || v >= m_.size()) throw EvalError("choice function value outside the domain");
            return v;
        }
        }
        return 0;
    }

private:
    struct Args {
        int small[8];
        std::vector<int> big;
    };

    int lookup(const std::string& name) const {
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
            if (it->first == name) return it->second;
        }
        throw ScopeError("free variable '" + name + "' has no value");
    }

    std::span<const int> values(const std::vector<Term>& terms, Args& out) {
        if (terms.size() <= 8) {
            for (std::size_t i = 0; i < terms.size(); ++i) out.small[i] = term(terms[i]);
            return {out.small, terms.size()};
        }
        for (const auto& t : terms) out.big.push_back(term(t));
        return out.big;
    }

    const Model& m_;
    ChoiceSource* choice_;
    std::vector<std::pair<std::string_view, int>> env_;
};

}  // namespace

bool eval_classical(const Formula& f, const Model& m, const Assignment& g) {
    return Evaluator(m, nullptr, g).formula(f);
}

int eval_term(const Term& t, const Model& m, const Assignment& g) { return Evaluator(m, nullptr, g).term(t); }

bool eval_with_epsilon(const Formula& f, const Model& m, ChoiceSource& c, const Assignment& g) {
    if (auto* fn = dynamic_cast<ChoiceFunction*>(&c); fn && fn->domain_size() != m.size()) {
        throw EvalError("choice function is for a domain of size " + std::to_string(fn->domain_size()) +
                        ", model has size " + std::to_string(m.size()));
    }
    return Evaluator(m, &c, g).formula(f);
}

int eval_term_with_epsilon(const Term& t, const Model& m, ChoiceSource& c, const Assignment& g) {
    return Evaluator(m, &c, g).term(t);
}

// ---------------------------------------------------------------------------
// Choice functions

ChoiceFunction::ChoiceFunction(int domain_size, std::vector<int> choices) : n_(domain_size), choices_(std::move(choices)) {
    if (n_ < 1 || n_ > 20) throw CapError("choice functions need a domain of size 1..20");
    if (choices_.size() != (std::size_t{1} << n_)) throw MalformedError("choice function must cover every subset");
    for (int v : choices_) {
        if (v < 0 || v >= n_) throw MalformedError("choice value " + std::to_string(v) + " outside the domain");
    }
}

ChoiceFunction ChoiceFunction::least(int domain_size) {
    std::vector<int> choices(std::size_t{1} << domain_size, 0);
    for (std::size_t s = 1; s < choices.size(); ++s) {
        int d = 0;
        while (!(s >> d & 1u)) ++d;
        choices[s] = d;
    }
    return ChoiceFunction(domain_size, std::move(choices));
}

int ChoiceFunction::operator()(std::uint32_t subset) const {
    if (subset >= choices_.size()) throw EvalError("subset outside the choice function's domain");
    return choices_[subset];
}

bool ChoiceFunction::intended() const {
    for (std::size_t s = 1; s < choices_.size(); ++s) {
        if (!(s >> choices_[s] & 1u)) return false;
    }
    return true;
}

namespace {

std::vector<int> members(std::uint32_t subset, int n) {
    std::vector<int> out;
    for (int d = 0; d < n; ++d) {
        if (subset >> d & 1u) out.push_back(d);
    }
    if (out.empty()) {
        for (int d = 0; d < n; ++d) out.push_back(d);
    }
    return out;
}

}  // namespace

std::uint64_t intended_choice_count(int n) {
    std::uint64_t total = 1;
    for (std::uint32_t s = 0; s < (1u << n); ++s) total *= members(s, n).size();
    return total;
}

void for_each_intended_choice(int n, const std::function<void(const ChoiceFunction&)>& visit) {
    if (n < 1 || n > 4) throw CapError("exhaustive choice enumeration supports domains of size 1..4");
    const std::size_t subsets = std::size_t{1} << n;
    std::vector<std::vector<int>> options(subsets);
    for (std::size_t s = 0; s < subsets; ++s) options[s] = members(static_cast<std::uint32_t>(s), n);
    std::vector<std::size_t> index(subsets, 0);
    for (;;) {
        std::vector<int> choices(subsets);
        for (std::size_t s = 0; s < subsets; ++s) choices[s] = options[s][index[s]];
        visit(ChoiceFunction(n, std::move(choices)));
        std::size_t k = subsets;
        for (;;) {
            if (k == 0) return;
            --k;
            if (++index[k] < options[k].size()) break;
            index[k] = 0;
        }
    }
}

namespace {

struct Branch {
    std::uint32_t subset;
    std::size_t index;
    std::vector<int> options;
};

// Replays a fixed prefix of choices and opens new branches past it.
class BranchingSource : public ChoiceSource {
public:
    BranchingSource(int n, std::vector<Branch>& path) : n_(n), path_(path) {}

    int choose(std::uint32_t subset) override {
        for (std::size_t i = 0; i < used_; ++i) {
            if (path_[i].subset == subset) return path_[i].options[path_[i].index];
        }
        if (used_ == path_.size()) path_.push_back(Branch{subset, 0, members(subset, n_)});
        else if (path_[used_].subset != subset) throw Error("choice evaluation is not deterministic");
        const Branch& b = path_[used_++];
        return b.options[b.index];
    }

    std::size_t used() const noexcept { return used_; }

private:
    int n_;
    std::vector<Branch>& path_;
    std::size_t used_ = 0;
};

}  // namespace

std::size_t for_each_choice_branch(int n, const std::function<bool(ChoiceSource&)>& eval,
                                   const std::function<void(bool, std::uint64_t)>& visit) {
    if (n < 1 || n > 20) throw CapError("choice functions need a domain of size 1..20");
    const std::uint64_t total = intended_choice_count(n);
    std::vector<Branch> path;
    std::size_t branches = 0;
    for (;;) {
        BranchingSource source(n, path);
        bool outcome = eval(source);
        path.resize(source.used());
        std::uint64_t fixed = 1;
        for (const auto& b : path) fixed *= b.options.size();
        visit(outcome, total / fixed);
        ++branches;
        while (!path.empty() && path.back().index + 1 == path.back().options.size()) path.pop_back();
        if (path.empty()) return branches;
        ++path.back().index;
    }
}

// ---------------------------------------------------------------------------
// Enumeration

ModelEnumerator::ModelEnumerator(Signature sig, int max_n, int min_n, int cap)
    : sig_(std::move(sig)), max_n_(max_n), n_(min_n) {
    if (max_n > cap) {
        throw CapError("domain size " + std::to_string(max_n) + " exceeds the cap of " + std::to_string(cap));
    }
    if (min_n < 1) throw CapError("domain size must be at least 1");
}

bool ModelEnumerator::increment() {
    auto& funcs = model_.mutable_functions();
    for (auto it = funcs.rbegin(); it != funcs.rend(); ++it) {
        for (auto c = it->cells.rbegin(); c != it->cells.rend(); ++c) {
            if (++*c < n_) return true;
            *c = 0;
        }
    }
    auto& preds = model_.mutable_predicates();
    for (auto it = preds.rbegin(); it != preds.rend(); ++it) {
        for (auto c = it->cells.rbegin(); c != it->cells.rend(); ++c) {
            if (++*c < 2) return true;
            *c = 0;
        }
    }
    return false;
}

bool ModelEnumerator::next() {
    if (!started_) {
        started_ = true;
        if (n_ > max_n_) return false;
        model_ = Model(sig_, n_);
        return true;
    }
    if (increment()) return true;
    if (++n_ > max_n_) return false;
    model_ = Model(sig_, n_);
    return true;
}

std::uint64_t ModelEnumerator::count(const Signature& sig, int n) {
    std::uint64_t total = 1;
    for (const auto& [name, arity] : sig.predicates) {
        for (std::size_t i = 0; i < power(n, arity); ++i) total *= 2;
    }
    for (const auto& [name, arity] : sig.functions) {
        for (std::size_t i = 0; i < power(n, arity); ++i) total *= static_cast<std::uint64_t>(n);
    }
    return total;
}

void enumerate_models(const Signature& sig, int max_n, const std::function<bool(const Model&)>& visit, int cap) {
    ModelEnumerator e(sig, max_n, 1, cap);
    while (e.next()) {
        if (!visit(e.current())) return;
    }
}

std::vector<Model> all_models(const Signature& sig, int max_n, int cap) {
    std::vector<Model> out;
    enumerate_models(sig, max_n, [&](const Model& m) {
        out.push_back(m);
        return true;
    }, cap);
    return out;
}

}  // namespace dynsem
