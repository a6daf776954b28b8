#include "dynsem/storelang.hpp"

#include <algorithm>

#include "dynsem/error.hpp"

namespace dynsem::imp {

std::string to_string(Policy p) { return p == Policy::Lexical ? "lexical" : "indefinite"; }

Policy parse_policy(const std::string& text) {
    if (text == "lexical") return Policy::Lexical;
    if (text == "indefinite") return Policy::Indefinite;
    throw Error("unknown extent policy '" + text + "' (expected lexical or indefinite)");
}

std::string to_string(Status s) { return s == Status::Finished ? "finished" : "fuel-exhausted"; }

Snapshot MachineState::snapshot() const { return Snapshot{env, store, allocated, output.size()}; }

std::int64_t MachineState::value_of(const std::string& name) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->name == name) return store.at(it->loc);
    }
    throw ScopeError("identifier '" + name + "' is not bound");
}

MachineState collect_garbage(const MachineState& s) {
    MachineState out = s;
    std::set<Location> live;
    for (const auto& b : s.env) live.insert(b.loc);
    for (auto it = out.allocated.begin(); it != out.allocated.end();) {
        if (live.count(*it)) {
            ++it;
        } else {
            out.store.erase(*it);
            it = out.allocated.erase(it);
        }
    }
    return out;
}

std::vector<std::int64_t> random_values(int bound) {
    std::vector<std::int64_t> out{0};
    for (std::int64_t k = 1; k <= bound; ++k) {
        out.push_back(k);
        out.push_back(-k);
    }
    return out;
}

namespace {

std::int64_t guard(std::int64_t v) {
    if (v > kValueGuard || v < -kValueGuard) throw EvalError("arithmetic overflow: value exceeds 2^53");
    return v;
}

const Binding& lookup(const MachineState& s, const Expr& e) {
    for (auto it = s.env.rbegin(); it != s.env.rend(); ++it) {
        if (e.decl >= 0 ? it->decl == e.decl : it->name == e.name) return *it;
    }
    throw ScopeError("identifier '" + e.name + "' is not bound");
}

Location location_of(const MachineState& s, const std::string& name, int decl) {
    for (auto it = s.env.rbegin(); it != s.env.rend(); ++it) {
        if (decl >= 0 ? it->decl == decl : it->name == name) return it->loc;
    }
    throw ScopeError("identifier '" + name + "' is not bound");
}

}  // namespace

std::int64_t eval(const Expr& e, const MachineState& s) {
    switch (e.op) {
    case Expr::Op::Literal:
        return guard(e.value);
    case Expr::Op::Identifier: {
        const Binding& b = lookup(s, e);
        auto it = s.store.find(b.loc);
        if (it == s.store.end()) throw EvalError("identifier '" + e.name + "' refers to a freed location");
        return it->second;
    }
    case Expr::Op::Add:
        return guard(eval(e.operands[0], s) + eval(e.operands[1], s));
    case Expr::Op::Sub:
        return guard(eval(e.operands[0], s) - eval(e.operands[1], s));
    case Expr::Op::Mul: {
        std::int64_t a = eval(e.operands[0], s), b = eval(e.operands[1], s);
        __int128 p = static_cast<__int128>(a) * b;
        if (p > kValueGuard || p < -kValueGuard) throw EvalError("arithmetic overflow: value exceeds 2^53");
        return static_cast<std::int64_t>(p);
    }
    case Expr::Op::Square: {
        std::int64_t a = eval(e.operands[0], s);
        __int128 p = static_cast<__int128>(a) * a;
        if (p > kValueGuard) throw EvalError("arithmetic overflow: value exceeds 2^53");
        return static_cast<std::int64_t>(p);
    }
    case Expr::Op::Negate:
        return -eval(e.operands[0], s);
    }
    return 0;
}

bool eval(const BoolExpr& b, const MachineState& s) {
    auto cmp = [&](auto pred) { return pred(eval(b.operands[0], s), eval(b.operands[1], s)); };
    switch (b.op) {
    case BoolExpr::Op::True:
        return true;
    case BoolExpr::Op::False:
        return false;
    case BoolExpr::Op::Eq:
        return cmp(std::equal_to<>{});
    case BoolExpr::Op::Ne:
        return cmp(std::not_equal_to<>{});
    case BoolExpr::Op::Lt:
        return cmp(std::less<>{});
    case BoolExpr::Op::Le:
        return cmp(std::less_equal<>{});
    case BoolExpr::Op::Gt:
        return cmp(std::greater<>{});
    case BoolExpr::Op::Ge:
        return cmp(std::greater_equal<>{});
    case BoolExpr::Op::And:
        return eval(b.subs[0], s) && eval(b.subs[1], s);
    case BoolExpr::Op::Or:
        return eval(b.subs[0], s) || eval(b.subs[1], s);
    case BoolExpr::Op::Not:
        return !eval(b.subs[0], s);
    }
    return false;
}

namespace {

struct Item {
    const Stmt* stmt;
    // Marks the end of stmt's block.
    bool exit = false;
};

struct Branch {
    MachineState state;
    std::vector<Item> control;
    Trace trace;
    int steps = 0;
};

class Runner {
public:
    explicit Runner(const RunOptions& opts) : opts_(opts) {
        if (opts.value_bound < 0) throw Error("value bound must be non-negative");
        if (opts.fuel < 1) throw Error("fuel must be at least 1");
    }

    std::vector<Trace> run(const Program& p, const MachineState& initial) {
        Branch start;
        start.state = initial;
        start.control.push_back(Item{&p});
        start.trace.states.push_back(start.state.snapshot());
        std::vector<Branch> work{std::move(start)};
        std::vector<Trace> done;
        while (!work.empty()) {
            Branch b = std::move(work.back());
            work.pop_back();
            advance(std::move(b), work, done);
        }
        return done;
    }

private:
    // Runs one branch until it finishes, runs out of fuel, or forks.
    void advance(Branch b, std::vector<Branch>& work, std::vector<Trace>& done) {
        while (!b.control.empty()) {
            if (b.steps >= opts_.fuel) {
                b.trace.status = Status::FuelExhausted;
                break;
            }
            Item item = b.control.back();
            b.control.pop_back();
            ++b.steps;
            std::vector<std::int64_t> choices;
            if (step(b, item, choices)) {
                record(b);
                continue;
            }
            // Random choice: fork one branch per value, first value on top.
            for (std::size_t i = choices.size(); i-- > 0;) {
                Branch next = b;
                finish_random(next, item, choices[i]);
                record(next);
                work.push_back(std::move(next));
            }
            return;
        }
        b.trace.output = b.state.output;
        b.trace.final_state = b.state;
        done.push_back(std::move(b.trace));
    }

    void record(Branch& b) {
        if (opts_.gc_every_step) b.state = collect_garbage(b.state);
        b.trace.states.push_back(b.state.snapshot());
    }

    // Executes one control item. Returns false with the candidate values
    // when the item needs a random choice.
    bool step(Branch& b, const Item& item, std::vector<std::int64_t>& choices) {
        MachineState& st = b.state;
        const Stmt& s = *item.stmt;
        if (item.exit) {
            const Binding bound = st.env.back();
            st.env.pop_back();
            if (opts_.policy == Policy::Lexical) {
                st.allocated.erase(bound.loc);
                st.store.erase(bound.loc);
            }
            return true;
        }
        switch (s.kind) {
        case Stmt::Kind::Skip:
            return true;
        case Stmt::Kind::Assign: {
            std::int64_t v = eval(s.expr, st);
            st.store.at(location_of(st, s.name, s.decl)) = v;
            return true;
        }
        case Stmt::Kind::RandomAssign:
            choices = random_values(opts_.value_bound);
            return false;
        case Stmt::Kind::Seq:
            b.control.push_back(Item{&s.body[1]});
            b.control.push_back(Item{&s.body[0]});
            return true;
        case Stmt::Kind::If:
            b.control.push_back(Item{&s.body[eval(s.cond, st) ? 0 : 1]});
            return true;
        case Stmt::Kind::While:
            if (eval(s.cond, st)) {
                b.control.push_back(Item{&s});
                b.control.push_back(Item{&s.body[0]});
            }
            return true;
        case Stmt::Kind::Block:
            if (s.init == Stmt::Init::Random) {
                choices = random_values(opts_.value_bound);
                return false;
            }
            enter(b, s, eval(s.expr, st));
            return true;
        case Stmt::Kind::Print:
            st.output.push_back(eval(s.expr, st));
            return true;
        }
        return true;
    }

    void finish_random(Branch& b, const Item& item, std::int64_t v) {
        const Stmt& s = *item.stmt;
        if (s.kind == Stmt::Kind::Block) {
            enter(b, s, v);
        } else {
            b.state.store.at(location_of(b.state, s.name, s.decl)) = v;
        }
    }

    static void enter(Branch& b, const Stmt& s, std::int64_t v) {
        MachineState& st = b.state;
        Location loc = st.next_location++;
        st.allocated.insert(loc);
        st.store[loc] = v;
        st.env.push_back(Binding{s.name, s.decl, loc});
        b.control.push_back(Item{&s, true});
        b.control.push_back(Item{&s.body[0]});
    }

    const RunOptions& opts_;
};

}  // namespace

std::vector<Trace> run(const Program& p, const RunOptions& opts, const MachineState& initial) {
    return Runner(opts).run(p, initial);
}

// ---------------------------------------------------------------------------
// Partial correctness

HoareTriple make_triple(const std::string& pre, const std::string& program, const std::string& post) {
    HoareTriple t;
    t.pre = parse_condition(pre);
    t.post = parse_condition(post);
    std::set<std::string> globals = identifiers(t.pre);
    for (const auto& g : identifiers(t.post)) globals.insert(g);
    for (const auto& g : free_identifiers(program)) globals.insert(g);
    t.globals.assign(globals.begin(), globals.end());
    t.program = parse_program(program, t.globals);
    return t;
}

HoareVerdict check_partial_correctness(const HoareTriple& t, int value_bound, int fuel) {
    if (value_bound < 1 || fuel < 1) throw Error("bounds must be positive");
    HoareVerdict verdict;
    const std::vector<std::int64_t> values = random_values(value_bound);
    const std::size_t k = t.globals.size();
    std::vector<std::size_t> index(k, 0);
    RunOptions opts;
    opts.value_bound = value_bound;
    opts.fuel = fuel;
    for (;;) {
        MachineState init;
        for (std::size_t i = 0; i < k; ++i) {
            Location loc = init.next_location++;
            init.allocated.insert(loc);
            init.store[loc] = values[index[i]];
            init.env.push_back(Binding{t.globals[i], static_cast<int>(i), loc});
        }
        if (eval(t.pre, init)) {
            ++verdict.initial_stores;
            for (const Trace& trace : run(t.program, opts, init)) {
                if (trace.status == Status::FuelExhausted) {
                    ++verdict.exhausted;
                    continue;
                }
                ++verdict.terminated;
                if (eval(t.post, trace.final_state)) continue;
                verdict.holds = false;
                for (const auto& g : t.globals) {
                    verdict.initial[g] = init.value_of(g);
                    verdict.final_values[g] = trace.final_state.value_of(g);
                }
                verdict.output = trace.output;
                return verdict;
            }
        }
        std::size_t pos = k;
        for (;;) {
            if (pos == 0) return verdict;
            --pos;
            if (++index[pos] < values.size()) break;
            index[pos] = 0;
        }
    }
}

}  // namespace dynsem::imp
