#pragma once

// Store machine for the while-language: environments map declarations to
// locations, the store maps locations to integers, and an extent policy
// decides whether leaving a block frees its location.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dynsem/imp_syntax.hpp"

namespace dynsem::imp {

enum class Policy { Lexical, Indefinite };

std::string to_string(Policy p);
Policy parse_policy(const std::string& text);

using Location = int;

struct Binding {
    std::string name;
    int decl;
    Location loc;

    friend bool operator==(const Binding&, const Binding&) = default;
};

// Observable machine state between steps.
struct Snapshot {
    std::vector<Binding> env;
    std::map<Location, std::int64_t> store;
    std::set<Location> allocated;
    std::size_t outputs = 0;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct MachineState {
    // Innermost binding last.
    std::vector<Binding> env;
    std::map<Location, std::int64_t> store;
    std::set<Location> allocated;
    std::vector<std::int64_t> output;
    Location next_location = 0;

    Snapshot snapshot() const;
    std::int64_t value_of(const std::string& name) const;
};

// Frees every allocated location not bound in the environment.
MachineState collect_garbage(const MachineState& s);

enum class Status { Finished, FuelExhausted };
std::string to_string(Status s);

struct Trace {
    std::vector<Snapshot> states;
    std::vector<std::int64_t> output;
    Status status = Status::Finished;
    MachineState final_state;
};

struct RunOptions {
    Policy policy = Policy::Lexical;
    // Random choices range over [-value_bound, value_bound].
    int value_bound = 1;
    // Maximum number of steps per branch.
    int fuel = 1000;
    bool gc_every_step = false;
};

// Values tried for random assignment: 0, 1, -1, 2, -2, ...
std::vector<std::int64_t> random_values(int bound);

// Every execution branch, in the order random values are tried.
std::vector<Trace> run(const Program& p, const RunOptions& opts, const MachineState& initial = {});

// Integers beyond this magnitude raise an error.
inline constexpr std::int64_t kValueGuard = std::int64_t{1} << 53;

std::int64_t eval(const Expr& e, const MachineState& s);
bool eval(const BoolExpr& b, const MachineState& s);

struct HoareTriple {
    BoolExpr pre;
    Program program;
    BoolExpr post;
    // Identifiers of pre, post and the program's free identifiers, sorted.
    std::vector<std::string> globals;
};

// Globals are inferred from the conditions and the program's undeclared
// identifiers.
HoareTriple make_triple(const std::string& pre, const std::string& program, const std::string& post);

struct HoareVerdict {
    bool holds = true;
    std::size_t initial_stores = 0;
    std::size_t terminated = 0;
    std::size_t exhausted = 0;
    // On failure: the initial and final values of the globals.
    std::map<std::string, std::int64_t> initial;
    std::map<std::string, std::int64_t> final_values;
    std::vector<std::int64_t> output;
};

HoareVerdict check_partial_correctness(const HoareTriple& t, int value_bound, int fuel);

}  // namespace dynsem::imp
