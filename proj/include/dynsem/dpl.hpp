#pragma once

// Dynamic Predicate Logic: formulas denote relations between assignments.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynsem/models.hpp"
#include "dynsem/syntax.hpp"

namespace dynsem::dpl {

// All assignments of a sorted variable universe into a domain of size n,
// indexed in mixed radix with the first variable most significant.
class StateSpace {
public:
    StateSpace(std::vector<std::string> universe, int domain_size);

    std::size_t size() const noexcept { return size_; }
    int domain_size() const noexcept { return n_; }
    const std::vector<std::string>& universe() const noexcept { return vars_; }

    Assignment state(std::size_t index) const;
    std::size_t index(const Assignment& g) const;
    int value(std::size_t index, std::size_t var) const;
    std::size_t with(std::size_t index, std::size_t var, int value) const;
    std::size_t variable(const std::string& name) const;

private:
    std::vector<std::string> vars_;
    int n_;
    std::size_t size_;
    std::vector<std::size_t> stride_;
};

class StateRelation {
public:
    StateRelation() = default;
    explicit StateRelation(std::size_t states);
    static StateRelation identity(std::size_t states);
    // Identity restricted to the states flagged in `keep`.
    static StateRelation test(const std::vector<bool>& keep);

    std::size_t states() const noexcept { return states_; }
    bool contains(std::size_t from, std::size_t to) const;
    void insert(std::size_t from, std::size_t to);
    bool has_output(std::size_t from) const;
    std::vector<bool> domain() const;
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
    std::size_t count() const;
    bool subset_of_identity() const;

    StateRelation compose(const StateRelation& next) const;
    const std::vector<std::uint64_t>& bits() const noexcept { return bits_; }

    friend bool operator==(const StateRelation&, const StateRelation&) = default;

private:
    std::size_t states_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Every variable of f, free or bound, must belong to the universe.
StateRelation dpl_eval(const Formula& f, const Model& m, const StateSpace& space);
StateRelation dpl_eval(const Formula& f, const Model& m, const std::vector<std::string>& universe);

// True iff f has an output state from g. The universe is g's variables.
bool dpl_truth(const Formula& f, const Model& m, const Assignment& g);
// Output states of f from g, in the order the evaluator reaches them.
std::vector<Assignment> dpl_outputs(const Formula& f, const Model& m, const Assignment& g);

// Sorted variables of f (free, bound and assigned).
std::vector<std::string> universe_of(const std::vector<Formula>& fs);

struct EquivalenceVerdict {
    bool equal = true;
    std::vector<std::string> universe;
    std::size_t models_checked = 0;
    std::optional<Model> model;
    // A pair in exactly one of the two relations.
    std::optional<Assignment> input;
    std::optional<Assignment> output;
    bool in_first = false;
};

// Universe defaults to the variables of both formulas.
EquivalenceVerdict dpl_equivalent(const Formula& f1, const Formula& f2, const Signature& sig, int max_n,
                                  std::vector<std::string> universe = {});

// A formula with exactly one hole.
struct Context {
    Formula shape;
};

inline constexpr const char* kHole = "[]";

Formula plug(const Context& c, const Formula& f);
std::string render(const Context& c);
Context parse_context(const std::string& text, const Signature* sig = nullptr);
int context_depth(const Context& c);

// Contexts of depth <= depth over the grammar hole, (and C f), (and f C),
// (implies f C), (implies C f), (not C), (ex v C), where f ranges over the
// atoms of the signature and v over the universe.
std::vector<Context> enumerate_contexts(const Signature& sig, const std::vector<std::string>& universe, int depth);

struct ContextVerdict {
    bool equal = true;
    std::vector<std::string> universe;
    std::size_t contexts_checked = 0;
    std::optional<Context> context;
    std::optional<Model> model;
    std::optional<Assignment> input;
    bool first_truth = false;
    bool second_truth = false;
};

ContextVerdict contextual_equivalent(const Formula& f1, const Formula& f2, const Signature& sig, int max_n, int depth,
                                     std::vector<std::string> universe = {});

struct AbstractionReport {
    int max_n = 0;
    int depth = 0;
    int size_bound = 0;
    std::vector<std::string> universe;
    std::size_t formulas = 0;
    std::size_t contexts = 0;
    std::size_t models = 0;
    std::uint64_t total_pairs = 0;
    std::size_t denotation_classes = 0;
    std::size_t behavior_classes = 0;
    // Denotationally equal but distinguished by some context.
    std::vector<std::pair<Formula, Formula>> correctness_violations;
    // Contextually equivalent but denotationally distinct: each group is a
    // behavior class split into its denotation classes; every pair drawn
    // from two different classes of a group is a candidate.
    std::vector<std::vector<std::vector<Formula>>> candidate_groups;
    std::uint64_t candidate_pairs = 0;
};

AbstractionReport abstraction_report(const Signature& sig, int max_n, int depth, int size_bound,
                                     std::vector<std::string> universe = {"x", "y"});

}  // namespace dynsem::dpl
