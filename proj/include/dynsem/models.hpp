#pragma once

// Finite first-order models, assignments, classical evaluation, choice
// functions for epsilon terms, and exhaustive enumeration.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynsem/syntax.hpp"

namespace dynsem {

// Domain-size cap used when no explicit one is given: DYNSEM_MAX_DOMAIN if
// set to a positive integer, else 4.
int default_domain_cap();

class Model {
public:
    struct Table {
        std::string name;
        int arity = 0;
        // Indexed by the argument tuple read as a base-n number, first
        // argument most significant. Predicates store 0/1.
        std::vector<int> cells;

        friend bool operator==(const Table&, const Table&) = default;
    };

    Model() = default;
    // Every predicate empty, every function constantly 0.
    Model(const Signature& sig, int domain_size);

    int size() const noexcept { return n_; }
    const Signature& signature() const noexcept { return sig_; }
    const std::vector<Table>& predicates() const noexcept { return preds_; }
    const std::vector<Table>& functions() const noexcept { return funcs_; }

    int predicate_index(std::string_view name) const;
    int function_index(std::string_view name) const;

    bool holds(int pred, std::span<const int> args) const;
    bool holds(std::string_view pred, std::span<const int> args) const;
    int apply(int fn, std::span<const int> args) const;
    int apply(std::string_view fn, std::span<const int> args) const;

    void set(std::string_view pred, std::span<const int> args, bool value = true);
    void define(std::string_view fn, std::span<const int> args, int value);

    // Tuples of a predicate in lexicographic order.
    std::vector<std::vector<int>> extension(std::string_view pred) const;

    // Mutable access for enumerators.
    std::vector<Table>& mutable_predicates() noexcept { return preds_; }
    std::vector<Table>& mutable_functions() noexcept { return funcs_; }

    friend bool operator==(const Model&, const Model&) = default;

private:
    std::size_t offset(const Table& t, std::span<const int> args) const;

    Signature sig_;
    int n_ = 0;
    std::vector<Table> preds_;
    std::vector<Table> funcs_;
};

std::string describe(const Model& m);

// Total map from a declared variable universe to domain elements.
class Assignment {
public:
    Assignment() = default;
    Assignment(std::vector<std::string> vars, std::vector<int> values);
    // Every variable mapped to 0.
    explicit Assignment(std::vector<std::string> vars);

    const std::vector<std::string>& variables() const noexcept { return vars_; }
    const std::vector<int>& values() const noexcept { return values_; }

    bool has(std::string_view var) const;
    int at(std::string_view var) const;
    void set(std::string_view var, int value);
    // Adds the variable if absent.
    void bind(const std::string& var, int value);

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<std::string> vars_;
    std::vector<int> values_;
};

std::string describe(const Assignment& g);

// Visits every assignment of `vars` into {0..n-1}, last variable fastest.
void for_each_assignment(const std::vector<std::string>& vars, int n, const std::function<void(const Assignment&)>& visit);

// Tarskian truth. Epsilon terms and RandomAssign are rejected.
bool eval_classical(const Formula& f, const Model& m, const Assignment& g);
int eval_term(const Term& t, const Model& m, const Assignment& g);

// Source of epsilon values: the element chosen from a subset of the domain,
// given as a bitmask.
class ChoiceSource {
public:
    virtual ~ChoiceSource() = default;
    virtual int choose(std::uint32_t subset) = 0;
};

class ChoiceFunction : public ChoiceSource {
public:
    ChoiceFunction() = default;
    ChoiceFunction(int domain_size, std::vector<int> choices);
    // The intended function picking the least element (0 for the empty set).
    static ChoiceFunction least(int domain_size);

    int domain_size() const noexcept { return n_; }
    const std::vector<int>& choices() const noexcept { return choices_; }
    int operator()(std::uint32_t subset) const;
    int choose(std::uint32_t subset) override { return (*this)(subset); }

    // choice(S) is in S for every nonempty S.
    bool intended() const;

    friend bool operator==(const ChoiceFunction&, const ChoiceFunction&) = default;

private:
    int n_ = 0;
    std::vector<int> choices_;
};

// Truth with epsilon terms: (eps x A) denotes the choice from the set of
// elements satisfying A under the current assignment.
bool eval_with_epsilon(const Formula& f, const Model& m, ChoiceSource& c, const Assignment& g);
int eval_term_with_epsilon(const Term& t, const Model& m, ChoiceSource& c, const Assignment& g);

// Number of intended choice functions on a domain of size n.
std::uint64_t intended_choice_count(int n);

// Visits every intended choice function on a domain of size n.
void for_each_intended_choice(int n, const std::function<void(const ChoiceFunction&)>& visit);

// Explores only the choices `eval` actually queries. Each branch fixes the
// values of the subsets queried along it; the branches partition the
// intended choice functions, and `visit` receives each branch's outcome with
// the number of intended functions it covers. Returns the branch count.
std::size_t for_each_choice_branch(int n, const std::function<bool(ChoiceSource&)>& eval,
                                   const std::function<void(bool outcome, std::uint64_t weight)>& visit);

// Canonical enumeration: domain size ascending, then the digit string made
// of predicate tables (names sorted, tuples lexicographic, base 2) followed
// by function tables (base n), last digit fastest.
class ModelEnumerator {
public:
    ModelEnumerator(Signature sig, int max_n, int min_n = 1, int cap = default_domain_cap());

    // Advances to the next model; false when exhausted.
    bool next();
    const Model& current() const noexcept { return model_; }

    static std::uint64_t count(const Signature& sig, int n);

private:
    bool increment();

    Signature sig_;
    int max_n_;
    int n_;
    bool started_ = false;
    Model model_;
};

// Visits every model; stops early when `visit` returns false.
void enumerate_models(const Signature& sig, int max_n, const std::function<bool(const Model&)>& visit,
                      int cap = default_domain_cap());
std::vector<Model> all_models(const Signature& sig, int max_n, int cap = default_domain_cap());

}  // namespace dynsem
