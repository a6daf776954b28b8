#pragma once

// Epsilon terms: translating quantifiers away, checking the epsilon axiom,
// and recovering the terms that flagged variables abbreviate.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynsem/models.hpp"
#include "dynsem/proofs.hpp"
#include "dynsem/syntax.hpp"

namespace dynsem::eps {

// (ex x A)  becomes A*[x := (eps x A*)]
// (all x A) becomes A*[x := (eps x (not A*))]
// with A* translated first. RandomAssign raises Error.
Formula eps_translate(const Formula& f);

struct AbbreviationSolution {
    // Flagged variable -> fully expanded epsilon term.
    std::map<std::string, Term> terms;
    // Each variable before the letters its term mentions.
    std::vector<std::string> order;
};

enum class Failure { None, Conflict, Cycle, Premise, Premature, Shape };
std::string to_string(Failure f);

struct Disabbreviation {
    bool ok = true;
    AbbreviationSolution solution;
    Failure failure = Failure::None;
    // Variables involved in the failure.
    std::vector<std::string> variables;
    std::string message;
};

// ExInst from (ex x A) flagging v gives v := (eps x A); UG to (all x A)
// flagging v gives v := (eps x (not A)). Letters inside a matrix are
// expanded to their own terms.
Disabbreviation disabbreviate(const nd::LinearDerivation& d);

// A[witness] -> A[(eps var A)], evaluated under `g`.
bool check_eps_axiom(const Model& m, ChoiceSource& c, const Formula& matrix, const std::string& var,
                     const Term& witness, const Assignment& g = {});
// The designated variable is the matrix's only free variable.
bool check_eps_axiom(const Model& m, ChoiceSource& c, const Formula& matrix, const Term& witness);

// Closed formulas of the enumerated family with quantifier depth at most
// `depth`.
std::vector<Formula> sentence_family(const Signature& sig, int depth, int max_size,
                                     const std::vector<std::string>& variables = {"x", "y"});

struct Mismatch {
    Formula sentence;
    Model model;
    bool classical = false;
};

struct ConservativityReport {
    std::size_t sentences = 0;
    std::uint64_t models = 0;
    // Sentence/model/intended-choice-function combinations covered.
    std::uint64_t combinations = 0;
    // Choice-branch evaluations actually run.
    std::uint64_t branches = 0;
    std::uint64_t mismatches = 0;
    std::optional<Mismatch> first_mismatch;
};

// Compares classical truth with the truth of the translation under every
// intended choice function, on every model up to max_n.
ConservativityReport conservativity_scan(const std::vector<Formula>& sentences, const Signature& sig, int max_n,
                                         int cap = default_domain_cap());

}  // namespace dynsem::eps
