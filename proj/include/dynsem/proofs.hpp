#pragma once

// Natural deduction: linear derivations with flagged variables, tree
// derivations with proper parameters, and a finite-model entailment oracle.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynsem/models.hpp"
#include "dynsem/syntax.hpp"

namespace dynsem::nd {

// ---------------------------------------------------------------------------
// Linear derivations

enum class LineRule { Premise, UI, EG, ExInst, UG, TautCon };

std::string to_string(LineRule r);

struct Line {
    int number = 0;
    Formula formula;
    LineRule rule = LineRule::Premise;
    std::vector<int> refs;
    // Flagged variable of ExInst and UG lines.
    std::string flag;
};

struct LinearDerivation {
    std::vector<Line> lines;
    // Value of an `# expect:` header, if any.
    std::string expect;

    const Line& line(int number) const { return lines.at(static_cast<std::size_t>(number - 1)); }
    std::vector<Formula> premises() const;
    const Formula& conclusion() const { return lines.back().formula; }
};

// Lines look like `3. (R x y) ; ExInst(2) !y`. Numbers must run 1, 2, ...;
// references must point to earlier lines; exactly the ExInst and UG lines
// carry a flag. Violations raise MalformedError.
LinearDerivation parse_linear(std::string_view text);
std::string render(const LinearDerivation& d);

// Flagged variable -> line numbers flagging it, in order.
using FlagRecord = std::map<std::string, std::vector<int>>;
FlagRecord flag_record(const LinearDerivation& d);

struct Violation {
    std::string code;
    int line = 0;
    std::string message;
};

struct Ordering {
    bool acyclic = true;
    std::vector<std::string> order;
    // Variables on one cycle of the constraint digraph, in cycle order.
    std::vector<std::string> cycle;
};

// Pairs (v, u): v must come before u because u is free in a line flagging v.
std::set<std::pair<std::string, std::string>> ordering_constraints(const LinearDerivation& d);
// Topological order with ties broken by name, or a cycle.
Ordering ordering_witness(const LinearDerivation& d);
bool respects_constraints(const std::vector<std::string>& order,
                          const std::set<std::pair<std::string, std::string>>& constraints);

enum class QuineStatus { Accepted, Unfinished, Rejected };
std::string to_string(QuineStatus s);

struct QuineVerdict {
    QuineStatus status = QuineStatus::Accepted;
    std::vector<Violation> violations;
    FlagRecord flags;
    Ordering ordering;
    // Flagged variables free in the last line (unfinished derivations).
    std::vector<std::string> pending;

    // No flagging violation and an ordering exists.
    bool flagging_layer_accepts() const;
};

inline constexpr int kMaxTautLetters = 16;

QuineVerdict check_quine(const LinearDerivation& d);

// True iff `conclusion` follows from `premises` truth-functionally, with
// atoms, identities and quantified subformulas as letters (up to bound
// variable renaming). Throws CapError above kMaxTautLetters letters.
bool tautological_consequence(const std::vector<Formula>& premises, const Formula& conclusion);

// ---------------------------------------------------------------------------
// Semantic oracle

struct EntailmentVerdict {
    bool entailed = true;
    std::uint64_t models_checked = 0;
    std::optional<Model> countermodel;
    std::optional<Assignment> assignment;
};

// Every model with at most max_n elements and every assignment to the free
// variables that satisfies the premises satisfies the conclusion. The first
// countermodel in canonical order is returned otherwise.
EntailmentVerdict entailment_oracle(const std::vector<Formula>& premises, const Formula& conclusion,
                                    const Signature& sig, int max_n, int cap = default_domain_cap());

// ---------------------------------------------------------------------------
// Tree derivations

enum class TreeRule { Assumption, AndI, AndE, ImpI, ImpE, OrI, OrE, NotI, NotE, AllI, AllE, ExI, ExE, Reiterate };

std::string to_string(TreeRule r);

struct TreeNode {
    Formula formula;
    TreeRule rule = TreeRule::Assumption;
    // Proper parameter of AllI and ExE.
    std::string parameter;
    // Labels discharged by ImpI, NotI, ExE (one) and OrE (two).
    std::vector<int> discharges;
    // Assumption label; 0 for an open premise.
    int label = 0;
    std::vector<TreeNode> premises;
    std::size_t source_line = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeDerivation {
    TreeNode root;
    std::string expect;

    friend bool operator==(const TreeDerivation& a, const TreeDerivation& b) { return a.root == b.root; }
};

// Indented blocks: each node is `FORMULA ; RULE` with premises on the
// following lines indented further. Free identifiers are parameters.
//   (ex y (P y)) ; ExE(a) [discharge 1]
//     (ex x (P x)) ; assume
//     (ex y (P y)) ; ExI
//       (P a) ; assume 1
TreeDerivation parse_tree(std::string_view text);
std::string render(const TreeDerivation& d);

struct GentzenVerdict {
    bool accepted = true;
    bool pure = true;
    std::vector<Violation> violations;
    // Proper parameter -> number of applications using it.
    std::map<std::string, int> proper_parameters;
    std::vector<Formula> assumptions;
    Formula conclusion;
};

GentzenVerdict check_gentzen(const TreeDerivation& d);

// Gives every AllI/ExE application its own parameter. Throws Error when
// the derivation is not accepted.
TreeDerivation purify(const TreeDerivation& d);

// Formulas of the undischarged assumptions, in tree order.
std::vector<Formula> open_assumptions(const TreeNode& n);

}  // namespace dynsem::nd
