#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dynsem/error.hpp"
#include "dynsem/proofs.hpp"

using namespace dynsem;
using namespace dynsem::nd;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path corpus() { return fs::path(DYNSEM_CORPUS_DIR) / "nd"; }

std::vector<fs::path> files(const std::string& ext) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(corpus())) {
        if (e.path().extension() == ext) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

LinearDerivation linear(const std::string& name) { return parse_linear(slurp(corpus() / name)); }
TreeDerivation tree(const std::string& name) { return parse_tree(slurp(corpus() / name)); }

Signature quine_signature() {
    Signature s;
    s.add_predicate("P", 1);
    s.add_predicate("Q", 1);
    s.add_predicate("R", 2);
    return s;
}

bool has_code(const std::vector<Violation>& vs, const std::string& code) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST(ParseLinear, LineSyntax) {
    auto d = parse_linear("1. (ex x (P x)) ; Premise\n2. (P y) ; ExInst(1) !y\n");
    ASSERT_EQ(d.lines.size(), 2u);
    EXPECT_EQ(d.lines[1].rule, LineRule::ExInst);
    EXPECT_EQ(d.lines[1].refs, std::vector<int>{1});
    EXPECT_EQ(d.lines[1].flag, "y");
    EXPECT_EQ(parse_linear(render(d)).lines.size(), 2u);
    EXPECT_EQ(render(parse_linear(render(d))), render(d));
}

TEST(ParseLinear, MalformedReferences) {
    EXPECT_THROW(parse_linear("1. (P x) ; UI(1)\n"), MalformedError);
    EXPECT_THROW(parse_linear("1. (P x) ; Premise\n3. (P x) ; TautCon(1)\n"), MalformedError);
    EXPECT_THROW(parse_linear("1. (P x) ; Premise\n2. (P x) ; TautCon(2)\n"), MalformedError);
    EXPECT_THROW(parse_linear("1. (ex x (P x)) ; Premise\n2. (P y) ; ExInst(1)\n"), MalformedError);
    EXPECT_THROW(parse_linear("1. (P x) ; Premise !x\n"), MalformedError);
    EXPECT_THROW(parse_linear("1. (P x) ; Modus(1)\n"), SyntaxError);
    EXPECT_THROW(parse_linear(""), MalformedError);
}

TEST(Quine, ValidSwapAccepted) {
    auto v = check_quine(linear("swap-valid.ded"));
    EXPECT_EQ(v.status, QuineStatus::Accepted);
    EXPECT_TRUE(v.violations.empty());
    EXPECT_EQ(v.ordering.order, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(v.flags.at("y"), std::vector<int>{2});
    EXPECT_EQ(v.flags.at("x"), std::vector<int>{5});
}

TEST(Quine, InvalidSwapRejectedWithCycle) {
    auto v = check_quine(linear("swap-invalid.ded"));
    EXPECT_EQ(v.status, QuineStatus::Rejected);
    EXPECT_FALSE(v.ordering.acyclic);
    auto cycle = v.ordering.cycle;
    std::sort(cycle.begin(), cycle.end());
    EXPECT_EQ(cycle, (std::vector<std::string>{"x", "y"}));
    EXPECT_TRUE(has_code(v.violations, "ordering-cycle"));
    EXPECT_FALSE(v.flagging_layer_accepts());
}

TEST(Quine, TautologicalRepeat) {
    auto v = check_quine(linear("repeat.ded"));
    EXPECT_EQ(v.status, QuineStatus::Accepted);
    EXPECT_TRUE(v.ordering.order.empty());
}

TEST(Quine, UnfinishedIsDistinct) {
    auto v = check_quine(linear("unfinished.ded"));
    EXPECT_EQ(v.status, QuineStatus::Unfinished);
    EXPECT_EQ(v.pending, std::vector<std::string>{"y"});
    EXPECT_TRUE(v.flagging_layer_accepts());
}

TEST(Quine, FlaggingViolations) {
    EXPECT_TRUE(has_code(check_quine(linear("reflag.ded")).violations, "reflagged"));
    EXPECT_TRUE(has_code(check_quine(linear("witness-generalized.ded")).violations, "reflagged"));
    EXPECT_TRUE(has_code(check_quine(linear("flag-in-premise.ded")).violations, "flag-in-premise"));
    EXPECT_TRUE(has_code(check_quine(linear("bad-tautcon.ded")).violations, "shape"));
    EXPECT_TRUE(has_code(check_quine(linear("bad-ui.ded")).violations, "shape"));
}

TEST(Quine, LocalRestrictionOnInstantialVariable) {
    // y is used before it is flagged; the conclusion still follows, but the
    // instantial variable must be new at its flagging line.
    auto d = parse_linear(
        "1. (all x (implies (P x) (Q x))) ; Premise\n"
        "2. (ex x (P x)) ; Premise\n"
        "3. (implies (P y) (Q y)) ; UI(1)\n"
        "4. (P y) ; ExInst(2) !y\n"
        "5. (Q y) ; TautCon(3, 4)\n"
        "6. (ex x (Q x)) ; EG(5)\n");
    auto v = check_quine(d);
    EXPECT_EQ(v.status, QuineStatus::Rejected);
    EXPECT_TRUE(has_code(v.violations, "flag-free-above"));
    EXPECT_TRUE(check_quine(linear("syllogism.ded")).violations.empty());
}

TEST(Quine, GeneralizedVariableMustDisappear) {
    auto d = parse_linear(
        "1. (all z (R z z)) ; Premise\n"
        "2. (R y y) ; UI(1)\n"
        "3. (all x (R x y)) ; UG(2) !y\n");
    EXPECT_TRUE(has_code(check_quine(d).violations, "flag-free-in-result"));
}

TEST(Quine, ShapeChecks) {
    auto ok = [](const char* text) { return check_quine(parse_linear(text)).violations.empty(); };
    EXPECT_TRUE(ok("1. (all x (R x x)) ; Premise\n2. (R (f y) (f y)) ; UI(1)\n"));
    EXPECT_TRUE(ok("1. (R y y) ; Premise\n2. (ex x (R x y)) ; EG(1)\n"));
    EXPECT_TRUE(ok("1. (R y y) ; Premise\n2. (ex x (R x x)) ; EG(1)\n"));
    EXPECT_FALSE(ok("1. (R y z) ; Premise\n2. (ex x (R x x)) ; EG(1)\n"));
    // Instantiating y for x would be captured by the inner quantifier.
    EXPECT_TRUE(ok("1. (all x (ex y (R x y))) ; Premise\n2. (ex z (R y z)) ; UI(1)\n"));
    EXPECT_FALSE(ok("1. (all x (ex y (R x y))) ; Premise\n2. (ex y (R y y)) ; UI(1)\n"));
}

TEST(TautCon, TruthTables) {
    auto f = [](const char* s) { return parse_formula(s); };
    EXPECT_TRUE(tautological_consequence({f("(P x)"), f("(implies (P x) (Q x))")}, f("(Q x)")));
    EXPECT_FALSE(tautological_consequence({f("(or (P x) (Q x))")}, f("(P x)")));
    EXPECT_TRUE(tautological_consequence({}, f("(or (ex x (P x)) (not (ex y (P y))))")));
    EXPECT_FALSE(tautological_consequence({}, f("(or (ex x (P x)) (not (ex x (Q x))))")));
    std::string big = "(P x0)";
    for (int i = 1; i < 17; ++i) big = "(and " + big + " (P x" + std::to_string(i) + "))";
    EXPECT_THROW(tautological_consequence({}, f(big.c_str())), CapError);
}

// Cross-check: an ordering exists iff some permutation respects every
// constraint, on random constraint sets over at most six flags.
TEST(Ordering, AgreesWithPermutationSearch) {
    std::mt19937 rng(7);
    const std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
    for (int trial = 0; trial < 300; ++trial) {
        int k = 1 + static_cast<int>(rng() % 6);
        // A derivation flagging each variable with UG from a line that
        // mentions a random subset of the others.
        std::ostringstream text;
        int line = 0;
        for (int i = 0; i < k; ++i) {
            std::string body = "(P " + names[i] + ")";
            for (int j = 0; j < k; ++j) {
                if (j != i && rng() % 3 == 0) body = "(and " + body + " (P " + names[j] + "))";
            }
            text << ++line << ". " << body << " ; TautCon()\n";
        }
        auto d = parse_linear(text.str());
        for (int i = 0; i < k; ++i) {
            d.lines[static_cast<std::size_t>(i)].rule = LineRule::UG;
            d.lines[static_cast<std::size_t>(i)].flag = names[i];
        }
        auto constraints = ordering_constraints(d);
        std::vector<std::string> perm(names.begin(), names.begin() + k);
        bool exists = false;
        do {
            if (respects_constraints(perm, constraints)) exists = true;
        } while (!exists && std::next_permutation(perm.begin(), perm.end()));
        Ordering o = ordering_witness(d);
        ASSERT_EQ(o.acyclic, exists);
        if (o.acyclic) {
            EXPECT_TRUE(respects_constraints(o.order, constraints));
        } else {
            ASSERT_GE(o.cycle.size(), 2u);
            for (std::size_t i = 0; i < o.cycle.size(); ++i) {
                EXPECT_TRUE(constraints.count({o.cycle[i], o.cycle[(i + 1) % o.cycle.size()]}));
            }
        }
    }
}

TEST(Oracle, Examples) {
    Signature sig = quine_signature();
    auto f = [](const char* s) { return parse_formula(s); };
    auto v = entailment_oracle({f("(ex y (all x (R x y)))")}, f("(all x (ex y (R x y)))"), sig, 3);
    EXPECT_TRUE(v.entailed);
    EXPECT_GT(v.models_checked, 0u);
    auto c = entailment_oracle({f("(all x (ex y (R x y)))")}, f("(ex y (all x (R x y)))"), sig, 3);
    ASSERT_FALSE(c.entailed);
    EXPECT_EQ(c.countermodel->size(), 2);
    EXPECT_EQ(c.countermodel->extension("R"), (std::vector<std::vector<int>>{{0, 1}, {1, 0}}));
    EXPECT_FALSE(eval_classical(f("(ex y (all x (R x y)))"), *c.countermodel, Assignment{}));
    EXPECT_TRUE(entailment_oracle({f("(P x)")}, f("(P x)"), sig, 3).entailed);
    EXPECT_FALSE(entailment_oracle({f("(P y)")}, f("(all x (P x))"), sig, 3).entailed);
    EXPECT_THROW(entailment_oracle({}, f("(P x)"), sig, 40), CapError);
}

TEST(Corpus, HasEnoughDerivations) {
    EXPECT_GE(files(".ded").size(), 10u);
    EXPECT_GE(files(".gp").size(), 3u);
}

TEST(Corpus, LinearVerdictsMatchHeaders) {
    for (const auto& p : files(".ded")) {
        auto d = parse_linear(slurp(p));
        ASSERT_FALSE(d.expect.empty()) << p;
        EXPECT_EQ(to_string(check_quine(d).status), d.expect) << p;
    }
}

// Acceptance implies entailment; rejected derivations have countermodels.
TEST(Corpus, CheckerAgreesWithOracle) {
    Signature sig = quine_signature();
    for (const auto& p : files(".ded")) {
        auto d = parse_linear(slurp(p));
        auto v = check_quine(d);
        auto e = entailment_oracle(d.premises(), d.conclusion(), sig, 3);
        if (v.status == QuineStatus::Accepted) {
            EXPECT_TRUE(e.entailed) << p;
        } else if (v.status == QuineStatus::Rejected) {
            EXPECT_FALSE(e.entailed) << p;
        }
    }
}

TEST(ParseTree, Structure) {
    auto d = tree("pure.gp");
    EXPECT_EQ(d.root.rule, TreeRule::ExE);
    EXPECT_EQ(d.root.parameter, "a");
    ASSERT_EQ(d.root.premises.size(), 2u);
    EXPECT_EQ(d.root.premises[1].premises[0].label, 1);
    EXPECT_EQ(parameters(d.root.premises[1].premises[0].formula), std::set<std::string>{"a"});
    EXPECT_EQ(parse_tree(render(d)), d);
}

TEST(ParseTree, Malformed) {
    // Label 2 is never discharged.
    EXPECT_THROW(parse_tree("(ex y (P y)) ; ExE(a) [discharge 1]\n  (ex x (P x)) ; assume\n  (ex y (P y)) ; ExI\n"
                            "    (P a) ; assume 2\n"),
                 MalformedError);
    EXPECT_THROW(parse_tree("(P a) ; AndI\n  (P a) ; assume\n"), MalformedError);
    EXPECT_THROW(parse_tree("(P a) ; AllI\n  (P a) ; assume\n"), MalformedError);
    EXPECT_THROW(parse_tree("(P a) ; assume\n(P a) ; assume\n"), MalformedError);
    EXPECT_THROW(parse_tree("(P a) ; Cut\n  (P a) ; assume\n"), SyntaxError);
}

TEST(Gentzen, PureExistentialAccepted) {
    auto v = check_gentzen(tree("pure.gp"));
    EXPECT_TRUE(v.accepted);
    EXPECT_TRUE(v.pure);
    EXPECT_EQ(v.assumptions.size(), 1u);
}

TEST(Gentzen, EscapingParameterRejected) {
    auto v = check_gentzen(tree("escape.gp"));
    EXPECT_FALSE(v.accepted);
    EXPECT_TRUE(has_code(v.violations, "parameter-escapes"));
    EXPECT_TRUE(has_code(v.violations, "parameter-in-conclusion"));
}

TEST(Gentzen, ReusedParameterIsImpure) {
    auto v = check_gentzen(tree("impure.gp"));
    EXPECT_TRUE(v.accepted);
    EXPECT_FALSE(v.pure);
    EXPECT_EQ(v.proper_parameters.at("a"), 2);
}

TEST(Gentzen, QuantifierSwapDirections) {
    EXPECT_TRUE(check_gentzen(tree("exists-forall.gp")).accepted);
    auto bad = check_gentzen(tree("forall-exists-bad.gp"));
    EXPECT_FALSE(bad.accepted);
    EXPECT_TRUE(has_code(bad.violations, "parameter-in-assumption"));
}

TEST(Gentzen, DischargeMismatch) {
    auto v = check_gentzen(
        parse_tree("(implies (all x (Q x)) (all x (Q x))) ; ImpI [discharge 1]\n  (all x (Q x)) ; assume 1\n"));
    EXPECT_TRUE(v.accepted);
    auto w = check_gentzen(parse_tree("(all x (implies (P x) (Q x))) ; AllI(b)\n"
                                      "  (implies (P b) (Q b)) ; ImpI [discharge 1]\n"
                                      "    (Q b) ; assume 1\n"));
    EXPECT_FALSE(w.accepted);
    EXPECT_TRUE(has_code(w.violations, "discharge-mismatch"));
}

TEST(Corpus, TreeVerdictsMatchHeaders) {
    for (const auto& p : files(".gp")) {
        auto d = parse_tree(slurp(p));
        auto v = check_gentzen(d);
        std::string got = v.accepted ? (v.pure ? "accepted pure" : "accepted impure") : "rejected";
        EXPECT_EQ(got, d.expect) << p;
    }
}

TEST(Corpus, AcceptedTreesAreSound) {
    Signature sig = quine_signature();
    for (const auto& p : files(".gp")) {
        auto v = check_gentzen(parse_tree(slurp(p)));
        if (!v.accepted) continue;
        EXPECT_TRUE(entailment_oracle(v.assumptions, v.conclusion, sig, 3).entailed) << p;
    }
}

TEST(Purify, RenamesPerApplication) {
    auto d = tree("impure.gp");
    auto out = purify(d);
    auto v = check_gentzen(out);
    EXPECT_TRUE(v.accepted);
    EXPECT_TRUE(v.pure);
    EXPECT_EQ(out.root.premises[0].parameter, "a");
    EXPECT_EQ(out.root.premises[1].parameter, "a1");
    EXPECT_EQ(out.root.premises[1].premises[1].premises[0].formula, mark_parameters(parse_formula("(P a1)"), {"a1"}));
}

TEST(Purify, PureIsFixpointAndIdempotent) {
    for (const auto& p : files(".gp")) {
        auto d = parse_tree(slurp(p));
        if (!check_gentzen(d).accepted) {
            EXPECT_THROW(purify(d), Error);
            continue;
        }
        auto once = purify(d);
        EXPECT_EQ(purify(once), once) << p;
        if (check_gentzen(d).pure) {
            EXPECT_EQ(once, d) << p;
        }
    }
}

TEST(Purify, NestedReuse) {
    // The inner application reuses the outer parameter inside its scope.
    auto d = parse_tree(
        "(implies (all x (P x)) (all x (all y (or (P x) (P y))))) ; ImpI [discharge 1]\n"
        "  (all x (all y (or (P x) (P y)))) ; AllI(a)\n"
        "    (all y (or (P a) (P y))) ; AllI(b)\n"
        "      (or (P a) (P b)) ; OrI\n"
        "        (P a) ; AllE\n"
        "          (all x (P x)) ; assume 1\n");
    EXPECT_TRUE(check_gentzen(d).pure);
    auto e = parse_tree(
        "(all x (implies (P x) (all z (implies (P z) (P z))))) ; AllI(a)\n"
        "  (implies (P a) (all z (implies (P z) (P z)))) ; ImpI [discharge 1]\n"
        "    (all z (implies (P z) (P z))) ; AllI(a)\n"
        "      (implies (P a) (P a)) ; ImpI [discharge 2]\n"
        "        (P a) ; assume 2\n");
    auto v = check_gentzen(e);
    ASSERT_TRUE(v.accepted);
    EXPECT_FALSE(v.pure);
    auto out = purify(e);
    auto w = check_gentzen(out);
    EXPECT_TRUE(w.accepted);
    EXPECT_TRUE(w.pure);
    EXPECT_EQ(w.conclusion, v.conclusion);
}
