#include <gtest/gtest.h>

#include <random>

#include "dynsem/error.hpp"
#include "dynsem/syntax.hpp"

using namespace dynsem;

namespace {

Term v(const char* n) { return Term::variable(n); }
Formula P(Term t) { return Formula::atom("P", {std::move(t)}); }
Formula R(Term a, Term b) { return Formula::atom("R", {std::move(a), std::move(b)}); }

}  // namespace

TEST(ParseFormula, DonkeyConjunction) {
    Formula f = parse_formula("(ex x (and (donkey x) (owns hans x)))");
    Formula want = Formula::exists(
        "x", Formula::conjunction(Formula::atom("donkey", {v("x")}), Formula::atom("owns", {v("hans"), v("x")})));
    EXPECT_EQ(f, want);
}

TEST(ParseFormula, ConstantsFromSignature) {
    Signature sig;
    sig.add_predicate("owns", 2);
    sig.add_constant("hans");
    Formula f = parse_formula("(owns hans x)", &sig);
    EXPECT_EQ(f.terms[0].kind, Term::Kind::Constant);
    EXPECT_EQ(f.terms[1].kind, Term::Kind::Variable);
    // A bound occurrence of a constant's name stays a variable.
    Formula g = parse_formula("(ex hans (owns hans x))", &sig);
    EXPECT_EQ(g.body().terms[0].kind, Term::Kind::Variable);
}

TEST(ParseFormula, EpsilonTermArgument) {
    Formula f = parse_formula("(Q (eps x (P x)))");
    ASSERT_EQ(f.kind, Formula::Kind::Atom);
    ASSERT_EQ(f.terms.size(), 1u);
    EXPECT_EQ(f.terms[0], Term::epsilon("x", P(v("x"))));
}

TEST(ParseFormula, UnbalancedReportsEndOfInput) {
    try {
        parse_formula("(and P");
        FAIL() << "expected a syntax error";
    } catch (const SyntaxError& e) {
        EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos);
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(ParseFormula, ErrorPositionOnLaterLine) {
    try {
        parse_formula("(and (P x)\n  (Q ))) ");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(ParseFormula, ArityMismatchAgainstSignature) {
    Signature sig;
    sig.add_predicate("R", 2);
    EXPECT_THROW(parse_formula("(R x)", &sig), SignatureError);
    EXPECT_NO_THROW(parse_formula("(R x y)", &sig));
}

TEST(ParseFormula, RejectsKeywordsAsNames) {
    EXPECT_THROW(parse_formula("(P and)"), SyntaxError);
    EXPECT_THROW(parse_formula("(eps x (P x))"), SyntaxError);
    EXPECT_THROW(parse_formula("(P x) extra"), SyntaxError);
}

TEST(FreeVariables, Examples) {
    EXPECT_EQ(free_variables(R(v("x"), v("y"))), (std::set<std::string>{"x", "y"}));
    EXPECT_EQ(free_variables(Formula::exists("x", R(v("x"), v("y")))), (std::set<std::string>{"y"}));
    Formula eps = Formula::atom("Q", {Term::epsilon("x", R(v("x"), v("y")))});
    EXPECT_EQ(free_variables(eps), (std::set<std::string>{"y"}));
}

TEST(Substitute, Examples) {
    EXPECT_EQ(substitute(P(v("x")), "x", Term::constant("c")), P(Term::constant("c")));

    Formula captured = substitute(Formula::exists("x", R(v("x"), v("y"))), "y", v("x"));
    EXPECT_EQ(captured, Formula::exists("x1", R(v("x1"), v("x"))));
    EXPECT_EQ(free_variables(captured), (std::set<std::string>{"x"}));

    Formula untouched = Formula::forall("z", P(v("z")));
    EXPECT_EQ(substitute(untouched, "x", Term::constant("c")), untouched);
}

TEST(Substitute, FreshSuffixSkipsUsedNames) {
    // x1 already occurs, so the bound x becomes x2.
    Formula f = Formula::exists("x", Formula::conjunction(R(v("x"), v("y")), P(v("x1"))));
    Formula out = substitute(f, "y", v("x"));
    EXPECT_EQ(out.name, "x2");
    EXPECT_EQ(free_variables(out), (std::set<std::string>{"x", "x1"}));
}

TEST(Substitute, IntoEpsilonMatrix) {
    Term e = Term::epsilon("x", R(v("x"), v("y")));
    Term out = substitute(e, "y", v("x"));
    EXPECT_EQ(out.name, "x1");
    EXPECT_EQ(free_variables(out), (std::set<std::string>{"x"}));
}

TEST(Render, Examples) {
    EXPECT_EQ(render(P(v("x"))), "(P x)");
    EXPECT_EQ(render(Term::epsilon("x", P(v("x")))), "(eps x (P x))");
    EXPECT_EQ(render(Formula::random_assign("x")), "(rnd x)");
    EXPECT_EQ(render(Formula::equal(v("x"), Term::function("f", {v("y")}))), "(= x (f y))");
}

TEST(AlphaEqual, BoundRenaming) {
    EXPECT_TRUE(alpha_equal(parse_formula("(ex x (P x))"), parse_formula("(ex y (P y))")));
    EXPECT_FALSE(alpha_equal(parse_formula("(ex x (R x y))"), parse_formula("(ex y (R y y))")));
    EXPECT_TRUE(alpha_equal(parse_term("(eps x (R x z))"), parse_term("(eps w (R w z))")));
    EXPECT_FALSE(alpha_equal(parse_formula("(P x)"), parse_formula("(P y)")));
}

TEST(MatchInstance, FindsInstantialTerm) {
    Formula pattern = parse_formula("(R x y)");
    auto t = match_instance(pattern, "y", parse_formula("(R x (f z))"));
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(render(*t), "(f z)");
    EXPECT_FALSE(match_instance(pattern, "y", parse_formula("(R z z)")).has_value());
    EXPECT_FALSE(match_instance(parse_formula("(R y y)"), "y", parse_formula("(R a b)")).has_value());
}

TEST(Measures, SizeAndDepth) {
    EXPECT_EQ(formula_size(parse_formula("(P x)")), 2);
    EXPECT_EQ(formula_size(parse_formula("(ex x (R x y))")), 5);
    EXPECT_EQ(formula_size(parse_formula("(rnd x)")), 2);
    EXPECT_EQ(quantifier_depth(parse_formula("(all x (ex y (R x y)))")), 2);
    EXPECT_EQ(quantifier_depth(parse_formula("(and (ex x (P x)) (ex y (P y)))")), 1);
}

TEST(Enumeration, FamilySizes) {
    Signature sig;
    sig.add_predicate("P", 1);
    sig.add_predicate("R", 2);
    FormulaFamilyOptions opts;
    opts.max_size = 5;
    opts.random_assign = true;
    EXPECT_EQ(enumerate_formulas(sig, opts).size(), 140u);
    opts.random_assign = false;
    EXPECT_EQ(enumerate_formulas(sig, opts).size(), 72u);
    EXPECT_EQ(enumerate_atoms(sig, {"x", "y"}).size(), 6u);
}

// Every enumerated formula is distinct and within the bound.
TEST(Enumeration, NoDuplicates) {
    Signature sig;
    sig.add_predicate("P", 1);
    sig.add_predicate("R", 2);
    FormulaFamilyOptions opts;
    opts.max_size = 6;
    opts.random_assign = true;
    auto all = enumerate_formulas(sig, opts);
    std::set<std::string> seen;
    for (const auto& f : all) {
        EXPECT_LE(formula_size(f), 6);
        EXPECT_TRUE(seen.insert(render(f)).second) << render(f);
    }
}

TEST(Properties, RenderRoundTripOnFamily) {
    Signature sig;
    sig.add_predicate("P", 1);
    sig.add_predicate("R", 2);
    FormulaFamilyOptions opts;
    opts.max_size = 6;
    opts.random_assign = true;
    for (const auto& f : enumerate_formulas(sig, opts)) {
        ASSERT_EQ(parse_formula(render(f)), f) << render(f);
    }
}

namespace {

Term random_term(std::mt19937& rng, int depth);

Formula random_formula(std::mt19937& rng, int depth) {
    static const char* vars[] = {"x", "y", "z", "x1"};
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    switch (pick(rng)) {
    case 0:
        return P(random_term(rng, depth - 1));
    case 1:
        return R(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 2:
        return Formula::negation(random_formula(rng, depth - 1));
    case 3:
        return Formula::conjunction(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 4:
        return Formula::implication(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 5:
        return Formula::exists(vars[rng() % 4], random_formula(rng, depth - 1));
    case 6:
        return Formula::forall(vars[rng() % 4], random_formula(rng, depth - 1));
    default:
        return Formula::equal(random_term(rng, depth - 1), random_term(rng, depth - 1));
    }
}

Term random_term(std::mt19937& rng, int depth) {
    static const char* vars[] = {"x", "y", "z", "x1"};
    int choice = depth <= 0 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 4);
    switch (choice) {
    case 0:
        return Term::variable(vars[rng() % 4]);
    case 1:
        return Term::constant("c");
    case 2:
        return Term::function("f", {random_term(rng, depth - 1)});
    default:
        return Term::epsilon(vars[rng() % 4], random_formula(rng, depth - 1));
    }
}

}  // namespace

TEST(Properties, SubstitutionSafetyAndDeterminism) {
    std::mt19937 rng(20240611);
    static const char* vars[] = {"x", "y", "z", "x1"};
    for (int i = 0; i < 2000; ++i) {
        Formula f = random_formula(rng, 4);
        std::string var = vars[rng() % 4];
        Term t = random_term(rng, 2);
        Formula out = substitute(f, var, t);
        std::set<std::string> allowed = free_variables(f);
        allowed.erase(var);
        for (const auto& u : free_variables(t)) allowed.insert(u);
        for (const auto& u : free_variables(out)) {
            ASSERT_TRUE(allowed.count(u)) << render(f) << " [" << var << " := " << render(t) << "] gave " << render(out);
        }
        ASSERT_EQ(out, substitute(f, var, t));
        if (!occurs_free(f, var)) {
            ASSERT_EQ(out, f);
        }
    }
}

TEST(Properties, RoundTripRandomFormulas) {
    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) {
        Formula f = random_formula(rng, 4);
        Signature sig;
        sig.add_constant("c");
        ASSERT_EQ(parse_formula(render(f), &sig), f) << render(f);
    }
}

TEST(Signature, ConflictsAreRejected) {
    Signature sig;
    sig.add_predicate("P", 1);
    EXPECT_THROW(sig.add_function("P", 0), SignatureError);
    EXPECT_THROW(sig.add_predicate("P", 2), SignatureError);
    Signature inferred = infer_signature(parse_formula("(and (P x) (R (f x) y))"));
    EXPECT_EQ(inferred.predicates.at("R"), 2);
    EXPECT_EQ(inferred.functions.at("f"), 1);
}
