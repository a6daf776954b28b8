#include <gtest/gtest.h>

#include <cstdlib>
#include <map>
#include <random>
#include <set>

#include "dynsem/error.hpp"
#include "dynsem/models.hpp"

using namespace dynsem;

namespace {

Signature sig_of(std::initializer_list<std::pair<const char*, int>> preds,
                 std::initializer_list<const char*> consts = {}) {
    Signature s;
    for (auto [n, a] : preds) s.add_predicate(n, a);
    for (auto c : consts) s.add_constant(c);
    return s;
}

Formula parse(const char* text, const Signature& sig) { return parse_formula(text, &sig); }

}  // namespace

TEST(Enumerate, CountsMatchPowers) {
    EXPECT_EQ(all_models(sig_of({{"P", 1}}), 1).size(), 2u);
    EXPECT_EQ(all_models(sig_of({{"P", 1}}), 2).size(), 6u);
    EXPECT_EQ(all_models(sig_of({{"R", 2}}), 2).size(), 18u);
    // Independent count: 2^(n^arity) per predicate, n^(n^arity) per function.
    Signature s = sig_of({{"P", 1}, {"R", 2}}, {"c"});
    std::size_t want = 0;
    for (int n = 1; n <= 2; ++n) {
        std::size_t per = 1;
        for (int i = 0; i < n; ++i) per *= 2;
        for (int i = 0; i < n * n; ++i) per *= 2;
        per *= static_cast<std::size_t>(n);
        want += per;
    }
    EXPECT_EQ(all_models(s, 2).size(), want);
}

TEST(Enumerate, NoDuplicates) {
    auto models = all_models(sig_of({{"P", 1}, {"R", 2}}, {"c"}), 2);
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) ASSERT_FALSE(models[i] == models[j]);
    }
}

TEST(Enumerate, CanonicalOrderLastDigitFastest) {
    auto models = all_models(sig_of({{"P", 1}}), 2);
    ASSERT_EQ(models.size(), 6u);
    std::vector<std::vector<std::vector<int>>> exts;
    for (const auto& m : models) exts.push_back(m.extension("P"));
    using E = std::vector<std::vector<int>>;
    EXPECT_EQ(exts[0], E{});
    EXPECT_EQ(exts[1], (E{{0}}));
    EXPECT_EQ(exts[2], E{});
    EXPECT_EQ(exts[3], (E{{1}}));
    EXPECT_EQ(exts[4], (E{{0}}));
    EXPECT_EQ(exts[5], (E{{0}, {1}}));
}

TEST(Enumerate, CapEnforced) {
    EXPECT_THROW(ModelEnumerator(sig_of({{"P", 1}}), 5), CapError);
    EXPECT_THROW(ModelEnumerator(sig_of({{"P", 1}}), 3, 1, 2), CapError);
}

TEST(Enumerate, EnvironmentOverridesCap) {
    ::setenv("DYNSEM_MAX_DOMAIN", "2", 1);
    EXPECT_EQ(default_domain_cap(), 2);
    EXPECT_THROW(ModelEnumerator(sig_of({{"P", 1}}), 3), CapError);
    ::setenv("DYNSEM_MAX_DOMAIN", "junk", 1);
    EXPECT_EQ(default_domain_cap(), 4);
    ::unsetenv("DYNSEM_MAX_DOMAIN");
    EXPECT_EQ(default_domain_cap(), 4);
}

TEST(EvalClassical, Quantifiers) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    m.set("P", std::vector<int>{0});
    Assignment g;
    EXPECT_TRUE(eval_classical(parse("(ex x (P x))", s), m, g));
    EXPECT_FALSE(eval_classical(parse("(all x (P x))", s), m, g));
}

TEST(EvalClassical, HansPetsBothDonkeys) {
    Signature s = sig_of({{"donkey", 1}, {"owns", 2}, {"pets", 2}}, {"hans"});
    Model m(s, 3);
    m.define("hans", {}, 0);
    for (int d : {1, 2}) {
        m.set("donkey", std::vector<int>{d});
        m.set("owns", std::vector<int>{0, d});
        m.set("pets", std::vector<int>{0, d});
    }
    Formula f = parse("(all x (implies (and (donkey x) (owns hans x)) (pets hans x)))", s);
    EXPECT_TRUE(eval_classical(f, m, Assignment{}));
    m.set("pets", std::vector<int>{0, 2}, false);
    EXPECT_FALSE(eval_classical(f, m, Assignment{}));
}

TEST(EvalClassical, Errors) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    EXPECT_THROW(eval_classical(parse_formula("(Q x)"), m, Assignment({"x"})), SignatureError);
    EXPECT_THROW(eval_classical(parse_formula("(P x)"), m, Assignment{}), ScopeError);
    EXPECT_THROW(eval_classical(parse_formula("(P (eps x (P x)))"), m, Assignment{}), EvalError);
    EXPECT_THROW(eval_classical(parse_formula("(rnd x)"), m, Assignment({"x"})), EvalError);
}

namespace {

// Hand-written truth table for quantifier-free formulas over P/1, R/2 and
// variables x, y with values in a 2-element domain.
struct Oracle {
    bool P[2];
    bool R[2][2];
    int x, y;

    int val(const Term& t) const { return t.name == "x" ? x : y; }

    bool truth(const Formula& f) const {
        using K = Formula::Kind;
        if (f.kind == K::Atom && f.name == "P") return P[val(f.terms[0])];
        if (f.kind == K::Atom) return R[val(f.terms[0])][val(f.terms[1])];
        if (f.kind == K::Equal) return val(f.terms[0]) == val(f.terms[1]);
        if (f.kind == K::Not) return !truth(f.subs[0]);
        bool a = truth(f.subs[0]), b = truth(f.subs[1]);
        if (f.kind == K::And) return a && b;
        if (f.kind == K::Or) return a || b;
        return !a || b;
    }
};

}  // namespace

TEST(EvalClassical, AgreesWithTruthTableOnQuantifierFree) {
    Signature s = sig_of({{"P", 1}, {"R", 2}});
    FormulaFamilyOptions opts;
    opts.max_size = 6;
    std::vector<Formula> family;
    for (auto& f : enumerate_formulas(s, opts)) {
        if (is_quantifier_free(f)) family.push_back(f);
    }
    family.push_back(parse_formula("(or (= x y) (not (= y x)))"));
    ASSERT_GT(family.size(), 100u);
    std::size_t checked = 0;
    enumerate_models(s, 2, [&](const Model& m) {
        if (m.size() != 2) return true;
        Oracle o{};
        for (int a = 0; a < 2; ++a) {
            o.P[a] = m.holds("P", std::vector<int>{a});
            for (int b = 0; b < 2; ++b) o.R[a][b] = m.holds("R", std::vector<int>{a, b});
        }
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                o.x = x;
                o.y = y;
                Assignment g({"x", "y"}, {x, y});
                for (const auto& f : family) {
                    EXPECT_EQ(eval_classical(f, m, g), o.truth(f)) << render(f);
                    ++checked;
                }
            }
        }
        return true;
    });
    EXPECT_GT(checked, 10000u);
}

TEST(Countermodel, FirstCanonicalModelForQuantifierSwap) {
    Signature s = sig_of({{"R", 2}});
    Formula premise = parse("(all x (ex y (R x y)))", s);
    Formula conclusion = parse("(ex y (all x (R x y)))", s);
    std::optional<Model> found;
    enumerate_models(s, 3, [&](const Model& m) {
        if (eval_classical(premise, m, {}) && !eval_classical(conclusion, m, {})) {
            found = m;
            return false;
        }
        return true;
    });
    ASSERT_TRUE(found.has_value());
    EXPECT_EQ(found->size(), 2);
    EXPECT_EQ(found->extension("R"), (std::vector<std::vector<int>>{{0, 1}, {1, 0}}));
}

TEST(ChoiceFunctions, IntendedCounts) {
    EXPECT_EQ(intended_choice_count(1), 1u);
    EXPECT_EQ(intended_choice_count(2), 4u);
    EXPECT_EQ(intended_choice_count(3), 72u);
    for (int n = 1; n <= 3; ++n) {
        std::uint64_t seen = 0;
        for_each_intended_choice(n, [&](const ChoiceFunction& c) {
            EXPECT_TRUE(c.intended());
            ++seen;
        });
        EXPECT_EQ(seen, intended_choice_count(n));
    }
}

TEST(ChoiceFunctions, IntendedPredicate) {
    EXPECT_TRUE(ChoiceFunction::least(3).intended());
    ChoiceFunction bad(2, {0, 1, 1, 0});  // {0} -> 1
    EXPECT_FALSE(bad.intended());
    EXPECT_THROW(ChoiceFunction(2, {0, 0, 1}), MalformedError);
}

TEST(EvalWithEpsilon, Examples) {
    Signature s = sig_of({{"P", 1}});
    Formula f = parse("(P (eps x (P x)))", s);
    Model m(s, 2);
    m.set("P", std::vector<int>{1});
    for_each_intended_choice(2, [&](const ChoiceFunction& c) {
        ChoiceFunction copy = c;
        EXPECT_TRUE(eval_with_epsilon(f, m, copy, {}));
    });
    Model empty(s, 2);
    for_each_intended_choice(2, [&](const ChoiceFunction& c) {
        ChoiceFunction copy = c;
        EXPECT_FALSE(eval_with_epsilon(f, empty, copy, {}));
    });
}

TEST(EvalWithEpsilon, AxiomInstanceWithWitnessZero) {
    Signature s = sig_of({{"P", 1}}, {"zero"});
    Model m(s, 2);
    m.set("P", std::vector<int>{0});
    m.set("P", std::vector<int>{1});
    Formula axiom = parse("(implies (P zero) (P (eps x (P x))))", s);
    for_each_intended_choice(2, [&](const ChoiceFunction& c) {
        ChoiceFunction copy = c;
        EXPECT_TRUE(eval_with_epsilon(axiom, m, copy, {}));
    });
}

TEST(EvalWithEpsilon, ParametersReadFromAssignment) {
    Signature s = sig_of({{"R", 2}});
    Model m(s, 3);
    m.set("R", std::vector<int>{2, 1});
    Term t = parse_term("(eps y (R x y))", &s);
    ChoiceFunction c = ChoiceFunction::least(3);
    EXPECT_EQ(eval_term_with_epsilon(t, m, c, Assignment({"x"}, {2})), 1);
    EXPECT_EQ(eval_term_with_epsilon(t, m, c, Assignment({"x"}, {0})), 0);
}

TEST(EvalWithEpsilon, DomainMismatch) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    ChoiceFunction c = ChoiceFunction::least(3);
    EXPECT_THROW(eval_with_epsilon(parse("(P (eps x (P x)))", s), m, c, {}), EvalError);
}

// The lazy branching driver must agree, weight for weight, with running
// every intended choice function.
TEST(ChoiceBranching, PartitionMatchesExhaustive) {
    Signature s = sig_of({{"P", 1}, {"R", 2}});
    const char* sentences[] = {
        "(P (eps x (P x)))",
        "(R (eps x (not (R x (eps y (R x y))))) (eps y (R (eps x (not (R x (eps y (R x y))))) y)))",
        "(implies (P (eps x (not (P x)))) (R (eps y (P y)) (eps y (P y))))",
        "(= (eps x (P x)) (eps x (not (P x))))",
    };
    for (const char* text : sentences) {
        Formula f = parse(text, s);
        for (int n = 1; n <= 3; ++n) {
            std::size_t models_checked = 0;
            enumerate_models(s, n, [&](const Model& m) {
                if (m.size() != n) return true;
                if (n == 3 && ++models_checked > 40) return false;
                std::uint64_t exhaustive_true = 0, exhaustive_total = 0;
                for_each_intended_choice(n, [&](const ChoiceFunction& c) {
                    ChoiceFunction copy = c;
                    exhaustive_true += eval_with_epsilon(f, m, copy, {}) ? 1 : 0;
                    ++exhaustive_total;
                });
                std::uint64_t lazy_true = 0, lazy_total = 0;
                for_each_choice_branch(
                    n, [&](ChoiceSource& src) { return eval_with_epsilon(f, m, src, {}); },
                    [&](bool outcome, std::uint64_t w) {
                        lazy_total += w;
                        if (outcome) lazy_true += w;
                    });
                EXPECT_EQ(lazy_total, exhaustive_total);
                EXPECT_EQ(lazy_true, exhaustive_true) << text << " in " << describe(m);
                return true;
            });
        }
    }
}

TEST(ChoiceBranching, NoQueriesIsOneBranch) {
    std::size_t branches = for_each_choice_branch(
        3, [](ChoiceSource&) { return true; }, [](bool, std::uint64_t w) { EXPECT_EQ(w, 72u); });
    EXPECT_EQ(branches, 1u);
}

TEST(Assignments, EnumerationOrder) {
    std::vector<std::vector<int>> seen;
    for_each_assignment({"x", "y"}, 2, [&](const Assignment& g) { seen.push_back(g.values()); });
    EXPECT_EQ(seen, (std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
    int count = 0;
    for_each_assignment({}, 3, [&](const Assignment&) { ++count; });
    EXPECT_EQ(count, 1);
}
