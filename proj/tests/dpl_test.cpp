#include <gtest/gtest.h>

#include "dynsem/dpl.hpp"
#include "dynsem/error.hpp"

using namespace dynsem;
using namespace dynsem::dpl;

namespace {

Signature sig_of(std::initializer_list<std::pair<const char*, int>> preds,
                 std::initializer_list<const char*> consts = {}) {
    Signature s;
    for (auto [n, a] : preds) s.add_predicate(n, a);
    for (auto c : consts) s.add_constant(c);
    return s;
}

Signature small_sig() { return sig_of({{"P", 1}, {"R", 2}}); }

std::vector<Formula> family(int size) {
    FormulaFamilyOptions opts;
    opts.max_size = size;
    opts.random_assign = true;
    return enumerate_formulas(small_sig(), opts);
}

}  // namespace

TEST(DplEval, AtomIsTest) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    m.set("P", std::vector<int>{0});
    StateSpace space({"x"}, 2);
    StateRelation r = dpl_eval(parse_formula("(P x)", &s), m, space);
    EXPECT_EQ(r.pairs(), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}}));
}

TEST(DplEval, RandomAssignResetsOneVariable) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    StateSpace space({"x", "y"}, 2);
    StateRelation r = dpl_eval(parse_formula("(rnd x)"), m, space);
    // Independent check: <g,h> iff h agrees with g on y.
    for (std::size_t i = 0; i < space.size(); ++i) {
        for (std::size_t j = 0; j < space.size(); ++j) {
            Assignment g = space.state(i), h = space.state(j);
            EXPECT_EQ(r.contains(i, j), g.at("y") == h.at("y"));
        }
    }
    EXPECT_EQ(r.count(), 8u);
}

TEST(DplEval, EmptyExtensionGivesEmptyRelation) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    EXPECT_EQ(dpl_eval(parse_formula("(ex x (P x))"), m, std::vector<std::string>{"x"}).count(), 0u);
}

TEST(DplEval, UniverseMustCoverVariables) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    EXPECT_THROW(dpl_eval(parse_formula("(ex y (P y))"), m, std::vector<std::string>{"x"}), ScopeError);
    EXPECT_THROW(dpl_truth(parse_formula("(P x)"), m, Assignment{}), ScopeError);
    EXPECT_THROW(dpl_eval(parse_formula("(Q x)"), m, std::vector<std::string>{"x"}), SignatureError);
}

TEST(DplTruth, AtomUnderViolatingAssignment) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 2);
    m.set("P", std::vector<int>{0});
    EXPECT_FALSE(dpl_truth(parse_formula("(P x)"), m, Assignment({"x"}, {1})));
    EXPECT_TRUE(dpl_truth(parse_formula("(P x)"), m, Assignment({"x"}, {0})));
}

TEST(DplTruth, ExistentialBindsAcrossConjunction) {
    Signature s = sig_of({{"man", 1}, {"walkin", 1}, {"satdown", 1}});
    Formula seq = parse_formula("(and (ex x (and (man x) (walkin x))) (satdown x))", &s);
    Formula classical = parse_formula("(ex x (and (man x) (and (walkin x) (satdown x))))", &s);
    std::size_t checked = 0;
    enumerate_models(s, 2, [&](const Model& m) {
        for_each_assignment({"x"}, m.size(), [&](const Assignment& g) {
            EXPECT_EQ(dpl_truth(seq, m, g), eval_classical(classical, m, {})) << describe(m);
            ++checked;
        });
        return true;
    });
    EXPECT_EQ(checked, 8u + 64u * 2u);
}

TEST(DplTruth, DonkeyAtSizeTwo) {
    Signature s = sig_of({{"donkey", 1}, {"owns", 2}, {"pets", 2}}, {"hans"});
    Formula dyn = parse_formula("(implies (ex x (and (donkey x) (owns hans x))) (pets hans x))", &s);
    Formula cls = parse_formula("(all x (implies (and (donkey x) (owns hans x)) (pets hans x)))", &s);
    std::size_t disagreements = 0;
    enumerate_models(s, 2, [&](const Model& m) {
        for_each_assignment({"x"}, m.size(), [&](const Assignment& g) {
            if (dpl_truth(dyn, m, g) != eval_classical(cls, m, {})) ++disagreements;
        });
        return true;
    });
    EXPECT_EQ(disagreements, 0u);
}

TEST(DplTruth, OutputsOfSequence) {
    Signature s = sig_of({{"P", 1}});
    Model m(s, 3);
    m.set("P", std::vector<int>{1});
    m.set("P", std::vector<int>{2});
    auto outs = dpl_outputs(parse_formula("(ex x (P x))"), m, Assignment({"x"}, {0}));
    ASSERT_EQ(outs.size(), 2u);
    EXPECT_EQ(outs[0].at("x"), 1);
    EXPECT_EQ(outs[1].at("x"), 2);
}

// The direct search and the relational semantics are separate
// implementations of the same clauses.
TEST(Properties, DirectTruthMatchesRelationDomain) {
    auto formulas = family(5);
    auto models = all_models(small_sig(), 2);
    for (const auto& m : models) {
        StateSpace space({"x", "y"}, m.size());
        for (const auto& f : formulas) {
            StateRelation r = dpl_eval(f, m, space);
            for (std::size_t i = 0; i < space.size(); ++i) {
                Assignment g = space.state(i);
                ASSERT_EQ(r.has_output(i), dpl_truth(f, m, g)) << render(f);
                std::vector<Assignment> outs = dpl_outputs(f, m, g);
                ASSERT_EQ(outs.size(), static_cast<std::size_t>(std::count_if(
                                           outs.begin(), outs.end(), [&](const Assignment& h) {
                                               return r.contains(i, space.index(h));
                                           })));
                std::size_t row = 0;
                for (std::size_t j = 0; j < space.size(); ++j) row += r.contains(i, j);
                ASSERT_EQ(outs.size(), row) << render(f);
            }
        }
    }
}

TEST(Properties, StaticFormulasAreTests) {
    auto models = all_models(small_sig(), 2);
    for (const auto& f : family(6)) {
        if (has_random_assign(f)) continue;
        bool uses_binding = false;
        std::function<void(const Formula&)> scan = [&](const Formula& g) {
            if (g.kind == Formula::Kind::Exists || g.kind == Formula::Kind::And) uses_binding = true;
            for (const auto& s : g.subs) scan(s);
        };
        scan(f);
        if (uses_binding) continue;
        for (const auto& m : models) {
            ASSERT_TRUE(dpl_eval(f, m, std::vector<std::string>{"x", "y"}).subset_of_identity()) << render(f);
        }
    }
}

TEST(Properties, ConjunctionIsCompositionAndAssociative) {
    auto fs = family(3);
    auto models = all_models(small_sig(), 2);
    for (const auto& m : models) {
        if (m.size() != 2) continue;
        StateSpace space({"x", "y"}, 2);
        for (std::size_t a = 0; a < fs.size(); a += 3) {
            for (std::size_t b = 1; b < fs.size(); b += 4) {
                StateRelation ra = dpl_eval(fs[a], m, space), rb = dpl_eval(fs[b], m, space);
                // Composition checked pair by pair.
                StateRelation both = dpl_eval(Formula::conjunction(fs[a], fs[b]), m, space);
                for (std::size_t i = 0; i < space.size(); ++i) {
                    for (std::size_t j = 0; j < space.size(); ++j) {
                        bool via = false;
                        for (std::size_t k = 0; k < space.size(); ++k) via = via || (ra.contains(i, k) && rb.contains(k, j));
                        ASSERT_EQ(both.contains(i, j), via);
                    }
                }
                const Formula& c = fs[(a + b) % fs.size()];
                ASSERT_EQ(dpl_eval(Formula::conjunction(Formula::conjunction(fs[a], fs[b]), c), m, space),
                          dpl_eval(Formula::conjunction(fs[a], Formula::conjunction(fs[b], c)), m, space));
            }
        }
    }
}

TEST(Properties, EgalitarianDonkeyReading) {
    Signature s = small_sig();
    s.add_predicate("Q", 1);
    const char* cases[][2] = {
        {"(P x)", "(Q x)"},
        {"(and (P x) (R x x))", "(Q x)"},
        {"(ex y (R x y))", "(P x)"},
        {"(not (P x))", "(R x x)"},
    };
    for (auto [a, b] : cases) {
        Formula A = parse_formula(a, &s), B = parse_formula(b, &s);
        Formula dyn = Formula::implication(Formula::exists("x", A), B);
        Formula cls = Formula::forall("x", Formula::implication(A, B));
        enumerate_models(s, 3, [&](const Model& m) {
            Assignment g({"x", "y"});
            EXPECT_EQ(dpl_truth(dyn, m, g), eval_classical(cls, m, {})) << a << " / " << b;
            return m.size() < 3 || m.extension("R").size() < 3;
        });
    }
}

TEST(Equivalence, Reflexive) {
    Formula f = parse_formula("(ex x (and (P x) (R x y)))");
    EXPECT_TRUE(dpl_equivalent(f, f, small_sig(), 2).equal);
}

TEST(Equivalence, DifferentVariablesDiffer) {
    auto v = dpl_equivalent(parse_formula("(ex x (P x))"), parse_formula("(ex y (P y))"), small_sig(), 2);
    ASSERT_FALSE(v.equal);
    ASSERT_TRUE(v.input && v.output);
    EXPECT_EQ(v.universe, (std::vector<std::string>{"x", "y"}));
    // Independent check of the reported pair.
    StateSpace space(v.universe, v.model->size());
    bool a = dpl_eval(parse_formula("(ex x (P x))"), *v.model, space).contains(space.index(*v.input), space.index(*v.output));
    EXPECT_EQ(a, v.in_first);
}

TEST(Equivalence, DoubleNegationLosesBinding) {
    auto v = dpl_equivalent(parse_formula("(not (not (ex x (P x))))"), parse_formula("(ex x (P x))"), small_sig(), 2);
    EXPECT_FALSE(v.equal);
}

TEST(Contexts, CountAndDepth) {
    auto cs = enumerate_contexts(small_sig(), {"x", "y"}, 2);
    EXPECT_EQ(cs.size(), 757u);
    EXPECT_EQ(enumerate_contexts(small_sig(), {"x", "y"}, 1).size(), 28u);
    int deepest = 0;
    for (const auto& c : cs) deepest = std::max(deepest, context_depth(c));
    EXPECT_EQ(deepest, 2);
}

TEST(Contexts, ParseAndPlug) {
    Context c = parse_context("(and [] (Q x))");
    EXPECT_EQ(render(plug(c, parse_formula("(P x)"))), "(and (P x) (Q x))");
    EXPECT_EQ(render(c), "(and [] (Q x))");
    EXPECT_THROW(parse_context("(and (P x) (Q x))"), MalformedError);
    EXPECT_THROW(parse_context("(and [] [])"), MalformedError);
}

TEST(ContextualEquivalence, Identical) {
    Formula f = parse_formula("(ex x (P x))");
    EXPECT_TRUE(contextual_equivalent(f, f, small_sig(), 2, 1).equal);
}

TEST(ContextualEquivalence, EqualTestsAgreeEverywhere) {
    auto v = contextual_equivalent(parse_formula("(not (not (P x)))"), parse_formula("(P x)"), small_sig(), 2, 2, {"x", "y"});
    EXPECT_TRUE(v.equal);
    EXPECT_EQ(v.contexts_checked, 757u);
}

TEST(ContextualEquivalence, ContinuationReadsBinding) {
    Signature s = sig_of({{"P", 1}, {"Q", 1}});
    Formula a = parse_formula("(ex x (P x))"), b = parse_formula("(not (not (ex x (P x))))");
    Context c = parse_context("(and [] (Q x))");
    bool found = false;
    enumerate_models(s, 2, [&](const Model& m) {
        for_each_assignment({"x"}, m.size(), [&](const Assignment& g) {
            if (dpl_truth(plug(c, a), m, g) != dpl_truth(plug(c, b), m, g)) found = true;
        });
        return !found;
    });
    EXPECT_TRUE(found);
    auto v = contextual_equivalent(a, b, s, 2, 1);
    ASSERT_FALSE(v.equal);
    EXPECT_NE(v.first_truth, v.second_truth);
}

TEST(AbstractionReport, SmallBoundsAreCorrect) {
    AbstractionReport r = abstraction_report(small_sig(), 2, 1, 3);
    EXPECT_EQ(r.models, 68u);
    EXPECT_EQ(r.contexts, 28u);
    EXPECT_EQ(r.total_pairs, r.formulas * (r.formulas - 1) / 2);
    EXPECT_TRUE(r.correctness_violations.empty());
    for (const auto& group : r.candidate_groups) {
        EXPECT_GE(group.size(), 2u);
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                for (const auto& f : group[i]) {
                    for (const auto& g : group[j]) EXPECT_NE(f, g);
                }
            }
        }
    }
}
