#include "busywait/corpus.hpp"
#include "busywait/proof.hpp"
#include "busywait/semantics.hpp"
#include "mutations.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace busywait;

namespace {

const Assertion F = Assertion::bottom(), C = Assertion::credit();
Assertion O(Natural n) { return Assertion::obs(n); }
Assertion S(Assertion a, Assertion b) { return Assertion::star(std::move(a), std::move(b)); }
const Command E = Command::exit(), L = Command::loop();
const Command FORK_LOOP = Command::seq(Command::fork(E), L);

ProofTree leaf(ProofRule r, Assertion pre, Command c, Assertion post) {
    return ProofTree{r, {std::move(pre), std::move(c), std::move(post)}, {}, {}, {}, {}, {}};
}

TEST(Check, ForkLoop) {
    const ProofTree t = oracle::fork_loop_proof();
    EXPECT_FALSE(check_proof(t));
    EXPECT_EQ(conclusion_of(t), (Triple{O(0), FORK_LOOP, O(0)}));
    EXPECT_EQ(to_string(conclusion_of(t)), "{obs(0)} fork(exit); loop skip {obs(0)}");
}

TEST(Check, LeafSchemas) {
    EXPECT_FALSE(check_proof(leaf(ProofRule::Exit, O(3), E, F)));
    EXPECT_FALSE(check_proof(leaf(ProofRule::Loop, S(C, O(0)), L, F)));
    EXPECT_EQ(conclusion_of(leaf(ProofRule::Exit, O(1), E, F)), (Triple{O(1), E, F}));

    auto err = check_proof(leaf(ProofRule::Loop, O(0), L, F));
    ASSERT_TRUE(err);
    EXPECT_EQ(err->path, "root");
    EXPECT_EQ(err->rule, ProofRule::Loop);
    EXPECT_NE(err->message.find("missing credit"), std::string::npos);

    err = check_proof(leaf(ProofRule::Exit, O(1), E, O(0)));
    ASSERT_TRUE(err);
    EXPECT_NE(err->message.find("exit postcondition must be false"), std::string::npos);

    err = check_proof(leaf(ProofRule::Loop, S(O(1), C), L, F));
    ASSERT_TRUE(err);
    EXPECT_NE(err->message.find("must not hold obligations"), std::string::npos);

    EXPECT_TRUE(check_proof(leaf(ProofRule::Exit, S(O(1), C), E, F)));
    EXPECT_TRUE(check_proof(leaf(ProofRule::Loop, S(O(0), C), E, F)));
}

TEST(Check, ForkSchema) {
    const ProofTree child = leaf(ProofRule::Exit, O(1), E, F);
    ProofTree weak{ProofRule::ViewShift, {O(1), E, O(0)}, {child}, {}, {}, ViewShiftChain{O(1), {}, O(1)},
                   ViewShiftChain{F, {ShiftStep::implies(O(0))}, O(0)}};
    ProofTree fork{ProofRule::Fork, {S(O(3), S(C, C)), Command::fork(E), S(O(2), S(C, C))}, {weak}, {}, ForkSplit{1, 0},
                   {}, {}};
    EXPECT_FALSE(check_proof(fork));
    fork.split = ForkSplit{1, 1};
    auto err = check_proof(fork);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->rule, ProofRule::Fork);

    weak.conclusion.post = S(O(0), C);
    weak.post_shift->target = S(O(0), C);
    weak.post_shift->steps = {ShiftStep::implies(S(O(0), C))};
    fork.premises = {weak};
    fork.split = ForkSplit{1, 0};
    err = check_proof(fork);
    ASSERT_TRUE(err);
    EXPECT_NE(err->message.find("forked thread must end at obs(0)"), std::string::npos);
}

TEST(Check, FrameAndSeq) {
    const ProofTree exit = leaf(ProofRule::Exit, O(0), E, F);
    ProofTree framed{ProofRule::Frame, {S(O(0), C), E, S(F, C)}, {exit}, C, {}, {}, {}};
    EXPECT_FALSE(check_proof(framed));
    framed.frame = S(C, C);
    EXPECT_TRUE(check_proof(framed));

    // Post-order: a broken premise is reported before its parent.
    ProofTree seq{ProofRule::Seq, {O(0), Command::seq(E, E), F}, {exit, leaf(ProofRule::Exit, F, E, F)}, {}, {}, {}, {}};
    auto err = check_proof(seq);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->path, "root/1");
    seq.premises[1] = leaf(ProofRule::Exit, O(0), E, F);
    err = check_proof(seq);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->path, "root");
    EXPECT_NE(err->to_string().find("root (seq)"), std::string::npos);
}

TEST(Check, CanonicalComparison) {
    const ProofTree t = leaf(ProofRule::Loop, S(S(C, Assertion::top()), O(0)), L, S(F, Assertion::top()));
    EXPECT_FALSE(check_proof(t));
    // Equality is on canonical forms, so false * credit is not false.
    EXPECT_TRUE(check_proof(leaf(ProofRule::Loop, S(C, O(0)), L, S(F, C))));
}

TEST(Synthesize, Examples) {
    const auto sketch = synthesize(FORK_LOOP);
    ASSERT_TRUE(sketch);
    EXPECT_FALSE(check_proof(*sketch));
    EXPECT_EQ(*sketch, oracle::fork_loop_proof());

    EXPECT_FALSE(synthesize(L));
    EXPECT_FALSE(synthesize(Command::seq(L, E)));

    const auto ex = synthesize(E);
    ASSERT_TRUE(ex);
    EXPECT_EQ(ex->rule, ProofRule::ViewShift);
    EXPECT_EQ(ex->conclusion, (Triple{O(0), E, O(0)}));
    ASSERT_EQ(ex->premises.size(), 1u);
    EXPECT_EQ(ex->premises[0].rule, ProofRule::Exit);
    EXPECT_EQ(ex->post_shift->source, F);
    EXPECT_FALSE(check_proof(*ex));
}

TEST(Synthesize, LoopersGetOneCreditEach) {
    const Command c = Command::seq(Command::fork(L), Command::seq(Command::fork(L), E));
    const auto t = synthesize(c);
    ASSERT_TRUE(t);
    EXPECT_FALSE(check_proof(*t));
    ASSERT_EQ(t->pre_shift->steps.size(), 2u);
    std::vector<std::size_t> path;
    std::size_t loops = 0;
    mutation::walk(*t, path, [&](const std::vector<std::size_t>&, const ProofTree& n) {
        if (n.rule != ProofRule::Loop) return;
        ++loops;
        EXPECT_TRUE(equivalent(n.conclusion.pre, S(O(0), C)));
    });
    EXPECT_EQ(loops, 2u);
}

TEST(Properties, SynthesizerValidityAndSoundness) {
    std::size_t proved = 0;
    for (const Command& c : enumerate_commands(7)) {
        const auto t = synthesize(c);
        const bool terminates = !oracle::fairly_diverges(c);
        ASSERT_EQ(t.has_value(), terminates) << pretty(c);
        if (!t) continue;
        ++proved;
        const auto err = check_proof(*t);
        ASSERT_FALSE(err) << pretty(c) << ": " << err->to_string();
        ASSERT_EQ(conclusion_of(*t), (Triple{O(0), c, O(0)}));
    }
    EXPECT_GT(proved, 100u);
}

TEST(Properties, LoopNodesNeverCarryObligations) {
    for (const Command& c : enumerate_commands(6)) {
        const auto t = synthesize(c);
        if (!t) continue;
        std::vector<std::size_t> path;
        mutation::walk(*t, path, [&](const std::vector<std::size_t>&, const ProofTree& n) {
            if (n.rule == ProofRule::Loop) ASSERT_TRUE(canonicalize(n.conclusion.pre).obligations == Multiset{0});
        });
    }
    for (Natural n = 1; n < 4; ++n) EXPECT_TRUE(check_proof(leaf(ProofRule::Loop, S(O(n), C), L, F)));
}

TEST(Properties, MutantsOfForkLoopProofAreRejected) {
    const auto mutants = mutation::single_node_mutants(oracle::fork_loop_proof());
    EXPECT_GE(mutants.size(), 100u);
    for (const auto& m : mutants) {
        const auto err = check_proof(m.tree);
        ASSERT_TRUE(err) << m.description;
        EXPECT_EQ(err->path.rfind("root", 0), 0u);
    }
}

}  // namespace
