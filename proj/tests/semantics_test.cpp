#include "busywait/corpus.hpp"
#include "busywait/semantics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace busywait;

namespace {

const Command E = Command::exit();
const Command L = Command::loop();
const Command FORK_LOOP = Command::seq(Command::fork(E), L);

Continuation k(std::initializer_list<Command> cs) { return Continuation(std::vector<Command>(cs)); }
ThreadId t(std::uint64_t v) { return ThreadId{v}; }

TEST(ThreadStep, Examples) {
    auto s = thread_step(k({L}));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->next, k({L}));
    EXPECT_FALSE(s->forked);
    EXPECT_EQ(s->rule, Rule::Loop);

    s = thread_step(k({Command::fork(E)}));
    ASSERT_TRUE(s);
    EXPECT_TRUE(s->next.is_done());
    EXPECT_EQ(s->forked, k({E}));
    EXPECT_EQ(s->rule, Rule::Fork);

    s = thread_step(k({Command::seq(E, L)}));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->next, k({E, L}));
    EXPECT_FALSE(s->forked);

    EXPECT_FALSE(thread_step(Continuation::done()));
    EXPECT_FALSE(thread_step(k({E, L})));
}

TEST(ExtendPool, Examples) {
    const ThreadPool p{{t(0), {}}};
    EXPECT_EQ(extend_pool(p, std::nullopt), p);
    ThreadPool q{{t(0), {}}, {t(5), k({L})}};
    auto r = extend_pool(q, k({E}));
    EXPECT_EQ(r.size(), 3u);
    EXPECT_EQ(r.at(t(6)), k({E}));
    EXPECT_EQ(extend_pool({{t(3), {}}}, k({E})).at(t(4)), k({E}));
    EXPECT_EQ(extend_pool({}, k({E})), (ThreadPool{{t(0), k({E})}}));
}

TEST(PoolStep, Examples) {
    EXPECT_TRUE(pool_step({{t(0), k({E})}, {t(1), k({L})}}, t(0)).empty());
    EXPECT_TRUE(pool_step({{t(0), {}}}, t(0)).empty());
    EXPECT_EQ(pool_step({{t(0), k({Command::fork(E)})}}, t(0)), (ThreadPool{{t(0), {}}, {t(1), k({E})}}));
    EXPECT_THROW(pool_step({{t(0), {}}}, t(1)), SemanticsError);
    EXPECT_EQ(step_pool({{t(0), k({E})}}, t(0)).rule, Rule::Exit);
    EXPECT_EQ(step_pool({{t(0), {}}}, t(0)).rule, Rule::Done);
}

TEST(RuleNames, Catalogue) {
    EXPECT_EQ(rule_name(Rule::Loop), "st-loop");
    EXPECT_EQ(rule_name(Rule::Fork), "st-fork");
    EXPECT_EQ(rule_name(Rule::Seq), "st-seq");
    EXPECT_EQ(rule_name(Rule::Exit), "tp-exit");
    EXPECT_EQ(rule_name(Rule::Done), "tp-done");
    EXPECT_EQ(annotated_rule_name(Rule::Loop), "ga-st-loop");
    EXPECT_EQ(annotated_rule_name(Rule::Done), "ga-tp-done");
    EXPECT_EQ(annotated_rule_name(Rule::GhostIntro), "gs-intro");
    EXPECT_EQ(annotated_rule_name(Rule::GhostCancel), "gs-cancel");
    for (Rule r : {Rule::Loop, Rule::Fork, Rule::Seq, Rule::Exit, Rule::Done, Rule::GhostIntro, Rule::GhostCancel}) {
        EXPECT_EQ(parse_annotated_rule_name(annotated_rule_name(r)), r);
        if (!is_ghost(r)) EXPECT_EQ(parse_rule_name(rule_name(r)), r);
    }
    EXPECT_FALSE(parse_rule_name("st-jump"));
}

TEST(Run, Examples) {
    auto r = run(initial_pool(E), Scheduler::round_robin(), 10);
    EXPECT_EQ(r.outcome.kind, Outcome::Kind::Terminated);
    EXPECT_EQ(r.outcome.steps, 1u);
    EXPECT_TRUE(r.final_pool.empty());

    r = run(initial_pool(L), Scheduler::round_robin(), 10);
    EXPECT_EQ(r.outcome.kind, Outcome::Kind::FairDivergence);
    ASSERT_TRUE(r.outcome.cycle);
    EXPECT_EQ(r.outcome.cycle->length, 1u);
}

TEST(Run, ForkLoopGoldenRoundRobin) {
    // seq by 0, fork by 0, then the cursor moves on to the child, which exits.
    const auto r = run(initial_pool(FORK_LOOP), Scheduler::round_robin(), 100);
    EXPECT_EQ(r.outcome.kind, Outcome::Kind::Terminated);
    EXPECT_EQ(r.outcome.steps, 3u);
    ASSERT_EQ(r.trace.size(), 3u);
    EXPECT_EQ(r.trace[0].rule, Rule::Seq);
    EXPECT_EQ(r.trace[1].rule, Rule::Fork);
    EXPECT_EQ(r.trace[2].rule, Rule::Exit);
    EXPECT_EQ(r.trace[2].tid, t(1));
}

TEST(Run, ScriptedAndRandom) {
    auto r = run(initial_pool(FORK_LOOP), Scheduler::scripted({t(0), t(0), t(0), t(0), t(1)}), 100);
    EXPECT_EQ(r.outcome.kind, Outcome::Kind::Terminated);
    EXPECT_EQ(r.outcome.steps, 5u);
    EXPECT_EQ(r.trace[2].rule, Rule::Loop);

    r = run(initial_pool(FORK_LOOP), Scheduler::scripted({t(0)}), 100);
    EXPECT_EQ(r.outcome.kind, Outcome::Kind::FuelExhausted);
    EXPECT_THROW(run(initial_pool(FORK_LOOP), Scheduler::scripted({t(1)}), 100), SemanticsError);

    r = run(initial_pool(L), Scheduler::seeded_random(3), 50);
    EXPECT_EQ(r.outcome.kind, Outcome::Kind::FuelExhausted);
    EXPECT_EQ(r.outcome.steps, 50u);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = run(initial_pool(FORK_LOOP), Scheduler::seeded_random(seed), 1000);
        const auto b = run(initial_pool(FORK_LOOP), Scheduler::seeded_random(seed), 1000);
        EXPECT_EQ(a.outcome.kind, Outcome::Kind::Terminated);
        EXPECT_EQ(a.outcome.steps, b.outcome.steps);
    }
}

TEST(Run, TraceIsAReductionSequence) {
    for (const Command& c : enumerate_commands(6)) {
        const auto r = run(initial_pool(c), Scheduler::seeded_random(c.size()), 200);
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            const ThreadPool next = i + 1 < r.trace.size() ? r.trace[i + 1].before : r.final_pool;
            const auto s = step_pool(r.trace[i].before, r.trace[i].tid);
            ASSERT_EQ(s.pool, next);
            ASSERT_EQ(s.rule, r.trace[i].rule);
            if (s.rule == Rule::Exit) {
                ASSERT_TRUE(next.empty());
                ASSERT_EQ(i + 1, r.trace.size());
            }
        }
        if (r.outcome.kind == Outcome::Kind::Terminated) ASSERT_TRUE(r.final_pool.empty());
    }
}

TEST(Explore, Examples) {
    EXPECT_EQ(explore_fair_termination(E).verdict, Verdict::Terminates);
    const auto loop = explore_fair_termination(L);
    EXPECT_EQ(loop.verdict, Verdict::FairlyDiverges);
    ASSERT_TRUE(loop.witness);
    EXPECT_EQ(explore_fair_termination(FORK_LOOP).verdict, Verdict::Terminates);
    EXPECT_THROW(explore_fair_termination(FORK_LOOP, ExplorationLimits{1}), ExplorationLimitExceeded);
}

TEST(StaticOracle, Examples) {
    EXPECT_EQ(static_termination_oracle(Command::seq(Command::fork(L), E)), Verdict::Terminates);
    EXPECT_EQ(static_termination_oracle(Command::seq(L, E)), Verdict::FairlyDiverges);
    EXPECT_EQ(static_termination_oracle(Command::fork(E)), Verdict::Terminates);
    const auto s = unfold_threads(Command::seq(Command::fork(L), Command::seq(Command::fork(L), E)));
    EXPECT_EQ(s.threads, 3u);
    EXPECT_EQ(s.loopers, 2u);
    EXPECT_EQ(s.exiters, 1u);
}

TEST(Properties, EnabledDeterministicFresh) {
    for (const Command& c : enumerate_commands(5)) {
        const auto r = run(initial_pool(c), Scheduler::seeded_random(17), 100);
        for (const TraceStep& s : r.trace) {
            for (const auto& [id, _] : s.before) {
                const auto a = step_pool(s.before, id);
                const auto b = step_pool(s.before, id);
                ASSERT_EQ(a.pool, b.pool);
                for (const auto& [nid, nk] : a.pool)
                    if (!s.before.contains(nid)) ASSERT_GT(nid, s.before.rbegin()->first);
            }
        }
    }
}

TEST(Properties, OraclesAgreeOnCorpus) {
    for (const Command& c : enumerate_commands(7)) {
        const Verdict explored = explore_fair_termination(c).verdict;
        ASSERT_EQ(static_termination_oracle(c), explored) << pretty(c);
        ASSERT_EQ(oracle::fairly_diverges(c), explored == Verdict::FairlyDiverges) << pretty(c);
    }
}

TEST(Properties, RoundRobinAdequacy) {
    for (const Command& c : enumerate_commands(7)) {
        const auto r = run(initial_pool(c), Scheduler::round_robin(), 100000);
        ASSERT_NE(r.outcome.kind, Outcome::Kind::FuelExhausted) << pretty(c);
        ASSERT_EQ(r.outcome.kind == Outcome::Kind::Terminated, !oracle::fairly_diverges(c)) << pretty(c);
    }
}

}  // namespace
