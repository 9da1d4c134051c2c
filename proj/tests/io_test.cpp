#include "busywait/corpus.hpp"
#include "busywait/io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace busywait;

namespace {

const Command E = Command::exit(), L = Command::loop();
const Command FORK_LOOP = Command::seq(Command::fork(E), L);

TEST(PlainTrace, Format) {
    const auto r = run(initial_pool(FORK_LOOP), Scheduler::round_robin(), 100);
    const Json j = to_json(r.trace);
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 3u);
    EXPECT_EQ(j[0]["step"], 0);
    EXPECT_EQ(j[0]["tid"], 0);
    EXPECT_EQ(j[0]["rule"], "st-seq");
    EXPECT_EQ(j[0]["pool"]["0"], "(fork(exit); loop skip); done");
    EXPECT_EQ(j[2]["rule"], "tp-exit");
    EXPECT_EQ(j[2]["pool"]["1"], "exit; done");
}

TEST(Chain, Roundtrip) {
    const ViewShiftChain c{Assertion::obs(0),
                           {ShiftStep::intro(0), ShiftStep::cancel(0), ShiftStep::implies(Assertion::top())},
                           Assertion::top()};
    const Json j = to_json(c);
    EXPECT_EQ(j["steps"][0]["kind"], "intro");
    EXPECT_EQ(j["steps"][1]["kind"], "cancel");
    EXPECT_EQ(j["steps"][2]["kind"], "semimp");
    EXPECT_EQ(j["steps"][2]["target"], "true");
    EXPECT_EQ(chain_from_json(j), c);
    EXPECT_THROW(chain_from_json(Json::parse(R"j({"source":"obs(0)","steps":[{"kind":"jump"}],"target":"true"})j")),
                 FormatError);
}

TEST(Proof, RoundtripOverCorpus) {
    for (const Command& c : enumerate_commands(6)) {
        const auto t = synthesize(c);
        if (!t) continue;
        const Json j = to_json(*t);
        ASSERT_EQ(proof_from_json(parse_json(j.dump())), *t) << pretty(c);
    }
    const Json sketch = to_json(oracle::fork_loop_proof());
    EXPECT_EQ(sketch["rule"], "view-shift");
    EXPECT_EQ(sketch["conclusion"]["cmd"], "fork(exit); loop skip");
    EXPECT_EQ(sketch["premises"][0]["premises"][0]["side"]["child_obligations"], 1);
}

TEST(Proof, Malformed) {
    EXPECT_THROW(parse_json("{\"rule\": "), FormatError);
    EXPECT_THROW(proof_from_json(Json::parse(R"j({"rule":"magic","conclusion":{},"premises":[]})j")), FormatError);
    EXPECT_THROW(proof_from_json(Json::parse(R"j({"rule":"exit","premises":[]})j")), FormatError);
    EXPECT_THROW(
        proof_from_json(Json::parse(R"j({"rule":"exit","conclusion":{"pre":"obs(","cmd":"exit","post":"false"},"premises":[]})j")),
        FormatError);
    EXPECT_THROW(
        proof_from_json(Json::parse(R"j({"rule":"exit","conclusion":{"pre":"obs(1)","cmd":"exit;","post":"false"},"premises":[]})j")),
        FormatError);
    EXPECT_THROW(
        proof_from_json(Json::parse(R"j({"rule":"exit","conclusion":{"pre":"obs(1)","cmd":"exit","post":"false"},"premises":{}})j")),
        FormatError);
}

TEST(AnnotatedTrace, RoundtripAndFormat) {
    const auto trace = annotated_run(oracle::fork_loop_proof(), Scheduler::round_robin(), 100).trace;
    const Json j = to_json(trace);
    EXPECT_EQ(j["steps"][0]["kind"], "ghost");
    EXPECT_EQ(j["steps"][0]["rule"], "gs-intro");
    EXPECT_EQ(j["steps"][2]["split"]["child_obligations"], 1);
    EXPECT_EQ(j["steps"][3]["pool"]["1"]["chunk"], 1);
    EXPECT_EQ(j["steps"][3]["pool"]["0"]["credits"], 1);
    EXPECT_TRUE(j["final"].empty());
    const AnnotatedTrace back = annotated_trace_from_json(parse_json(j.dump()));
    EXPECT_EQ(back.steps, trace.steps);
    EXPECT_EQ(back.pools, trace.pools);

    Json bad = j;
    bad["steps"][1]["kind"] = "ghost";
    EXPECT_THROW(annotated_trace_from_json(bad), FormatError);
    bad = j;
    bad["steps"][1]["pool"]["x"] = bad["steps"][1]["pool"]["0"];
    EXPECT_THROW(annotated_trace_from_json(bad), FormatError);
    bad = j;
    bad["steps"][1]["pool"]["0"]["credits"] = -1;
    EXPECT_THROW(annotated_trace_from_json(bad), FormatError);
}

TEST(Graph, Json) {
    const auto g = build_graph(annotated_run(oracle::fork_loop_proof(), Scheduler::round_robin(), 100).trace);
    const Json j = to_json(g);
    ASSERT_EQ(j["nodes"].size(), 4u);
    EXPECT_EQ(j["nodes"][3], (Json{{"i", 3}, {"tid", 1}, {"rule", "ga-tp-exit"}}));
    EXPECT_EQ(j["edges"][2], (Json{2, 1, "ga-st-fork", 3}));
}

}  // namespace
