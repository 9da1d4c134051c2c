#include "busywait/io.hpp"

#include <fstream>
#include <sstream>

namespace busywait {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw FormatError("expected an object holding \"" + std::string(key) + "\"");
    const auto it = j.find(key);
    if (it == j.end()) throw FormatError("missing field \"" + std::string(key) + "\"");
    return *it;
}

std::string text(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) throw FormatError("field \"" + std::string(key) + "\" must be a string");
    return v.get<std::string>();
}

Natural natural(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_unsigned()) throw FormatError("field \"" + std::string(key) + "\" must be a natural number");
    return v.get<Natural>();
}

ThreadId thread_id(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-') throw FormatError("bad thread id \"" + s + "\"");
    return ThreadId{v};
}

template <class F>
auto parsing(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw FormatError(what + ": " + e.what());
    }
}

Assertion assertion(const Json& j, const char* key) {
    return parsing(std::string(key), [&] { return parse_assertion(text(j, key)); });
}

AnnotatedThreadPool annotated_pool_from_json(const Json& j) {
    if (!j.is_object()) throw FormatError("pool must be an object");
    AnnotatedThreadPool pool;
    for (const auto& [key, t] : j.items()) {
        const Natural chunk = natural(t, "chunk");
        const Natural credits = natural(t, "credits");
        Continuation k = parsing("continuation of thread " + key, [&] { return parse_continuation(text(t, "cont")); });
        pool.emplace(thread_id(key), AnnotatedThread{ResourceBundle{{chunk}, credits}, std::move(k)});
    }
    return pool;
}

}  // namespace

Json to_json(const ThreadPool& pool) {
    Json j = Json::object();
    for (const auto& [tid, k] : pool) j[std::to_string(tid.value)] = pretty(k);
    return j;
}

Json to_json(const Trace& trace) {
    Json j = Json::array();
    for (std::size_t i = 0; i < trace.size(); ++i)
        j.push_back({{"step", i},
                     {"tid", trace[i].tid.value},
                     {"rule", rule_name(trace[i].rule)},
                     {"pool", to_json(trace[i].before)}});
    return j;
}

Json to_json(const AnnotatedThreadPool& pool) {
    Json j = Json::object();
    for (const auto& [tid, t] : pool) {
        Natural chunk = 0;
        for (Natural c : t.bundle.chunks) chunk += c;
        j[std::to_string(tid.value)] = {{"cont", pretty(t.continuation)}, {"chunk", chunk}, {"credits", t.bundle.credits}};
    }
    return j;
}

Json to_json(const AnnotatedTrace& trace) {
    Json steps = Json::array();
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const AnnotatedStep& s = trace.steps[i];
        Json step = {{"step", i},
                     {"kind", s.ghost() ? "ghost" : "real"},
                     {"rule", annotated_rule_name(s.rule)},
                     {"tid", s.tid.value}};
        if (s.split) step["split"] = {{"child_obligations", s.split->child_obligations},
                                      {"child_credits", s.split->child_credits}};
        step["pool"] = to_json(trace.pools[i]);
        steps.push_back(std::move(step));
    }
    return {{"steps", std::move(steps)}, {"final", to_json(trace.pools.back())}};
}

AnnotatedTrace annotated_trace_from_json(const Json& j) {
    const Json& steps = field(j, "steps");
    if (!steps.is_array()) throw FormatError("\"steps\" must be an array");
    AnnotatedTrace trace;
    for (const Json& s : steps) {
        const std::string name = text(s, "rule");
        const auto rule = parse_annotated_rule_name(name);
        if (!rule) throw FormatError("unknown rule \"" + name + "\"");
        const std::string kind = text(s, "kind");
        if (kind != (is_ghost(*rule) ? "ghost" : "real"))
            throw FormatError("rule \"" + name + "\" is not of kind \"" + kind + "\"");
        AnnotatedStep step{*rule, ThreadId{natural(s, "tid")}, std::nullopt};
        if (s.contains("split")) {
            const Json& split = s["split"];
            step.split = ForkSplit{natural(split, "child_obligations"), natural(split, "child_credits")};
        }
        trace.steps.push_back(step);
        trace.pools.push_back(annotated_pool_from_json(field(s, "pool")));
    }
    trace.pools.push_back(annotated_pool_from_json(field(j, "final")));
    return trace;
}

Json to_json(const ViewShiftChain& chain) {
    Json steps = Json::array();
    for (const ShiftStep& s : chain.steps) {
        Json step = {{"kind", shift_kind_name(s.kind)}};
        if (s.kind == ShiftStep::Kind::SemImp)
            step["target"] = pretty(*s.target);
        else
            step["at"] = s.at;
        steps.push_back(std::move(step));
    }
    return {{"source", pretty(chain.source)}, {"steps", std::move(steps)}, {"target", pretty(chain.target)}};
}

ViewShiftChain chain_from_json(const Json& j) {
    ViewShiftChain chain{assertion(j, "source"), {}, assertion(j, "target")};
    const Json& steps = field(j, "steps");
    if (!steps.is_array()) throw FormatError("\"steps\" must be an array");
    for (const Json& s : steps) {
        const std::string kind = text(s, "kind");
        if (kind == shift_kind_name(ShiftStep::Kind::ObCredIntro))
            chain.steps.push_back(ShiftStep::intro(natural(s, "at")));
        else if (kind == shift_kind_name(ShiftStep::Kind::ObCredCancel))
            chain.steps.push_back(ShiftStep::cancel(natural(s, "at")));
        else if (kind == shift_kind_name(ShiftStep::Kind::SemImp))
            chain.steps.push_back(ShiftStep::implies(assertion(s, "target")));
        else
            throw FormatError("unknown view shift step \"" + kind + "\"");
    }
    return chain;
}

Json to_json(const ProofTree& tree) {
    Json j = {{"rule", proof_rule_name(tree.rule)},
              {"conclusion",
               {{"pre", pretty(tree.conclusion.pre)},
                {"cmd", pretty(tree.conclusion.command)},
                {"post", pretty(tree.conclusion.post)}}}};
    Json side = Json::object();
    if (tree.frame) side["frame"] = pretty(*tree.frame);
    if (tree.split) {
        side["child_obligations"] = tree.split->child_obligations;
        side["child_credits"] = tree.split->child_credits;
    }
    if (tree.pre_shift) side["pre_shift"] = to_json(*tree.pre_shift);
    if (tree.post_shift) side["post_shift"] = to_json(*tree.post_shift);
    if (!side.empty()) j["side"] = std::move(side);
    Json premises = Json::array();
    for (const ProofTree& p : tree.premises) premises.push_back(to_json(p));
    j["premises"] = std::move(premises);
    return j;
}

ProofTree proof_from_json(const Json& j) {
    const std::string name = text(j, "rule");
    const auto rule = parse_proof_rule(name);
    if (!rule) throw FormatError("unknown proof rule \"" + name + "\"");
    const Json& c = field(j, "conclusion");
    ProofTree tree{*rule,
                   Triple{assertion(c, "pre"), parsing("cmd", [&] { return parse_program(text(c, "cmd")); }),
                          assertion(c, "post")},
                   {}, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    if (j.contains("side")) {
        const Json& side = j["side"];
        if (!side.is_object()) throw FormatError("\"side\" must be an object");
        if (side.contains("frame")) tree.frame = assertion(side, "frame");
        if (side.contains("child_obligations") || side.contains("child_credits"))
            tree.split = ForkSplit{natural(side, "child_obligations"), natural(side, "child_credits")};
        if (side.contains("pre_shift")) tree.pre_shift = chain_from_json(side["pre_shift"]);
        if (side.contains("post_shift")) tree.post_shift = chain_from_json(side["post_shift"]);
    }
    const Json& premises = field(j, "premises");
    if (!premises.is_array()) throw FormatError("\"premises\" must be an array");
    for (const Json& p : premises) tree.premises.push_back(proof_from_json(p));
    return tree;
}

Json to_json(const ProgramOrderGraph& g) {
    Json nodes = Json::array();
    for (std::size_t i = 0; i < g.size(); ++i)
        nodes.push_back({{"i", i}, {"tid", g.tids[i].value}, {"rule", annotated_rule_name(g.rules[i])}});
    Json edges = Json::array();
    for (const GraphEdge& e : g.edges) edges.push_back({e.from, e.tid.value, annotated_rule_name(e.rule), e.to});
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

Json parse_json(const std::string& contents) {
    try {
        return Json::parse(contents);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << contents)) throw std::runtime_error("cannot write " + path);
}

}  // namespace busywait
