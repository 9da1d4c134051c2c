#include "busywait/pograph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace busywait {

std::vector<std::size_t> ProgramOrderGraph::successors(std::size_t i) const {
    std::vector<std::size_t> out;
    if (next_same[i]) out.push_back(*next_same[i]);
    if (next_forked[i]) out.push_back(*next_forked[i]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::optional<std::size_t>> ProgramOrderGraph::predecessors() const {
    std::vector<std::optional<std::size_t>> pred(size());
    for (const GraphEdge& e : edges) pred[e.to] = e.from;
    return pred;
}

ProgramOrderGraph build_graph(const AnnotatedTrace& trace) {
    if (auto err = check_annotated_trace(trace))
        throw std::invalid_argument("invalid trace at step " + std::to_string(err->step) + ": " + err->reason);
    const auto& steps = trace.steps;
    const std::size_t n = steps.size();
    ProgramOrderGraph g;
    g.next_same.resize(n);
    g.next_forked.resize(n);
    for (const AnnotatedStep& s : steps) {
        g.tids.push_back(s.tid);
        g.rules.push_back(s.rule);
    }
    auto first_after = [&](std::size_t i, ThreadId tid) -> std::optional<std::size_t> {
        for (std::size_t k = i + 1; k < n; ++k)
            if (steps[k].tid == tid) return k;
        return std::nullopt;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Rule r = steps[i].rule;
        if (r == Rule::Exit || r == Rule::Done) continue;
        g.next_same[i] = first_after(i, steps[i].tid);
        if (r == Rule::Fork) g.next_forked[i] = first_after(i, fresh_thread_id(trace.pools[i]));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : g.successors(i)) g.edges.push_back({i, g.tids[j], g.rules[i], j});
    return g;
}

bool is_prefix(const ProgramOrderGraph& g, const GraphPrefix& p) {
    if (g.size() == 0) return p.empty();
    if (!p.contains(0)) return false;
    const auto pred = g.predecessors();
    for (std::size_t i : p) {
        if (i >= g.size()) return false;
        if (i != 0 && (!pred[i] || !p.contains(*pred[i]))) return false;
    }
    return true;
}

std::set<std::size_t> leaves(const ProgramOrderGraph& g, const GraphPrefix& p) {
    std::set<std::size_t> out;
    for (std::size_t i : p) {
        const auto succ = g.successors(i);
        if (std::none_of(succ.begin(), succ.end(), [&](std::size_t j) { return p.contains(j); })) out.insert(i);
    }
    return out;
}

bool is_sibling_closed(const ProgramOrderGraph& g, const GraphPrefix& p) {
    for (std::size_t i : p) {
        if (!g.is_fork(i)) continue;
        const bool a = g.next_same[i] && p.contains(*g.next_same[i]);
        const bool b = g.next_forked[i] && p.contains(*g.next_forked[i]);
        if (a != b) return false;
    }
    return true;
}

namespace {

// Nodes that may join a prefix together once `i` is in it; empty if none.
std::vector<std::size_t> extension(const ProgramOrderGraph& g, std::size_t i) {
    if (g.is_fork(i)) {
        if (g.next_same[i] && g.next_forked[i]) return {*g.next_same[i], *g.next_forked[i]};
        return {};
    }
    if (g.next_same[i]) return {*g.next_same[i]};
    return {};
}

void enumerate(const ProgramOrderGraph& g, GraphPrefix& current, std::vector<std::vector<std::size_t>>& pending,
               std::vector<GraphPrefix>& out) {
    if (pending.empty()) {
        out.push_back(current);
        return;
    }
    auto group = pending.back();
    pending.pop_back();

    enumerate(g, current, pending, out);

    const std::size_t mark = pending.size();
    for (std::size_t j : group) {
        current.insert(j);
        if (auto ext = extension(g, j); !ext.empty()) pending.push_back(std::move(ext));
    }
    enumerate(g, current, pending, out);
    pending.resize(mark);
    for (std::size_t j : group) current.erase(j);

    pending.push_back(std::move(group));
}

}  // namespace

std::vector<GraphPrefix> sibling_closed_prefixes(const ProgramOrderGraph& g) {
    std::vector<GraphPrefix> out;
    if (g.size() == 0) return {GraphPrefix{}};
    GraphPrefix current{0};
    std::vector<std::vector<std::size_t>> pending;
    if (auto ext = extension(g, 0); !ext.empty()) pending.push_back(std::move(ext));
    enumerate(g, current, pending, out);
    return out;
}

GraphPrefix random_sibling_closed_prefix(const ProgramOrderGraph& g, double density, std::mt19937_64& rng) {
    GraphPrefix p;
    if (g.size() == 0) return p;
    std::bernoulli_distribution take(density);
    std::deque<std::size_t> queue{0};
    p.insert(0);
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        const auto ext = extension(g, i);
        if (ext.empty() || !take(rng)) continue;
        for (std::size_t j : ext) {
            p.insert(j);
            queue.push_back(j);
        }
    }
    return p;
}

GraphPrefix max_loop_free_prefix(const ProgramOrderGraph& g) {
    GraphPrefix p;
    if (g.size() == 0) return p;
    std::deque<std::size_t> queue{0};
    p.insert(0);
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        if (g.rules[i] == Rule::Loop) continue;
        for (std::size_t j : extension(g, i)) {
            p.insert(j);
            queue.push_back(j);
        }
    }
    return p;
}

std::vector<LeafResources> leaf_resources(const AnnotatedTrace& trace, const ProgramOrderGraph& g,
                                          const GraphPrefix& p) {
    std::vector<LeafResources> out;
    for (std::size_t l : leaves(g, p)) {
        const ThreadId tid = g.tids[l];
        const ResourceBundle& r = trace.pools.at(l).at(tid).bundle;
        Natural obligations = 0;
        for (Natural chunk : r.chunks) obligations += chunk;
        out.push_back({l, tid, obligations, r.credits});
    }
    return out;
}

std::string Imbalance::to_string() const {
    std::ostringstream os;
    os << "obligations " << obligations << " != credits " << credits << " at leaves";
    for (const LeafResources& l : leaves)
        os << " [step " << l.node << ", thread " << l.tid.value << ": " << l.obligations << ", " << l.credits << "]";
    return os.str();
}

std::optional<Imbalance> check_leaf_balance(const AnnotatedTrace& trace, const ProgramOrderGraph& g,
                                            const GraphPrefix& p) {
    Imbalance report{leaf_resources(trace, g, p)};
    for (const LeafResources& l : report.leaves) {
        report.obligations += l.obligations;
        report.credits += l.credits;
    }
    if (report.obligations == report.credits) return std::nullopt;
    return report;
}

bool LoopFreeAnalysis::ok() const {
    return !loop_leaf_with_obligation && (loop_leaves.empty() || other_leaf_with_obligation);
}

LoopFreeAnalysis analyze_loop_free_prefix(const AnnotatedTrace& trace, const ProgramOrderGraph& g) {
    LoopFreeAnalysis a;
    a.prefix = max_loop_free_prefix(g);
    a.leaves = leaf_resources(trace, g, a.prefix);
    for (const LeafResources& l : a.leaves) {
        const bool loop = g.rules[l.node] == Rule::Loop;
        if (loop) a.loop_leaves.push_back(l.node);
        if (l.obligations == 0) continue;
        if (loop)
            a.loop_leaf_with_obligation = true;
        else
            a.other_leaf_with_obligation = true;
    }
    return a;
}

std::string to_dot(const ProgramOrderGraph& g) {
    std::ostringstream os;
    os << "digraph {\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        os << "  n" << i << " [label=\"" << i << ": " << annotated_rule_name(g.rules[i]) << '@' << g.tids[i].value
           << "\"];\n";
    for (const GraphEdge& e : g.edges)
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << annotated_rule_name(e.rule) << "\"];\n";
    os << '}';
    return os.str();
}

}  // namespace busywait
