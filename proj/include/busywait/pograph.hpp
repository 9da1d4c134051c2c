#pragma once

#include "busywait/annotated.hpp"

#include <cstddef>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace busywait {

struct GraphEdge {
    std::size_t from;
    ThreadId tid;  // thread of the target step
    Rule rule;     // rule applied at the source step
    std::size_t to;

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Node i is step i of an annotated trace.
struct ProgramOrderGraph {
    std::vector<ThreadId> tids;
    std::vector<Rule> rules;
    std::vector<GraphEdge> edges;  // sorted by (from, to)

    /// Next step of the same thread, if recorded.
    std::vector<std::optional<std::size_t>> next_same;
    /// For fork steps: first step of the forked thread, if recorded.
    std::vector<std::optional<std::size_t>> next_forked;

    std::size_t size() const { return tids.size(); }
    bool is_fork(std::size_t i) const { return rules[i] == Rule::Fork; }
    std::vector<std::size_t> successors(std::size_t i) const;
    std::vector<std::optional<std::size_t>> predecessors() const;
};

using GraphPrefix = std::set<std::size_t>;

ProgramOrderGraph build_graph(const AnnotatedTrace& trace);

/// Contains the root (unless the graph is empty) and the predecessor of every
/// other member.
bool is_prefix(const ProgramOrderGraph& g, const GraphPrefix& p);

std::set<std::size_t> leaves(const ProgramOrderGraph& g, const GraphPrefix& p);

/// Each fork node in p has both successors in p or neither. A successor the
/// trace never reached counts as outside p.
bool is_sibling_closed(const ProgramOrderGraph& g, const GraphPrefix& p);

/// Grows from the root, never past a loop step and adding the two successors
/// of a fork only together.
GraphPrefix max_loop_free_prefix(const ProgramOrderGraph& g);

/// Every sibling-closed prefix, in no particular order. Exponential.
std::vector<GraphPrefix> sibling_closed_prefixes(const ProgramOrderGraph& g);

/// A random sibling-closed prefix: each admissible extension is taken with
/// probability `density`.
GraphPrefix random_sibling_closed_prefix(const ProgramOrderGraph& g, double density, std::mt19937_64& rng);

struct LeafResources {
    std::size_t node;
    ThreadId tid;
    Natural obligations;
    Natural credits;
};

/// Bundles of the stepping threads, read from the pool before each leaf step.
std::vector<LeafResources> leaf_resources(const AnnotatedTrace& trace, const ProgramOrderGraph& g,
                                          const GraphPrefix& p);

struct Imbalance {
    std::vector<LeafResources> leaves;
    Natural obligations = 0;
    Natural credits = 0;

    std::string to_string() const;
};

std::optional<Imbalance> check_leaf_balance(const AnnotatedTrace& trace, const ProgramOrderGraph& g,
                                            const GraphPrefix& p);

struct LoopFreeAnalysis {
    GraphPrefix prefix;
    std::vector<LeafResources> leaves;
    std::vector<std::size_t> loop_leaves;  // leaves that are loop steps
    bool loop_leaf_with_obligation = false;
    bool other_leaf_with_obligation = false;

    /// No loop leaf holds an obligation; if there is a loop leaf, some other
    /// leaf holds one.
    bool ok() const;
};

LoopFreeAnalysis analyze_loop_free_prefix(const AnnotatedTrace& trace, const ProgramOrderGraph& g);

std::string to_dot(const ProgramOrderGraph& g);

}  // namespace busywait
