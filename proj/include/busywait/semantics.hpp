#pragma once

#include "busywait/lang.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace busywait {

struct ThreadId {
    std::uint64_t value = 0;

    friend auto operator<=>(const ThreadId&, const ThreadId&) = default;
};

using ThreadPool = std::map<ThreadId, Continuation>;

/// Threads forked by one single-thread step; at most one.
using ForkedSet = std::optional<Continuation>;

/// Reduction rules. The first five are the plain rules; the ghost rules only
/// occur in annotated executions.
enum class Rule { Loop, Fork, Seq, Exit, Done, GhostIntro, GhostCancel };

/// "st-loop", "st-fork", "st-seq", "tp-exit", "tp-done", "gs-intro", "gs-cancel".
std::string_view rule_name(Rule rule);
/// Annotated catalogue: real rules get a "ga-" prefix, ghost rules keep "gs-".
std::string_view annotated_rule_name(Rule rule);
std::optional<Rule> parse_rule_name(std::string_view name);
std::optional<Rule> parse_annotated_rule_name(std::string_view name);
bool is_ghost(Rule rule);

class SemanticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ThreadStep {
    Continuation next;
    ForkedSet forked;
    Rule rule;
};

/// Single-thread reduction. Absent for `done` and for an `exit` head;
/// both are thread-pool rules.
std::optional<ThreadStep> thread_step(const Continuation& k);

/// max(domain) + 1, or 0 for an empty map.
template <class Map>
ThreadId fresh_thread_id(const Map& pool) {
    return pool.empty() ? ThreadId{0} : ThreadId{pool.rbegin()->first.value + 1};
}

ThreadPool extend_pool(ThreadPool pool, const ForkedSet& forked);

struct PoolStep {
    ThreadPool pool;
    Rule rule;
};

/// Thread-pool reduction of thread `id`. Throws SemanticsError if `id` is
/// not in the pool.
PoolStep step_pool(const ThreadPool& pool, ThreadId id);
ThreadPool pool_step(const ThreadPool& pool, ThreadId id);

class Scheduler {
public:
    struct RoundRobin {};
    struct SeededRandom {
        std::uint64_t seed;
    };
    struct Scripted {
        std::vector<ThreadId> script;
    };
    using Policy = std::variant<RoundRobin, SeededRandom, Scripted>;

    static Scheduler round_robin() { return Scheduler(RoundRobin{}); }
    static Scheduler seeded_random(std::uint64_t seed) { return Scheduler(SeededRandom{seed}); }
    static Scheduler scripted(std::vector<ThreadId> script) { return Scheduler(Scripted{std::move(script)}); }

    const Policy& policy() const { return policy_; }
    bool is_round_robin() const { return std::holds_alternative<RoundRobin>(policy_); }

private:
    explicit Scheduler(Policy policy) : policy_(std::move(policy)) {}

    Policy policy_;
};

/// Mutable cursor over a Scheduler's decisions.
class SchedulerState {
public:
    explicit SchedulerState(const Scheduler& scheduler);

    /// Next thread to run among `domain` (ascending, nonempty). Absent when a
    /// script is exhausted. Throws SemanticsError when a script names a thread
    /// outside `domain`.
    std::optional<ThreadId> pick(const std::vector<ThreadId>& domain);

    /// Round-robin cursor: the last thread scheduled.
    std::optional<ThreadId> last() const { return last_; }

private:
    Scheduler scheduler_;
    std::optional<ThreadId> last_;
    std::size_t script_pos_ = 0;
    std::mt19937_64 rng_;
};

template <class Map>
std::vector<ThreadId> domain_of(const Map& pool) {
    std::vector<ThreadId> ids;
    ids.reserve(pool.size());
    for (const auto& entry : pool) ids.push_back(entry.first);
    return ids;
}

struct TraceStep {
    ThreadPool before;
    ThreadId tid;
    Rule rule;
};

using Trace = std::vector<TraceStep>;

struct Outcome {
    enum class Kind { Terminated, FuelExhausted, FairDivergence };

    /// The pool before step `entry` recurs before step `entry + length`.
    struct Cycle {
        std::size_t entry;
        std::size_t length;
    };

    Kind kind;
    std::size_t steps;
    std::optional<Cycle> cycle;
};

std::string_view outcome_name(Outcome::Kind kind);

struct RunResult {
    Outcome outcome;
    Trace trace;
    ThreadPool final_pool;
};

/// Executes at most `fuel` pool steps. Only round-robin runs report
/// FairDivergence, detected as a recurring (pool, cursor) pair; an exhausted
/// script reports FuelExhausted.
RunResult run(const ThreadPool& initial, const Scheduler& scheduler, std::size_t fuel);

ThreadPool initial_pool(const Command& c);

enum class Verdict { Terminates, FairlyDiverges };

std::string_view verdict_name(Verdict v);

struct ExplorationLimits {
    std::size_t max_states = 1'000'000;
};

struct Exploration {
    Verdict verdict;
    std::size_t states;
    /// For FairlyDiverges: a pool inside a fair cycle and the threads
    /// scheduled along that cycle.
    std::optional<ThreadPool> witness;
    std::vector<ThreadId> witness_threads;
};

class ExplorationLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive search of all interleavings from {0 -> c; done}.
///
/// The reachable pools form a finite graph: loop bodies are `skip`, so no
/// program forks more threads than it has fork nodes and every continuation
/// is a suffix of a finite unfolding. A fair infinite reduction sequence
/// exists iff some reachable strongly connected component with at least one
/// internal edge schedules, on its internal edges, every thread present in
/// its pools. A thread can only leave the pool by being scheduled, so a
/// thread never scheduled inside a component is present throughout it.
///
/// Throws ExplorationLimitExceeded when more than `limits.max_states` pools
/// are reachable; the result is then inconclusive.
Exploration explore_fair_termination(const Command& c, ExplorationLimits limits = {});

/// Unfolds each thread sequentially: a thread exits, loops or finishes
/// depending on which of `exit`, `loop skip` or the end of its code comes
/// first; forks encountered on the way start new threads. Under fairness any
/// exiting thread eventually runs its finitely many steps to `exit`, which
/// empties the pool. So the program diverges iff some thread loops and none
/// exits.
Verdict static_termination_oracle(const Command& c);

struct ThreadSummary {
    std::size_t threads = 0;
    std::size_t loopers = 0;
    std::size_t exiters = 0;
};

ThreadSummary unfold_threads(const Command& c);

}  // namespace busywait
