#pragma once

#include "busywait/proof.hpp"
#include "busywait/resources.hpp"
#include "busywait/semantics.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace busywait {

struct AnnotatedThread {
    ResourceBundle bundle;
    Continuation continuation;

    friend bool operator==(const AnnotatedThread&, const AnnotatedThread&) = default;
};

using AnnotatedThreadPool = std::map<ThreadId, AnnotatedThread>;

/// A ghost step (GhostIntro, GhostCancel) or a real step (Loop, Fork, Seq,
/// Exit, Done). Real fork steps carry the share handed to the child.
struct AnnotatedStep {
    Rule rule;
    ThreadId tid;
    std::optional<ForkSplit> split;

    bool ghost() const { return is_ghost(rule); }

    friend bool operator==(const AnnotatedStep&, const AnnotatedStep&) = default;
};

/// `pools[i]` is the pool before `steps[i]`; `pools.back()` is the final pool.
struct AnnotatedTrace {
    std::vector<AnnotatedStep> steps;
    std::vector<AnnotatedThreadPool> pools;

    const AnnotatedThreadPool& initial() const { return pools.front(); }
};

/// Builds a trace by replaying steps from `initial`. Throws StuckStep.
AnnotatedTrace make_trace(AnnotatedThreadPool initial, const std::vector<AnnotatedStep>& steps);

/// A step whose side conditions fail. The annotated semantics gets stuck
/// where the plain one would not.
class StuckStep : public std::runtime_error {
public:
    StuckStep(const std::string& what, ThreadId tid, Rule rule)
        : std::runtime_error(what), tid_(tid), rule_(rule) {}

    ThreadId tid() const { return tid_; }
    Rule rule() const { return rule_; }

private:
    ThreadId tid_;
    Rule rule_;
};

/// Intro raises the thread's chunk and its credits by one; cancel lowers
/// both. Throws StuckStep.
AnnotatedThreadPool ghost_step(const AnnotatedThreadPool& pool, ThreadId tid, Rule rule);

/// Real step with side conditions: loop needs chunk 0 and a credit, done
/// needs chunk 0, fork moves `split` to the child, exit discharges
/// everything. `step.rule` must be the rule the continuation admits.
/// Throws StuckStep.
AnnotatedThreadPool annotated_pool_step(const AnnotatedThreadPool& pool, const AnnotatedStep& step);

/// Either kind of step.
AnnotatedThreadPool apply_step(const AnnotatedThreadPool& pool, const AnnotatedStep& step);

struct StuckReport {
    std::size_t step;  // index the failing step would have had
    ThreadId tid;
    std::string reason;
};

struct AnnotatedRun {
    AnnotatedTrace trace;
    Outcome::Kind outcome;  // Terminated or FuelExhausted
    std::size_t real_steps = 0;
    std::optional<StuckReport> stuck;
};

/// Executes the command proved by `proof` from {0 -> ((obs(n)), 0), c; done}
/// where n is the obligations of the proof's precondition. Each thread walks
/// its part of the proof alongside its continuation: view shifts become ghost
/// steps right before the next real step of that thread, fork nodes supply
/// the split. At most `fuel` real steps are taken.
///
/// Throws std::invalid_argument if the precondition is not a single obs(n).
AnnotatedRun annotated_run(const ProofTree& proof, const Scheduler& scheduler, std::size_t fuel);

struct TraceError {
    std::size_t step;
    std::string reason;
};

/// Replays every step and compares each recorded pool; also checks that all
/// bundles are complete throughout.
std::optional<TraceError> check_annotated_trace(const AnnotatedTrace& trace);

/// Drops bundles and ghost steps.
Trace erase(const AnnotatedTrace& trace);
ThreadPool erase(const AnnotatedThreadPool& pool);

}  // namespace busywait
