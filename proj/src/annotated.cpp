#include "busywait/annotated.hpp"

#include <variant>

namespace busywait {

namespace {

AnnotatedThread& thread_of(AnnotatedThreadPool& pool, ThreadId tid, Rule rule) {
    const auto it = pool.find(tid);
    if (it == pool.end())
        throw StuckStep("unknown thread " + std::to_string(tid.value), tid, rule);
    if (!is_complete(it->second.bundle))
        throw StuckStep("thread " + std::to_string(tid.value) + " holds an incomplete bundle " +
                            to_string(it->second.bundle),
                        tid, rule);
    return it->second;
}

std::string who(ThreadId tid, Rule rule) {
    return std::string(annotated_rule_name(rule)) + " by thread " + std::to_string(tid.value);
}

// The real rule a thread's continuation admits next.
Rule admitted_rule(const Continuation& k) {
    if (k.is_done()) return Rule::Done;
    if (k.head().is_exit()) return Rule::Exit;
    return thread_step(k)->rule;
}

}  // namespace

AnnotatedThreadPool ghost_step(const AnnotatedThreadPool& pool, ThreadId tid, Rule rule) {
    if (!is_ghost(rule)) throw StuckStep(who(tid, rule) + " is not a ghost step", tid, rule);
    AnnotatedThreadPool next = pool;
    ResourceBundle& r = thread_of(next, tid, rule).bundle;
    Natural& chunk = r.chunks.front();
    if (rule == Rule::GhostIntro) {
        ++chunk;
        ++r.credits;
    } else {
        if (chunk == 0 || r.credits == 0)
            throw StuckStep(who(tid, rule) + ": nothing to cancel in " + to_string(r), tid, rule);
        --chunk;
        --r.credits;
    }
    return next;
}

AnnotatedThreadPool annotated_pool_step(const AnnotatedThreadPool& pool, const AnnotatedStep& step) {
    const ThreadId tid = step.tid;
    if (step.ghost()) throw StuckStep(who(tid, step.rule) + " is not a real step", tid, step.rule);
    AnnotatedThreadPool next = pool;
    AnnotatedThread& t = thread_of(next, tid, step.rule);
    const Rule admitted = admitted_rule(t.continuation);
    if (admitted != step.rule)
        throw StuckStep(who(tid, step.rule) + ": continuation " + pretty(t.continuation) + " admits " +
                            std::string(annotated_rule_name(admitted)),
                        tid, step.rule);
    if (step.split && step.rule != Rule::Fork)
        throw StuckStep(who(tid, step.rule) + " carries a fork split", tid, step.rule);

    ResourceBundle& r = t.bundle;
    const Natural chunk = r.chunks.front();
    switch (step.rule) {
        case Rule::Exit: return {};
        case Rule::Done:
            if (chunk != 0)
                throw StuckStep(who(tid, step.rule) + ": terminating thread still holds " + std::to_string(chunk) +
                                    " obligation(s)",
                                tid, step.rule);
            next.erase(tid);
            return next;
        case Rule::Loop:
            if (chunk != 0)
                throw StuckStep(who(tid, step.rule) + ": looping thread holds " + std::to_string(chunk) +
                                    " obligation(s)",
                                tid, step.rule);
            if (r.credits == 0) throw StuckStep(who(tid, step.rule) + ": looping thread holds no credit", tid, step.rule);
            return next;
        case Rule::Seq:
            t.continuation = thread_step(t.continuation)->next;
            return next;
        case Rule::Fork: {
            if (!step.split) throw StuckStep(who(tid, step.rule) + " has no split", tid, step.rule);
            const ForkSplit split = *step.split;
            if (split.child_obligations > chunk || split.child_credits > r.credits)
                throw StuckStep(who(tid, step.rule) + ": cannot hand (" + std::to_string(split.child_obligations) +
                                    ", " + std::to_string(split.child_credits) + ") out of " + to_string(r),
                                tid, step.rule);
            auto stepped = thread_step(t.continuation);
            t.continuation = stepped->next;
            r.chunks.front() -= split.child_obligations;
            r.credits -= split.child_credits;
            const ThreadId child = fresh_thread_id(next);
            next.emplace(child, AnnotatedThread{ResourceBundle{{split.child_obligations}, split.child_credits},
                                                *stepped->forked});
            return next;
        }
        default: break;
    }
    throw StuckStep(who(tid, step.rule) + ": unknown rule", tid, step.rule);
}

AnnotatedThreadPool apply_step(const AnnotatedThreadPool& pool, const AnnotatedStep& step) {
    return step.ghost() ? ghost_step(pool, step.tid, step.rule) : annotated_pool_step(pool, step);
}

AnnotatedTrace make_trace(AnnotatedThreadPool initial, const std::vector<AnnotatedStep>& steps) {
    AnnotatedTrace trace{steps, {std::move(initial)}};
    for (const AnnotatedStep& s : steps) trace.pools.push_back(apply_step(trace.pools.back(), s));
    return trace;
}

namespace {

// Pending work of one thread, next item at the back.
struct PostShift {
    const ViewShiftChain* chain;
};
using AgendaItem = std::variant<const ProofTree*, PostShift>;
using Agenda = std::vector<AgendaItem>;

class ProofDirectedRunner {
public:
    ProofDirectedRunner(const ProofTree& proof, AnnotatedThreadPool initial) {
        trace_.pools.push_back(std::move(initial));
        agendas_[ThreadId{0}] = {&proof};
    }

    const AnnotatedThreadPool& pool() const { return trace_.pools.back(); }

    // Ghost steps for `tid`, then its next real step.
    void step(ThreadId tid) {
        Agenda& agenda = agendas_.at(tid);
        prepare(tid, agenda);
        const Continuation& k = pool().at(tid).continuation;
        if (k.is_done()) {
            if (!agenda.empty()) stuck(tid, "continuation is done but the proof is not");
            record({Rule::Done, tid, std::nullopt});
            agendas_.erase(tid);
            return;
        }
        if (agenda.empty()) stuck(tid, "proof ends before " + pretty(k));
        const ProofTree* node = std::get<const ProofTree*>(agenda.back());
        if (node->conclusion.command != k.head())
            stuck(tid, "proof node for " + pretty(node->conclusion.command) + " meets " + pretty(k.head()));
        switch (node->rule) {
            case ProofRule::Exit:
                record({Rule::Exit, tid, std::nullopt});
                agendas_.clear();
                return;
            case ProofRule::Loop: record({Rule::Loop, tid, std::nullopt}); return;
            case ProofRule::Seq:
                agenda.pop_back();
                agenda.push_back(&node->premises[1]);
                agenda.push_back(&node->premises[0]);
                record({Rule::Seq, tid, std::nullopt});
                return;
            case ProofRule::Fork: {
                const ForkSplit split = node->split.value_or(ForkSplit{});
                agenda.pop_back();
                const ThreadId child = fresh_thread_id(pool());
                record({Rule::Fork, tid, split});
                agendas_[child] = {&node->premises[0]};
                return;
            }
            default: stuck(tid, "unexpected proof node");
        }
    }

    AnnotatedTrace& trace() { return trace_; }

private:
    [[noreturn]] void stuck(ThreadId tid, const std::string& why) {
        throw StuckStep("thread " + std::to_string(tid.value) + ": " + why, tid, Rule::Done);
    }

    void record(const AnnotatedStep& s) {
        AnnotatedThreadPool next = apply_step(pool(), s);
        trace_.steps.push_back(s);
        trace_.pools.push_back(std::move(next));
    }

    void ghost(ThreadId tid, const ViewShiftChain& chain) {
        for (const ShiftStep& s : chain.steps) {
            if (s.kind == ShiftStep::Kind::ObCredIntro) record({Rule::GhostIntro, tid, std::nullopt});
            if (s.kind == ShiftStep::Kind::ObCredCancel) record({Rule::GhostCancel, tid, std::nullopt});
        }
    }

    // Unwraps structural nodes until a command rule or the end of the proof.
    void prepare(ThreadId tid, Agenda& agenda) {
        while (!agenda.empty()) {
            if (const auto* post = std::get_if<PostShift>(&agenda.back())) {
                const ViewShiftChain* chain = post->chain;
                agenda.pop_back();
                ghost(tid, *chain);
                continue;
            }
            const ProofTree* node = std::get<const ProofTree*>(agenda.back());
            if (node->rule == ProofRule::Frame) {
                agenda.back() = &node->premises.at(0);
            } else if (node->rule == ProofRule::ViewShift) {
                agenda.pop_back();
                if (node->post_shift) agenda.push_back(PostShift{&*node->post_shift});
                agenda.push_back(&node->premises.at(0));
                if (node->pre_shift) ghost(tid, *node->pre_shift);
            } else {
                return;
            }
        }
    }

    AnnotatedTrace trace_;
    std::map<ThreadId, Agenda> agendas_;
};

}  // namespace

AnnotatedRun annotated_run(const ProofTree& proof, const Scheduler& scheduler, std::size_t fuel) {
    const CanonicalAssertion pre = canonicalize(proof.conclusion.pre);
    if (pre.is_false || pre.obligations.size() != 1)
        throw std::invalid_argument("precondition " + pretty(proof.conclusion.pre) + " is not obs(n) * credit^k");
    AnnotatedThreadPool initial{
        {ThreadId{0}, {ResourceBundle{pre.obligations, pre.credits}, to_continuation(proof.conclusion.command)}}};

    ProofDirectedRunner runner(proof, std::move(initial));
    SchedulerState state(scheduler);
    AnnotatedRun result{{}, Outcome::Kind::FuelExhausted, 0, std::nullopt};
    while (!runner.pool().empty() && result.real_steps < fuel) {
        const auto tid = state.pick(domain_of(runner.pool()));
        if (!tid) break;
        try {
            runner.step(*tid);
        } catch (const StuckStep& e) {
            result.stuck = StuckReport{runner.trace().steps.size(), *tid, e.what()};
            break;
        }
        ++result.real_steps;
    }
    if (!result.stuck && runner.pool().empty()) result.outcome = Outcome::Kind::Terminated;
    result.trace = std::move(runner.trace());
    return result;
}

std::optional<TraceError> check_annotated_trace(const AnnotatedTrace& trace) {
    if (trace.pools.size() != trace.steps.size() + 1)
        return TraceError{0, "trace records " + std::to_string(trace.pools.size()) + " pools for " +
                                 std::to_string(trace.steps.size()) + " steps"};
    auto incomplete = [](const AnnotatedThreadPool& pool) -> std::optional<std::string> {
        for (const auto& [tid, t] : pool)
            if (!is_complete(t.bundle))
                return "thread " + std::to_string(tid.value) + " holds incomplete bundle " + to_string(t.bundle);
        return std::nullopt;
    };
    if (auto why = incomplete(trace.pools[0])) return TraceError{0, *why};
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        AnnotatedThreadPool next;
        try {
            next = apply_step(trace.pools[i], trace.steps[i]);
        } catch (const StuckStep& e) {
            return TraceError{i, e.what()};
        }
        if (next != trace.pools[i + 1])
            return TraceError{i, "recorded pool after " + std::string(annotated_rule_name(trace.steps[i].rule)) +
                                     " by thread " + std::to_string(trace.steps[i].tid.value) +
                                     " differs from the replayed one"};
        if (auto why = incomplete(next)) return TraceError{i, *why};
    }
    return std::nullopt;
}

ThreadPool erase(const AnnotatedThreadPool& pool) {
    ThreadPool plain;
    for (const auto& [tid, t] : pool) plain.emplace(tid, t.continuation);
    return plain;
}

Trace erase(const AnnotatedTrace& trace) {
    Trace plain;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        if (trace.steps[i].ghost()) continue;
        plain.push_back({erase(trace.pools[i]), trace.steps[i].tid, trace.steps[i].rule});
    }
    return plain;
}

}  // namespace busywait
