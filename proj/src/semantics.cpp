#include "busywait/semantics.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <set>
#include <utility>

namespace busywait {

namespace {

struct RuleNames {
    Rule rule;
    std::string_view plain;
    std::string_view annotated;
};

constexpr std::array<RuleNames, 7> kRuleNames{{
    {Rule::Loop, "st-loop", "ga-st-loop"},
    {Rule::Fork, "st-fork", "ga-st-fork"},
    {Rule::Seq, "st-seq", "ga-st-seq"},
    {Rule::Exit, "tp-exit", "ga-tp-exit"},
    {Rule::Done, "tp-done", "ga-tp-done"},
    {Rule::GhostIntro, "gs-intro", "gs-intro"},
    {Rule::GhostCancel, "gs-cancel", "gs-cancel"},
}};

}  // namespace

std::string_view rule_name(Rule rule) {
    for (const auto& r : kRuleNames)
        if (r.rule == rule) return r.plain;
    return "?";
}

std::string_view annotated_rule_name(Rule rule) {
    for (const auto& r : kRuleNames)
        if (r.rule == rule) return r.annotated;
    return "?";
}

std::optional<Rule> parse_rule_name(std::string_view name) {
    for (const auto& r : kRuleNames)
        if (r.plain == name && !is_ghost(r.rule)) return r.rule;
    return std::nullopt;
}

std::optional<Rule> parse_annotated_rule_name(std::string_view name) {
    for (const auto& r : kRuleNames)
        if (r.annotated == name) return r.rule;
    return std::nullopt;
}

bool is_ghost(Rule rule) { return rule == Rule::GhostIntro || rule == Rule::GhostCancel; }

std::optional<ThreadStep> thread_step(const Continuation& k) {
    if (k.is_done()) return std::nullopt;
    const Command& head = k.head();
    switch (head.kind()) {
        case Command::Kind::Exit: return std::nullopt;
        case Command::Kind::Loop: return ThreadStep{k, std::nullopt, Rule::Loop};
        case Command::Kind::Fork:
            return ThreadStep{k.tail(), to_continuation(head.body()), Rule::Fork};
        case Command::Kind::Seq:
            return ThreadStep{Continuation::cons(head.first(), Continuation::cons(head.second(), k.tail())),
                              std::nullopt, Rule::Seq};
    }
    return std::nullopt;
}

ThreadPool extend_pool(ThreadPool pool, const ForkedSet& forked) {
    if (!forked) return pool;
    const ThreadId id = fresh_thread_id(pool);
    pool.emplace(id, *forked);
    return pool;
}

PoolStep step_pool(const ThreadPool& pool, ThreadId id) {
    const auto it = pool.find(id);
    if (it == pool.end()) throw SemanticsError("unknown thread " + std::to_string(id.value));
    const Continuation& k = it->second;
    if (k.is_done()) {
        ThreadPool next = pool;
        next.erase(id);
        return {std::move(next), Rule::Done};
    }
    if (k.head().is_exit()) return {ThreadPool{}, Rule::Exit};
    auto step = thread_step(k);
    ThreadPool next = pool;
    next[id] = step->next;
    return {extend_pool(std::move(next), step->forked), step->rule};
}

ThreadPool pool_step(const ThreadPool& pool, ThreadId id) { return step_pool(pool, id).pool; }

SchedulerState::SchedulerState(const Scheduler& scheduler) : scheduler_(scheduler) {
    if (const auto* random = std::get_if<Scheduler::SeededRandom>(&scheduler_.policy()))
        rng_.seed(random->seed);
}

std::optional<ThreadId> SchedulerState::pick(const std::vector<ThreadId>& domain) {
    ThreadId chosen;
    if (std::holds_alternative<Scheduler::RoundRobin>(scheduler_.policy())) {
        auto it = domain.begin();
        if (last_) it = std::upper_bound(domain.begin(), domain.end(), *last_);
        chosen = it == domain.end() ? domain.front() : *it;
    } else if (std::holds_alternative<Scheduler::SeededRandom>(scheduler_.policy())) {
        // Modulo instead of uniform_int_distribution: the latter is
        // implementation-defined and would make seeds non-portable.
        chosen = domain[rng_() % domain.size()];
    } else {
        const auto& script = std::get<Scheduler::Scripted>(scheduler_.policy()).script;
        if (script_pos_ >= script.size()) return std::nullopt;
        chosen = script[script_pos_++];
        if (!std::binary_search(domain.begin(), domain.end(), chosen))
            throw SemanticsError("script schedules thread " + std::to_string(chosen.value) +
                                 " which is not in the pool");
    }
    last_ = chosen;
    return chosen;
}

std::string_view outcome_name(Outcome::Kind kind) {
    switch (kind) {
        case Outcome::Kind::Terminated: return "Terminated";
        case Outcome::Kind::FuelExhausted: return "FuelExhausted";
        case Outcome::Kind::FairDivergence: return "FairDivergence";
    }
    return "?";
}

ThreadPool initial_pool(const Command& c) { return ThreadPool{{ThreadId{0}, to_continuation(c)}}; }

RunResult run(const ThreadPool& initial, const Scheduler& scheduler, std::size_t fuel) {
    RunResult result{{Outcome::Kind::FuelExhausted, 0, std::nullopt}, {}, initial};
    SchedulerState state(scheduler);
    const bool detect_cycles = scheduler.is_round_robin();
    std::map<std::pair<ThreadPool, std::optional<ThreadId>>, std::size_t> seen;

    ThreadPool& pool = result.final_pool;
    for (std::size_t step = 0;; ++step) {
        if (pool.empty()) {
            result.outcome = {Outcome::Kind::Terminated, step, std::nullopt};
            return result;
        }
        if (detect_cycles) {
            auto [it, fresh] = seen.emplace(std::make_pair(pool, state.last()), step);
            if (!fresh) {
                result.outcome = {Outcome::Kind::FairDivergence, step,
                                  Outcome::Cycle{it->second, step - it->second}};
                return result;
            }
        }
        if (step == fuel) {
            result.outcome = {Outcome::Kind::FuelExhausted, step, std::nullopt};
            return result;
        }
        const auto tid = state.pick(domain_of(pool));
        if (!tid) {
            result.outcome = {Outcome::Kind::FuelExhausted, step, std::nullopt};
            return result;
        }
        PoolStep next = step_pool(pool, *tid);
        result.trace.push_back({std::move(pool), *tid, next.rule});
        pool = std::move(next.pool);
    }
}

std::string_view verdict_name(Verdict v) {
    return v == Verdict::Terminates ? "Terminates" : "FairlyDiverges";
}

namespace {

struct StateGraph {
    std::vector<ThreadPool> pools;
    std::vector<std::vector<std::pair<ThreadId, std::size_t>>> edges;
};

StateGraph reachable_pools(const ThreadPool& start, std::size_t max_states) {
    StateGraph g;
    std::map<ThreadPool, std::size_t> index;
    auto intern = [&](const ThreadPool& p) {
        auto [it, fresh] = index.emplace(p, g.pools.size());
        if (fresh) {
            if (g.pools.size() >= max_states)
                throw ExplorationLimitExceeded("more than " + std::to_string(max_states) +
                                               " reachable thread pools");
            g.pools.push_back(p);
            g.edges.emplace_back();
        }
        return it->second;
    };
    intern(start);
    for (std::size_t i = 0; i < g.pools.size(); ++i) {
        const std::vector<ThreadId> ids = domain_of(g.pools[i]);
        for (ThreadId tid : ids) {
            const std::size_t j = intern(pool_step(g.pools[i], tid));
            g.edges[i].emplace_back(tid, j);
        }
    }
    return g;
}

// Tarjan's algorithm, iterative. Returns the component id of every state.
std::vector<std::size_t> components(const StateGraph& g, std::size_t& count) {
    const std::size_t n = g.pools.size();
    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> work;  // (state, next edge)
    std::size_t counter = 0;
    count = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (order[root] != kUnvisited) continue;
        work.emplace_back(root, 0);
        while (!work.empty()) {
            auto& [v, e] = work.back();
            if (e == 0 && order[v] == kUnvisited) {
                order[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (e < g.edges[v].size()) {
                const std::size_t w = g.edges[v][e++].second;
                if (order[w] == kUnvisited) {
                    work.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], order[w]);
                }
                continue;
            }
            if (low[v] == order[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            const std::size_t done = v;
            work.pop_back();
            if (!work.empty()) {
                const std::size_t parent = work.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return comp;
}

}  // namespace

Exploration explore_fair_termination(const Command& c, ExplorationLimits limits) {
    const StateGraph g = reachable_pools(initial_pool(c), limits.max_states);
    std::size_t count = 0;
    const std::vector<std::size_t> comp = components(g, count);

    std::vector<std::set<ThreadId>> scheduled(count), present(count);
    std::vector<bool> has_internal_edge(count, false);
    for (std::size_t v = 0; v < g.pools.size(); ++v) {
        for (const auto& entry : g.pools[v]) present[comp[v]].insert(entry.first);
        for (const auto& [tid, w] : g.edges[v]) {
            if (comp[w] != comp[v]) continue;
            has_internal_edge[comp[v]] = true;
            scheduled[comp[v]].insert(tid);
        }
    }

    Exploration result{Verdict::Terminates, g.pools.size(), std::nullopt, {}};
    for (std::size_t v = 0; v < g.pools.size(); ++v) {
        const std::size_t k = comp[v];
        if (!has_internal_edge[k] || scheduled[k] != present[k]) continue;
        result.verdict = Verdict::FairlyDiverges;
        result.witness = g.pools[v];
        result.witness_threads.assign(scheduled[k].begin(), scheduled[k].end());
        break;
    }
    return result;
}

ThreadSummary unfold_threads(const Command& c) {
    ThreadSummary summary;
    std::deque<Command> threads{c};
    while (!threads.empty()) {
        std::vector<Command> code{threads.front()};  // reversed: back is next
        threads.pop_front();
        ++summary.threads;
        while (!code.empty()) {
            const Command next = code.back();
            code.pop_back();
            if (next.is_exit()) {
                ++summary.exiters;
                break;
            }
            if (next.is_loop()) {
                ++summary.loopers;
                break;
            }
            if (next.is_fork()) {
                threads.push_back(next.body());
            } else {
                code.push_back(next.second());
                code.push_back(next.first());
            }
        }
    }
    return summary;
}

Verdict static_termination_oracle(const Command& c) {
    const ThreadSummary s = unfold_threads(c);
    return s.loopers > 0 && s.exiters == 0 ? Verdict::FairlyDiverges : Verdict::Terminates;
}

}  // namespace busywait
