#include "busywait/annotated.hpp"
#include "busywait/corpus.hpp"
#include "busywait/io.hpp"
#include "busywait/pograph.hpp"
#include "busywait/proof.hpp"
#include "busywait/semantics.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <random>

using namespace busywait;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kInconclusive = 3 };

struct SchedulerOptions {
    std::string name = "round-robin";
    std::uint64_t seed = 0;
    std::size_t fuel = 100000;

    void add(CLI::App* cmd) {
        cmd->add_option("--scheduler", name, "round-robin or random")
            ->check(CLI::IsMember({"round-robin", "random"}))
            ->capture_default_str();
        cmd->add_option("--seed", seed, "seed of the random scheduler")->capture_default_str();
        cmd->add_option("--fuel", fuel, "maximum number of steps")->capture_default_str();
    }

    Scheduler scheduler() const {
        return name == "random" ? Scheduler::seeded_random(seed) : Scheduler::round_robin();
    }
};

void emit(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-")
        std::cout << contents << '\n';
    else
        write_file(path, contents + "\n");
}

Command load_program(const std::string& path) { return parse_program(read_file(path)); }

ProofTree load_proof(const std::string& path) {
    try {
        return proof_from_json(parse_json(read_file(path)));
    } catch (const Json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

int cmd_run(const std::string& file, const SchedulerOptions& opt, const std::string& trace_out) {
    const Command c = load_program(file);
    const RunResult r = run(initial_pool(c), opt.scheduler(), opt.fuel);
    std::cout << outcome_name(r.outcome.kind) << '\n';
    std::cerr << r.outcome.steps << " step(s)\n";
    if (!trace_out.empty()) emit(trace_out, to_json(r.trace).dump(2));
    switch (r.outcome.kind) {
        case Outcome::Kind::Terminated: return kOk;
        case Outcome::Kind::FairDivergence: return kFailed;
        case Outcome::Kind::FuelExhausted: return kInconclusive;
    }
    return kInconclusive;
}

int cmd_verify(const std::string& file, const std::string& proof_out, bool oracle, std::size_t max_states) {
    const Command c = load_program(file);
    const auto proof = synthesize(c);
    const auto error = proof ? check_proof(*proof) : std::nullopt;
    if (error) {
        std::cerr << "internal error: synthesized proof rejected: " << error->to_string() << '\n';
        return kFailed;
    }
    std::cout << (proof ? "verified" : "unprovable") << '\n';
    if (proof && !proof_out.empty()) emit(proof_out, to_json(*proof).dump(2));
    if (oracle) {
        Exploration e;
        try {
            e = explore_fair_termination(c, ExplorationLimits{max_states});
        } catch (const ExplorationLimitExceeded& ex) {
            std::cerr << "oracle inconclusive: " << ex.what() << '\n';
            return kInconclusive;
        }
        const bool terminates = e.verdict == Verdict::Terminates;
        std::cout << "oracle: " << verdict_name(e.verdict) << " (" << e.states << " states)\n";
        if (proof && !terminates) {
            std::cerr << "SOUNDNESS VIOLATION: a checked proof exists but the program fairly diverges\n";
            return kFailed;
        }
        if (!proof && terminates) {
            std::cerr << "disagreement: the program terminates but no proof was found\n";
            return kFailed;
        }
    }
    return proof ? kOk : kFailed;
}

int cmd_check(const std::string& file) {
    const ProofTree tree = load_proof(file);
    if (const auto error = check_proof(tree)) {
        std::cout << "rejected\n";
        std::cerr << error->to_string() << '\n';
        return kFailed;
    }
    std::cout << "ok: " << to_string(tree.conclusion) << '\n';
    return kOk;
}

int cmd_trace(const std::string& file, const std::string& proof_file, const SchedulerOptions& opt,
              const std::string& out) {
    const Command c = load_program(file);
    std::optional<ProofTree> loaded = proof_file.empty() ? synthesize(c) : std::optional(load_proof(proof_file));
    if (!loaded) {
        std::cerr << "no proof: the program may busy-wait forever\n";
        return kFailed;
    }
    const ProofTree& proof = *loaded;
    if (proof.conclusion.command != c) {
        std::cerr << "proof concludes about " << pretty(proof.conclusion.command) << ", not " << pretty(c) << '\n';
        return kUsage;
    }
    if (const auto error = check_proof(proof)) {
        std::cerr << "proof rejected: " << error->to_string() << '\n';
        return kUsage;
    }
    AnnotatedRun r;
    try {
        r = annotated_run(proof, opt.scheduler(), opt.fuel);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    }
    if (r.stuck) {
        std::cerr << "stuck at step " << r.stuck->step << " (thread " << r.stuck->tid.value
                  << "): " << r.stuck->reason << '\n';
        return kFailed;
    }
    if (const auto error = check_annotated_trace(r.trace)) {
        std::cerr << "internal error: produced trace invalid at step " << error->step << ": " << error->reason
                  << '\n';
        return kFailed;
    }
    emit(out, to_json(r.trace).dump(2));
    std::cerr << outcome_name(r.outcome) << " after " << r.real_steps << " real step(s), "
              << r.trace.steps.size() << " step(s) in total\n";
    return kOk;
}

int cmd_pograph(const std::string& file, const std::string& dot_out, const std::string& json_out, bool balance,
                bool loop_free, std::size_t samples, std::uint64_t seed) {
    AnnotatedTrace trace;
    ProgramOrderGraph g;
    try {
        trace = annotated_trace_from_json(parse_json(read_file(file)));
        g = build_graph(trace);
    } catch (const Json::exception& e) {
        throw FormatError(file + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        std::cerr << file << ": " << e.what() << '\n';
        return kUsage;
    }
    std::cerr << g.size() << " node(s), " << g.edges.size() << " edge(s)\n";
    if (!dot_out.empty()) emit(dot_out, to_dot(g));
    if (!json_out.empty()) emit(json_out, to_json(g).dump(2));

    int status = kOk;
    if (balance) {
        std::vector<GraphPrefix> prefixes;
        if (g.size() <= 12) {
            prefixes = sibling_closed_prefixes(g);
        } else {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> density(0.0, 1.0);
            for (std::size_t i = 0; i < samples; ++i) prefixes.push_back(random_sibling_closed_prefix(g, density(rng), rng));
        }
        std::size_t bad = 0;
        for (const GraphPrefix& p : prefixes) {
            if (const auto imbalance = check_leaf_balance(trace, g, p)) {
                if (bad++ == 0) std::cerr << "imbalance: " << imbalance->to_string() << '\n';
            }
        }
        std::cout << "balance: " << prefixes.size() - bad << "/" << prefixes.size() << " prefix(es) balanced\n";
        if (bad) status = kFailed;
    }
    if (loop_free) {
        const LoopFreeAnalysis a = analyze_loop_free_prefix(trace, g);
        std::cout << "loop-free prefix:";
        for (std::size_t i : a.prefix) std::cout << ' ' << i;
        std::cout << "\nleaf\ttid\trule\tobligations\tcredits\n";
        for (const LeafResources& l : a.leaves)
            std::cout << l.node << '\t' << l.tid.value << '\t' << annotated_rule_name(g.rules[l.node]) << '\t'
                      << l.obligations << '\t' << l.credits << '\n';
        std::cout << "loop-free prefix: " << (a.ok() ? "ok" : "violated") << '\n';
        if (!a.ok()) status = kFailed;
    }
    return status;
}

int cmd_corpus(std::size_t max_nodes, bool list, std::size_t fuel) {
    const auto programs = enumerate_commands(max_nodes);
    if (list) {
        for (const Command& c : programs) std::cout << pretty(c) << '\n';
        return kOk;
    }
    std::size_t proved = 0, terminating = 0, problems = 0;
    for (const Command& c : programs) {
        const Verdict expected = static_termination_oracle(c);
        const Verdict explored = explore_fair_termination(c).verdict;
        const auto proof = synthesize(c);
        const bool checked = proof && !check_proof(*proof);
        const RunResult rr = run(initial_pool(c), Scheduler::round_robin(), fuel);
        terminating += explored == Verdict::Terminates;
        proved += checked;
        std::string issue;
        if (expected != explored) issue = "oracles disagree";
        else if (proof && !checked) issue = "synthesized proof rejected";
        else if (checked != (explored == Verdict::Terminates)) issue = "proof existence disagrees with the oracle";
        else if ((rr.outcome.kind == Outcome::Kind::Terminated) != (explored == Verdict::Terminates))
            issue = "round-robin run disagrees with the oracle";
        if (!issue.empty()) {
            ++problems;
            std::cerr << pretty(c) << ": " << issue << '\n';
        }
    }
    std::cout << programs.size() << " program(s), " << terminating << " terminating, " << proved << " proved, "
              << problems << " problem(s)\n";
    return problems ? kFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Termination checker for busy-waiting programs"};
    app.require_subcommand(1);

    SchedulerOptions run_opt;
    std::string program, trace_out;
    auto* run_cmd = app.add_subcommand("run", "execute a program");
    run_cmd->add_option("program", program)->required();
    run_opt.add(run_cmd);
    run_cmd->add_option("--trace", trace_out, "write the trace as JSON");

    std::string proof_out;
    bool oracle = false;
    std::size_t max_states = ExplorationLimits{}.max_states;
    auto* verify_cmd = app.add_subcommand("verify", "synthesize and check a termination proof");
    verify_cmd->add_option("program", program)->required();
    verify_cmd->add_option("--emit-proof", proof_out, "write the proof as JSON");
    verify_cmd->add_flag("--oracle", oracle, "also explore all fair schedules");
    verify_cmd->add_option("--max-states", max_states, "state limit of the exploration")->capture_default_str();

    std::string proof_file;
    auto* check_cmd = app.add_subcommand("check", "check a proof file");
    check_cmd->add_option("proof", proof_file)->required();

    SchedulerOptions trace_opt;
    std::string out;
    auto* trace_cmd = app.add_subcommand("trace", "annotated execution directed by a proof");
    trace_cmd->add_option("program", program)->required();
    trace_cmd->add_option("--proof", proof_file, "proof JSON (synthesized when absent)");
    trace_opt.add(trace_cmd);
    trace_cmd->add_option("--out", out, "annotated trace JSON output");

    std::string trace_file, dot_out, json_out;
    bool balance = false, loop_free = false;
    std::size_t samples = 50;
    std::uint64_t seed = 0;
    auto* pograph_cmd = app.add_subcommand("pograph", "program order graph of an annotated trace");
    pograph_cmd->add_option("trace", trace_file)->required();
    pograph_cmd->add_option("--dot", dot_out, "write Graphviz DOT");
    pograph_cmd->add_option("--json", json_out, "write the graph as JSON");
    pograph_cmd->add_flag("--check-balance", balance, "check leaf balance on sibling-closed prefixes");
    pograph_cmd->add_flag("--lemma4", loop_free, "report the maximal loop-free sibling-closed prefix");
    pograph_cmd->add_option("--samples", samples, "random prefixes for traces over 12 steps")->capture_default_str();
    pograph_cmd->add_option("--seed", seed, "seed for prefix sampling")->capture_default_str();

    std::size_t max_nodes = 7, corpus_fuel = 100000;
    bool list = false;
    auto* corpus_cmd = app.add_subcommand("corpus", "sweep all programs up to a size bound");
    corpus_cmd->add_option("--max-nodes", max_nodes, "AST node bound")->capture_default_str();
    corpus_cmd->add_option("--fuel", corpus_fuel, "round-robin fuel")->capture_default_str();
    corpus_cmd->add_flag("--list", list, "only print the programs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd) return cmd_run(program, run_opt, trace_out);
        if (*verify_cmd) return cmd_verify(program, proof_out, oracle, max_states);
        if (*check_cmd) return cmd_check(proof_file);
        if (*trace_cmd) return cmd_trace(program, proof_file, trace_opt, out);
        if (*pograph_cmd) return cmd_pograph(trace_file, dot_out, json_out, balance, loop_free, samples, seed);
        if (*corpus_cmd) return cmd_corpus(max_nodes, list, corpus_fuel);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kUsage;
}
