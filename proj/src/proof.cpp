#include "busywait/proof.hpp"

#include <array>
#include <utility>

namespace busywait {

std::string to_string(const Triple& t) {
    return "{" + pretty(t.pre) + "} " + pretty(t.command) + " {" + pretty(t.post) + "}";
}

namespace {

constexpr std::array<std::pair<ProofRule, std::string_view>, 6> kProofRuleNames{{
    {ProofRule::Frame, "frame"},
    {ProofRule::Exit, "exit"},
    {ProofRule::Loop, "loop"},
    {ProofRule::Fork, "fork"},
    {ProofRule::Seq, "seq"},
    {ProofRule::ViewShift, "view-shift"},
}};

}  // namespace

std::string_view proof_rule_name(ProofRule rule) {
    for (const auto& [r, name] : kProofRuleNames)
        if (r == rule) return name;
    return "?";
}

std::optional<ProofRule> parse_proof_rule(std::string_view name) {
    for (const auto& [r, n] : kProofRuleNames)
        if (n == name) return r;
    return std::nullopt;
}

std::string ProofError::to_string() const {
    return path + " (" + std::string(proof_rule_name(rule)) + "): " + message + "; node concludes " +
           busywait::to_string(actual);
}

const Triple& conclusion_of(const ProofTree& tree) { return tree.conclusion; }

namespace {

const CanonicalAssertion kFalse{true, {}, 0};

struct ObsCredits {
    Natural obligations;
    Natural credits;
};

// Matches obs(n) * credit^k exactly.
std::optional<ObsCredits> as_obs_credits(const Assertion& a) {
    const CanonicalAssertion c = canonicalize(a);
    if (c.is_false || c.obligations.size() != 1) return std::nullopt;
    return ObsCredits{c.obligations.front(), c.credits};
}

bool same(const Assertion& a, const Assertion& b) { return equivalent(a, b); }

using NodeResult = std::optional<std::string>;

NodeResult premise_count(const ProofTree& t, std::size_t expected) {
    if (t.premises.size() == expected) return std::nullopt;
    return std::string(proof_rule_name(t.rule)) + " takes " + std::to_string(expected) + " premise(s), found " +
           std::to_string(t.premises.size());
}

NodeResult check_exit(const ProofTree& t) {
    const Triple& c = t.conclusion;
    if (auto e = premise_count(t, 0)) return e;
    if (!c.command.is_exit()) return "exit rule applied to " + pretty(c.command);
    const auto pre = as_obs_credits(c.pre);
    if (!pre || pre->credits != 0) return std::string("exit precondition must be a single obs(n); expected {obs(n)} exit {false}");
    if (canonicalize(c.post) != kFalse) return std::string("exit postcondition must be false; expected {obs(n)} exit {false}");
    return std::nullopt;
}

NodeResult check_loop(const ProofTree& t) {
    const Triple& c = t.conclusion;
    if (auto e = premise_count(t, 0)) return e;
    if (!c.command.is_loop()) return "loop rule applied to " + pretty(c.command);
    const auto pre = as_obs_credits(c.pre);
    const std::string schema = "; expected {obs(0) * credit} loop skip {false}";
    if (!pre) return "loop precondition must be obs(0) * credit" + schema;
    if (pre->obligations != 0) return "looping thread must not hold obligations" + schema;
    if (pre->credits == 0) return "missing credit" + schema;
    if (pre->credits != 1) return "loop precondition must hold exactly one credit" + schema;
    if (canonicalize(c.post) != kFalse) return "loop postcondition must be false" + schema;
    return std::nullopt;
}

NodeResult check_fork(const ProofTree& t) {
    const Triple& c = t.conclusion;
    if (auto e = premise_count(t, 1)) return e;
    if (!c.command.is_fork()) return "fork rule applied to " + pretty(c.command);
    if (!t.split) return std::string("fork node has no split");
    const Triple& child = t.premises[0].conclusion;
    const Natural m = t.split->child_obligations;
    const Natural j = t.split->child_credits;
    if (child.command != c.command.body()) return "premise proves " + pretty(child.command) + ", not the fork body";
    if (!same(child.pre, obs_with_credits(m, j)))
        return "forked thread's precondition must be " + pretty(obs_with_credits(m, j));
    if (!same(child.post, Assertion::obs(0))) return std::string("forked thread must end at obs(0)");
    const auto post = as_obs_credits(c.post);
    if (!post) return std::string("fork postcondition must be obs(n) * credit^i");
    if (post->obligations > UINT64_MAX - m || post->credits > UINT64_MAX - j) return std::string("counter overflow");
    const Assertion expected_pre = obs_with_credits(post->obligations + m, post->credits + j);
    if (!same(c.pre, expected_pre)) return "fork precondition must be " + pretty(expected_pre);
    return std::nullopt;
}

NodeResult check_seq(const ProofTree& t) {
    const Triple& c = t.conclusion;
    if (auto e = premise_count(t, 2)) return e;
    if (!c.command.is_seq()) return "seq rule applied to " + pretty(c.command);
    const Triple& first = t.premises[0].conclusion;
    const Triple& second = t.premises[1].conclusion;
    if (first.command != c.command.first()) return "first premise proves " + pretty(first.command);
    if (second.command != c.command.second()) return "second premise proves " + pretty(second.command);
    if (!same(c.pre, first.pre)) return std::string("precondition differs from the first premise's");
    if (!same(first.post, second.pre)) return std::string("intermediate assertions of the premises differ");
    if (!same(c.post, second.post)) return std::string("postcondition differs from the second premise's");
    return std::nullopt;
}

NodeResult check_frame(const ProofTree& t) {
    const Triple& c = t.conclusion;
    if (auto e = premise_count(t, 1)) return e;
    if (!t.frame) return std::string("frame node has no frame assertion");
    const Triple& inner = t.premises[0].conclusion;
    if (inner.command != c.command) return "premise proves " + pretty(inner.command);
    if (!same(c.pre, Assertion::star(inner.pre, *t.frame))) return "precondition must be P * " + pretty(*t.frame);
    if (!same(c.post, Assertion::star(inner.post, *t.frame))) return "postcondition must be Q * " + pretty(*t.frame);
    return std::nullopt;
}

NodeResult check_chain(const std::optional<ViewShiftChain>& chain, const Assertion& from, const Assertion& to,
                       std::string_view which) {
    const std::string name(which);
    if (!chain) return "view-shift node has no " + name + " chain";
    if (!same(chain->source, from)) return name + " chain starts at " + pretty(chain->source) + ", expected " + pretty(from);
    if (!same(chain->target, to)) return name + " chain ends at " + pretty(chain->target) + ", expected " + pretty(to);
    if (auto err = check_view_shift(*chain))
        return name + " chain step " + std::to_string(err->step) + ": " + err->reason;
    return std::nullopt;
}

NodeResult check_view_shift_rule(const ProofTree& t) {
    const Triple& c = t.conclusion;
    if (auto e = premise_count(t, 1)) return e;
    const Triple& inner = t.premises[0].conclusion;
    if (inner.command != c.command) return "premise proves " + pretty(inner.command);
    if (auto e = check_chain(t.pre_shift, c.pre, inner.pre, "pre")) return e;
    if (auto e = check_chain(t.post_shift, inner.post, c.post, "post")) return e;
    return std::nullopt;
}

NodeResult check_node(const ProofTree& t) {
    switch (t.rule) {
        case ProofRule::Exit: return check_exit(t);
        case ProofRule::Loop: return check_loop(t);
        case ProofRule::Fork: return check_fork(t);
        case ProofRule::Seq: return check_seq(t);
        case ProofRule::Frame: return check_frame(t);
        case ProofRule::ViewShift: return check_view_shift_rule(t);
    }
    return std::string("unknown rule");
}

std::optional<ProofError> check_at(const ProofTree& t, const std::string& path) {
    for (std::size_t i = 0; i < t.premises.size(); ++i)
        if (auto err = check_at(t.premises[i], path + "/" + std::to_string(i))) return err;
    if (auto msg = check_node(t)) return ProofError{path, t.rule, *msg, t.conclusion};
    return std::nullopt;
}

// --- synthesis -------------------------------------------------------------

struct SynthesisFailure {};

// Resources available at a program point of one thread.
struct Res {
    bool dead = false;  // control never reaches this point
    Natural obligations = 0;
    Natural credits = 0;

    Assertion assertion() const { return dead ? Assertion::bottom() : obs_with_credits(obligations, credits); }
};

enum class End { FallsThrough, Exits, Loops };

// What the reachable part of a command does when run by one thread.
struct Live {
    End end = End::FallsThrough;
    Natural loopers = 0;  // looping threads, this one included
    bool exiter = false;  // some thread, this one included, exits
};

// `first` followed by `second` in one thread.
Live then(const Live& first, const Live& second) {
    if (first.end != End::FallsThrough) return first;
    return {second.end, first.loopers + second.loopers, first.exiter || second.exiter};
}

Live analyze(const Command& c) {
    switch (c.kind()) {
        case Command::Kind::Exit: return {End::Exits, 0, true};
        case Command::Kind::Loop: return {End::Loops, 1, false};
        case Command::Kind::Fork: {
            const Live child = analyze(c.body());
            return {End::FallsThrough, child.loopers, child.exiter};
        }
        case Command::Kind::Seq: return then(analyze(c.first()), analyze(c.second()));
    }
    return {};
}

struct Proved {
    ProofTree tree;
    Res post;
};

ViewShiftChain trivial_chain(const Assertion& a) { return {a, {}, a}; }

ProofTree view_shift_node(ProofTree inner, ViewShiftChain pre, ViewShiftChain post) {
    ProofTree t{ProofRule::ViewShift, {pre.source, inner.conclusion.command, post.target}, {}, {}, {}, {}, {}};
    t.premises.push_back(std::move(inner));
    t.pre_shift = std::move(pre);
    t.post_shift = std::move(post);
    return t;
}

// Weakens the precondition of `inner` from `from` by semantic implication.
ProofTree weaken_pre(ProofTree inner, const Assertion& from) {
    const Assertion to = inner.conclusion.pre;
    const Assertion post = inner.conclusion.post;
    return view_shift_node(std::move(inner), {from, {ShiftStep::implies(to)}, to}, trivial_chain(post));
}

// `after` summarizes what the thread runs once c completes.
Proved prove_any(const Command& c, const Res& in, const Live& after);
Proved prove_thread(const Command& c, const Res& in, const Live& after);

Proved prove_live(const Command& c, const Res& in, const Live& after) {
    const Assertion pre = in.assertion();
    switch (c.kind()) {
        case Command::Kind::Exit: {
            ProofTree t{ProofRule::Exit, {Assertion::obs(in.obligations), c, Assertion::bottom()}, {}, {}, {}, {}, {}};
            if (in.credits > 0) t = weaken_pre(std::move(t), pre);
            return {std::move(t), {true, 0, 0}};
        }
        case Command::Kind::Loop: {
            if (in.obligations != 0 || in.credits == 0) throw SynthesisFailure{};
            ProofTree t{ProofRule::Loop, {obs_with_credits(0, 1), c, Assertion::bottom()}, {}, {}, {}, {}, {}};
            if (in.credits > 1) t = weaken_pre(std::move(t), pre);
            return {std::move(t), {true, 0, 0}};
        }
        case Command::Kind::Fork: {
            const Live child = analyze(c.body());
            const Natural m = in.obligations > 0 && child.exiter ? in.obligations : 0;
            const Natural j = child.loopers;
            if (j > in.credits) throw SynthesisFailure{};
            Proved body = prove_thread(c.body(), {false, m, j}, Live{});
            const Res out{false, in.obligations - m, in.credits - j};
            ProofTree t{ProofRule::Fork, {pre, c, out.assertion()}, {}, {}, ForkSplit{m, j}, {}, {}};
            t.premises.push_back(std::move(body.tree));
            return {std::move(t), out};
        }
        case Command::Kind::Seq: {
            Proved first = prove_any(c.first(), in, then(analyze(c.second()), after));
            Proved second = prove_any(c.second(), first.post, after);
            ProofTree t{ProofRule::Seq, {pre, c, second.tree.conclusion.post}, {}, {}, {}, {}, {}};
            t.premises.push_back(std::move(first.tree));
            t.premises.push_back(std::move(second.tree));
            return {std::move(t), second.post};
        }
    }
    throw SynthesisFailure{};
}

// Dead code: prove it live from the credits it and the code after it would
// need, then weaken `false` to that precondition.
Proved prove_dead(const Command& c, const Live& after) {
    const Res needed{false, 0, then(analyze(c), after).loopers};
    Proved p = prove_live(c, needed, after);
    p.tree = weaken_pre(std::move(p.tree), Assertion::bottom());
    return p;
}

Proved prove_any(const Command& c, const Res& in, const Live& after) {
    return in.dead ? prove_dead(c, after) : prove_live(c, in, after);
}

// Ends the proof at obs(0), weakening the last command's postcondition.
Proved close_at_no_obligations(Proved p) {
    const Assertion target = Assertion::obs(0);
    if (same(p.tree.conclusion.post, target)) return p;
    if (!p.post.dead && p.post.obligations != 0) throw SynthesisFailure{};
    const Assertion from = p.tree.conclusion.post;
    if (p.tree.rule == ProofRule::ViewShift) {
        p.tree.post_shift->steps.push_back(ShiftStep::implies(target));
        p.tree.post_shift->target = target;
        p.tree.conclusion.post = target;
    } else {
        const Assertion pre = p.tree.conclusion.pre;
        p.tree = view_shift_node(std::move(p.tree), trivial_chain(pre), {from, {ShiftStep::implies(target)}, target});
    }
    p.post = {false, 0, 0};
    return p;
}

// Proves {in} c {obs(0)}. The closing weakening goes on the last command
// of the thread's sequence.
Proved prove_thread(const Command& c, const Res& in, const Live& after) {
    if (!c.is_seq()) return close_at_no_obligations(prove_any(c, in, after));
    Proved first = prove_any(c.first(), in, then(analyze(c.second()), after));
    Proved second = prove_thread(c.second(), first.post, after);
    ProofTree t{ProofRule::Seq, {in.assertion(), c, second.tree.conclusion.post}, {}, {}, {}, {}, {}};
    t.premises.push_back(std::move(first.tree));
    t.premises.push_back(std::move(second.tree));
    return {std::move(t), second.post};
}

}  // namespace

std::optional<ProofError> check_proof(const ProofTree& tree) { return check_at(tree, "root"); }

std::optional<ProofTree> synthesize(const Command& c) {
    const Live live = analyze(c);
    const Natural k = live.loopers;
    if (k > 0 && !live.exiter) return std::nullopt;
    try {
        Proved p = prove_thread(c, {false, k, k}, Live{});
        if (k == 0) return std::move(p.tree);
        std::vector<ShiftStep> intros(k, ShiftStep::intro(0));
        const Assertion start = Assertion::obs(0);
        const Assertion raised = p.tree.conclusion.pre;
        return view_shift_node(std::move(p.tree), {start, std::move(intros), raised}, trivial_chain(start));
    } catch (const SynthesisFailure&) {
        return std::nullopt;
    }
}

}  // namespace busywait
