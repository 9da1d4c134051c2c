#pragma once

#include "busywait/lang.hpp"
#include "busywait/resources.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace busywait {

struct Triple {
    Assertion pre;
    Command command;
    Assertion post;

    friend bool operator==(const Triple&, const Triple&) = default;
};

std::string to_string(const Triple& t);

enum class ProofRule { Frame, Exit, Loop, Fork, Seq, ViewShift };

std::string_view proof_rule_name(ProofRule rule);
std::optional<ProofRule> parse_proof_rule(std::string_view name);

/// Obligations and credits handed to the forked thread.
struct ForkSplit {
    Natural child_obligations = 0;
    Natural child_credits = 0;

    friend bool operator==(const ForkSplit&, const ForkSplit&) = default;
};

/// An explicit derivation. Which side fields are meaningful depends on the rule:
///   Frame      frame
///   Fork       split
///   ViewShift  pre_shift (conclusion pre ~> premise pre) and
///              post_shift (premise post ~> conclusion post)
struct ProofTree {
    ProofRule rule;
    Triple conclusion;
    std::vector<ProofTree> premises;

    std::optional<Assertion> frame;
    std::optional<ForkSplit> split;
    std::optional<ViewShiftChain> pre_shift;
    std::optional<ViewShiftChain> post_shift;

    friend bool operator==(const ProofTree&, const ProofTree&) = default;
};

struct ProofError {
    std::string path;  // "root", "root/1/0", ...
    ProofRule rule;
    std::string message;
    Triple actual;

    std::string to_string() const;
};

/// Checks every node, premises before their conclusion, against the rule
/// schemas (assertions compared by canonical form):
///
///   exit        {obs(n)} exit {false}
///   loop        {obs(0) * credit} loop skip {false}
///   fork        {obs(m) * credit^j} c {obs(0)}
///               ---------------------------------------------------
///               {obs(n+m) * credit^(i+j)} fork(c) {obs(n) * credit^i}
///   seq         {P} c1 {R}   {R} c2 {Q}  /  {P} c1; c2 {Q}
///   frame       {P} c {Q}  /  {P * F} c {Q * F}
///   view-shift  P ~> P'   {P'} c {Q'}   Q' ~> Q  /  {P} c {Q}
///
/// Returns the first failing node in post-order.
std::optional<ProofError> check_proof(const ProofTree& tree);

const Triple& conclusion_of(const ProofTree& tree);

/// Builds a proof of {obs(0)} c {obs(0)}, or nothing if some thread of c
/// busy-waits while no thread ever exits.
///
/// With k looping threads, k obligation-credit pairs are introduced at the
/// root. All k obligations travel along the fork chain to the first thread
/// (in program order) that exits; each looping thread receives one credit.
/// Code after an `exit` or `loop skip` is dead and is proved from `false`.
std::optional<ProofTree> synthesize(const Command& c);

}  // namespace busywait
