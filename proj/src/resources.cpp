#include "busywait/resources.hpp"

#include "scanner.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace busywait {

Multiset multiset_union(const Multiset& a, const Multiset& b) {
    Multiset out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool multiset_includes(const Multiset& super, const Multiset& sub) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

ResourceBundle ResourceBundle::of(Multiset chunks, Natural credits) {
    std::sort(chunks.begin(), chunks.end());
    return {std::move(chunks), credits};
}

ResourceBundle bundle_union(const ResourceBundle& a, const ResourceBundle& b) {
    return {multiset_union(a.chunks, b.chunks), a.credits + b.credits};
}

bool is_complete(const ResourceBundle& r) { return r.chunks.size() == 1; }

std::string to_string(const ResourceBundle& r) {
    std::string out = "({";
    for (std::size_t i = 0; i < r.chunks.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(r.chunks[i]);
    }
    out += "}, " + std::to_string(r.credits) + ")";
    return out;
}

Assertion Assertion::top() { return Assertion(Kind::Top, 0, nullptr, nullptr); }
Assertion Assertion::bottom() { return Assertion(Kind::Bottom, 0, nullptr, nullptr); }
Assertion Assertion::obs(Natural n) { return Assertion(Kind::Obs, n, nullptr, nullptr); }
Assertion Assertion::credit() { return Assertion(Kind::Credit, 0, nullptr, nullptr); }

Assertion Assertion::star(Assertion left, Assertion right) {
    return Assertion(Kind::Star, 0, std::make_shared<const Assertion>(std::move(left)),
                     std::make_shared<const Assertion>(std::move(right)));
}

bool operator==(const Assertion& a, const Assertion& b) {
    if (&a == &b) return true;
    if (a.kind_ != b.kind_ || a.value_ != b.value_) return false;
    if (a.kind_ != Assertion::Kind::Star) return true;
    return (a.left_ == b.left_ || *a.left_ == *b.left_) && (a.right_ == b.right_ || *a.right_ == *b.right_);
}

Assertion obs_with_credits(Natural n, Natural credits) {
    Assertion tail = Assertion::credit();
    if (credits == 0) return Assertion::obs(n);
    for (Natural i = 1; i < credits; ++i) tail = Assertion::star(Assertion::credit(), tail);
    return Assertion::star(Assertion::obs(n), tail);
}

namespace {

using detail::Scanner;

Assertion parse_star(Scanner& in, int depth);

Assertion parse_atom(Scanner& in, int depth) {
    if (depth > 2000) in.fail("nesting too deep");
    if (in.at_word("true")) {
        in.advance();
        return Assertion::top();
    }
    if (in.at_word("false")) {
        in.advance();
        return Assertion::bottom();
    }
    if (in.at_word("credit")) {
        in.advance();
        return Assertion::credit();
    }
    if (in.at_word("obs")) {
        in.advance();
        in.expect_punct('(');
        const Natural n = in.expect_number();
        in.expect_punct(')');
        return Assertion::obs(n);
    }
    if (in.at_punct('(')) {
        in.advance();
        Assertion inner = parse_star(in, depth + 1);
        in.expect_punct(')');
        return inner;
    }
    in.fail("expected an assertion");
}

Assertion parse_star(Scanner& in, int depth) {
    Assertion left = parse_atom(in, depth);
    if (!in.at_punct('*')) return left;
    in.advance();
    return Assertion::star(std::move(left), parse_star(in, depth + 1));
}

void print(const Assertion& a, std::string& out) {
    switch (a.kind()) {
        case Assertion::Kind::Top: out += "true"; break;
        case Assertion::Kind::Bottom: out += "false"; break;
        case Assertion::Kind::Credit: out += "credit"; break;
        case Assertion::Kind::Obs: out += "obs(" + std::to_string(a.obligations()) + ")"; break;
        case Assertion::Kind::Star:
            if (a.left().kind() == Assertion::Kind::Star) {
                out += '(';
                print(a.left(), out);
                out += ')';
            } else {
                print(a.left(), out);
            }
            out += " * ";
            print(a.right(), out);
            break;
    }
}

Natural credit_atoms(const Assertion& a) {
    switch (a.kind()) {
        case Assertion::Kind::Credit: return 1;
        case Assertion::Kind::Star: return credit_atoms(a.left()) + credit_atoms(a.right());
        default: return 0;
    }
}

// Calls f(part, rest) for every distinct sub-multiset `part` of `m`.
template <class F>
bool any_split(const Multiset& m, F&& f) {
    std::vector<std::pair<Natural, std::size_t>> groups;
    for (Natural v : m) {
        if (!groups.empty() && groups.back().first == v)
            ++groups.back().second;
        else
            groups.emplace_back(v, 1);
    }
    std::vector<std::size_t> take(groups.size(), 0);
    while (true) {
        Multiset part, rest;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            part.insert(part.end(), take[g], groups[g].first);
            rest.insert(rest.end(), groups[g].second - take[g], groups[g].first);
        }
        if (f(part, rest)) return true;
        std::size_t g = 0;
        while (g < groups.size() && take[g] == groups[g].second) take[g++] = 0;
        if (g == groups.size()) return false;
        ++take[g];
    }
}

void flatten(const Assertion& a, CanonicalAssertion& out) {
    switch (a.kind()) {
        case Assertion::Kind::Top: break;
        case Assertion::Kind::Bottom: out.is_false = true; break;
        case Assertion::Kind::Obs: out.obligations.push_back(a.obligations()); break;
        case Assertion::Kind::Credit: ++out.credits; break;
        case Assertion::Kind::Star:
            flatten(a.left(), out);
            flatten(a.right(), out);
            break;
    }
}

}  // namespace

Assertion parse_assertion(std::string_view text) {
    Scanner in(text);
    Assertion a = parse_star(in, 0);
    if (!in.at_end()) in.fail("unexpected trailing input");
    return a;
}

std::string pretty(const Assertion& a) {
    std::string out;
    print(a, out);
    return out;
}

bool satisfies(const ResourceBundle& r, const Assertion& a) {
    switch (a.kind()) {
        case Assertion::Kind::Top: return true;
        case Assertion::Kind::Bottom: return false;
        case Assertion::Kind::Obs:
            return std::binary_search(r.chunks.begin(), r.chunks.end(), a.obligations());
        case Assertion::Kind::Credit: return r.credits >= 1;
        case Assertion::Kind::Star: {
            // An assertion with k credit atoms cannot tell k credits from
            // more, so the left part never needs more than k of them.
            const Natural left_max = std::min(r.credits, credit_atoms(a.left()));
            return any_split(r.chunks, [&](const Multiset& part, const Multiset& rest) {
                for (Natural c = 0; c <= left_max; ++c) {
                    if (satisfies({part, c}, a.left()) && satisfies({rest, r.credits - c}, a.right()))
                        return true;
                }
                return false;
            });
        }
    }
    return false;
}

CanonicalAssertion canonicalize(const Assertion& a) {
    CanonicalAssertion c;
    flatten(a, c);
    std::sort(c.obligations.begin(), c.obligations.end());
    return c;
}

Assertion to_assertion(const CanonicalAssertion& c) {
    std::vector<Assertion> atoms;
    if (c.is_false) atoms.push_back(Assertion::bottom());
    for (Natural n : c.obligations) atoms.push_back(Assertion::obs(n));
    for (Natural i = 0; i < c.credits; ++i) atoms.push_back(Assertion::credit());
    if (atoms.empty()) return Assertion::top();
    Assertion out = atoms.back();
    for (std::size_t i = atoms.size() - 1; i-- > 0;) out = Assertion::star(atoms[i], out);
    return out;
}

bool holds(const ResourceBundle& r, const CanonicalAssertion& c) {
    return !c.is_false && multiset_includes(r.chunks, c.obligations) && r.credits >= c.credits;
}

bool entails(const CanonicalAssertion& p, const CanonicalAssertion& q) {
    if (p.is_false) return true;
    return !q.is_false && multiset_includes(p.obligations, q.obligations) && q.credits <= p.credits;
}

bool entails(const Assertion& p, const Assertion& q) { return entails(canonicalize(p), canonicalize(q)); }

bool equivalent(const Assertion& a, const Assertion& b) { return canonicalize(a) == canonicalize(b); }

std::string_view shift_kind_name(ShiftStep::Kind kind) {
    switch (kind) {
        case ShiftStep::Kind::ObCredIntro: return "intro";
        case ShiftStep::Kind::ObCredCancel: return "cancel";
        case ShiftStep::Kind::SemImp: return "semimp";
    }
    return "?";
}

std::optional<std::string> apply_shift(CanonicalAssertion& current, const ShiftStep& step) {
    switch (step.kind) {
        case ShiftStep::Kind::ObCredIntro:
        case ShiftStep::Kind::ObCredCancel: {
            if (step.at >= current.obligations.size())
                return "no obligations atom at index " + std::to_string(step.at) + " in " +
                       pretty(to_assertion(current));
            Natural& atom = current.obligations[step.at];
            if (step.kind == ShiftStep::Kind::ObCredIntro) {
                if (atom == UINT64_MAX || current.credits == UINT64_MAX) return std::string("counter overflow");
                ++atom;
                ++current.credits;
            } else {
                if (current.credits == 0) return std::string("cancel with zero credits");
                if (atom == 0) return "obligations atom at index " + std::to_string(step.at) + " holds none";
                --atom;
                --current.credits;
            }
            std::sort(current.obligations.begin(), current.obligations.end());
            return std::nullopt;
        }
        case ShiftStep::Kind::SemImp: {
            if (!step.target) return std::string("semantic implication without a target");
            const CanonicalAssertion next = canonicalize(*step.target);
            if (!entails(current, next))
                return pretty(to_assertion(current)) + " does not entail " + pretty(*step.target);
            current = next;
            return std::nullopt;
        }
    }
    return std::string("unknown step");
}

std::optional<ShiftError> check_view_shift(const ViewShiftChain& chain) {
    CanonicalAssertion current = canonicalize(chain.source);
    for (std::size_t i = 0; i < chain.steps.size(); ++i) {
        if (auto why = apply_shift(current, chain.steps[i]))
            return ShiftError{i, std::string(shift_kind_name(chain.steps[i].kind)) + ": " + *why};
    }
    if (current != canonicalize(chain.target))
        return ShiftError{chain.steps.size(), "chain ends at " + pretty(to_assertion(current)) +
                                                  ", not at " + pretty(chain.target)};
    return std::nullopt;
}

std::optional<ViewShiftChain> search_view_shift(const Assertion& p, const Assertion& q, std::size_t bound) {
    const CanonicalAssertion goal = canonicalize(q);
    struct Node {
        CanonicalAssertion state;
        std::size_t parent;
        std::optional<ShiftStep> via;
        std::size_t depth;
    };
    std::vector<Node> nodes{{canonicalize(p), 0, std::nullopt, 0}};
    std::map<CanonicalAssertion, std::size_t> seen{{nodes[0].state, 0}};

    auto chain_to = [&](std::size_t i, std::optional<ShiftStep> last) {
        std::vector<ShiftStep> steps;
        if (last) steps.push_back(*last);
        for (; nodes[i].via; i = nodes[i].parent) steps.push_back(*nodes[i].via);
        std::reverse(steps.begin(), steps.end());
        return ViewShiftChain{p, std::move(steps), q};
    };

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const CanonicalAssertion state = nodes[i].state;
        const std::size_t depth = nodes[i].depth;
        if (state == goal) return chain_to(i, std::nullopt);
        if (depth == bound) continue;
        if (entails(state, goal)) return chain_to(i, ShiftStep::implies(q));
        for (std::size_t at = 0; at < state.obligations.size(); ++at) {
            if (at > 0 && state.obligations[at] == state.obligations[at - 1]) continue;
            for (const ShiftStep& step : {ShiftStep::intro(at), ShiftStep::cancel(at)}) {
                CanonicalAssertion next = state;
                if (apply_shift(next, step)) continue;
                if (seen.emplace(next, nodes.size()).second)
                    nodes.push_back({std::move(next), i, step, depth + 1});
            }
        }
    }
    return std::nullopt;
}

}  // namespace busywait
