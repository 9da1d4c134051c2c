#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace busywait {

using Natural = std::uint64_t;

/// Multiset of naturals kept as a sorted vector.
using Multiset = std::vector<Natural>;

Multiset multiset_union(const Multiset& a, const Multiset& b);
bool multiset_includes(const Multiset& super, const Multiset& sub);

/// Ghost state: obligations chunks (one natural per chunk, the number of exit
/// obligations it holds) and a credit count.
struct ResourceBundle {
    Multiset chunks;
    Natural credits = 0;

    static ResourceBundle of(Multiset chunks, Natural credits);

    friend auto operator<=>(const ResourceBundle&, const ResourceBundle&) = default;
};

ResourceBundle bundle_union(const ResourceBundle& a, const ResourceBundle& b);

/// Threads carry complete bundles: exactly one obligations chunk.
bool is_complete(const ResourceBundle& r);

std::string to_string(const ResourceBundle& r);

/// A ::= true | false | A * A | obs(n) | credit
class Assertion {
public:
    enum class Kind { Top, Bottom, Star, Obs, Credit };

    static Assertion top();
    static Assertion bottom();
    static Assertion star(Assertion left, Assertion right);
    static Assertion obs(Natural n);
    static Assertion credit();

    Kind kind() const { return kind_; }
    Natural obligations() const { return value_; }
    const Assertion& left() const { return *left_; }
    const Assertion& right() const { return *right_; }

    friend bool operator==(const Assertion& a, const Assertion& b);

private:
    Assertion(Kind kind, Natural value, std::shared_ptr<const Assertion> l,
              std::shared_ptr<const Assertion> r)
        : kind_(kind), value_(value), left_(std::move(l)), right_(std::move(r)) {}

    Kind kind_;
    Natural value_ = 0;
    std::shared_ptr<const Assertion> left_, right_;
};

/// obs(n) * credit^k, the shape of every per-thread specification; k = 0
/// yields just obs(n).
Assertion obs_with_credits(Natural n, Natural credits);

/// Parses `true`, `false`, `obs(n)`, `credit`, `A * B` (right-associative)
/// and parentheses. Throws ParseError.
Assertion parse_assertion(std::string_view text);
std::string pretty(const Assertion& a);

/// Satisfaction evaluated directly: a separating conjunction
/// holds iff some split of the bundle satisfies both sides.
bool satisfies(const ResourceBundle& r, const Assertion& a);

/// Flattened separating conjunction.
struct CanonicalAssertion {
    bool is_false = false;
    Multiset obligations;
    Natural credits = 0;

    friend auto operator<=>(const CanonicalAssertion&, const CanonicalAssertion&) = default;
};

CanonicalAssertion canonicalize(const Assertion& a);
Assertion to_assertion(const CanonicalAssertion& c);

/// satisfies(r, a) == holds(r, canonicalize(a)).
bool holds(const ResourceBundle& r, const CanonicalAssertion& c);

bool entails(const CanonicalAssertion& p, const CanonicalAssertion& q);
bool entails(const Assertion& p, const Assertion& q);

/// Equality up to canonical form.
bool equivalent(const Assertion& a, const Assertion& b);

/// One primitive view shift. ObCredIntro and ObCredCancel name the
/// obligations atom they change by its index in the sorted canonical
/// obligations.
struct ShiftStep {
    enum class Kind { ObCredIntro, ObCredCancel, SemImp };

    Kind kind;
    std::size_t at = 0;
    std::optional<Assertion> target;

    static ShiftStep intro(std::size_t at) { return {Kind::ObCredIntro, at, std::nullopt}; }
    static ShiftStep cancel(std::size_t at) { return {Kind::ObCredCancel, at, std::nullopt}; }
    static ShiftStep implies(Assertion t) { return {Kind::SemImp, 0, std::move(t)}; }

    friend bool operator==(const ShiftStep&, const ShiftStep&) = default;
};

std::string_view shift_kind_name(ShiftStep::Kind kind);

struct ViewShiftChain {
    Assertion source;
    std::vector<ShiftStep> steps;
    Assertion target;

    friend bool operator==(const ViewShiftChain&, const ViewShiftChain&) = default;
};

struct ShiftError {
    std::size_t step;  // == steps.size() when the chain does not end at its target
    std::string reason;
};

/// Applies one primitive step to a canonical form, or explains why it does
/// not apply.
std::optional<std::string> apply_shift(CanonicalAssertion& current, const ShiftStep& step);

std::optional<ShiftError> check_view_shift(const ViewShiftChain& chain);

/// Breadth-first search for a chain of at most `bound` steps from p to q.
/// Semantic implication is only tried towards q itself: weakening commutes
/// with intro and cancel, so postponing it loses no solutions.
std::optional<ViewShiftChain> search_view_shift(const Assertion& p, const Assertion& q, std::size_t bound);

}  // namespace busywait
