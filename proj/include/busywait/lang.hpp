#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace busywait {

/// A command of the busy-waiting language:
///
///     cmd ::= exit | loop skip | fork(cmd) | cmd ; cmd
///
/// Commands are immutable trees; copies share their children.
class Command {
public:
    enum class Kind { Exit, Loop, Fork, Seq };

    static Command exit();
    static Command loop();
    static Command fork(Command body);
    static Command seq(Command first, Command second);

    Kind kind() const { return kind_; }
    bool is_exit() const { return kind_ == Kind::Exit; }
    bool is_loop() const { return kind_ == Kind::Loop; }
    bool is_fork() const { return kind_ == Kind::Fork; }
    bool is_seq() const { return kind_ == Kind::Seq; }

    /// Body of a fork. Precondition: is_fork().
    const Command& body() const;
    /// Left operand of a sequence. Precondition: is_seq().
    const Command& first() const;
    /// Right operand of a sequence. Precondition: is_seq().
    const Command& second() const;

    /// Number of AST nodes.
    std::size_t size() const;

    friend bool operator==(const Command& a, const Command& b);
    friend std::strong_ordering operator<=>(const Command& a, const Command& b);

private:
    Command(Kind kind, std::shared_ptr<const Command> left, std::shared_ptr<const Command> right)
        : kind_(kind), left_(std::move(left)), right_(std::move(right)) {}

    Kind kind_;
    std::shared_ptr<const Command> left_;
    std::shared_ptr<const Command> right_;
};

/// Per-thread execution state: a list of commands ending in `done`.
/// Element 0 is the head.
class Continuation {
public:
    Continuation() = default;
    explicit Continuation(std::vector<Command> commands) : commands_(std::move(commands)) {}

    static Continuation done() { return {}; }
    static Continuation cons(Command head, const Continuation& tail);

    bool is_done() const { return commands_.empty(); }
    const Command& head() const;
    Continuation tail() const;
    const std::vector<Command>& commands() const { return commands_; }

    friend bool operator==(const Continuation&, const Continuation&) = default;
    friend std::strong_ordering operator<=>(const Continuation& a, const Continuation& b);

private:
    std::vector<Command> commands_;
};

struct Program {
    Command main;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset, std::size_t line, std::size_t column);

    std::size_t offset() const { return offset_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t offset_, line_, column_;
};

/// Parses a program. `;` is right-associative, parentheses group,
/// fork bodies must be parenthesised and `#` starts a line comment.
/// Throws ParseError.
Command parse_program(std::string_view text);

/// Parses continuation text as produced by pretty(const Continuation&),
/// e.g. `fork(exit); loop skip; done`. Throws ParseError.
Continuation parse_continuation(std::string_view text);

/// Canonical text; parse_program(pretty(c)) == c.
std::string pretty(const Command& c);

/// Commands separated by `; ` and terminated by `done`. Sequence heads
/// are parenthesised so the text parses back to the same list.
std::string pretty(const Continuation& k);

Continuation to_continuation(const Command& c);

}  // namespace busywait
