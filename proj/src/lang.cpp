#include "busywait/lang.hpp"

#include "scanner.hpp"

#include <cassert>

namespace busywait {

Command Command::exit() { return Command(Kind::Exit, nullptr, nullptr); }

Command Command::loop() { return Command(Kind::Loop, nullptr, nullptr); }

Command Command::fork(Command body) {
    return Command(Kind::Fork, std::make_shared<const Command>(std::move(body)), nullptr);
}

Command Command::seq(Command first, Command second) {
    return Command(Kind::Seq, std::make_shared<const Command>(std::move(first)),
                   std::make_shared<const Command>(std::move(second)));
}

const Command& Command::body() const {
    assert(is_fork());
    return *left_;
}

const Command& Command::first() const {
    assert(is_seq());
    return *left_;
}

const Command& Command::second() const {
    assert(is_seq());
    return *right_;
}

std::size_t Command::size() const {
    switch (kind_) {
        case Kind::Exit:
        case Kind::Loop: return 1;
        case Kind::Fork: return 1 + left_->size();
        case Kind::Seq: return 1 + left_->size() + right_->size();
    }
    return 1;
}

bool operator==(const Command& a, const Command& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Command& a, const Command& b) {
    if (&a == &b) return std::strong_ordering::equal;
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (a.left_ && a.left_ != b.left_) {
        if (auto c = *a.left_ <=> *b.left_; c != 0) return c;
    }
    if (a.right_ && a.right_ != b.right_) return *a.right_ <=> *b.right_;
    return std::strong_ordering::equal;
}

Continuation Continuation::cons(Command head, const Continuation& tail) {
    std::vector<Command> commands;
    commands.reserve(tail.commands_.size() + 1);
    commands.push_back(std::move(head));
    commands.insert(commands.end(), tail.commands_.begin(), tail.commands_.end());
    return Continuation(std::move(commands));
}

const Command& Continuation::head() const {
    assert(!is_done());
    return commands_.front();
}

Continuation Continuation::tail() const {
    assert(!is_done());
    return Continuation(std::vector<Command>(commands_.begin() + 1, commands_.end()));
}

std::strong_ordering operator<=>(const Continuation& a, const Continuation& b) {
    return std::lexicographical_compare_three_way(a.commands_.begin(), a.commands_.end(),
                                                  b.commands_.begin(), b.commands_.end());
}

ParseError::ParseError(const std::string& message, std::size_t offset, std::size_t line,
                       std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      offset_(offset),
      line_(line),
      column_(column) {}

namespace {

using detail::Scanner;

// Maximum nesting of parentheses, forks and sequences.
constexpr int kMaxDepth = 2000;

Command parse_command(Scanner& in, int depth);

Command parse_atom(Scanner& in, int depth) {
    if (depth > kMaxDepth) in.fail("nesting too deep");
    if (in.at_word("exit")) {
        in.advance();
        return Command::exit();
    }
    if (in.at_word("loop")) {
        in.advance();
        in.expect_word("skip");
        return Command::loop();
    }
    if (in.at_word("fork")) {
        in.advance();
        in.expect_punct('(');
        Command body = parse_command(in, depth + 1);
        in.expect_punct(')');
        return Command::fork(std::move(body));
    }
    if (in.at_punct('(')) {
        in.advance();
        Command inner = parse_command(in, depth + 1);
        in.expect_punct(')');
        return inner;
    }
    in.fail("expected a command");
}

Command parse_command(Scanner& in, int depth) {
    Command head = parse_atom(in, depth);
    if (!in.at_punct(';')) return head;
    in.advance();
    return Command::seq(std::move(head), parse_command(in, depth + 1));
}

void print(const Command& c, std::string& out) {
    switch (c.kind()) {
        case Command::Kind::Exit: out += "exit"; break;
        case Command::Kind::Loop: out += "loop skip"; break;
        case Command::Kind::Fork:
            out += "fork(";
            print(c.body(), out);
            out += ')';
            break;
        case Command::Kind::Seq:
            if (c.first().is_seq()) {
                out += '(';
                print(c.first(), out);
                out += ')';
            } else {
                print(c.first(), out);
            }
            out += "; ";
            print(c.second(), out);
            break;
    }
}

}  // namespace

Command parse_program(std::string_view text) {
    Scanner in(text);
    Command c = parse_command(in, 0);
    if (!in.at_end()) in.fail("unexpected trailing input");
    return c;
}

Continuation parse_continuation(std::string_view text) {
    Scanner in(text);
    std::vector<Command> commands;
    while (!in.at_word("done")) {
        commands.push_back(parse_atom(in, 0));
        in.expect_punct(';');
    }
    in.advance();
    if (!in.at_end()) in.fail("unexpected input after 'done'");
    return Continuation(std::move(commands));
}

std::string pretty(const Command& c) {
    std::string out;
    print(c, out);
    return out;
}

std::string pretty(const Continuation& k) {
    std::string out;
    for (const Command& c : k.commands()) {
        if (c.is_seq()) {
            out += '(';
            print(c, out);
            out += ')';
        } else {
            print(c, out);
        }
        out += "; ";
    }
    out += "done";
    return out;
}

Continuation to_continuation(const Command& c) { return Continuation::cons(c, Continuation::done()); }

}  // namespace busywait
