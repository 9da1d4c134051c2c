#pragma once

#include "busywait/lang.hpp"

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

namespace busywait::detail {

// Shared tokenizer for program, continuation and assertion text.
class Scanner {
public:
    enum class Token { Word, Number, Punct, End };

    explicit Scanner(std::string_view text) : text_(text) { advance(); }

    Token token() const { return token_; }
    std::string_view lexeme() const { return lexeme_; }
    std::size_t offset() const { return start_; }

    bool at_word(std::string_view w) const { return token_ == Token::Word && lexeme_ == w; }
    bool at_punct(char c) const { return token_ == Token::Punct && lexeme_.front() == c; }
    bool at_end() const { return token_ == Token::End; }

    void advance() {
        skip_blank();
        start_ = pos_;
        if (pos_ >= text_.size()) {
            token_ = Token::End;
            lexeme_ = {};
            return;
        }
        const unsigned char ch = static_cast<unsigned char>(text_[pos_]);
        if (std::isalpha(ch) || ch == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            token_ = Token::Word;
        } else if (std::isdigit(ch)) {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            token_ = Token::Number;
        } else {
            ++pos_;
            token_ = Token::Punct;
        }
        lexeme_ = text_.substr(start_, pos_ - start_);
    }

    void expect_word(std::string_view w) {
        if (!at_word(w)) fail("expected '" + std::string(w) + "'");
        advance();
    }

    void expect_punct(char c) {
        if (!at_punct(c)) fail(std::string("expected '") + c + "'");
        advance();
    }

    std::uint64_t expect_number() {
        if (token_ != Token::Number) fail("expected a natural number");
        std::uint64_t value = 0;
        for (char d : lexeme_) {
            const std::uint64_t digit = static_cast<std::uint64_t>(d - '0');
            if (value > (UINT64_MAX - digit) / 10) fail("number out of range");
            value = value * 10 + digit;
        }
        advance();
        return value;
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < start_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string found = at_end() ? std::string("end of input") : "'" + std::string(lexeme_) + "'";
        throw ParseError(what + ", found " + found, start_, line, column);
    }

private:
    void skip_blank() {
        while (pos_ < text_.size()) {
            const char ch = text_[pos_];
            if (ch == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t start_ = 0;
    Token token_ = Token::End;
    std::string_view lexeme_;
};

}  // namespace busywait::detail
