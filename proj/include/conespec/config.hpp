/**
 * @file config.hpp
 * @brief Reader for the sectioned key-value text format used by run configs,
 *        custom cross-section files and topology catalog files.
 *
 * Grammar (whitespace and `#` comments are ignored):
 *
 *     document := { section | entry }
 *     section  := '[' word ']'
 *     entry    := word '=' value
 *     value    := number [ '/' number ] | word | word '(' values ')'
 *               | '"' text '"' | '[' values ']' | '(' values ')'
 *
 * Entries that precede the first section header belong to the unnamed
 * root section. Every value remembers the line it started on so that schema
 * errors can name both the line and the field.
 */
#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conespec/errors.hpp"

namespace conespec::config {

struct Value {
    enum class Kind { Number, Word, String, List, Tuple, Call };

    Kind kind = Kind::Number;
    double number = 0.0;
    std::string text;           // Word / String / Call name
    std::vector<Value> items;   // List / Tuple / Call arguments
    int line = 0;

    [[nodiscard]] bool is_number() const { return kind == Kind::Number; }
    [[nodiscard]] bool is_word() const { return kind == Kind::Word; }
    [[nodiscard]] bool is_sequence() const { return kind == Kind::List || kind == Kind::Tuple; }
};

struct Entry {
    std::string key;
    Value value;
    int line = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;

    [[nodiscard]] const Entry* find(std::string_view key) const {
        for (const auto& e : entries) {
            if (e.key == key) return &e;
        }
        return nullptr;
    }
};

struct Document {
    std::string source;
    std::vector<Section> sections;

    [[nodiscard]] const Section* find(std::string_view name) const {
        for (const auto& s : sections) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }
};

/// Formats "<source>:<line>: field '<key>': <msg>" for schema errors.
inline std::string where(std::string_view source, int line, std::string_view key,
                         std::string_view msg) {
    std::ostringstream os;
    os << source << ':' << line << ": ";
    if (!key.empty()) os << "field '" << key << "': ";
    os << msg;
    return os.str();
}

namespace detail {

enum class Tok { LBrack, RBrack, LParen, RParen, Comma, Equals, Slash, Number, Word, String, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    int line = 0;
    bool line_start = false;   // first token on its line
};

inline bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

inline std::vector<Token> tokenize(std::string_view text, std::string_view source) {
    std::vector<Token> out;
    int line = 1;
    bool at_line_start = true;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string t = {}, double num = 0.0) {
        out.push_back(Token{k, std::move(t), num, line, at_line_start});
        at_line_start = false;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            at_line_start = true;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        switch (c) {
            case '[': push(Tok::LBrack); ++i; continue;
            case ']': push(Tok::RBrack); ++i; continue;
            case '(': push(Tok::LParen); ++i; continue;
            case ')': push(Tok::RParen); ++i; continue;
            case ',': push(Tok::Comma); ++i; continue;
            case '=': push(Tok::Equals); ++i; continue;
            case '/': push(Tok::Slash); ++i; continue;
            default: break;
        }
        if (c == '"') {
            const std::size_t start = ++i;
            while (i < text.size() && text[i] != '"' && text[i] != '\n') ++i;
            if (i >= text.size() || text[i] != '"') {
                throw InputError(where(source, line, "", "unterminated string"));
            }
            push(Tok::String, std::string(text.substr(start, i - start)));
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            const char* first = text.data() + i;
            const char* last = text.data() + text.size();
            if (*first == '+') ++first;
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr == first) {
                throw InputError(where(source, line, "",
                                       "malformed number near '" + std::string(1, c) + "'"));
            }
            push(Tok::Number, std::string(text.substr(i, static_cast<std::size_t>(ptr - (text.data() + i)))),
                 value);
            i = static_cast<std::size_t>(ptr - text.data());
            continue;
        }
        if (word_start(c)) {
            const std::size_t start = i;
            while (i < text.size() && word_char(text[i])) ++i;
            push(Tok::Word, std::string(text.substr(start, i - start)));
            continue;
        }
        throw InputError(where(source, line, "", std::string("unexpected character '") + c + "'"));
    }
    out.push_back(Token{Tok::End, {}, 0.0, line, true});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::string source)
        : toks_(std::move(toks)), source_(std::move(source)) {}

    Document run() {
        Document doc;
        doc.source = source_;
        doc.sections.push_back(Section{"", 0, {}});
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.kind == Tok::LBrack && t.line_start) {
                next();
                const Token& name = expect(Tok::Word, "section name");
                expect(Tok::RBrack, "']'");
                for (const auto& s : doc.sections) {
                    if (s.name == name.text) {
                        throw InputError(where(source_, name.line, "", "duplicate section [" + name.text + "]"));
                    }
                }
                doc.sections.push_back(Section{name.text, name.line, {}});
                continue;
            }
            const Token& key = expect(Tok::Word, "key");
            expect(Tok::Equals, "'='");
            Section& cur = doc.sections.back();
            if (cur.find(key.text) != nullptr) {
                throw InputError(where(source_, key.line, key.text, "duplicate key"));
            }
            Value v = value();
            cur.entries.push_back(Entry{key.text, std::move(v), key.line});
        }
        return doc;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    const Token& expect(Tok k, std::string_view what) {
        const Token& t = next();
        if (t.kind != k) {
            throw InputError(where(source_, t.line, "", "expected " + std::string(what)));
        }
        return t;
    }

    std::vector<Value> sequence(Tok close) {
        std::vector<Value> items;
        if (peek().kind == close) {
            next();
            return items;
        }
        while (true) {
            items.push_back(value());
            const Token& t = next();
            if (t.kind == close) break;
            if (t.kind != Tok::Comma) {
                throw InputError(where(source_, t.line, "", "expected ',' or closing bracket"));
            }
        }
        return items;
    }

    Value value() {
        const Token& t = next();
        Value v;
        v.line = t.line;
        switch (t.kind) {
            case Tok::Number: {
                v.kind = Value::Kind::Number;
                v.number = t.number;
                if (peek().kind == Tok::Slash) {
                    next();
                    const Token& den = expect(Tok::Number, "denominator");
                    if (den.number == 0.0) {
                        throw InputError(where(source_, den.line, "", "zero denominator"));
                    }
                    v.number /= den.number;
                }
                return v;
            }
            case Tok::Word:
                v.text = t.text;
                if (peek().kind == Tok::LParen) {
                    next();
                    v.kind = Value::Kind::Call;
                    v.items = sequence(Tok::RParen);
                } else {
                    v.kind = Value::Kind::Word;
                }
                return v;
            case Tok::String:
                v.kind = Value::Kind::String;
                v.text = t.text;
                return v;
            case Tok::LBrack:
                v.kind = Value::Kind::List;
                v.items = sequence(Tok::RBrack);
                return v;
            case Tok::LParen:
                v.kind = Value::Kind::Tuple;
                v.items = sequence(Tok::RParen);
                return v;
            default:
                throw InputError(where(source_, t.line, "", "expected a value"));
        }
    }

    std::vector<Token> toks_;
    std::string source_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Document parse(std::string_view text, std::string source = "<string>") {
    return detail::Parser(detail::tokenize(text, source), source).run();
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

/// Rejects any key of @p section that is not listed in @p allowed.
inline void require_known_keys(const Document& doc, const Section& section,
                               std::initializer_list<std::string_view> allowed) {
    for (const auto& e : section.entries) {
        bool ok = false;
        for (auto a : allowed) ok = ok || (e.key == a);
        if (!ok) {
            const std::string sec = section.name.empty() ? "top level" : "[" + section.name + "]";
            throw InputError(where(doc.source, e.line, e.key, "unknown key in " + sec));
        }
    }
}

/// Typed accessors that report the offending line and field on mismatch.
class Reader {
public:
    Reader(const Document& doc, const Section& section) : doc_(doc), section_(section) {}

    [[nodiscard]] bool has(std::string_view key) const { return section_.find(key) != nullptr; }

    [[nodiscard]] const Entry& entry(std::string_view key) const {
        const Entry* e = section_.find(key);
        if (e == nullptr) {
            const std::string sec = section_.name.empty() ? "top level" : "[" + section_.name + "]";
            throw InputError(where(doc_.source, section_.line, key, "missing in " + sec));
        }
        return *e;
    }

    [[nodiscard]] double number(std::string_view key) const { return as_number(entry(key).value, key); }

    [[nodiscard]] double number_or(std::string_view key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    [[nodiscard]] long integer(std::string_view key) const { return as_integer(entry(key).value, key); }

    [[nodiscard]] long integer_or(std::string_view key, long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    [[nodiscard]] std::string word(std::string_view key) const {
        const Value& v = entry(key).value;
        if (v.kind != Value::Kind::Word && v.kind != Value::Kind::String) fail(v, key, "expected a word");
        return v.text;
    }

    [[nodiscard]] std::string word_or(std::string_view key, std::string fallback) const {
        return has(key) ? word(key) : std::move(fallback);
    }

    [[nodiscard]] std::vector<double> numbers(std::string_view key) const {
        const Value& v = entry(key).value;
        if (!v.is_sequence()) fail(v, key, "expected a list of numbers");
        std::vector<double> out;
        out.reserve(v.items.size());
        for (const auto& item : v.items) out.push_back(as_number(item, key));
        return out;
    }

    [[nodiscard]] std::vector<long> integers(std::string_view key) const {
        const Value& v = entry(key).value;
        if (!v.is_sequence()) fail(v, key, "expected a list of integers");
        std::vector<long> out;
        out.reserve(v.items.size());
        for (const auto& item : v.items) out.push_back(as_integer(item, key));
        return out;
    }

    [[noreturn]] void fail(const Value& v, std::string_view key, std::string_view msg) const {
        throw InputError(where(doc_.source, v.line, key, msg));
    }

    [[nodiscard]] double as_number(const Value& v, std::string_view key) const {
        if (!v.is_number()) fail(v, key, "expected a number");
        return v.number;
    }

    [[nodiscard]] long as_integer(const Value& v, std::string_view key) const {
        const double x = as_number(v, key);
        if (std::floor(x) != x || std::abs(x) > 1e15) fail(v, key, "expected an integer");
        return static_cast<long>(x);
    }

    [[nodiscard]] const Document& document() const { return doc_; }
    [[nodiscard]] const Section& section() const { return section_; }

private:
    const Document& doc_;
    const Section& section_;
};

}  // namespace conespec::config
