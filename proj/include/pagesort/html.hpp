#pragma once

// Forgiving HTML tokenizer. Never fails: unclosed tags, stray '<', bad
// nesting and arbitrary bytes all produce some token stream. Script and
// style bodies are surfaced as RawText so callers can ignore them.

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pagesort::html {

inline char ascii_lower(char c) noexcept {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = ascii_lower(c);
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
    }
    return true;
}

inline bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

/// Decodes numeric references and the handful of named ones that matter
/// for URLs and prose. Unknown references are kept verbatim.
inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        const auto semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        const auto ref = to_lower(s.substr(i + 1, semi - i - 1));
        std::optional<std::uint32_t> cp;
        if (!ref.empty() && ref[0] == '#') {
            std::uint32_t v = 0;
            bool hex = ref.size() > 1 && ref[1] == 'x';
            std::size_t start = hex ? 2 : 1;
            bool ok = start < ref.size();
            for (std::size_t k = start; ok && k < ref.size(); ++k) {
                const auto ch = static_cast<unsigned char>(ref[k]);
                int digit;
                if (std::isdigit(ch)) {
                    digit = ch - '0';
                } else if (hex && std::isxdigit(ch)) {
                    digit = std::tolower(ch) - 'a' + 10;
                } else {
                    ok = false;
                    break;
                }
                v = v * (hex ? 16 : 10) + static_cast<std::uint32_t>(digit);
                if (v > 0x10FFFF) v = 0x110000;
            }
            if (ok) cp = v;
        } else if (ref == "amp") {
            cp = '&';
        } else if (ref == "lt") {
            cp = '<';
        } else if (ref == "gt") {
            cp = '>';
        } else if (ref == "quot") {
            cp = '"';
        } else if (ref == "apos") {
            cp = '\'';
        } else if (ref == "nbsp") {
            cp = 0xA0;
        }
        if (!cp) {
            out += s[i++];
            continue;
        }
        append_utf8(out, *cp);
        i = semi + 1;
    }
    return out;
}

struct Attribute {
    std::string name;   // lowercased
    std::string value;  // entity-decoded
};

enum class TokenKind { StartTag, EndTag, Text, RawText };

struct Token {
    TokenKind kind = TokenKind::Text;
    std::string name;  // lowercased tag name; empty for text
    std::vector<Attribute> attributes;
    std::string_view text;  // Text / RawText payload, undecoded
    bool self_closing = false;

    const std::string* attribute(std::string_view attr_name) const {
        for (const auto& a : attributes) {
            if (a.name == attr_name) return &a.value;
        }
        return nullptr;
    }
};

class Tokenizer {
public:
    explicit Tokenizer(std::string_view source) noexcept : src_(source) {}

    std::optional<Token> next() {
        if (!raw_end_tag_.empty()) return read_raw_text();
        while (pos_ < src_.size()) {
            if (src_[pos_] != '<') return read_text();
            if (auto tok = read_markup()) return tok;
        }
        return std::nullopt;
    }

private:
    static bool is_name_start(char c) noexcept {
        return std::isalpha(static_cast<unsigned char>(c)) != 0;
    }

    static bool is_tag_name_char(char c) noexcept {
        return !is_space(c) && c != '/' && c != '>';
    }

    Token read_text() {
        const auto start = pos_;
        ++pos_;
        while (pos_ < src_.size()) {
            if (src_[pos_] == '<' && pos_ + 1 < src_.size()) {
                const char n = src_[pos_ + 1];
                if (is_name_start(n) || n == '/' || n == '!' || n == '?') break;
            }
            ++pos_;
        }
        Token t;
        t.kind = TokenKind::Text;
        t.text = src_.substr(start, pos_ - start);
        return t;
    }

    Token read_raw_text() {
        const auto start = pos_;
        std::size_t end = src_.size();
        for (std::size_t p = pos_; p + 1 < src_.size(); ++p) {
            if (src_[p] == '<' && src_[p + 1] == '/' &&
                iequals(src_.substr(p + 2, raw_end_tag_.size()), raw_end_tag_)) {
                const auto after = p + 2 + raw_end_tag_.size();
                if (after >= src_.size() || is_space(src_[after]) || src_[after] == '>' ||
                    src_[after] == '/') {
                    end = p;
                    break;
                }
            }
        }
        raw_end_tag_.clear();
        pos_ = end;
        Token t;
        t.kind = TokenKind::RawText;
        t.text = src_.substr(start, end - start);
        return t;
    }

    // Returns nullopt for markup that yields no token (comments, doctype,
    // an unterminated tag at end of input).
    std::optional<Token> read_markup() {
        const auto lt = pos_;
        if (lt + 1 >= src_.size()) {
            pos_ = src_.size();
            Token t;
            t.text = src_.substr(lt);
            return t;
        }
        const char n = src_[lt + 1];
        if (n == '!') {
            if (src_.substr(lt, 4) == "<!--") {
                const auto close = src_.find("-->", lt + 4);
                pos_ = close == std::string_view::npos ? src_.size() : close + 3;
            } else {
                skip_past('>', lt + 2);
            }
            return std::nullopt;
        }
        if (n == '?') {
            skip_past('>', lt + 2);
            return std::nullopt;
        }
        const bool end_tag = n == '/';
        std::size_t p = lt + (end_tag ? 2 : 1);
        if (end_tag && (p >= src_.size() || !is_name_start(src_[p]))) {
            // "</>" or "</ 3" is a bogus comment.
            skip_past('>', p);
            return std::nullopt;
        }
        const auto name_start = p;
        while (p < src_.size() && is_tag_name_char(src_[p])) ++p;
        Token t;
        t.kind = end_tag ? TokenKind::EndTag : TokenKind::StartTag;
        t.name = to_lower(src_.substr(name_start, p - name_start));

        bool closed = false;
        while (p < src_.size()) {
            while (p < src_.size() && is_space(src_[p])) ++p;
            if (p >= src_.size()) break;
            if (src_[p] == '>') {
                ++p;
                closed = true;
                break;
            }
            if (src_[p] == '/') {
                ++p;
                if (p < src_.size() && src_[p] == '>') {
                    t.self_closing = true;
                    ++p;
                    closed = true;
                    break;
                }
                continue;
            }
            p = read_attribute(p, t);
        }
        pos_ = p;
        if (!closed) return std::nullopt;  // tag cut off by end of input
        if (t.kind == TokenKind::StartTag && !t.self_closing &&
            (t.name == "script" || t.name == "style")) {
            raw_end_tag_ = t.name;
        }
        return t;
    }

    std::size_t read_attribute(std::size_t p, Token& t) {
        const auto name_start = p;
        ++p;  // the first char is always consumed, even '=' or a quote
        while (p < src_.size() && !is_space(src_[p]) && src_[p] != '/' && src_[p] != '>' &&
               src_[p] != '=') {
            ++p;
        }
        Attribute attr;
        attr.name = to_lower(src_.substr(name_start, p - name_start));
        auto q = p;
        while (q < src_.size() && is_space(src_[q])) ++q;
        if (q < src_.size() && src_[q] == '=') {
            ++q;
            while (q < src_.size() && is_space(src_[q])) ++q;
            if (q < src_.size() && (src_[q] == '"' || src_[q] == '\'')) {
                const char quote = src_[q];
                auto close = src_.find(quote, q + 1);
                if (close == std::string_view::npos) {
                    // Unbalanced quote: fall back to the next '>'.
                    close = src_.find('>', q + 1);
                    if (close == std::string_view::npos) close = src_.size();
                    attr.value = decode_entities(src_.substr(q + 1, close - q - 1));
                    p = close;
                } else {
                    attr.value = decode_entities(src_.substr(q + 1, close - q - 1));
                    p = close + 1;
                }
            } else {
                const auto vstart = q;
                while (q < src_.size() && !is_space(src_[q]) && src_[q] != '>') ++q;
                attr.value = decode_entities(src_.substr(vstart, q - vstart));
                p = q;
            }
        }
        // First occurrence wins, as in browsers.
        if (!t.attribute(attr.name)) t.attributes.push_back(std::move(attr));
        return p;
    }

    void skip_past(char c, std::size_t from) {
        const auto at = src_.find(c, from);
        pos_ = at == std::string_view::npos ? src_.size() : at + 1;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::string raw_end_tag_;
};

/// Calls fn(const Token&) for every token in source.
template <typename Fn>
void for_each_token(std::string_view source, Fn&& fn) {
    Tokenizer tok(source);
    while (auto t = tok.next()) fn(*t);
}

}  // namespace pagesort::html
