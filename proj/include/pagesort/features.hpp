#pragma once

// Page feature extraction: raw structural/lexical counts from HTML source
// and their normalization into the five network inputs.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pagesort/class_label.hpp"
#include "pagesort/error.hpp"
#include "pagesort/html.hpp"
#include "pagesort/lexicon.hpp"
#include "pagesort/url.hpp"

namespace pagesort {

// ---------------------------------------------------------------------------
// Configuration

/// Tunables for extraction and normalization. Loadable from a key = value
/// file; see parse_feature_config.
struct FeatureConfig {
    double buzzword_saturation = 5.0;
    double image_saturation = 10.0;
    double animation_saturation = 3.0;
    std::vector<std::string> dynamic_extensions = {"php", "asp", "aspx", "jsp",
                                                   "cgi", "pl",  "py",   "do"};
    bool animate_gif_images = true;
    bool animate_object_embed = true;
    bool animate_marquee = true;
    bool count_title_words = true;

    friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

namespace detail {

inline bool parse_bool(std::string_view v, bool& out) {
    const auto s = html::to_lower(v);
    if (s == "true" || s == "yes" || s == "1" || s == "on") {
        out = true;
        return true;
    }
    if (s == "false" || s == "no" || s == "0" || s == "off") {
        out = false;
        return true;
    }
    return false;
}

inline bool parse_double(std::string_view v, double& out) {
    v = html::trim(v);
    if (v.empty()) return false;
    // from_chars for double is available from GCC 11.
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace detail

inline FeatureConfig parse_feature_config(std::string_view text,
                                          const std::string& source = "<feature-config>") {
    FeatureConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = html::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(source, lineno, "expected 'key = value'");
        }
        const auto key = html::trim(body.substr(0, eq));
        const auto value = html::trim(body.substr(eq + 1));
        auto positive = [&](double& field) {
            if (!detail::parse_double(value, field) || !(field > 0.0)) {
                throw ParseError(source, lineno,
                                 std::string(key) + " must be a positive number");
            }
        };
        auto flag = [&](bool& field) {
            if (!detail::parse_bool(value, field)) {
                throw ParseError(source, lineno, std::string(key) + " must be true or false");
            }
        };
        if (key == "buzzword_saturation") {
            positive(cfg.buzzword_saturation);
        } else if (key == "image_saturation") {
            positive(cfg.image_saturation);
        } else if (key == "animation_saturation") {
            positive(cfg.animation_saturation);
        } else if (key == "dynamic_extensions") {
            cfg.dynamic_extensions.clear();
            auto rest = value;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                auto ext = html::trim(rest.substr(0, comma));
                if (!ext.empty() && ext.front() == '.') ext.remove_prefix(1);
                if (!ext.empty()) cfg.dynamic_extensions.push_back(html::to_lower(ext));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
        } else if (key == "animate_gif_images") {
            flag(cfg.animate_gif_images);
        } else if (key == "animate_object_embed") {
            flag(cfg.animate_object_embed);
        } else if (key == "animate_marquee") {
            flag(cfg.animate_marquee);
        } else if (key == "count_title_words") {
            flag(cfg.count_title_words);
        } else {
            throw ParseError(source, lineno, "unknown key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

inline FeatureConfig load_feature_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_feature_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Raw counts

struct LinkCounts {
    std::uint64_t internal = 0;
    std::uint64_t external = 0;
    std::uint64_t dynamic_internal = 0;

    friend bool operator==(const LinkCounts&, const LinkCounts&) = default;
};

struct BuzzwordCounts {
    PerClass<std::uint64_t> hits{};
    std::uint64_t total_words = 0;

    friend bool operator==(const BuzzwordCounts&, const BuzzwordCounts&) = default;
};

struct ImageCounts {
    std::uint64_t count = 0;
    std::uint64_t declared_area = 0;  // pixels^2
    std::uint64_t with_dims = 0;

    friend bool operator==(const ImageCounts&, const ImageCounts&) = default;
};

/// Everything harvested from one document before normalization.
struct RawPageStats {
    std::uint64_t internal_links = 0;
    std::uint64_t external_links = 0;
    PerClass<std::uint64_t> buzzword_hits{};
    std::uint64_t image_count = 0;
    std::uint64_t declared_image_area = 0;
    std::uint64_t images_with_dims = 0;
    std::uint64_t animation_count = 0;
    std::uint64_t dynamic_internal_links = 0;
    std::uint64_t total_words = 0;

    friend bool operator==(const RawPageStats&, const RawPageStats&) = default;
};

namespace detail {

inline bool ends_with_ci(std::string_view s, std::string_view suffix) noexcept {
    return s.size() >= suffix.size() && html::iequals(s.substr(s.size() - suffix.size()), suffix);
}

inline std::string path_extension(std::string_view path) {
    const auto slash = path.rfind('/');
    const auto segment = slash == std::string_view::npos ? path : path.substr(slash + 1);
    const auto dot = segment.rfind('.');
    if (dot == std::string_view::npos) return {};
    return html::to_lower(segment.substr(dot + 1));
}

inline std::optional<std::uint64_t> parse_pixels(std::string_view v) {
    v = html::trim(v);
    if (v.empty() || v.size() > 9) return std::nullopt;
    std::uint64_t out = 0;
    for (char c : v) {
        if (c < '0' || c > '9') return std::nullopt;
        out = out * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (out == 0) return std::nullopt;
    return out;
}

inline bool is_word_char(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace detail

/// Counts anchor hyperlinks, split into internal/external by registrable
/// domain. Fragment-only links and non-web schemes (mailto, ftp, ...) are
/// skipped.
inline LinkCounts parse_links(std::string_view html_src, const PageOrigin& origin,
                              const FeatureConfig& cfg = {}) {
    LinkCounts out;
    html::for_each_token(html_src, [&](const html::Token& t) {
        if (t.kind != html::TokenKind::StartTag || t.name != "a") return;
        const auto* href = t.attribute("href");
        if (!href) return;
        const auto ref = html::trim(*href);
        if (ref.empty() || ref.front() == '#') return;
        const auto parts = split_url(ref);
        // Only web links: relative, scheme-relative, http and https.
        if (!parts.scheme.empty() && parts.scheme != "http" && parts.scheme != "https") return;
        bool internal = true;  // "http:page.html" is a relative reference
        if (parts.has_authority) {
            if (parts.host.empty()) return;
            internal = registrable_domain(parts.host) == origin.registrable_domain;
        }
        if (!internal) {
            ++out.external;
            return;
        }
        ++out.internal;
        const auto ext = detail::path_extension(parts.path);
        const bool dynamic_ext =
            !ext.empty() && std::find(cfg.dynamic_extensions.begin(),
                                      cfg.dynamic_extensions.end(),
                                      ext) != cfg.dynamic_extensions.end();
        if (dynamic_ext || parts.has_query) ++out.dynamic_internal;
    });
    return out;
}

/// Visible-text buzzword counts. Tags are word boundaries; script and style
/// bodies and attribute values are never read. Matching is whole-token and
/// ASCII case-insensitive; a word listed under several classes counts for
/// each of them.
inline BuzzwordCounts count_buzzwords(std::string_view html_src, const BuzzwordLexicon& lexicon,
                                      const FeatureConfig& cfg = {}) {
    BuzzwordCounts out;
    bool in_title = false;
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        ++out.total_words;
        for (auto c : kAllClasses) {
            const auto& words = lexicon.words(c);
            if (std::find(words.begin(), words.end(), word) != words.end()) {
                ++out.hits[index_of(c)];
            }
        }
        word.clear();
    };
    html::for_each_token(html_src, [&](const html::Token& t) {
        switch (t.kind) {
            case html::TokenKind::StartTag:
                if (t.name == "title" && !t.self_closing) in_title = true;
                return;
            case html::TokenKind::EndTag:
                if (t.name == "title") in_title = false;
                return;
            case html::TokenKind::RawText:
                return;
            case html::TokenKind::Text:
                break;
        }
        if (in_title && !cfg.count_title_words) return;
        const auto text = html::decode_entities(t.text);
        for (char c : text) {
            if (detail::is_word_char(c)) {
                word += html::ascii_lower(c);
            } else {
                flush();
            }
        }
        flush();
    });
    return out;
}

inline ImageCounts count_images(std::string_view html_src) {
    ImageCounts out;
    html::for_each_token(html_src, [&](const html::Token& t) {
        if (t.kind != html::TokenKind::StartTag || t.name != "img") return;
        ++out.count;
        const auto* w = t.attribute("width");
        const auto* h = t.attribute("height");
        if (!w || !h) return;
        const auto wp = detail::parse_pixels(*w);
        const auto hp = detail::parse_pixels(*h);
        if (!wp || !hp) return;
        ++out.with_dims;
        out.declared_area += *wp * *hp;
    });
    return out;
}

/// Animated elements: .gif images, object/embed plugins and marquees.
inline std::uint64_t count_animations(std::string_view html_src, const FeatureConfig& cfg = {}) {
    std::uint64_t n = 0;
    html::for_each_token(html_src, [&](const html::Token& t) {
        if (t.kind != html::TokenKind::StartTag) return;
        if (t.name == "img") {
            if (!cfg.animate_gif_images) return;
            const auto* src = t.attribute("src");
            if (src && detail::ends_with_ci(split_url(*src).path, ".gif")) ++n;
        } else if (t.name == "object" || t.name == "embed") {
            if (cfg.animate_object_embed) ++n;
        } else if (t.name == "marquee") {
            if (cfg.animate_marquee) ++n;
        }
    });
    return n;
}

inline RawPageStats extract_stats(std::string_view html_src, const PageOrigin& origin,
                                  const BuzzwordLexicon& lexicon,
                                  const FeatureConfig& cfg = {}) {
    const auto links = parse_links(html_src, origin, cfg);
    const auto buzz = count_buzzwords(html_src, lexicon, cfg);
    const auto images = count_images(html_src);
    RawPageStats s;
    s.internal_links = links.internal;
    s.external_links = links.external;
    s.dynamic_internal_links = links.dynamic_internal;
    s.buzzword_hits = buzz.hits;
    s.total_words = buzz.total_words;
    s.image_count = images.count;
    s.declared_image_area = images.declared_area;
    s.images_with_dims = images.with_dims;
    s.animation_count = count_animations(html_src, cfg);
    return s;
}

// ---------------------------------------------------------------------------
// Normalization

/// The five network inputs, each in [0, 1].
struct FeatureVector {
    double link_ratio = 0.0;
    double buzzword = 0.0;
    double images = 0.0;
    double animation = 0.0;
    double dynamic = 0.0;

    static constexpr std::size_t size() noexcept { return 5; }

    constexpr std::array<double, 5> as_array() const noexcept {
        return {link_ratio, buzzword, images, animation, dynamic};
    }

    static constexpr FeatureVector from_array(const std::array<double, 5>& a) noexcept {
        return {a[0], a[1], a[2], a[3], a[4]};
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// The eleven permitted values of the dynamic input, indexed by tenths.
inline constexpr std::array<double, 11> kDynamicLevels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                                          0.6, 0.7, 0.8, 0.9, 1.0};

/// e/i mapped through r/(1+r); evaluated as e/(i+e), which is the same
/// quantity with a single rounding. No internal links saturates to 1.
inline double normalize_link_ratio(std::uint64_t internal, std::uint64_t external) noexcept {
    if (external == 0) return 0.0;
    if (internal == 0) return 1.0;
    return static_cast<double>(external) / static_cast<double>(internal + external);
}

inline double saturate(double x, double k) noexcept { return x / (x + k); }

inline double normalize_buzzword(const PerClass<std::uint64_t>& hits,
                                 const FeatureConfig& cfg = {}) noexcept {
    const auto h = *std::max_element(hits.begin(), hits.end());
    return saturate(static_cast<double>(h), cfg.buzzword_saturation);
}

inline double normalize_images(const RawPageStats& stats, const FeatureConfig& cfg = {}) noexcept {
    return saturate(static_cast<double>(stats.image_count), cfg.image_saturation);
}

inline double normalize_animation(std::uint64_t count, const FeatureConfig& cfg = {}) noexcept {
    return saturate(static_cast<double>(count), cfg.animation_saturation);
}

/// Percentage of dynamic internal links, bucketed into upper-inclusive
/// tenths: (0,10] -> 0.1, ..., (90,100] -> 1.0; none -> 0.0.
inline double normalize_dynamic(std::uint64_t dynamic_internal, std::uint64_t internal) noexcept {
    if (internal == 0 || dynamic_internal == 0) return 0.0;
    dynamic_internal = std::min(dynamic_internal, internal);
    // ceil(10 * d / i) in exact integer arithmetic
    const auto bucket = (10 * dynamic_internal + internal - 1) / internal;
    return kDynamicLevels[bucket];
}

inline FeatureVector to_feature_vector(const RawPageStats& s, const FeatureConfig& cfg = {}) {
    return {normalize_link_ratio(s.internal_links, s.external_links),
            normalize_buzzword(s.buzzword_hits, cfg), normalize_images(s, cfg),
            normalize_animation(s.animation_count, cfg),
            normalize_dynamic(s.dynamic_internal_links, s.internal_links)};
}

// ---------------------------------------------------------------------------
// Feature file: <url>\t<f1>\t<f2>\t<f3>\t<f4>\t<f5>[\t<class>]

struct FeatureRow {
    std::string url;
    FeatureVector features;
    std::optional<ClassLabel> label;

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

inline std::string format_feature_row(const FeatureRow& row) {
    std::string out = row.url;
    char buf[32];
    for (double f : row.features.as_array()) {
        std::snprintf(buf, sizeof buf, "\t%.6f", f);
        out += buf;
    }
    if (row.label) {
        out += '\t';
        out += class_name(*row.label);
    }
    return out;
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    while (true) {
        const auto tab = line.find('\t');
        out.push_back(line.substr(0, tab));
        if (tab == std::string_view::npos) break;
        line.remove_prefix(tab + 1);
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

inline std::vector<FeatureRow> parse_feature_rows(std::string_view text,
                                                  const std::string& source = "<features>") {
    std::vector<FeatureRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (html::trim(line).empty() || line.front() == '#') continue;
        const auto cols = detail::split_tabs(line);
        if (cols.size() != 6 && cols.size() != 7) {
            throw ParseError(source, lineno,
                             "expected 6 or 7 tab-separated columns, got " +
                                 std::to_string(cols.size()));
        }
        FeatureRow row;
        row.url = std::string(cols[0]);
        std::array<double, 5> values{};
        for (std::size_t i = 0; i < 5; ++i) {
            if (!detail::parse_double(cols[i + 1], values[i]) || values[i] < 0.0 ||
                values[i] > 1.0) {
                throw ParseError(source, lineno,
                                 "feature " + std::to_string(i + 1) +
                                     " is not a number in [0,1]: '" + std::string(cols[i + 1]) +
                                     "'");
            }
        }
        row.features = FeatureVector::from_array(values);
        if (cols.size() == 7) {
            row.label = parse_class_name(cols[6]);
            if (!row.label) {
                throw ParseError(source, lineno,
                                 "unknown class '" + std::string(cols[6]) +
                                     "'; valid classes: " + valid_class_names());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<FeatureRow> load_feature_rows(const std::string& path) {
    return parse_feature_rows(detail::read_file(path), path);
}

inline void write_feature_rows(const std::string& path, const std::vector<FeatureRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (const auto& r : rows) out << format_feature_row(r) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace pagesort
