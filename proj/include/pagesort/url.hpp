#pragma once

// Just enough URL handling to tell site-internal links from external ones.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "pagesort/error.hpp"
#include "pagesort/html.hpp"

namespace pagesort {

struct UrlParts {
    std::string scheme;  // lowercased, empty for relative references
    bool has_authority = false;
    std::string host;  // lowercased, without userinfo, port or trailing dot
    std::string port;
    std::string path;
    std::string query;  // without '?'; empty when absent
    bool has_query = false;
};

namespace detail {

inline bool is_scheme_char(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

// Two-label public suffixes under which registrations happen at the third
// label. Not the full public suffix list; covers the common ccTLD patterns.
inline constexpr std::array<std::string_view, 64> kSecondLevelSuffixes = {
    "ac.uk",  "co.uk",  "gov.uk", "ltd.uk", "me.uk",  "net.uk", "nhs.uk", "org.uk",
    "plc.uk", "sch.uk", "com.au", "edu.au", "gov.au", "net.au", "org.au", "asn.au",
    "id.au",  "co.nz",  "ac.nz",  "govt.nz", "org.nz", "net.nz", "co.jp", "ac.jp",
    "go.jp",  "or.jp",  "ne.jp",  "co.in",  "ac.in",  "gov.in", "net.in", "org.in",
    "edu.in", "res.in", "com.bd", "edu.bd", "gov.bd", "ac.bd",  "org.bd", "net.bd",
    "com.br", "gov.br", "edu.br", "org.br", "net.br", "co.za", "ac.za",  "gov.za",
    "org.za", "com.cn", "edu.cn", "gov.cn", "net.cn", "org.cn", "ac.cn",  "co.kr",
    "ac.kr",  "go.kr",  "or.kr",  "com.sg", "edu.sg", "gov.sg", "com.my", "edu.my",
};

inline bool is_ip_literal(std::string_view host) noexcept {
    if (!host.empty() && host.front() == '[') return true;
    return !host.empty() && std::all_of(host.begin(), host.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    });
}

}  // namespace detail

/// Splits a URL or relative reference. Never throws; garbage yields a
/// relative reference with whatever path was present.
inline UrlParts split_url(std::string_view url) {
    UrlParts out;
    url = html::trim(url);
    if (const auto hash = url.find('#'); hash != std::string_view::npos) {
        url = url.substr(0, hash);
    }
    const auto colon = url.find(':');
    if (colon != std::string_view::npos && colon > 0 &&
        std::isalpha(static_cast<unsigned char>(url[0])) &&
        std::all_of(url.begin(), url.begin() + static_cast<std::ptrdiff_t>(colon),
                    detail::is_scheme_char)) {
        out.scheme = html::to_lower(url.substr(0, colon));
        url.remove_prefix(colon + 1);
    }
    if (url.substr(0, 2) == "//") {
        out.has_authority = true;
        url.remove_prefix(2);
        const auto end = url.find_first_of("/?");
        auto authority = url.substr(0, end);
        url = end == std::string_view::npos ? std::string_view{} : url.substr(end);
        if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
            authority.remove_prefix(at + 1);
        }
        std::string_view host = authority;
        if (!authority.empty() && authority.front() == '[') {
            const auto close = authority.find(']');
            host = authority.substr(0, close == std::string_view::npos ? authority.size()
                                                                       : close + 1);
            if (close != std::string_view::npos && close + 1 < authority.size() &&
                authority[close + 1] == ':') {
                out.port = std::string(authority.substr(close + 2));
            }
        } else if (const auto pc = authority.rfind(':'); pc != std::string_view::npos) {
            host = authority.substr(0, pc);
            out.port = std::string(authority.substr(pc + 1));
        }
        out.host = html::to_lower(host);
        while (!out.host.empty() && out.host.back() == '.') out.host.pop_back();
    }
    if (const auto q = url.find('?'); q != std::string_view::npos) {
        out.has_query = true;
        out.query = std::string(url.substr(q + 1));
        url = url.substr(0, q);
    }
    out.path = std::string(url);
    return out;
}

/// The registrable domain ("site") of a host: one label below the public
/// suffix. IP literals and single-label hosts are their own site.
inline std::string registrable_domain(std::string_view host) {
    std::string h = html::to_lower(host);
    while (!h.empty() && h.back() == '.') h.pop_back();
    if (h.empty() || detail::is_ip_literal(h)) return h;
    const auto last = h.rfind('.');
    if (last == std::string::npos || last == 0) return h;
    const auto second = h.rfind('.', last - 1);
    if (second == std::string::npos) return h;
    const std::string_view two_labels = std::string_view(h).substr(second + 1);
    const bool multi = std::find(detail::kSecondLevelSuffixes.begin(),
                                 detail::kSecondLevelSuffixes.end(),
                                 two_labels) != detail::kSecondLevelSuffixes.end();
    if (!multi) return h.substr(second + 1);
    if (second == 0) return h;
    const auto third = h.rfind('.', second - 1);
    return third == std::string::npos ? h : h.substr(third + 1);
}

/// The page whose links are being classified.
struct PageOrigin {
    std::string url;
    std::string host;
    std::string registrable_domain;

    /// Throws Error unless url is absolute with a host.
    static PageOrigin from_url(std::string_view url) {
        const auto parts = split_url(url);
        if (parts.scheme.empty() || !parts.has_authority || parts.host.empty()) {
            throw Error("not an absolute URL with a host: '" + std::string(url) + "'");
        }
        return PageOrigin{std::string(html::trim(url)), parts.host,
                          pagesort::registrable_domain(parts.host)};
    }

    friend bool operator==(const PageOrigin&, const PageOrigin&) = default;
};

/// Resolves `ref` against an absolute `base` URL (RFC 3986 section 5.2,
/// without dot-segment removal). Used for redirect targets.
inline std::string resolve_url(std::string_view base, std::string_view ref) {
    ref = html::trim(ref);
    const auto r = split_url(ref);
    if (!r.scheme.empty()) return std::string(ref);
    const auto b = split_url(base);
    const auto scheme_end = base.find(':');
    const std::string scheme_prefix(base.substr(0, scheme_end + 1));
    if (r.has_authority) return scheme_prefix + std::string(ref);
    // base up to the end of its authority
    std::string root = scheme_prefix + "//";
    {
        const auto after = base.substr(scheme_end + 3);
        const auto end = after.find_first_of("/?#");
        root += std::string(after.substr(0, end));
    }
    if (!ref.empty() && ref.front() == '/') return root + std::string(ref);
    if (ref.empty()) return std::string(base);
    if (ref.front() == '?') return root + b.path + std::string(ref);
    std::string dir = b.path;
    const auto slash = dir.rfind('/');
    dir = slash == std::string::npos ? "/" : dir.substr(0, slash + 1);
    return root + dir + std::string(ref);
}

}  // namespace pagesort
