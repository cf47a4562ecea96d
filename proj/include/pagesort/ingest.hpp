#pragma once

// Single-page HTTP fetching into a url-hash addressed cache:
//   <cache_dir>/index.tsv                 url, hash, status, timestamp,
//                                         final url, content type
//   <cache_dir>/bodies/<hash>.html        body bytes, verbatim

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>

#include "pagesort/class_label.hpp"
#include "pagesort/corpus.hpp"
#include "pagesort/error.hpp"
#include "pagesort/features.hpp"
#include "pagesort/url.hpp"

namespace pagesort {

struct FetchRecord {
    std::string url;
    std::string final_url;
    int status = 0;
    std::string fetched_at;  // UTC, ISO 8601
    std::string body_path;   // empty unless status is 2xx
    std::string content_type;

    bool ok() const noexcept { return status >= 200 && status < 300; }

    friend bool operator==(const FetchRecord&, const FetchRecord&) = default;
};

struct FetchOptions {
    std::chrono::milliseconds timeout{15000};
    bool refresh = false;
    int max_redirects = 5;
    std::string user_agent = "pagesort/1.0 (home page categorizer)";
};

class FetchError : public Error {
public:
    enum class Kind { InvalidUrl, Network, Timeout, HttpStatus, TooManyRedirects };

    FetchError(Kind kind, const std::string& what, std::optional<FetchRecord> record = {})
        : Error(what), kind_(kind), record_(std::move(record)) {}

    Kind kind() const noexcept { return kind_; }
    const std::optional<FetchRecord>& record() const noexcept { return record_; }

private:
    Kind kind_;
    std::optional<FetchRecord> record_;
};

/// 64-bit FNV-1a as 16 hex digits; names cache bodies.
inline std::string url_hash(std::string_view url) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : url) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// $PAGESORT_CACHE, else ".pagesort-cache" in the working directory.
inline std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("PAGESORT_CACHE"); env && *env) return env;
    return ".pagesort-cache";
}

namespace detail {

inline std::mutex& index_mutex() {
    static std::mutex m;
    return m;
}

inline std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::optional<FetchRecord> parse_index_line(std::string_view line,
                                                   const std::filesystem::path& cache_dir) {
    const auto cols = split_tabs(line);
    if (cols.size() < 4) return std::nullopt;
    FetchRecord r;
    r.url = std::string(cols[0]);
    try {
        r.status = std::stoi(std::string(cols[2]));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    r.fetched_at = std::string(cols[3]);
    r.final_url = cols.size() > 4 ? std::string(cols[4]) : r.url;
    r.content_type = cols.size() > 5 ? std::string(cols[5]) : std::string{};
    if (r.ok()) r.body_path = (cache_dir / "bodies" / (std::string(cols[1]) + ".html")).string();
    return r;
}

/// Most recent successful record for url whose body is present.
inline std::optional<FetchRecord> lookup_cache(const std::filesystem::path& cache_dir,
                                               std::string_view url) {
    std::lock_guard lock(index_mutex());
    std::ifstream in(cache_dir / "index.tsv", std::ios::binary);
    if (!in) return std::nullopt;
    std::optional<FetchRecord> found;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        auto r = parse_index_line(line, cache_dir);
        if (r && r->url == url && r->ok() && std::filesystem::exists(r->body_path)) found = r;
    }
    return found;
}

inline void append_index(const std::filesystem::path& cache_dir, const FetchRecord& r) {
    std::string line = r.url + '\t' + url_hash(r.url) + '\t' + std::to_string(r.status) + '\t' +
                       r.fetched_at + '\t' + r.final_url + '\t' + r.content_type + '\n';
    std::lock_guard lock(index_mutex());
    std::ofstream out(cache_dir / "index.tsv", std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to cache index in '" + cache_dir.string() + "'");
    out << line;
    out.flush();
    if (!out) throw IoError("cache index write failed in '" + cache_dir.string() + "'");
}

/// Write-then-rename so readers never see a partial body.
inline void store_body(const std::filesystem::path& dest, std::string_view body) {
    static std::atomic<std::uint64_t> counter{0};
    auto tmp = dest;
    tmp += ".tmp" + std::to_string(counter.fetch_add(1)) + "-" +
           std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, dest);
}

inline bool is_redirect(int status) noexcept {
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

}  // namespace detail

/// Fetches one http(s) page through the cache. A cached successful record
/// is returned without network traffic unless options.refresh is set.
/// Non-2xx responses are recorded in the index, then raised as FetchError.
inline FetchRecord fetch_page(const std::string& url, const std::filesystem::path& cache_dir,
                              const FetchOptions& options = {}) {
    const auto parts = split_url(url);
    if ((parts.scheme != "http" && parts.scheme != "https") || !parts.has_authority ||
        parts.host.empty()) {
        throw FetchError(FetchError::Kind::InvalidUrl,
                         "invalid url '" + url + "': only absolute http(s) urls can be fetched");
    }
    if (!options.refresh) {
        if (auto hit = detail::lookup_cache(cache_dir, url)) return *hit;
    }
    std::filesystem::create_directories(cache_dir / "bodies");

    std::string current = url;
    for (int hop = 0;; ++hop) {
        const auto p = split_url(current);
        if (p.scheme != "http" && p.scheme != "https") {
            throw FetchError(FetchError::Kind::InvalidUrl,
                             "redirect to unsupported url '" + current + "'");
        }
        const auto scheme_end = current.find("://");
        const auto path_start = current.find_first_of("/?#", scheme_end + 3);
        const std::string base = current.substr(0, path_start);
        std::string target = path_start == std::string::npos ? "/" : current.substr(path_start);
        if (const auto hash = target.find('#'); hash != std::string::npos) target.resize(hash);
        if (target.empty() || target.front() == '?') target.insert(target.begin(), '/');

        std::optional<httplib::Result> res;
        try {
            httplib::Client cli(base);
            if (!cli.is_valid()) {
                throw FetchError(FetchError::Kind::InvalidUrl,
                                 "unsupported url '" + current + "' (https needs OpenSSL support)");
            }
            const auto secs = options.timeout.count() / 1000;
            const auto usecs = (options.timeout.count() % 1000) * 1000;
            cli.set_connection_timeout(secs, usecs);
            cli.set_read_timeout(secs, usecs);
            cli.set_write_timeout(secs, usecs);
            cli.set_follow_location(false);
            res.emplace(cli.Get(target, {{"User-Agent", options.user_agent}}));
        } catch (const FetchError&) {
            throw;
        } catch (const std::exception& e) {
            throw FetchError(FetchError::Kind::Network,
                             "fetch of '" + current + "' failed: " + e.what());
        }
        auto& result = *res;
        if (!result) {
            const auto err = result.error();
            const bool timeout = err == httplib::Error::ConnectionTimeout ||
                                 err == httplib::Error::Read;
            throw FetchError(timeout ? FetchError::Kind::Timeout : FetchError::Kind::Network,
                             "fetch of '" + current + "' failed: " + httplib::to_string(err));
        }
        const int status = result->status;
        if (detail::is_redirect(status) && result->has_header("Location")) {
            if (hop >= options.max_redirects) {
                throw FetchError(FetchError::Kind::TooManyRedirects,
                                 "too many redirects fetching '" + url + "' (limit " +
                                     std::to_string(options.max_redirects) + ")");
            }
            current = resolve_url(current, result->get_header_value("Location"));
            continue;
        }

        FetchRecord rec;
        rec.url = url;
        rec.final_url = current;
        rec.status = status;
        rec.fetched_at = detail::utc_now();
        rec.content_type = result->get_header_value("Content-Type");
        if (rec.ok()) {
            const auto dest = cache_dir / "bodies" / (url_hash(url) + ".html");
            detail::store_body(dest, result->body);
            rec.body_path = dest.string();
        }
        detail::append_index(cache_dir, rec);
        if (!rec.ok()) {
            throw FetchError(FetchError::Kind::HttpStatus,
                             "fetch of '" + current + "' returned HTTP " + std::to_string(status),
                             rec);
        }
        return rec;
    }
}

// ---------------------------------------------------------------------------
// Batch fetching

struct UrlEntry {
    std::string url;
    ClassLabel label{};
};

/// Parses "<url>\t<class name>" lines.
inline std::vector<UrlEntry> parse_url_list(std::string_view text,
                                            const std::string& source = "<url list>") {
    std::vector<UrlEntry> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (html::trim(line).empty() || line.front() == '#') continue;
        const auto cols = detail::split_tabs(line);
        if (cols.size() != 2) throw ParseError(source, lineno, "expected '<url>\\t<class name>'");
        const auto label = parse_class_name(html::trim(cols[1]));
        if (!label) {
            throw ParseError(source, lineno,
                             "unknown class '" + std::string(cols[1]) +
                                 "'; valid classes: " + valid_class_names());
        }
        out.push_back({std::string(html::trim(cols[0])), *label});
    }
    return out;
}

struct FetchFailure {
    std::string url;
    ClassLabel label{};
    std::string error;
};

struct FetchManifestResult {
    std::filesystem::path manifest_path;
    std::filesystem::path failures_path;
    std::size_t fetched = 0;
    std::vector<FetchFailure> failures;
};

/// Fetches every entry with at most `concurrency` requests in flight and
/// writes <out_dir>/manifest.tsv (successes, input order) and
/// <out_dir>/failures.tsv (url, class, error).
inline FetchManifestResult fetch_manifest(std::span<const UrlEntry> entries,
                                          const std::filesystem::path& cache_dir,
                                          const std::filesystem::path& out_dir,
                                          std::size_t concurrency,
                                          const FetchOptions& options = {}) {
    if (concurrency < 1) throw Error("concurrency must be at least 1");
    std::filesystem::create_directories(out_dir);
    std::filesystem::create_directories(cache_dir);

    struct Outcome {
        std::optional<FetchRecord> record;
        std::string error;
    };
    std::vector<Outcome> outcomes(entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < entries.size(); i = next.fetch_add(1)) {
            try {
                outcomes[i].record = fetch_page(entries[i].url, cache_dir, options);
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    const auto n_workers = std::min(concurrency, entries.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    FetchManifestResult result;
    result.manifest_path = out_dir / "manifest.tsv";
    result.failures_path = out_dir / "failures.tsv";
    const auto abs_out = std::filesystem::absolute(out_dir);
    std::string manifest;
    std::string failures;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& o = outcomes[i];
        if (o.record) {
            char id[32];
            std::snprintf(id, sizeof id, "page-%04zu", i + 1);
            auto body = std::filesystem::absolute(o.record->body_path);
            auto rel = body.lexically_relative(abs_out);
            const std::string path = rel.empty() ? body.string() : rel.generic_string();
            manifest += std::string(id) + '\t' + o.record->final_url + '\t' + path + '\t' +
                        std::string(class_name(entries[i].label)) + '\n';
            ++result.fetched;
        } else {
            std::string err = o.error;
            for (auto& c : err) {
                if (c == '\t' || c == '\n') c = ' ';
            }
            failures += entries[i].url + '\t' + std::string(class_name(entries[i].label)) + '\t' +
                        err + '\n';
            result.failures.push_back({entries[i].url, entries[i].label, o.error});
        }
    }
    write_text_file(result.manifest_path, manifest);
    write_text_file(result.failures_path, failures);
    return result;
}

}  // namespace pagesort
