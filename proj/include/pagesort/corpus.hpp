#pragma once

// Labeled page manifests, seeded train/test splitting, and the synthetic
// corpus generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pagesort/class_label.hpp"
#include "pagesort/error.hpp"
#include "pagesort/features.hpp"
#include "pagesort/mlp.hpp"
#include "pagesort/random.hpp"
#include "pagesort/url.hpp"

namespace pagesort {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Manifest: <id>\t<url>\t<relative html path>\t<class name>

struct LabeledPage {
    std::string id;
    PageOrigin origin;
    fs::path html_path;       // resolved against the manifest directory
    std::string relative_path;  // as written in the manifest
    ClassLabel label{};

    friend bool operator==(const LabeledPage&, const LabeledPage&) = default;
};

inline std::vector<LabeledPage> parse_manifest(std::string_view text, const fs::path& base_dir,
                                               const std::string& source = "<manifest>",
                                               bool require_files = true) {
    std::vector<LabeledPage> pages;
    std::set<std::string> ids;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (html::trim(line).empty() || line.front() == '#') continue;
        const auto cols = detail::split_tabs(line);
        if (cols.size() != 4) {
            throw ParseError(source, lineno,
                             "expected 4 tab-separated columns (id, url, html path, class), got " +
                                 std::to_string(cols.size()));
        }
        LabeledPage page;
        page.id = std::string(html::trim(cols[0]));
        if (page.id.empty()) throw ParseError(source, lineno, "empty page id");
        if (!ids.insert(page.id).second) {
            throw ParseError(source, lineno, "duplicate page id '" + page.id + "'");
        }
        try {
            page.origin = PageOrigin::from_url(cols[1]);
        } catch (const Error& e) {
            throw ParseError(source, lineno, e.what());
        }
        page.relative_path = std::string(html::trim(cols[2]));
        if (page.relative_path.empty()) throw ParseError(source, lineno, "empty html path");
        page.html_path = base_dir / page.relative_path;
        const auto label = parse_class_name(html::trim(cols[3]));
        if (!label) {
            throw ParseError(source, lineno,
                             "unknown class '" + std::string(cols[3]) +
                                 "'; valid classes: " + valid_class_names());
        }
        page.label = *label;
        if (require_files && !fs::exists(page.html_path)) {
            throw ParseError(source, lineno,
                             "page '" + page.id + "': html file not found: " +
                                 page.html_path.string());
        }
        pages.push_back(std::move(page));
    }
    return pages;
}

/// Loads a manifest; relative html paths resolve against its directory.
inline std::vector<LabeledPage> load_manifest(const fs::path& path, bool require_files = true) {
    if (!fs::exists(path)) throw IoError("manifest not found: '" + path.string() + "'");
    return parse_manifest(detail::read_file(path.string()), path.parent_path(), path.string(),
                          require_files);
}

inline std::string format_manifest(std::span<const LabeledPage> pages) {
    std::string out;
    for (const auto& p : pages) {
        out += p.id + '\t' + p.origin.url + '\t' + p.relative_path + '\t' +
               std::string(class_name(p.label)) + '\n';
    }
    return out;
}

inline void write_text_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
    double train_fraction = 0.4;
    std::uint64_t seed = 42;
    bool stratified = true;

    void validate() const {
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
            throw Error("train fraction must lie strictly between 0 and 1");
        }
    }
};

template <typename T>
struct Split {
    std::vector<T> train;
    std::vector<T> test;
};

namespace detail {
inline constexpr std::uint64_t kSplitStream = 3;
inline constexpr std::uint64_t kSynthStream = 4;

template <typename T>
std::size_t label_index(const T& item) {
    return index_of(item.label);
}
}  // namespace detail

/// Seeded partition into train/test. Each output keeps the input order.
/// The train side always holds round(fraction * n) items. With
/// stratification that total is apportioned over the classes by largest
/// remainder, so every class gets floor or ceil of fraction * class size.
template <typename T, typename LabelIndexFn = decltype(&detail::label_index<T>)>
Split<T> split(std::span<const T> items, const SplitSpec& spec,
               LabelIndexFn label_index = &detail::label_index<T>) {
    spec.validate();
    if (items.empty()) throw Error("cannot split an empty set");
    auto rng = make_rng(spec.seed, detail::kSplitStream);
    const auto quota = [&](std::size_t n) { return spec.train_fraction * static_cast<double>(n); };
    const auto n_train = static_cast<std::size_t>(std::llround(quota(items.size())));

    std::vector<std::vector<std::size_t>> groups;
    if (spec.stratified) {
        groups.resize(kNumClasses);
        for (std::size_t i = 0; i < items.size(); ++i) groups[label_index(items[i])].push_back(i);
    } else {
        groups.emplace_back(items.size());
        std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
    }

    std::vector<std::size_t> take(groups.size());
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        take[g] = std::min(groups[g].size(),
                           static_cast<std::size_t>(std::floor(quota(groups[g].size()))));
        assigned += take[g];
    }
    std::vector<std::size_t> by_remainder(groups.size());
    std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
    std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
        return quota(groups[a].size()) - static_cast<double>(take[a]) >
               quota(groups[b].size()) - static_cast<double>(take[b]);
    });
    for (auto g : by_remainder) {
        if (assigned >= n_train) break;
        if (take[g] < groups[g].size()) {
            ++take[g];
            ++assigned;
        }
    }

    std::vector<bool> in_train(items.size(), false);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        shuffle(std::span<std::size_t>(groups[g]), rng);
        for (std::size_t i = 0; i < take[g]; ++i) in_train[groups[g][i]] = true;
    }
    Split<T> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        (in_train[i] ? out.train : out.test).push_back(items[i]);
    }
    return out;
}

template <typename T>
Split<T> split(const std::vector<T>& items, const SplitSpec& spec) {
    return split(std::span<const T>(items), spec);
}

// ---------------------------------------------------------------------------
// Class prototypes: the idealized feature vector of each category.

using PrototypeTable = PerClass<FeatureVector>;

/// Text of the bundled prototype table (identical to data/prototypes.tsv).
inline constexpr std::string_view kDefaultPrototypesText =
    "# class\tlink_ratio\tbuzzword\timages\tanimation\tdynamic\n"
    "BusinessEconomy\t0.1\t0.5\t0.6\t0.8\t0.2\n"
    "Education\t0.6\t0.75\t0.375\t0.25\t0.1\n"
    "Government\t0.25\t0.375\t0.375\t0\t0\n"
    "NewsMedia\t0.2\t0.9\t0.8\t0.4\t1\n"
    "Sports\t0.4\t0.5\t0.75\t0.5\t0.8\n"
    "JobSearch\t0.8\t0.75\t0.6\t0.625\t0.9\n"
    "Entertainment\t0.5\t0.375\t0.9\t0.7\t0.5\n"
    "Science\t0.75\t0.375\t0\t0\t0\n";

inline PrototypeTable parse_prototypes(std::string_view text,
                                       const std::string& source = "<prototypes>") {
    PrototypeTable table{};
    PerClass<bool> seen{};
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (html::trim(line).empty() || line.front() == '#') continue;
        const auto cols = detail::split_tabs(line);
        if (cols.size() != 6) {
            throw ParseError(source, lineno, "expected '<class>' followed by 5 feature values");
        }
        const auto label = parse_class_name(html::trim(cols[0]));
        if (!label) {
            throw ParseError(source, lineno,
                             "unknown class '" + std::string(cols[0]) +
                                 "'; valid classes: " + valid_class_names());
        }
        if (seen[index_of(*label)]) throw ParseError(source, lineno, "class listed twice");
        seen[index_of(*label)] = true;
        std::array<double, 5> v{};
        for (std::size_t i = 0; i < 5; ++i) {
            if (!detail::parse_double(cols[i + 1], v[i]) || v[i] < 0.0 || v[i] > 1.0) {
                throw ParseError(source, lineno, "feature values must be numbers in [0,1]");
            }
        }
        const auto level = std::llround(v[4] * 10.0);
        if (std::abs(v[4] * 10.0 - static_cast<double>(level)) > 1e-9) {
            throw ParseError(source, lineno, "dynamic value must be a multiple of 0.1");
        }
        v[4] = kDynamicLevels[static_cast<std::size_t>(level)];
        table[index_of(*label)] = FeatureVector::from_array(v);
    }
    for (auto c : kAllClasses) {
        if (!seen[index_of(c)]) {
            throw ParseError(source, lineno,
                             "class '" + std::string(class_name(c)) + "' missing");
        }
    }
    return table;
}

inline const PrototypeTable& default_prototypes() {
    static const PrototypeTable table = parse_prototypes(kDefaultPrototypesText, "<default>");
    return table;
}

inline PrototypeTable load_prototypes(const std::string& path) {
    return parse_prototypes(detail::read_file(path), path);
}

// ---------------------------------------------------------------------------
// Synthetic pages

struct SyntheticPage {
    std::string id;
    std::string url;
    ClassLabel label{};
    FeatureVector intended;
    std::string html;
};

/// Element counts a synthetic page is built from.
struct PageCounts {
    std::uint64_t internal_links = 0;
    std::uint64_t external_links = 0;
    std::uint64_t dynamic_links = 0;
    std::uint64_t buzzwords = 0;
    std::uint64_t images = 0;
    std::uint64_t animations = 0;

    friend bool operator==(const PageCounts&, const PageCounts&) = default;
};

namespace detail {

// One lexicon word per class that no other class lists.
inline constexpr PerClass<std::string_view> kSignatureWords = {
    "business", "student", "ministry", "news", "sports", "vacancy", "music", "science",
};

inline constexpr std::array<std::string_view, 16> kFillerWords = {
    "welcome", "home",  "page",   "about", "contact", "our",  "the",  "and",
    "with",    "links", "please", "visit", "site",    "more", "here", "today",
};

// Internal link count of a synthetic page; 36 makes 0.1, 0.2, 0.25, 0.4,
// 0.5, 0.6, 0.75, 0.8 and 0.9 exact link ratios.
inline constexpr std::uint64_t kSynthInternalLinks = 36;
inline constexpr std::uint64_t kMaxSynthCount = 99 * kSynthInternalLinks;

/// Count x in [0, max_count] whose value(x) is nearest to target; ties go
/// to the smaller count. value must be increasing.
template <typename ValueFn>
std::uint64_t nearest_count(double target, double estimate, std::uint64_t max_count,
                            ValueFn value) {
    if (!(estimate >= 0.0)) estimate = 0.0;
    const auto lo = static_cast<std::uint64_t>(
        std::min(std::floor(estimate), static_cast<double>(max_count)));
    const auto hi = std::min(lo + 1, max_count);
    return std::abs(value(hi) - target) < std::abs(value(lo) - target) ? hi : lo;
}

inline std::uint64_t nearest_saturating(double target, double k) {
    const double estimate = target >= 1.0 ? static_cast<double>(kMaxSynthCount)
                                          : k * target / (1.0 - target);
    return nearest_count(target, estimate, kMaxSynthCount,
                         [k](std::uint64_t x) { return saturate(static_cast<double>(x), k); });
}

inline std::string lower_name(ClassLabel c) { return html::to_lower(class_name(c)); }

}  // namespace detail

/// The realizable page closest to `target`, component by component.
inline PageCounts realize_counts(const FeatureVector& target, const FeatureConfig& cfg = {}) {
    PageCounts c;
    const auto dyn_level = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(target.dynamic * 10.0), 0, 10));
    if (target.link_ratio >= 1.0 && dyn_level == 0) {
        // Only external links.
        c.internal_links = 0;
        c.external_links = detail::kSynthInternalLinks;
    } else {
        const auto i = detail::kSynthInternalLinks;
        c.internal_links = i;
        const double l = target.link_ratio;
        const double estimate = l >= 1.0 ? static_cast<double>(detail::kMaxSynthCount)
                                         : static_cast<double>(i) * l / (1.0 - l);
        c.external_links = detail::nearest_count(
            l, estimate, detail::kMaxSynthCount,
            [i](std::uint64_t e) { return normalize_link_ratio(i, e); });
        for (std::uint64_t k = 1; dyn_level > 0 && k <= i; ++k) {
            if (normalize_dynamic(k, i) == kDynamicLevels[dyn_level]) {
                c.dynamic_links = k;
                break;
            }
        }
    }
    c.buzzwords = detail::nearest_saturating(target.buzzword, cfg.buzzword_saturation);
    c.images = detail::nearest_saturating(target.images, cfg.image_saturation);
    c.animations = detail::nearest_saturating(target.animation, cfg.animation_saturation);
    return c;
}

/// The feature vector a page with these counts extracts to.
inline FeatureVector features_of(const PageCounts& c, const FeatureConfig& cfg = {}) {
    PerClass<std::uint64_t> hits{};
    hits[0] = c.buzzwords;
    return {normalize_link_ratio(c.internal_links, c.external_links),
            normalize_buzzword(hits, cfg),
            saturate(static_cast<double>(c.images), cfg.image_saturation),
            normalize_animation(c.animations, cfg),
            normalize_dynamic(c.dynamic_links, c.internal_links)};
}

/// Nearest vector that a synthetic page can reproduce exactly.
inline FeatureVector snap_to_realizable(const FeatureVector& v, const FeatureConfig& cfg = {}) {
    return features_of(realize_counts(v, cfg), cfg);
}

/// Deterministic HTML with exactly the given element counts. The buzzword
/// hits all go to the class's signature word. Decoys sit in places the
/// extractor must ignore: script, style, attribute values, fragment and
/// mailto links.
inline std::string synthesize_html(const PageCounts& counts, ClassLabel label,
                                   std::string_view site_name) {
    const auto gifs = std::min(counts.animations / 3, counts.images);
    const auto plugins = counts.animations - gifs;

    std::string out;
    out.reserve(4096 + 64 * (counts.internal_links + counts.external_links + counts.images +
                             plugins + counts.buzzwords));
    auto add = [&](std::string_view s) { out += s; };
    auto num = [&](std::uint64_t n) { out += std::to_string(n); };
    const auto word = detail::kSignatureWords[index_of(label)];

    add("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    add("<title>Home page</title>\n<meta name=\"keywords\" content=\"");
    add(word);
    add("\">\n<style>body { font-family: serif; } .news { color: red; }</style>\n");
    add("<script>var tags = ['business', 'news', 'science', 'music'];</script>\n");
    add("</head>\n<body>\n<a href=\"#top\">top</a> <a href=\"mailto:info@");
    add(site_name);
    add("\">mail</a>\n<ul class=\"nav\">\n");
    for (std::uint64_t i = 0; i < counts.internal_links; ++i) {
        add("<li><a href=\"");
        if (i < counts.dynamic_links) {
            switch (i % 3) {
                case 0: add("/view.php?id="); num(i); break;
                case 1: add("/list?page="); num(i); break;
                default: add("/item"); num(i); add(".asp"); break;
            }
        } else if (i % 5 == 4) {
            add("http://blog.");
            add(site_name);
            add("/post-");
            num(i);
            add(".html");
        } else {
            add("/section/page-");
            num(i);
            add(".html");
        }
        add("\">page ");
        num(i);
        add("</a></li>\n");
    }
    add("</ul>\n<div class=\"partners\">\n");
    for (std::uint64_t i = 0; i < counts.external_links; ++i) {
        add("<a href=\"http://partner-");
        num(i);
        add(".org/\">partner</a>\n");
    }
    add("</div>\n<div class=\"media\">\n");
    for (std::uint64_t i = 0; i < counts.images; ++i) {
        add("<img src=\"/img/pic-");
        num(i);
        add(i < gifs ? ".gif" : ".jpg");
        add("\" width=\"");
        num(40 + (i % 7) * 10);
        add("\" height=\"");
        num(30 + (i % 5) * 10);
        add("\" alt=\"picture\">\n");
    }
    for (std::uint64_t i = 0; i < plugins; ++i) {
        switch (i % 3) {
            case 0: add("<embed src=\"/media/banner.swf\">\n"); break;
            case 1: add("<object data=\"/media/logo.swf\"></object>\n"); break;
            default: add("<marquee>welcome</marquee>\n"); break;
        }
    }
    add("</div>\n<div class=\"content\">\n<p>");
    for (std::uint64_t i = 0; i < counts.buzzwords; ++i) {
        add(detail::kFillerWords[i % detail::kFillerWords.size()]);
        add(" ");
        if (i % 4 == 1) {
            // mixed case must still match
            out += static_cast<char>(word[0] - 'a' + 'A');
            add(word.substr(1));
        } else {
            add(word);
        }
        add(i % 8 == 7 ? ".</p>\n<p>" : " ");
    }
    for (auto filler : detail::kFillerWords) {
        add(filler);
        add(" ");
    }
    add("</p>\n</div>\n</body>\n</html>\n");
    return out;
}

/// `per_class` noisy samples around each prototype. Noise is uniform with
/// half-width `noise`, clamped to [0,1], then snapped to the nearest
/// realizable vector (the dynamic input thereby lands on a tenth). Fully
/// determined by (per_class, noise, seed, prototypes, cfg).
inline std::vector<SyntheticPage> synth_generate(std::uint64_t per_class, double noise,
                                                 std::uint64_t seed,
                                                 const PrototypeTable& prototypes =
                                                     default_prototypes(),
                                                 const FeatureConfig& cfg = {}) {
    if (per_class < 1) throw Error("per-class count must be at least 1");
    if (!(noise >= 0.0 && noise < 1.0)) throw Error("noise must lie in [0, 1)");
    auto rng = make_rng(seed, detail::kSynthStream);
    std::vector<SyntheticPage> pages;
    pages.reserve(per_class * kNumClasses);
    for (auto c : kAllClasses) {
        const auto proto = prototypes[index_of(c)].as_array();
        for (std::uint64_t i = 0; i < per_class; ++i) {
            std::array<double, 5> v{};
            for (std::size_t f = 0; f < 5; ++f) {
                v[f] = std::clamp(proto[f] + uniform(rng, -noise, noise), 0.0, 1.0);
            }
            const auto counts = realize_counts(FeatureVector::from_array(v), cfg);
            char idbuf[64];
            std::snprintf(idbuf, sizeof idbuf, "%s-%04llu", detail::lower_name(c).c_str(),
                          static_cast<unsigned long long>(i));
            SyntheticPage page;
            page.id = idbuf;
            const std::string site = page.id + ".com";
            page.url = "http://www." + site + "/";
            page.label = c;
            page.intended = features_of(counts, cfg);
            page.html = synthesize_html(counts, c, site);
            pages.push_back(std::move(page));
        }
    }
    return pages;
}

/// Writes manifest.tsv, pages/<id>.html and features.tsv under dir.
inline void write_synthetic_corpus(const fs::path& dir, std::span<const SyntheticPage> pages) {
    fs::create_directories(dir / "pages");
    std::string manifest;
    std::string features;
    for (const auto& p : pages) {
        const std::string rel = "pages/" + p.id + ".html";
        write_text_file(dir / rel, p.html);
        manifest += p.id + '\t' + p.url + '\t' + rel + '\t' + std::string(class_name(p.label)) +
                    '\n';
        features += format_feature_row({p.url, p.intended, p.label}) + '\n';
    }
    write_text_file(dir / "manifest.tsv", manifest);
    write_text_file(dir / "features.tsv", features);
}

}  // namespace pagesort
