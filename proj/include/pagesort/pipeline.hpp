#pragma once

// Glue between the stages: manifest -> feature rows -> labeled samples.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pagesort/corpus.hpp"
#include "pagesort/features.hpp"
#include "pagesort/lexicon.hpp"
#include "pagesort/mlp.hpp"

namespace pagesort {

struct ExtractionSettings {
    BuzzwordLexicon lexicon = default_lexicon();
    FeatureConfig config;
};

struct PageFailure {
    std::string id;
    std::string message;
};

struct ExtractionResult {
    std::vector<FeatureRow> rows;  // successful pages, manifest order
    std::vector<PageFailure> failures;
};

inline std::string read_html_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) {
        throw IoError("html file not found: " + path.string());
    }
    return detail::read_file(path.string());
}

inline FeatureRow extract_page(const LabeledPage& page, const ExtractionSettings& settings) {
    const auto html_src = read_html_file(page.html_path);
    const auto stats = extract_stats(html_src, page.origin, settings.lexicon, settings.config);
    return {page.origin.url, to_feature_vector(stats, settings.config), page.label};
}

/// Extracts every page; unreadable pages are reported, not fatal.
inline ExtractionResult extract_pages(std::span<const LabeledPage> pages,
                                      const ExtractionSettings& settings) {
    ExtractionResult out;
    out.rows.reserve(pages.size());
    for (const auto& page : pages) {
        try {
            out.rows.push_back(extract_page(page, settings));
        } catch (const std::exception& e) {
            out.failures.push_back({page.id, e.what()});
        }
    }
    return out;
}

inline std::vector<Sample> to_samples(std::span<const FeatureRow> rows,
                                      const std::string& source = "<features>") {
    std::vector<Sample> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].label) {
            throw Error(source + ": row " + std::to_string(i + 1) + " (" + rows[i].url +
                        ") has no class label");
        }
        out.push_back({rows[i].features, *rows[i].label});
    }
    return out;
}

/// True when the first data line has the 4-column manifest shape.
inline bool looks_like_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
        detail::strip_cr(line);
        if (html::trim(line).empty() || line.front() == '#') continue;
        return detail::split_tabs(line).size() == 4;
    }
    return false;
}

/// Labeled samples from either a manifest (extracted on the fly) or a
/// labeled feature file.
inline std::vector<Sample> load_samples(const std::filesystem::path& path,
                                        const ExtractionSettings& settings) {
    if (!std::filesystem::exists(path)) throw IoError("file not found: '" + path.string() + "'");
    if (looks_like_manifest(path)) {
        const auto pages = load_manifest(path);
        auto result = extract_pages(pages, settings);
        if (!result.failures.empty()) {
            std::string msg = "extraction failed for " +
                              std::to_string(result.failures.size()) + " page(s):";
            for (const auto& f : result.failures) msg += "\n  " + f.id + ": " + f.message;
            throw Error(msg);
        }
        return to_samples(result.rows, path.string());
    }
    const auto rows = load_feature_rows(path.string());
    return to_samples(rows, path.string());
}

}  // namespace pagesort
