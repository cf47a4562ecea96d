#pragma once

// Class-indicative buzzword lists and their text file format:
//   <ClassName>: word, word, ...

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pagesort/class_label.hpp"
#include "pagesort/error.hpp"
#include "pagesort/html.hpp"

namespace pagesort {

class BuzzwordLexicon {
public:
    /// Throws Error if any word is empty, contains whitespace or uppercase.
    explicit BuzzwordLexicon(PerClass<std::vector<std::string>> entries)
        : entries_(std::move(entries)) {
        for (auto c : kAllClasses) {
            auto& words = entries_[index_of(c)];
            for (const auto& w : words) validate_word(w, c);
            // Keep first-seen order but drop repeats within a class.
            std::vector<std::string> unique;
            for (auto& w : words) {
                if (std::find(unique.begin(), unique.end(), w) == unique.end()) {
                    unique.push_back(std::move(w));
                }
            }
            words = std::move(unique);
        }
    }

    const std::vector<std::string>& words(ClassLabel c) const noexcept {
        return entries_[index_of(c)];
    }

    friend bool operator==(const BuzzwordLexicon&, const BuzzwordLexicon&) = default;

private:
    static void validate_word(const std::string& w, ClassLabel c) {
        if (w.empty()) {
            throw Error("empty buzzword for class " + std::string(class_name(c)));
        }
        for (char ch : w) {
            if (html::is_space(ch) || (ch >= 'A' && ch <= 'Z')) {
                throw Error("buzzword '" + w + "' for class " + std::string(class_name(c)) +
                            " must be lowercase without whitespace");
            }
        }
    }

    PerClass<std::vector<std::string>> entries_;
};

/// Text of the bundled lexicon file (identical to data/lexicon.txt).
inline constexpr std::string_view kDefaultLexiconText =
    "# Selected buzzwords, one class per line.\n"
    "BusinessEconomy: business, trade, investment, credit, cash, trade, commerce, loan, "
    "support, product, service, offer\n"
    "Education: career, student, faculty, degree, graduate, education, research, admission, "
    "prospects\n"
    "Government: policy, ministry, president, government, activity\n"
    "NewsMedia: news, media, editor, culture, archives, latest, update, current, affairs\n"
    "Entertainment: music, entertainment, dating, fun, love, artist, free, match, friendship\n"
    "Science: science, research, technology\n"
    "Sports: team, sports, matches, schedule, scores\n"
    "JobSearch: career, experience, job, seek, vacancy, resume, application, location, "
    "employment, offer\n";

/// Parses the lexicon format. Words are lowercased and trailing periods
/// dropped; every class must appear exactly once. `source` names the input
/// in error messages.
inline BuzzwordLexicon parse_lexicon(std::string_view text,
                                     const std::string& source = "<lexicon>") {
    PerClass<std::vector<std::string>> entries;
    PerClass<bool> seen{};
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = html::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto colon = body.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError(source, lineno, "expected '<ClassName>: word, word, ...'");
        }
        const auto name = html::trim(body.substr(0, colon));
        const auto label = parse_class_name(name);
        if (!label) {
            throw ParseError(source, lineno,
                             "unknown class '" + std::string(name) +
                                 "'; valid classes: " + valid_class_names());
        }
        if (seen[index_of(*label)]) {
            throw ParseError(source, lineno, "class '" + std::string(name) + "' listed twice");
        }
        seen[index_of(*label)] = true;
        auto rest = body.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            auto word = html::trim(rest.substr(0, comma));
            while (!word.empty() && word.back() == '.') word.remove_suffix(1);
            if (!word.empty()) {
                for (char ch : word) {
                    if (html::is_space(ch)) {
                        throw ParseError(source, lineno,
                                         "buzzword '" + std::string(word) +
                                             "' contains whitespace");
                    }
                }
                entries[index_of(*label)].push_back(html::to_lower(word));
            }
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    for (auto c : kAllClasses) {
        if (!seen[index_of(c)]) {
            throw ParseError(source, lineno,
                             "class '" + std::string(class_name(c)) + "' missing from lexicon");
        }
    }
    return BuzzwordLexicon(std::move(entries));
}

inline const BuzzwordLexicon& default_lexicon() {
    static const BuzzwordLexicon lexicon = parse_lexicon(kDefaultLexiconText, "<default>");
    return lexicon;
}

inline BuzzwordLexicon load_lexicon(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_lexicon(ss.str(), path);
}

}  // namespace pagesort
