#pragma once

// Per-class right/wrong scoring with a full confusion matrix, rendered as a
// table, a TSV document or JSON.

#include <algorithm>
#include <charconv>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pagesort/class_label.hpp"
#include "pagesort/error.hpp"
#include "pagesort/features.hpp"
#include "pagesort/mlp.hpp"

namespace pagesort {

using ConfusionMatrix = PerClass<PerClass<std::uint64_t>>;  // [true][predicted]

struct EvalReport {
    std::string set_name;
    PerClass<std::uint64_t> right{};  // keyed by true label
    PerClass<std::uint64_t> wrong{};
    ConfusionMatrix confusion{};

    std::uint64_t total_right() const noexcept {
        std::uint64_t n = 0;
        for (auto v : right) n += v;
        return n;
    }

    std::uint64_t total_wrong() const noexcept {
        std::uint64_t n = 0;
        for (auto v : wrong) n += v;
        return n;
    }

    double accuracy() const noexcept {
        const auto total = total_right() + total_wrong();
        return total == 0 ? 0.0
                          : static_cast<double>(total_right()) / static_cast<double>(total);
    }

    /// A report holding only per-class right/wrong tallies. The confusion
    /// matrix gets the diagonal; misclassifications have no known target
    /// and are left out of it.
    static EvalReport from_counts(const PerClass<std::uint64_t>& right,
                                  const PerClass<std::uint64_t>& wrong,
                                  std::string set_name = {}) {
        EvalReport r;
        r.set_name = std::move(set_name);
        r.right = right;
        r.wrong = wrong;
        for (std::size_t c = 0; c < kNumClasses; ++c) r.confusion[c][c] = right[c];
        return r;
    }

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

template <typename P>
concept Predictor = requires(const P& p, const FeatureVector& x) {
    { p(x) } -> std::convertible_to<ClassLabel>;
};

template <Predictor P>
EvalReport evaluate(const P& predictor, std::span<const Sample> data, std::string set_name = {}) {
    if (data.empty()) throw Error("empty evaluation set");
    EvalReport r;
    r.set_name = std::move(set_name);
    for (const auto& s : data) {
        const ClassLabel predicted = predictor(s.features);
        const auto t = index_of(s.label);
        ++r.confusion[t][index_of(predicted)];
        if (predicted == s.label) {
            ++r.right[t];
        } else {
            ++r.wrong[t];
        }
    }
    return r;
}

inline EvalReport evaluate(const Network& net, std::span<const Sample> data,
                           std::string set_name = {}) {
    return evaluate([&net](const FeatureVector& x) { return predict(net, x).label; }, data,
                    std::move(set_name));
}

// ---------------------------------------------------------------------------
// Rendering

enum class ReportFormat { Table, Tsv, Json };

namespace detail {

inline std::string format_accuracy(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", a);
    return buf;
}

inline std::string pad_right(std::string_view s, std::size_t width) {
    std::string out(s);
    if (out.size() < width) out.append(width - out.size(), ' ');
    return out;
}

inline std::string pad_left(std::string_view s, std::size_t width) {
    std::string out;
    if (s.size() < width) out.append(width - s.size(), ' ');
    out += s;
    return out;
}

inline std::string render_table(const EvalReport& r) {
    std::size_t name_w = std::string_view("Types of pages").size();
    for (auto c : kAllClasses) name_w = std::max(name_w, display_name(c).size());
    std::size_t num_w = 1;
    auto widen = [&](std::uint64_t v) { num_w = std::max(num_w, std::to_string(v).size()); };
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        widen(r.right[c]);
        widen(r.wrong[c]);
    }
    widen(r.total_right());
    widen(r.total_wrong());

    std::string out;
    if (!r.set_name.empty()) out += "Evaluation set: " + r.set_name + "\n";
    out += pad_right("Types of pages", name_w) + "  right  wrong\n";
    auto row = [&](std::string_view name, std::uint64_t right, std::uint64_t wrong) {
        out += pad_right(name, name_w) + "  " + pad_left(std::to_string(right), num_w) + "  " +
               pad_left(std::to_string(wrong), num_w) + "\n";
    };
    for (auto c : kAllClasses) row(display_name(c), r.right[index_of(c)], r.wrong[index_of(c)]);
    row("Total", r.total_right(), r.total_wrong());
    out += "Accuracy: " + format_accuracy(r.accuracy()) + "\n";
    return out;
}

inline std::string render_tsv(const EvalReport& r) {
    std::string out;
    if (!r.set_name.empty()) out += "# set=" + r.set_name + "\n";
    out += "class\tright\twrong\n";
    for (auto c : kAllClasses) {
        out += std::string(class_name(c)) + '\t' + std::to_string(r.right[index_of(c)]) + '\t' +
               std::to_string(r.wrong[index_of(c)]) + '\n';
    }
    out += "TOTAL\t" + std::to_string(r.total_right()) + '\t' + std::to_string(r.total_wrong()) +
           '\n';
    for (auto t : kAllClasses) {
        out += "# confusion\t" + std::string(class_name(t));
        for (auto p : kAllClasses) {
            out += '\t' + std::to_string(r.confusion[index_of(t)][index_of(p)]);
        }
        out += '\n';
    }
    out += "# accuracy=" + format_accuracy(r.accuracy()) + "\n";
    return out;
}

inline std::string render_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["set"] = r.set_name;
    auto classes = nlohmann::ordered_json::array();
    for (auto c : kAllClasses) {
        classes.push_back({{"class", class_name(c)},
                           {"right", r.right[index_of(c)]},
                           {"wrong", r.wrong[index_of(c)]}});
    }
    j["classes"] = std::move(classes);
    j["total_right"] = r.total_right();
    j["total_wrong"] = r.total_wrong();
    j["accuracy"] = std::stod(format_accuracy(r.accuracy()));
    auto matrix = nlohmann::ordered_json::array();
    for (const auto& row : r.confusion) matrix.push_back(row);
    j["confusion"] = std::move(matrix);
    return j.dump(2) + "\n";
}

}  // namespace detail

inline std::string render_report(const EvalReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::Table: return detail::render_table(r);
        case ReportFormat::Tsv: return detail::render_tsv(r);
        case ReportFormat::Json: return detail::render_json(r);
    }
    return {};
}

/// Inverse of render_report(r, ReportFormat::Tsv).
inline EvalReport parse_report_tsv(std::string_view text, const std::string& source = "<report>") {
    EvalReport r;
    PerClass<bool> seen{};
    PerClass<bool> seen_confusion{};
    bool header = false;
    bool total = false;
    std::uint64_t total_right = 0, total_wrong = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    auto parse_count = [&](std::string_view s) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
            throw ParseError(source, lineno, "bad count '" + std::string(s) + "'");
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        detail::strip_cr(line);
        if (line.empty()) continue;
        if (line.rfind("# set=", 0) == 0) {
            r.set_name = line.substr(6);
            continue;
        }
        if (line.rfind("# confusion\t", 0) == 0) {
            const auto cols = detail::split_tabs(std::string_view(line).substr(12));
            if (cols.size() != 1 + kNumClasses) {
                throw ParseError(source, lineno, "confusion row needs a class and 8 counts");
            }
            const auto t = parse_class_name(cols[0]);
            if (!t) throw ParseError(source, lineno, "unknown class '" + std::string(cols[0]) + "'");
            seen_confusion[index_of(*t)] = true;
            for (std::size_t p = 0; p < kNumClasses; ++p) {
                r.confusion[index_of(*t)][p] = parse_count(cols[p + 1]);
            }
            continue;
        }
        if (line.front() == '#') continue;
        const auto cols = detail::split_tabs(line);
        if (cols.size() != 3) throw ParseError(source, lineno, "expected 3 tab-separated columns");
        if (!header) {
            if (cols[0] != "class" || cols[1] != "right" || cols[2] != "wrong") {
                throw ParseError(source, lineno, "expected header 'class\\tright\\twrong'");
            }
            header = true;
            continue;
        }
        if (cols[0] == "TOTAL") {
            total = true;
            total_right = parse_count(cols[1]);
            total_wrong = parse_count(cols[2]);
            continue;
        }
        const auto c = parse_class_name(cols[0]);
        if (!c) throw ParseError(source, lineno, "unknown class '" + std::string(cols[0]) + "'");
        if (seen[index_of(*c)]) throw ParseError(source, lineno, "class listed twice");
        seen[index_of(*c)] = true;
        r.right[index_of(*c)] = parse_count(cols[1]);
        r.wrong[index_of(*c)] = parse_count(cols[2]);
    }
    if (!header) throw ParseError(source, lineno, "missing header line");
    for (auto c : kAllClasses) {
        if (!seen[index_of(c)]) {
            throw ParseError(source, lineno, "missing row for class " + std::string(class_name(c)));
        }
    }
    if (!total) throw ParseError(source, lineno, "missing TOTAL row");
    if (total_right != r.total_right() || total_wrong != r.total_wrong()) {
        throw ParseError(source, lineno, "TOTAL row does not match the class rows");
    }
    const bool any_confusion =
        std::any_of(seen_confusion.begin(), seen_confusion.end(), [](bool b) { return b; });
    if (!any_confusion) {
        for (std::size_t c = 0; c < kNumClasses; ++c) r.confusion[c][c] = r.right[c];
    }
    return r;
}

}  // namespace pagesort
