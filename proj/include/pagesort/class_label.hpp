#pragma once

// The eight page categories and their 3-bit output codes.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pagesort/error.hpp"

namespace pagesort {

/// Enumerator values equal the 3-bit output pattern read MSB first, so
/// output neuron 0 carries bit 2 of the value.
enum class ClassLabel : std::uint8_t {
    BusinessEconomy = 0b000,
    Education = 0b001,
    Government = 0b010,
    NewsMedia = 0b011,
    Sports = 0b100,
    JobSearch = 0b101,
    Entertainment = 0b110,
    Science = 0b111,
};

inline constexpr std::size_t kNumClasses = 8;

inline constexpr std::array<ClassLabel, kNumClasses> kAllClasses = {
    ClassLabel::BusinessEconomy, ClassLabel::Education, ClassLabel::Government,
    ClassLabel::NewsMedia,       ClassLabel::Sports,    ClassLabel::JobSearch,
    ClassLabel::Entertainment,   ClassLabel::Science,
};

using ClassBits = std::array<std::uint8_t, 3>;

constexpr std::size_t index_of(ClassLabel c) noexcept {
    return static_cast<std::size_t>(c);
}

constexpr ClassBits bits_of(ClassLabel c) noexcept {
    const auto v = static_cast<std::uint8_t>(c);
    return {static_cast<std::uint8_t>((v >> 2) & 1u),
            static_cast<std::uint8_t>((v >> 1) & 1u),
            static_cast<std::uint8_t>(v & 1u)};
}

constexpr ClassLabel label_from_bits(const ClassBits& bits) noexcept {
    return static_cast<ClassLabel>(((bits[0] & 1u) << 2) | ((bits[1] & 1u) << 1) |
                                   (bits[2] & 1u));
}

/// Canonical machine name, as used in manifests, lexicons and feature files.
constexpr std::string_view class_name(ClassLabel c) noexcept {
    constexpr std::array<std::string_view, kNumClasses> names = {
        "BusinessEconomy", "Education", "Government",    "NewsMedia",
        "Sports",          "JobSearch", "Entertainment", "Science",
    };
    return names[index_of(c)];
}

/// Human-facing name used in the table report.
constexpr std::string_view display_name(ClassLabel c) noexcept {
    constexpr std::array<std::string_view, kNumClasses> names = {
        "Business & Economy", "Education",  "Government",    "News & Media",
        "Sports",             "Job Search", "Entertainment", "Science",
    };
    return names[index_of(c)];
}

constexpr std::optional<ClassLabel> parse_class_name(std::string_view name) noexcept {
    for (auto c : kAllClasses) {
        if (class_name(c) == name) return c;
    }
    return std::nullopt;
}

inline std::string valid_class_names() {
    std::string out;
    for (auto c : kAllClasses) {
        if (!out.empty()) out += ", ";
        out += class_name(c);
    }
    return out;
}

/// Fixed-size table indexed by class.
template <typename T>
using PerClass = std::array<T, kNumClasses>;

}  // namespace pagesort
