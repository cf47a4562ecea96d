#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "pagesort/lexicon.hpp"
#include "test_support.hpp"

using namespace pagesort;

namespace {

bool has(const BuzzwordLexicon& lex, ClassLabel c, const std::string& w) {
    const auto& words = lex.words(c);
    return std::find(words.begin(), words.end(), w) != words.end();
}

}  // namespace

TEST(Lexicon, DefaultCoversAllClasses) {
    const auto& lex = default_lexicon();
    for (auto c : kAllClasses) EXPECT_FALSE(lex.words(c).empty()) << class_name(c);
    EXPECT_TRUE(has(lex, ClassLabel::Education, "career"));
    EXPECT_TRUE(has(lex, ClassLabel::JobSearch, "career"));
    EXPECT_TRUE(has(lex, ClassLabel::Science, "research"));
    EXPECT_TRUE(has(lex, ClassLabel::Education, "research"));
    EXPECT_TRUE(has(lex, ClassLabel::BusinessEconomy, "offer"));
    EXPECT_TRUE(has(lex, ClassLabel::JobSearch, "offer"));
    EXPECT_TRUE(has(lex, ClassLabel::NewsMedia, "affairs"));
    EXPECT_TRUE(has(lex, ClassLabel::Sports, "scores"));
}

TEST(Lexicon, DuplicateWithinClassCollapsed) {
    const auto& words = default_lexicon().words(ClassLabel::BusinessEconomy);
    EXPECT_EQ(std::count(words.begin(), words.end(), "trade"), 1);
}

TEST(Lexicon, BundledFileMatchesDefault) {
    const auto path = std::string(PAGESORT_DATA_DIR) + "/lexicon.txt";
    EXPECT_EQ(load_lexicon(path), default_lexicon());
}

TEST(Lexicon, ParseNormalizesWords) {
    std::string text;
    for (auto c : kAllClasses) text += std::string(class_name(c)) + ": Alpha, beta.\n";
    const auto lex = parse_lexicon(text);
    EXPECT_TRUE(has(lex, ClassLabel::Science, "alpha"));
    EXPECT_TRUE(has(lex, ClassLabel::Science, "beta"));
}

TEST(Lexicon, RejectsUnknownClass) {
    try {
        parse_lexicon("Foo: bar\n", "lex.txt");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("lex.txt:1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("BusinessEconomy"), std::string::npos) << msg;
    }
}

TEST(Lexicon, RejectsMissingOrRepeatedClass) {
    EXPECT_THROW(parse_lexicon("Science: science\n"), ParseError);
    std::string text;
    for (auto c : kAllClasses) text += std::string(class_name(c)) + ": w\n";
    EXPECT_THROW(parse_lexicon(text + "Science: again\n"), ParseError);
}

TEST(Lexicon, RejectsBadWords) {
    std::string text;
    for (auto c : kAllClasses) text += std::string(class_name(c)) + ": w\n";
    EXPECT_THROW(parse_lexicon(text.replace(text.find(": w"), 3, ": two words")), ParseError);
    PerClass<std::vector<std::string>> entries;
    entries[0] = {"Upper"};
    EXPECT_THROW(BuzzwordLexicon{entries}, Error);
}

TEST(Lexicon, MissingFile) { EXPECT_THROW(load_lexicon("/nonexistent/lexicon.txt"), IoError); }
