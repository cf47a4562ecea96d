#include <gtest/gtest.h>

#include <json.hpp>

#include "pagesort/evaluation.hpp"

using namespace pagesort;

namespace {

// Per-class right/wrong from the published results table, in class order.
EvalReport published_counts() {
    const PerClass<std::uint64_t> right = {35, 23, 12, 29, 18, 26, 31, 38};
    const PerClass<std::uint64_t> wrong = {14, 6, 8, 5, 7, 11, 18, 19};
    return EvalReport::from_counts(right, wrong, "unknown");
}

std::vector<Sample> one_per_class() {
    std::vector<Sample> out;
    for (auto c : kAllClasses) out.push_back({FeatureVector{}, c});
    return out;
}

}  // namespace

TEST(Evaluate, PerfectPredictor) {
    const auto data = one_per_class();
    const auto r = evaluate([&](const FeatureVector&) { return ClassLabel::Science; },
                            std::span<const Sample>(data.end() - 1, data.end()));
    EXPECT_EQ(r.accuracy(), 1.0);

    std::size_t i = 0;
    const auto oracle = evaluate([&](const FeatureVector&) { return data[i++].label; }, data);
    EXPECT_EQ(oracle.accuracy(), 1.0);
    for (std::size_t t = 0; t < kNumClasses; ++t) {
        for (std::size_t p = 0; p < kNumClasses; ++p) {
            EXPECT_EQ(oracle.confusion[t][p], t == p ? 1u : 0u);
        }
    }
}

TEST(Evaluate, SingleWrong) {
    const std::vector<Sample> data = {{FeatureVector{}, ClassLabel::Sports}};
    const auto r = evaluate([](const FeatureVector&) { return ClassLabel::Government; }, data);
    EXPECT_EQ(r.accuracy(), 0.0);
    EXPECT_EQ(r.wrong[index_of(ClassLabel::Sports)], 1u);
    EXPECT_EQ(r.confusion[index_of(ClassLabel::Sports)][index_of(ClassLabel::Government)], 1u);
}

TEST(Evaluate, EmptySet) {
    EXPECT_THROW(evaluate(Network{}, std::span<const Sample>{}), Error);
}

TEST(Evaluate, NetworkOverload) {
    // The zero network predicts Science for everything.
    const auto r = evaluate(Network{}, one_per_class());
    EXPECT_EQ(r.total_right(), 1u);
    EXPECT_EQ(r.total_wrong(), 7u);
    EXPECT_EQ(r.right[index_of(ClassLabel::Science)], 1u);
}

TEST(Report, PublishedTotals) {
    const auto r = published_counts();
    EXPECT_EQ(r.total_right(), 212u);
    EXPECT_EQ(r.total_wrong(), 88u);
    EXPECT_NEAR(r.accuracy(), 0.7067, 1e-4);
    const auto table = render_report(r, ReportFormat::Table);
    EXPECT_NE(table.find("Total" + std::string(15, ' ') + "212   88\n"), std::string::npos) << table;
    EXPECT_NE(table.find("Accuracy: 0.7067\n"), std::string::npos) << table;
}

TEST(Report, BusinessRow) {
    PerClass<std::uint64_t> right{}, wrong{};
    right[0] = 35;
    wrong[0] = 14;
    const auto table = render_report(EvalReport::from_counts(right, wrong), ReportFormat::Table);
    EXPECT_NE(table.find("Business & Economy  35  14"), std::string::npos) << table;
    EXPECT_NE(table.find("News & Media"), std::string::npos);
    EXPECT_NE(table.find("Job Search"), std::string::npos);
}

TEST(Report, TsvRoundTrip) {
    auto r = published_counts();
    r.confusion[0][3] = 14;
    EXPECT_EQ(parse_report_tsv(render_report(r, ReportFormat::Tsv)), r);

    const auto data = one_per_class();
    const auto e = evaluate(Network{}, data, "all");
    EXPECT_EQ(parse_report_tsv(render_report(e, ReportFormat::Tsv)), e);
}

TEST(Report, TsvWithoutConfusionUsesDiagonal) {
    std::string text = "class\tright\twrong\n";
    for (auto c : kAllClasses) text += std::string(class_name(c)) + "\t2\t1\n";
    text += "TOTAL\t16\t8\n";
    const auto r = parse_report_tsv(text);
    EXPECT_EQ(r.confusion[3][3], 2u);
    EXPECT_EQ(r.confusion[3][4], 0u);
}

TEST(Report, TsvErrors) {
    EXPECT_THROW(parse_report_tsv(""), ParseError);
    EXPECT_THROW(parse_report_tsv("class\tright\twrong\nSports\t1\t2\n"), ParseError);
    auto text = render_report(published_counts(), ReportFormat::Tsv);
    text.replace(text.find("TOTAL\t212"), 9, "TOTAL\t213");
    EXPECT_THROW(parse_report_tsv(text), ParseError);
}

TEST(Report, Json) {
    const auto j = nlohmann::json::parse(render_report(published_counts(), ReportFormat::Json));
    EXPECT_EQ(j["total_right"], 212);
    EXPECT_EQ(j["total_wrong"], 88);
    EXPECT_EQ(j["set"], "unknown");
    EXPECT_EQ(j["classes"].size(), 8u);
    EXPECT_EQ(j["classes"][0]["class"], "BusinessEconomy");
    EXPECT_EQ(j["classes"][0]["right"], 35);
    EXPECT_NEAR(j["accuracy"].get<double>(), 0.7067, 1e-9);
    EXPECT_EQ(j["confusion"].size(), 8u);
}
