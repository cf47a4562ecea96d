#include <gtest/gtest.h>

#include <string>

#include "golden.hpp"

using namespace pagesort;
using pagesort::test_util::load_golden;

namespace {

class GoldenFixture : public ::testing::TestWithParam<const char*> {};

}  // namespace

TEST_P(GoldenFixture, StatsAndFeaturesBitExact) {
    const std::string name = GetParam();
    const auto g = load_golden(name);
    const auto html_src = test_util::slurp(test_util::fixture_path(name + ".html"));
    const auto stats = extract_stats(html_src, PageOrigin::from_url(g.origin), default_lexicon());
    EXPECT_EQ(stats, g.stats);
    EXPECT_EQ(stats.internal_links, g.stats.internal_links);
    EXPECT_EQ(stats.external_links, g.stats.external_links);
    EXPECT_EQ(stats.dynamic_internal_links, g.stats.dynamic_internal_links);
    EXPECT_EQ(stats.image_count, g.stats.image_count);
    EXPECT_EQ(stats.declared_image_area, g.stats.declared_image_area);
    EXPECT_EQ(stats.animation_count, g.stats.animation_count);
    EXPECT_EQ(stats.total_words, g.stats.total_words);
    EXPECT_EQ(stats.buzzword_hits, g.stats.buzzword_hits);

    const auto x = to_feature_vector(stats);
    const auto want = g.features.as_array();
    const auto got = x.as_array();
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(got[i], want[i]) << "feature " << i;
}

INSTANTIATE_TEST_SUITE_P(Fixtures, GoldenFixture,
                         ::testing::ValuesIn(pagesort::test_util::kGoldenFixtures));
