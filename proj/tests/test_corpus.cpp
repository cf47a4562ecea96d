#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pagesort/corpus.hpp"
#include "pagesort/pipeline.hpp"
#include "test_support.hpp"

using namespace pagesort;
using pagesort::test_util::slurp;
using pagesort::test_util::spit;
using pagesort::test_util::TempDir;

namespace {

std::vector<Sample> labeled(std::size_t per_class_base, bool uneven) {
    std::vector<Sample> out;
    for (auto c : kAllClasses) {
        const auto n = per_class_base + (uneven ? index_of(c) * 3 : 0);
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back({FeatureVector{static_cast<double>(out.size()) / 1e4, 0, 0, 0, 0}, c});
        }
    }
    return out;
}

}  // namespace

// --- manifests ---------------------------------------------------------------

TEST(Manifest, LoadsThreePages) {
    TempDir dir;
    spit(dir / "pages/a.html", "<p>a</p>");
    spit(dir / "pages/b.html", "<p>b</p>");
    spit(dir / "c.html", "<p>c</p>");
    spit(dir / "manifest.tsv",
         "# id\turl\tpath\tclass\n"
         "a\thttp://a.com/\tpages/a.html\tSports\n"
         "b\thttp://www.b.co.uk/x\tpages/b.html\tNewsMedia\r\n"
         "\n"
         "c\thttps://c.org/\tc.html\tScience\n");
    const auto pages = load_manifest(dir / "manifest.tsv");
    ASSERT_EQ(pages.size(), 3u);
    EXPECT_EQ(pages[0].id, "a");
    EXPECT_EQ(pages[0].label, ClassLabel::Sports);
    EXPECT_EQ(pages[1].origin.registrable_domain, "b.co.uk");
    EXPECT_EQ(pages[1].label, ClassLabel::NewsMedia);
    EXPECT_EQ(pages[2].html_path, dir / "c.html");
}

TEST(Manifest, EmptyFileIsValid) {
    TempDir dir;
    spit(dir / "m.tsv", "");
    EXPECT_TRUE(load_manifest(dir / "m.tsv").empty());
}

TEST(Manifest, UnknownClassNamesLineAndChoices) {
    try {
        parse_manifest("x\thttp://a.com/\tx.html\tSports\ny\thttp://b.com/\ty.html\tFoo\n", "/",
                       "m.tsv", false);
        FAIL();
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("m.tsv:2"), std::string::npos) << msg;
        for (auto c : kAllClasses) EXPECT_NE(msg.find(class_name(c)), std::string::npos) << msg;
    }
}

TEST(Manifest, Errors) {
    EXPECT_THROW(parse_manifest("a\thttp://a.com/\ta.html\n", "/", "m", false), ParseError);
    EXPECT_THROW(parse_manifest("a\thttp://a.com/\ta.html\tSports\n"
                                "a\thttp://b.com/\tb.html\tSports\n",
                                "/", "m", false),
                 ParseError);
    EXPECT_THROW(parse_manifest("a\tnot a url\ta.html\tSports\n", "/", "m", false), ParseError);
    EXPECT_THROW(parse_manifest("a\thttp://a.com/\t/nonexistent/a.html\tSports\n", "/", "m", true),
                 ParseError);
    EXPECT_THROW(load_manifest("/nonexistent/manifest.tsv"), IoError);
}

TEST(Manifest, RoundTrip) {
    TempDir dir;
    spit(dir / "p/1.html", "");
    spit(dir / "p/2.html", "");
    spit(dir / "m.tsv",
         "one\thttp://a.com/\tp/1.html\tGovernment\ntwo\thttp://b.com/\tp/2.html\tEducation\n");
    const auto pages = load_manifest(dir / "m.tsv");
    spit(dir / "m2.tsv", format_manifest(pages));
    EXPECT_EQ(load_manifest(dir / "m2.tsv"), pages);
}

// --- split -------------------------------------------------------------------

TEST(Split, FiveHundredAtForty) {
    const auto pages = synth_generate(63, 0.05, 42);
    const std::vector<SyntheticPage> five_hundred(pages.begin(), pages.begin() + 500);
    for (bool stratified : {true, false}) {
        const auto s = split(five_hundred, SplitSpec{0.4, 42, stratified});
        EXPECT_EQ(s.train.size(), 200u);
        EXPECT_EQ(s.test.size(), 300u);
    }
}

TEST(Split, TenOfOneClass) {
    std::vector<Sample> data(10, Sample{FeatureVector{}, ClassLabel::Sports});
    const auto s = split(data, SplitSpec{});
    EXPECT_EQ(s.train.size(), 4u);
    EXPECT_EQ(s.test.size(), 6u);
}

TEST(Split, SameSeedSamePartition) {
    const auto data = labeled(20, true);
    const auto a = split(data, SplitSpec{0.4, 7, true});
    const auto b = split(data, SplitSpec{0.4, 7, true});
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    const auto c = split(data, SplitSpec{0.4, 8, true});
    EXPECT_NE(a.train, c.train);
}

TEST(Split, Errors) {
    EXPECT_THROW(split(std::vector<Sample>{}, SplitSpec{}), Error);
    std::vector<Sample> one(1);
    EXPECT_THROW(split(one, SplitSpec{0.0, 1, true}), Error);
    EXPECT_THROW(split(one, SplitSpec{1.0, 1, true}), Error);
}

// --- prototypes --------------------------------------------------------------

TEST(Prototypes, BundledFileMatchesDefault) {
    const auto table = load_prototypes(std::string(PAGESORT_DATA_DIR) + "/prototypes.tsv");
    EXPECT_EQ(table, default_prototypes());
}

TEST(Prototypes, DistinctAndRealizable) {
    const auto& t = default_prototypes();
    for (std::size_t a = 0; a < kNumClasses; ++a) {
        for (std::size_t b = a + 1; b < kNumClasses; ++b) EXPECT_NE(t[a], t[b]);
        EXPECT_EQ(snap_to_realizable(t[a]), t[a]) << a;
    }
}

TEST(Prototypes, Errors) {
    EXPECT_THROW(parse_prototypes("Sports\t0.1\t0.2\t0.3\t0.4\t0.5\n"), ParseError);
    std::string text(kDefaultPrototypesText);
    EXPECT_THROW(parse_prototypes(text + "Sports\t0\t0\t0\t0\t0\n"), ParseError);
    auto bad_dyn = text;
    bad_dyn.replace(bad_dyn.find("0.2\n"), 3, "0.25");
    EXPECT_THROW(parse_prototypes(bad_dyn), ParseError);
}

// --- synthetic corpus --------------------------------------------------------

TEST(Synth, SizeAndOrder) {
    const auto pages = synth_generate(25, 0.05, 42);
    ASSERT_EQ(pages.size(), 200u);
    EXPECT_EQ(pages[0].label, ClassLabel::BusinessEconomy);
    EXPECT_EQ(pages[199].label, ClassLabel::Science);
    std::set<std::string> ids;
    for (const auto& p : pages) ids.insert(p.id);
    EXPECT_EQ(ids.size(), 200u);
}

TEST(Synth, ZeroNoiseGivesPrototypes) {
    for (const auto& p : synth_generate(3, 0.0, 5)) {
        EXPECT_EQ(p.intended, default_prototypes()[index_of(p.label)]) << p.id;
    }
}

TEST(Synth, Deterministic) {
    const auto a = synth_generate(4, 0.2, 99);
    const auto b = synth_generate(4, 0.2, 99);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].html, b[i].html);
        EXPECT_EQ(a[i].intended, b[i].intended);
    }
    const auto c = synth_generate(4, 0.2, 100);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].html != c[i].html;
    EXPECT_TRUE(differs);
}

TEST(Synth, NoiseStaysNearPrototype) {
    for (const auto& p : synth_generate(10, 0.1, 3)) {
        const auto got = p.intended.as_array();
        const auto proto = default_prototypes()[index_of(p.label)].as_array();
        for (std::size_t f = 0; f < 5; ++f) {
            EXPECT_GE(got[f], 0.0);
            EXPECT_LE(got[f], 1.0);
            EXPECT_LE(std::abs(got[f] - proto[f]), 0.1 + 0.1) << p.id << " feature " << f;
        }
    }
}

TEST(Synth, HtmlRoundTripWithinTenth) {
    for (double noise : {0.0, 0.05, 0.25, 0.6}) {
        for (const auto& p : synth_generate(6, noise, 11)) {
            const auto stats =
                extract_stats(p.html, PageOrigin::from_url(p.url), default_lexicon());
            const auto got = to_feature_vector(stats).as_array();
            const auto want = p.intended.as_array();
            for (std::size_t f = 0; f < 5; ++f) {
                EXPECT_LE(std::abs(got[f] - want[f]), 0.1) << p.id << " feature " << f;
            }
        }
    }
}

TEST(Synth, Errors) {
    EXPECT_THROW(synth_generate(0, 0.1, 1), Error);
    EXPECT_THROW(synth_generate(1, 1.0, 1), Error);
    EXPECT_THROW(synth_generate(1, -0.1, 1), Error);
}

TEST(Synth, WrittenCorpusLoads) {
    TempDir dir;
    const auto pages = synth_generate(2, 0.1, 8);
    write_synthetic_corpus(dir.path(), pages);
    const auto manifest = load_manifest(dir / "manifest.tsv");
    ASSERT_EQ(manifest.size(), pages.size());
    const auto rows = load_feature_rows((dir / "features.tsv").string());
    ASSERT_EQ(rows.size(), pages.size());
    for (std::size_t i = 0; i < pages.size(); ++i) {
        EXPECT_EQ(manifest[i].id, pages[i].id);
        EXPECT_EQ(slurp(manifest[i].html_path), pages[i].html);
        EXPECT_EQ(rows[i].label, pages[i].label);
    }
}
