// Seeded randomized checks of invariants that hold for all inputs.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "pagesort/pagesort.hpp"

using namespace pagesort;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 r(0x5eed);
    return r;
}

std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng()); }

double unit() { return std::uniform_real_distribution<double>(0, 1)(rng()); }

std::string random_bytes(std::size_t n) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(below(256));
    return s;
}

std::string random_markup(std::size_t pieces) {
    static const char* parts[] = {"<a href=\"/x.php?q=1\">", "</a>", "<img src=a.gif width=3 height=4>",
                                  "<script>news</script>", "<p>", "news ", "Career ", "JOB ",
                                  "<!-- c -->", "<", ">", "\"", "'", "=", "&amp;", "&#x41;",
                                  "<a href='http://other.org/'>", "<embed>", "<style>", "</style>",
                                  "\xff", " ", "<title>", "</title>", "sports", "<marquee>"};
    std::string s;
    for (std::size_t i = 0; i < pieces; ++i) s += parts[below(std::size(parts))];
    return s;
}

/// Toggles the case of ASCII letters outside tags at random.
std::string jumble_text_case(const std::string& text) {
    std::string out = text;
    for (auto& c : out) {
        if (std::isalpha(static_cast<unsigned char>(c)) && below(2)) {
            c = std::isupper(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c))
                                                            : static_cast<char>(std::toupper(c));
        }
    }
    return out;
}

bool in_unit(const FeatureVector& v) {
    for (double f : v.as_array()) {
        if (!(f >= 0.0 && f <= 1.0)) return false;
    }
    return true;
}

}  // namespace

TEST(Property, ExtractorTotalOnArbitraryBytes) {
    const auto origin = PageOrigin::from_url("http://www.site.com/");
    for (int i = 0; i < 300; ++i) {
        const auto src = i % 2 ? random_bytes(below(2000)) : random_markup(below(200));
        const auto stats = extract_stats(src, origin, default_lexicon());
        EXPECT_LE(stats.dynamic_internal_links, stats.internal_links);
        EXPECT_LE(stats.images_with_dims, stats.image_count);
        EXPECT_TRUE(in_unit(to_feature_vector(stats)));
        EXPECT_EQ(stats, extract_stats(src, origin, default_lexicon()));
    }
}

TEST(Property, BuzzwordCountsCaseInvariant) {
    for (int i = 0; i < 200; ++i) {
        std::string text;
        for (int w = 0; w < 30; ++w) {
            const auto c = kAllClasses[below(8)];
            const auto& words = default_lexicon().words(c);
            text += below(3) ? words[below(words.size())] : "filler";
            text += below(2) ? " " : ", ";
        }
        const auto base = count_buzzwords("<p>" + text + "</p>", default_lexicon());
        EXPECT_EQ(count_buzzwords("<P>" + jumble_text_case(text) + "</P>", default_lexicon()), base);
    }
}

TEST(Property, SaturatingNormalizersMonotoneInUnitRange) {
    for (std::uint64_t n = 0; n < 500; ++n) {
        RawPageStats a, b;
        a.image_count = n;
        b.image_count = n + 1;
        EXPECT_LT(normalize_images(a), normalize_images(b));
        EXPECT_LT(normalize_animation(n), normalize_animation(n + 1));
        EXPECT_LT(normalize_images(b), 1.0);
        EXPECT_GE(normalize_animation(n), 0.0);
    }
}

TEST(Property, LinkRatioMatchesRatioForm) {
    for (int i = 0; i < 2000; ++i) {
        const auto in = 1 + below(500), ex = 1 + below(500);
        const double r = static_cast<double>(ex) / static_cast<double>(in);
        const double v = normalize_link_ratio(in, ex);
        EXPECT_NEAR(v, r / (1.0 + r), 4e-16);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
        EXPECT_LT(normalize_link_ratio(in, ex), normalize_link_ratio(in, ex + 1));
        EXPECT_GT(normalize_link_ratio(in, ex), normalize_link_ratio(in + 1, ex));
    }
}

TEST(Property, DynamicBucketOracle) {
    // Smallest k with 10*d <= k*i, i.e. percentage <= 10k.
    for (int n = 0; n < 5000; ++n) {
        const auto i = 1 + below(400), d = 1 + below(i);
        std::uint64_t k = 1;
        while (10 * d > k * i) ++k;
        EXPECT_EQ(normalize_dynamic(d, i), kDynamicLevels[k]) << d << "/" << i;
    }
}

TEST(Property, SplitPartitions) {
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Sample> data;
        const auto n = 1 + below(300);
        for (std::size_t j = 0; j < n; ++j) {
            data.push_back({FeatureVector{static_cast<double>(j) / 1000.0, 0, 0, 0, 0},
                            kAllClasses[below(8)]});
        }
        const double f = 0.05 + 0.9 * unit();
        const bool strat = below(2);
        const auto s = split(data, SplitSpec{f, below(1000), strat});
        EXPECT_EQ(s.train.size() + s.test.size(), n);
        EXPECT_EQ(s.train.size(), static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
        std::set<double> seen;
        for (const auto& x : s.train) seen.insert(x.features.link_ratio);
        for (const auto& x : s.test) EXPECT_EQ(seen.count(x.features.link_ratio), 0u);
        auto ordered = [](const std::vector<Sample>& v) {
            return std::is_sorted(v.begin(), v.end(), [](const Sample& a, const Sample& b) {
                return a.features.link_ratio < b.features.link_ratio;
            });
        };
        EXPECT_TRUE(ordered(s.train));
        EXPECT_TRUE(ordered(s.test));
        if (strat) {
            for (auto c : kAllClasses) {
                const auto total = std::count_if(data.begin(), data.end(), [&](auto& x) { return x.label == c; });
                const auto in_train = std::count_if(s.train.begin(), s.train.end(), [&](auto& x) { return x.label == c; });
                EXPECT_LT(std::abs(static_cast<double>(in_train) - f * static_cast<double>(total)), 1.0);
            }
        }
    }
}

TEST(Property, EvaluationInvariants) {
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Sample> data;
        const auto n = 1 + below(100);
        for (std::size_t j = 0; j < n; ++j) {
            data.push_back({FeatureVector{unit(), unit(), unit(), unit(), unit()}, kAllClasses[below(8)]});
        }
        Network net;
        net.for_each_parameter([](double& p) { p = 4.0 * unit() - 2.0; });
        const auto r = evaluate(net, data);
        PerClass<std::uint64_t> per_class{};
        for (const auto& s : data) ++per_class[index_of(s.label)];
        std::uint64_t diag = 0, all = 0;
        for (std::size_t t = 0; t < kNumClasses; ++t) {
            std::uint64_t row = 0;
            for (auto v : r.confusion[t]) row += v;
            EXPECT_EQ(row, per_class[t]);
            diag += r.confusion[t][t];
            all += row;
        }
        EXPECT_EQ(diag, r.total_right());
        EXPECT_EQ(all, r.total_right() + r.total_wrong());

        auto shuffled = data;
        std::shuffle(shuffled.begin(), shuffled.end(), rng());
        const auto r2 = evaluate(net, shuffled);
        EXPECT_EQ(r2.accuracy(), r.accuracy());
        EXPECT_EQ(r2, r);
        EXPECT_EQ(parse_report_tsv(render_report(r, ReportFormat::Tsv)), r);
    }
}

TEST(Property, ModelRoundTrip) {
    for (int trial = 0; trial < 100; ++trial) {
        Network net;
        net.for_each_parameter([](double& p) { p = std::ldexp(2.0 * unit() - 1.0, static_cast<int>(below(80)) - 40); });
        EXPECT_EQ(parse_model(format_model(net)), net);
    }
}

TEST(Property, TrainingKeepsWeightsFinite) {
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Sample> data;
        for (int j = 0; j < 40; ++j) {
            data.push_back({FeatureVector{unit(), unit(), unit(), unit(), unit()}, kAllClasses[below(8)]});
        }
        TrainConfig cfg;
        cfg.epochs = 200;
        cfg.seed = trial;
        cfg.target_mse = 0.0;
        const auto r = train(init_network(cfg), data, cfg);
        EXPECT_TRUE(r.net.all_finite());
        EXPECT_EQ(r.report.epochs_run, 200u);
        for (double m : r.report.mse_history) EXPECT_TRUE(std::isfinite(m));
    }
}

TEST(Property, SnappedVectorsAreRealizedExactly) {
    for (int trial = 0; trial < 500; ++trial) {
        const FeatureVector v{unit(), unit(), unit(), unit(), unit()};
        const auto counts = realize_counts(v);
        EXPECT_EQ(features_of(counts), snap_to_realizable(v));
        EXPECT_EQ(snap_to_realizable(snap_to_realizable(v)), snap_to_realizable(v));
        // Half the widest gap between adjacent realizable values: 0 -> 1/(1+3)
        // for animations, 0 -> 1/(1+5) for buzzwords, tenths for dynamic.
        const std::array<double, 5> bound = {0.05, 1.0 / 12, 1.0 / 22, 0.125, 0.05};
        const auto a = v.as_array(), b = snap_to_realizable(v).as_array();
        for (std::size_t f = 0; f < 5; ++f) EXPECT_LE(std::abs(a[f] - b[f]), bound[f] + 1e-12) << f;
    }
}
