// pagesort: extract, synth, train, classify, evaluate, fetch.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pagesort/ingest.hpp"
#include "pagesort/pagesort.hpp"

namespace {

using namespace pagesort;

struct Globals {
    std::uint64_t seed = 42;
    std::string lexicon_path;
    std::string feature_config_path;
    int verbosity = 0;

    ExtractionSettings settings() const {
        ExtractionSettings s;
        if (!lexicon_path.empty()) s.lexicon = load_lexicon(lexicon_path);
        if (!feature_config_path.empty()) s.config = load_feature_config(feature_config_path);
        return s;
    }
};

struct SplitFlags {
    std::optional<double> train_fraction;
    bool no_stratify = false;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--train-fraction", train_fraction,
                       "Partition the data with this train fraction (seeded by --seed)")
            ->check(CLI::Range(0.0, 1.0));
        cmd.add_flag("--no-stratify", no_stratify, "Split without per-class stratification");
    }

    SplitSpec spec(std::uint64_t seed) const {
        return {train_fraction.value_or(0.4), seed, !no_stratify};
    }
};

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

int run_extract(const Globals& g, const std::string& manifest_path, const std::string& out_path) {
    const auto settings = g.settings();
    const auto pages = load_manifest(manifest_path, /*require_files=*/false);
    const auto result = extract_pages(pages, settings);
    write_feature_rows(out_path, result.rows);
    for (const auto& f : result.failures) {
        std::cerr << "error: page " << f.id << ": " << f.message << "\n";
    }
    if (g.verbosity > 0) {
        std::cerr << "extracted " << result.rows.size() << " of " << pages.size() << " page(s)\n";
    }
    return result.failures.empty() ? 0 : 1;
}

int run_train(const Globals& g, const std::string& data_path, const std::string& model_path,
              TrainConfig cfg, const SplitFlags& split_flags) {
    cfg.seed = g.seed;
    auto samples = load_samples(data_path, g.settings());
    if (split_flags.train_fraction) {
        samples = split(samples, split_flags.spec(g.seed)).train;
    }
    const auto init = init_network(cfg);
    const auto result = train(init, samples, cfg);
    save_model(result.net, model_path);
    std::cout << "samples=" << samples.size() << " epochs_run=" << result.report.epochs_run
              << " final_mse=" << fmt6(result.report.final_mse) << "\n";
    return 0;
}

int run_classify(const Globals& g, const std::string& model_path, const std::string& target,
                 const std::string& origin_url, const std::string& cache_dir, double timeout) {
    const auto net = load_model(model_path);
    const auto settings = g.settings();
    std::string html_src;
    PageOrigin origin;
    if (target.rfind("http://", 0) == 0 || target.rfind("https://", 0) == 0) {
        FetchOptions opts;
        opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout * 1000));
        const auto dir = cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
        const auto rec = fetch_page(target, dir, opts);
        html_src = read_html_file(rec.body_path);
        origin = PageOrigin::from_url(rec.final_url);
    } else {
        html_src = read_html_file(target);
        origin = PageOrigin::from_url(origin_url);
    }
    const auto stats = extract_stats(html_src, origin, settings.lexicon, settings.config);
    const auto x = to_feature_vector(stats, settings.config);
    const auto p = predict(net, x);
    std::cout << class_name(p.label) << '\t' << fmt6(p.raw[0]) << ' ' << fmt6(p.raw[1]) << ' '
              << fmt6(p.raw[2]) << "\n";
    std::cout << "features";
    for (double f : x.as_array()) std::cout << '\t' << fmt6(f);
    std::cout << "\n";
    return 0;
}

int run_evaluate(const Globals& g, const std::string& model_path, const std::string& data_path,
                 const std::string& format, const std::string& subset,
                 const SplitFlags& split_flags, std::string set_name) {
    const auto net = load_model(model_path);
    auto samples = load_samples(data_path, g.settings());
    if (subset != "all") {
        const auto parts = split(samples, split_flags.spec(g.seed));
        samples = subset == "train" ? parts.train : parts.test;
    }
    if (set_name.empty()) set_name = subset;
    const auto report = evaluate(net, samples, set_name);
    const auto fmt = format == "tsv"    ? ReportFormat::Tsv
                     : format == "json" ? ReportFormat::Json
                                        : ReportFormat::Table;
    std::cout << render_report(report, fmt);
    return 0;
}

int run_synth(const Globals& g, const std::string& out_dir, std::uint64_t per_class, double noise,
              const std::string& prototypes_path) {
    const auto settings = g.settings();
    const auto protos = prototypes_path.empty() ? default_prototypes()
                                                : load_prototypes(prototypes_path);
    const auto pages = synth_generate(per_class, noise, g.seed, protos, settings.config);
    write_synthetic_corpus(out_dir, pages);
    if (g.verbosity > 0) std::cerr << "wrote " << pages.size() << " pages to " << out_dir << "\n";
    return 0;
}

int run_fetch(const std::string& list_path, const std::string& out_dir,
              const std::string& cache_dir, std::size_t concurrency, double timeout,
              bool refresh) {
    const auto entries = parse_url_list(detail::read_file(list_path), list_path);
    FetchOptions opts;
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout * 1000));
    opts.refresh = refresh;
    const auto dir = cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
    const auto result = fetch_manifest(entries, dir, out_dir, concurrency, opts);
    for (const auto& f : result.failures) std::cerr << "error: " << f.url << ": " << f.error << "\n";
    std::cout << "fetched=" << result.fetched << " failed=" << result.failures.size() << "\n";
    return result.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pagesort: home page categorization with a 5-5-3 neural network"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Seed for initialization, shuffling, splitting and synthesis")
        ->capture_default_str();
    app.add_option("--lexicon", g.lexicon_path, "Buzzword lexicon file (default: built-in)")
        ->check(CLI::ExistingFile);
    app.add_option("--feature-config", g.feature_config_path, "Feature config file")
        ->check(CLI::ExistingFile);
    app.add_flag("-v,--verbose", g.verbosity, "More diagnostics on stderr");

    // extract
    std::string ex_manifest, ex_out;
    auto* extract = app.add_subcommand("extract", "Extract page features listed in a manifest");
    extract->add_option("manifest", ex_manifest, "Manifest (id, url, html path, class)")
        ->required();
    extract->add_option("out", ex_out, "Output feature file")->required();

    // train
    std::string tr_data, tr_model;
    TrainConfig tr_cfg;
    SplitFlags tr_split;
    auto* train_cmd = app.add_subcommand("train", "Train a network on labeled features");
    train_cmd->add_option("data", tr_data, "Labeled feature file or manifest")->required();
    train_cmd->add_option("model", tr_model, "Output model file")->required();
    train_cmd->add_option("--lr", tr_cfg.learning_rate, "Learning rate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", tr_cfg.epochs, "Maximum epochs")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    train_cmd->add_option("--target-mse", tr_cfg.target_mse, "Early-stop epoch MSE")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--init-scale", tr_cfg.init_scale, "Uniform init half-width")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    tr_split.add_to(*train_cmd);

    // classify
    std::string cl_model, cl_target, cl_origin = "http://localhost/", cl_cache;
    double cl_timeout = 15.0;
    auto* classify = app.add_subcommand("classify", "Classify one page (file or http(s) url)");
    classify->add_option("model", cl_model, "Model file")->required();
    classify->add_option("target", cl_target, "HTML file or http(s) url")->required();
    classify->add_option("--origin", cl_origin, "Page url used for link analysis of a file")
        ->capture_default_str();
    classify->add_option("--cache", cl_cache, "Fetch cache directory (default $PAGESORT_CACHE)");
    classify->add_option("--timeout", cl_timeout, "Fetch timeout in seconds")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // evaluate
    std::string ev_model, ev_data, ev_format = "table", ev_subset = "all", ev_name;
    SplitFlags ev_split;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a model on labeled data");
    eval_cmd->add_option("model", ev_model, "Model file")->required();
    eval_cmd->add_option("data", ev_data, "Labeled feature file or manifest")->required();
    eval_cmd->add_option("--format", ev_format, "Report format")
        ->capture_default_str()
        ->check(CLI::IsMember({"table", "tsv", "json"}));
    eval_cmd->add_option("--subset", ev_subset, "Evaluate on the train or test part of a split")
        ->capture_default_str()
        ->check(CLI::IsMember({"all", "train", "test"}));
    eval_cmd->add_option("--set-name", ev_name, "Label for the report (default: the subset)");
    ev_split.add_to(*eval_cmd);

    // synth
    std::string sy_out, sy_protos;
    std::uint64_t sy_per_class = 25;
    double sy_noise = 0.05;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
    synth->add_option("out", sy_out, "Output directory")->required();
    synth->add_option("--per-class", sy_per_class, "Pages per class")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1000000}));
    synth->add_option("--noise", sy_noise, "Uniform noise half-width in [0,1)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 0.999999));
    synth->add_option("--prototypes", sy_protos, "Prototype table (default: built-in)")
        ->check(CLI::ExistingFile);

    // fetch
    std::string fe_list, fe_out, fe_cache;
    std::size_t fe_concurrency = 4;
    double fe_timeout = 15.0;
    bool fe_refresh = false;
    auto* fetch = app.add_subcommand("fetch", "Fetch a url list into a corpus manifest");
    fetch->add_option("urls", fe_list, "Url list (<url>\\t<class name> per line)")
        ->required()
        ->check(CLI::ExistingFile);
    fetch->add_option("out", fe_out, "Output directory for manifest.tsv and failures.tsv")
        ->required();
    fetch->add_option("--cache", fe_cache, "Cache directory (default $PAGESORT_CACHE)");
    fetch->add_option("--concurrency", fe_concurrency, "Maximum requests in flight")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
    fetch->add_option("--timeout", fe_timeout, "Per-request timeout in seconds")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    fetch->add_flag("--refresh", fe_refresh, "Ignore cached copies");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*extract) return run_extract(g, ex_manifest, ex_out);
        if (*train_cmd) return run_train(g, tr_data, tr_model, tr_cfg, tr_split);
        if (*classify) {
            return run_classify(g, cl_model, cl_target, cl_origin, cl_cache, cl_timeout);
        }
        if (*eval_cmd) {
            return run_evaluate(g, ev_model, ev_data, ev_format, ev_subset, ev_split, ev_name);
        }
        if (*synth) return run_synth(g, sy_out, sy_per_class, sy_noise, sy_protos);
        if (*fetch) {
            return run_fetch(fe_list, fe_out, fe_cache, fe_concurrency, fe_timeout, fe_refresh);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
