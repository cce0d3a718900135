#include "corpusmap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "corpusmap/corpus.hpp"
#include "corpusmap/embed.hpp"
#include "corpusmap/errors.hpp"
#include "corpusmap/io.hpp"
#include "corpusmap/layout.hpp"
#include "corpusmap/simmetrics.hpp"
#include "corpusmap/study.hpp"

namespace corpusmap {

namespace {

std::uint64_t parse_u64_value(const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw InputError(what + " must be a nonnegative integer");
    return std::stoull(s);
}

DrParams params_from_kv(const std::string& dr, const std::vector<std::string>& kvs,
                        std::uint64_t seed) {
    DrParams p;
    p.name = dr;
    p.seed = seed;
    for (const std::string& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw InputError("layout: parameter '" + kv + "' is not key=value");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (dr == "mds" && key == "max_iter") {
            p.mds_max_iter = static_cast<std::size_t>(parse_u64_value(value, "layout: max_iter"));
        } else if (dr == "som" && key == "m") {
            p.som_m = static_cast<std::size_t>(parse_u64_value(value, "layout: m"));
        } else if (dr == "som" && key == "n") {
            p.som_n = static_cast<std::size_t>(parse_u64_value(value, "layout: n"));
        } else if (dr == "som" && key == "dither") {
            if (value == "on")
                p.som_dither = true;
            else if (value == "off")
                p.som_dither = false;
            else
                throw InputError("layout: dither must be on or off");
        } else if (dr == "tsne" && key == "perplexity") {
            p.tsne_perplexity = parse_real(value);
        } else if (dr == "tsne" && key == "n_iter") {
            p.tsne_n_iter = static_cast<std::size_t>(parse_u64_value(value, "layout: n_iter"));
        } else if (dr == "tsne" && key == "learning_rate") {
            if (value == "auto")
                p.tsne_learning_rate = std::nullopt;
            else
                p.tsne_learning_rate = parse_real(value);
        } else {
            throw InputError("layout: unknown parameter '" + key + "' for " + dr);
        }
    }
    return p;
}

std::string embedding_label(const EmbeddingInfo& info) {
    std::string base = info.method == "vsm" ? "vsm" : info.method + std::to_string(info.k_topics);
    return base + "-" + info.weighting;
}

std::string provenance_string(const Scatterplot& plot) {
    std::string s;
    for (const auto& [key, value] : plot.provenance) {
        if (!s.empty()) s += ";";
        s += key + "=" + value;
    }
    return s;
}

std::string lookup(const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? std::string() : it->second;
}

void check_format(const std::string& format) {
    if (format != "csv")
        throw InputError("cli: unsupported output format '" + format + "' (only csv)");
}

struct StudyFlags {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> kinds;
    std::size_t workers = 0;
    std::string cache_dir;
    std::size_t sample_size = 3000;
    std::uint64_t corr_seed = 17;
    bool per_corpus = false;
    bool no_convex = false;
    std::string format = "csv";
};

std::vector<StabilityKind> canonical_kinds(const std::vector<std::string>& flags) {
    std::set<StabilityKind> wanted;
    if (flags.empty()) {
        wanted = {StabilityKind::input_data, StabilityKind::hyperparameter,
                  StabilityKind::randomness};
    } else {
        for (const std::string& f : flags) wanted.insert(parse_kind(f));
    }
    std::vector<StabilityKind> out;
    for (StabilityKind kind : {StabilityKind::input_data, StabilityKind::hyperparameter,
                               StabilityKind::randomness})
        if (wanted.count(kind)) out.push_back(kind);
    return out;
}

void run_study(const StudyFlags& flags, std::ostream& out, std::ostream& err) {
    check_format(flags.format);
    StudyConfig cfg = load_study_config(flags.config_path);
    std::filesystem::path out_dir = flags.out_dir;
    std::filesystem::create_directories(out_dir);

    bool has_topics = false;
    std::map<std::string, std::set<std::string>> weightings_by_base;
    for (const EmbeddingSpec& e : cfg.embeddings) {
        if (e.method != "vsm") has_topics = true;
        weightings_by_base[e.base_name()].insert(e.weighting);
    }
    bool has_tfidf_pairs = false;
    for (const auto& [base, ws] : weightings_by_base)
        if (ws.count("raw") && ws.count("tfidf")) has_tfidf_pairs = true;
    bool convex = has_topics && !flags.no_convex;

    RunOptions ropts;
    ropts.workers = flags.workers == 0
                        ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                        : flags.workers;
    ropts.cache_dir = flags.cache_dir.empty() ? (out_dir / "cache")
                                              : std::filesystem::path(flags.cache_dir);
    ropts.convex = convex;
    ropts.log = &err;

    std::vector<SimilarityRecord> all_records;
    std::vector<BinaryTestResult> all_tests;
    for (StabilityKind kind : canonical_kinds(flags.kinds)) {
        std::vector<SimilarityRecord> records = run_experiment(cfg, kind, ropts);
        std::filesystem::path records_path = out_dir / ("records_" + kind_name(kind) + ".csv");
        write_records_csv(records, records_path);
        out << "wrote " << records_path.string() << " (" << records.size() << " records)\n";

        std::vector<SummaryRow> summary =
            distribution_summary(records, {"corpus", "embedding", "dr", "varied_factor"});
        std::filesystem::path summary_path = out_dir / ("summary_" + kind_name(kind) + ".csv");
        write_text(summary_path, summary_to_csv(summary));
        out << "wrote " << summary_path.string() << "\n";

        if (has_tfidf_pairs) {
            std::vector<BinaryTestResult> tests =
                tfidf_binary_tests(records, kind, flags.per_corpus);
            all_tests.insert(all_tests.end(), tests.begin(), tests.end());
        } else {
            err << "note: no raw/tf-idf embedding pairs configured, tf-idf tests skipped\n";
        }
        if (convex) {
            std::vector<BinaryTestResult> tests =
                convex_binary_tests(records, kind, flags.per_corpus);
            all_tests.insert(all_tests.end(), tests.begin(), tests.end());
        }
        all_records.insert(all_records.end(), records.begin(), records.end());
    }

    std::filesystem::path tests_path = out_dir / "binary_tests.csv";
    write_text(tests_path, binary_tests_to_csv(all_tests));
    out << "wrote " << tests_path.string() << " (" << all_tests.size() << " tests)\n";

    try {
        CorrelationMatrix matrix =
            metric_correlation_matrix(all_records, flags.sample_size, flags.corr_seed);
        std::filesystem::path corr_path = out_dir / "metric_correlation.csv";
        write_text(corr_path, correlation_to_csv(matrix));
        out << "wrote " << corr_path.string() << "\n";
    } catch (const InputError& e) {
        err << "note: " << e.what() << "\n";
    }
}

struct ReportFlags {
    std::string records_path;
    std::string kind;
    std::string out_dir;
    std::vector<std::string> group_by{"corpus", "embedding", "dr", "varied_factor"};
    bool per_corpus = false;
    std::string format = "csv";
};

void run_report(const ReportFlags& flags, std::ostream& out, std::ostream& err) {
    check_format(flags.format);
    StabilityKind kind = parse_kind(flags.kind);
    std::vector<SimilarityRecord> records = parse_records_csv(flags.records_path);
    std::filesystem::path out_dir = flags.out_dir;
    std::filesystem::create_directories(out_dir);

    std::vector<SummaryRow> summary = distribution_summary(records, flags.group_by);
    std::filesystem::path summary_path = out_dir / ("summary_" + kind_name(kind) + ".csv");
    write_text(summary_path, summary_to_csv(summary));
    out << "wrote " << summary_path.string() << "\n";

    std::vector<BinaryTestResult> tests;
    try {
        std::vector<BinaryTestResult> t = tfidf_binary_tests(records, kind, flags.per_corpus);
        tests.insert(tests.end(), t.begin(), t.end());
    } catch (const InputError& e) {
        err << "note: " << e.what() << "\n";
    }
    try {
        std::vector<BinaryTestResult> t = convex_binary_tests(records, kind, flags.per_corpus);
        tests.insert(tests.end(), t.begin(), t.end());
    } catch (const InputError& e) {
        err << "note: " << e.what() << "\n";
    }
    std::filesystem::path tests_path = out_dir / "binary_tests.csv";
    write_text(tests_path, binary_tests_to_csv(tests));
    out << "wrote " << tests_path.string() << " (" << tests.size() << " tests)\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"corpus layouts, layout similarity metrics, and stability experiments"};
    app.require_subcommand(1);

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "build a document-term matrix");
    std::string ingest_docs, ingest_labels, ingest_stopwords, ingest_out;
    ingest_cmd->add_option("--docs", ingest_docs, "one whitespace-tokenized document per line")
        ->required();
    ingest_cmd->add_option("--labels", ingest_labels, "one category label per line")->required();
    ingest_cmd->add_option("--stopwords", ingest_stopwords, "one stopword per line");
    ingest_cmd->add_option("--out", ingest_out, "DTM output file")->required();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "corpus statistics");
    std::string stats_in, stats_out;
    stats_cmd->add_option("--in", stats_in, "DTM file")->required();
    stats_cmd->add_option("--out", stats_out, "also write the statistics to this file");

    // perturb
    auto* perturb_cmd = app.add_subcommand("perturb", "jitter the counts of a DTM");
    std::string perturb_in, perturb_out;
    double perturb_lambda = 0.0;
    std::uint64_t perturb_seed = 0;
    perturb_cmd->add_option("--in", perturb_in, "DTM file")->required();
    perturb_cmd->add_option("--lambda", perturb_lambda, "jitter strength in [0, 1]")->required();
    perturb_cmd->add_option("--seed", perturb_seed, "jitter seed")->required();
    perturb_cmd->add_option("--out", perturb_out, "perturbed DTM output file")->required();

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "embed a DTM into document vectors");
    std::string embed_in, embed_method, embed_weighting = "raw", embed_out, embed_topics_out;
    std::size_t embed_k = 0, embed_max_iter = 300;
    std::uint64_t embed_seed = 0;
    bool embed_seed_set = false;
    embed_cmd->add_option("--in", embed_in, "DTM file")->required();
    embed_cmd->add_option("--method", embed_method, "vsm, lsi, or nmf")->required();
    embed_cmd->add_option("--weighting", embed_weighting, "raw or tfidf");
    embed_cmd->add_option("--k-topics", embed_k, "topic count for lsi/nmf");
    embed_cmd->add_option("--max-iter", embed_max_iter, "nmf update iterations");
    embed_cmd->add_option("--seed", embed_seed, "nmf initialization seed")
        ->each([&](const std::string&) { embed_seed_set = true; });
    embed_cmd->add_option("--out", embed_out, "embedding output file")->required();
    embed_cmd->add_option("--topics-out", embed_topics_out, "also write the topic-term matrix");

    // layout
    auto* layout_cmd = app.add_subcommand("layout", "project an embedding to 2-D");
    std::string layout_in, layout_dr, layout_labels, layout_out;
    std::vector<std::string> layout_params;
    std::uint64_t layout_seed = 0;
    layout_cmd->add_option("--in", layout_in, "embedding file")->required();
    layout_cmd->add_option("--dr", layout_dr, "mds, som, or tsne")->required();
    layout_cmd->add_option("--param", layout_params, "projection parameter key=value");
    layout_cmd->add_option("--labels", layout_labels, "one category label per line");
    layout_cmd->add_option("--seed", layout_seed, "projection seed")->required();
    layout_cmd->add_option("--out", layout_out, "scatterplot output file")->required();

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "similarity metrics for two scatterplots");
    std::string compare_a, compare_b, compare_out, compare_format = "csv";
    std::size_t compare_k = 7;
    compare_cmd->add_option("--a", compare_a, "reference scatterplot file")->required();
    compare_cmd->add_option("--b", compare_b, "other scatterplot file")->required();
    compare_cmd->add_option("--k", compare_k, "neighborhood size");
    compare_cmd->add_option("--out", compare_out, "record CSV output file")->required();
    compare_cmd->add_option("--format", compare_format, "output format (csv)");

    // study
    auto* study_cmd = app.add_subcommand("study", "run the stability experiments");
    StudyFlags study_flags;
    study_cmd->add_option("--config", study_flags.config_path, "study configuration JSON")
        ->required();
    study_cmd->add_option("--out-dir", study_flags.out_dir, "output directory")->required();
    study_cmd->add_option("--kinds", study_flags.kinds,
                          "experiments to run (input_data, hyperparameter, randomness)")
        ->delimiter(',');
    study_cmd->add_option("--workers", study_flags.workers,
                          "worker threads (default: logical processors)");
    study_cmd->add_option("--cache", study_flags.cache_dir,
                          "layout cache directory (default: out-dir/cache)");
    study_cmd->add_option("--sample-size", study_flags.sample_size,
                          "records sampled for the metric correlation matrix");
    study_cmd->add_option("--corr-seed", study_flags.corr_seed, "sampling seed");
    study_cmd->add_flag("--per-corpus", study_flags.per_corpus,
                        "split binary tests per corpus instead of pooling");
    study_cmd->add_flag("--no-convex", study_flags.no_convex,
                        "skip the topic-position placement variant");
    study_cmd->add_option("--format", study_flags.format, "output format (csv)");

    // report
    auto* report_cmd = app.add_subcommand("report", "summaries and binary tests from records");
    ReportFlags report_flags;
    report_cmd->add_option("--records", report_flags.records_path, "records CSV")->required();
    report_cmd->add_option("--kind", report_flags.kind,
                           "experiment kind the records belong to")
        ->required();
    report_cmd->add_option("--out-dir", report_flags.out_dir, "output directory")->required();
    report_cmd->add_option("--group-by", report_flags.group_by, "summary grouping fields")
        ->delimiter(',');
    report_cmd->add_flag("--per-corpus", report_flags.per_corpus,
                         "split binary tests per corpus instead of pooling");
    report_cmd->add_option("--format", report_flags.format, "output format (csv)");

    try {
        std::vector<const char*> argv;
        argv.push_back("corpusmap");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());

        if (*ingest_cmd) {
            std::vector<std::string> doc_lines = read_lines(ingest_docs);
            std::vector<std::string> labels = read_lines(ingest_labels);
            if (doc_lines.size() != labels.size())
                throw InputError("ingest: document and label counts differ (" +
                                 std::to_string(doc_lines.size()) + " vs " +
                                 std::to_string(labels.size()) + ")");
            std::set<std::string> stopwords;
            if (!ingest_stopwords.empty())
                for (const std::string& w : read_lines(ingest_stopwords))
                    if (!w.empty()) stopwords.insert(w);
            std::vector<std::vector<std::string>> docs;
            docs.reserve(doc_lines.size());
            for (const std::string& line : doc_lines) {
                std::istringstream ss(line);
                std::vector<std::string> tokens;
                std::string tok;
                while (ss >> tok) tokens.push_back(tok);
                docs.push_back(std::move(tokens));
            }
            SparseDtm dtm = ingest_documents(docs, labels, stopwords);
            save_dtm(dtm, ingest_out);
            out << "wrote " << ingest_out << " (" << dtm.n_docs << " docs, " << dtm.n_terms
                << " terms)\n";
        } else if (*stats_cmd) {
            CorpusStats s = corpus_stats(load_dtm(stats_in));
            std::string text = "n_docs " + std::to_string(s.n_docs) + "\n" +
                               "n_terms " + std::to_string(s.n_terms) + "\n" +
                               "n_categories " + std::to_string(s.n_categories) + "\n" +
                               "median_doc_length " + std::to_string(s.median_doc_length) + "\n" +
                               "sparsity " + format_real(s.sparsity) + "\n";
            out << text;
            if (!stats_out.empty()) write_text(stats_out, text);
        } else if (*perturb_cmd) {
            SparseDtm dtm = load_dtm(perturb_in);
            SparseDtm jittered = jitter(dtm, JitterSpec(perturb_lambda, perturb_seed));
            save_dtm(jittered, perturb_out);
            out << "wrote " << perturb_out << "\n";
        } else if (*embed_cmd) {
            SparseDtm dtm = load_dtm(embed_in);
            if (embed_weighting != "raw" && embed_weighting != "tfidf")
                throw InputError("embed: unknown weighting '" + embed_weighting + "'");
            WeightedMatrix wm = embed_weighting == "tfidf" ? apply_tfidf(dtm) : as_weighted(dtm);
            if (embed_method == "vsm") {
                if (embed_seed_set) throw InputError("embed: --seed applies to nmf only");
                if (embed_k != 0) throw InputError("embed: vsm takes no --k-topics");
                save_embedding(embed_vsm(wm), embed_out);
            } else if (embed_method == "lsi") {
                if (embed_seed_set) throw InputError("embed: --seed applies to nmf only");
                LsiResult res = embed_lsi(wm, embed_k);
                save_embedding(res.corpus, embed_out);
                if (!embed_topics_out.empty())
                    save_dense(res.topics.topic_term, "lsi", embed_weighting, embed_k,
                               embed_topics_out);
            } else if (embed_method == "nmf") {
                if (!embed_seed_set) throw InputError("embed: nmf needs --seed");
                NmfResult res = embed_nmf(wm, embed_k, embed_max_iter, embed_seed);
                save_embedding(res.corpus, embed_out);
                if (!embed_topics_out.empty())
                    save_dense(res.topics.topic_term, "nmf", embed_weighting, embed_k,
                               embed_topics_out);
            } else {
                throw InputError("embed: unknown method '" + embed_method + "'");
            }
            out << "wrote " << embed_out << "\n";
        } else if (*layout_cmd) {
            EmbeddedCorpus emb = load_embedding(layout_in);
            std::size_t n = static_cast<std::size_t>(emb.vectors.rows());
            if (!layout_labels.empty()) {
                emb.labels = read_lines(layout_labels);
                if (emb.labels.size() != n)
                    throw InputError("layout: label count does not match the embedding");
            } else if (emb.labels.empty()) {
                emb.labels.assign(n, "doc");
            }
            if (layout_dr != "mds" && layout_dr != "som" && layout_dr != "tsne")
                throw InputError("layout: unknown projection '" + layout_dr + "'");
            DrParams params = params_from_kv(layout_dr, layout_params, layout_seed);
            Scatterplot plot;
            if (layout_dr == "mds")
                plot = layout_mds(dissimilarity_matrix(emb), params, emb.labels).plot;
            else if (layout_dr == "som")
                plot = layout_som(emb, params).plot;
            else
                plot = layout_tsne(emb, params).plot;
            plot.provenance["embedding"] = embedding_label(emb.info);
            plot.provenance["placement"] = "direct";
            save_scatterplot(plot, layout_out);
            out << "wrote " << layout_out << "\n";
        } else if (*compare_cmd) {
            check_format(compare_format);
            Scatterplot a = load_scatterplot(compare_a);
            Scatterplot b = load_scatterplot(compare_b);
            SimilarityRecord rec = compare(a, b, compare_k);
            rec.pair_id = hash_hex(provenance_string(a) + "||" + provenance_string(b));
            rec.corpus = lookup(a.provenance, "corpus");
            rec.embedding = lookup(a.provenance, "embedding");
            rec.dr = lookup(a.provenance, "dr");
            write_text(compare_out, records_to_csv({rec}));
            out << "wrote " << compare_out << "\n";
        } else if (*study_cmd) {
            run_study(study_flags, out, err);
        } else if (*report_cmd) {
            run_report(report_flags, out, err);
        }
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    } catch (const InputError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const ComputeError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace corpusmap
