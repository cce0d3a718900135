#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpusmap/corpus.hpp"
#include "corpusmap/layout.hpp"
#include "corpusmap/simmetrics.hpp"

namespace corpusmap {

struct CorpusRef {
    std::string id;
    std::filesystem::path path;
};

struct EmbeddingSpec {
    std::string method;              // "vsm", "lsi", "nmf"
    std::string weighting = "raw";   // "raw" or "tfidf"
    std::size_t k_topics = 0;        // required for lsi/nmf
    std::size_t nmf_max_iter = 300;
    std::uint64_t embed_seed = 12345;  // nmf initialization

    // "vsm", "lsi8", "nmf12": method plus topic count.
    std::string base_name() const;
    // base-weighting, plus "-cc" for the topic-position placement.
    std::string display_name(bool convex) const;
};

// Hyperparameter value lists. Pair formation follows list order, so grids are
// kept exactly as configured.
struct StudyGrids {
    bool use_mds = true;
    bool use_som = true;
    bool use_tsne = true;
    std::vector<std::size_t> mds_max_iter;
    std::vector<std::size_t> som_m;
    std::vector<std::size_t> som_n;
    std::vector<double> tsne_perplexity;
    std::vector<std::size_t> tsne_n_iter;
    std::vector<std::optional<double>> tsne_learning_rate;  // nullopt = auto, last by default

    static StudyGrids defaults();
};

struct StudyConfig {
    std::vector<CorpusRef> corpora;
    std::vector<double> jitter_lambdas{0.0, 0.25, 0.5, 1.0};
    std::uint64_t jitter_seed = 9001;  // one seed for all lambdas, so pairs differ only in lambda
    std::vector<EmbeddingSpec> embeddings;
    StudyGrids grids = StudyGrids::defaults();
    std::vector<std::uint64_t> seeds;
    std::size_t k_neighbors = 7;

    void validate() const;
};

// Strict JSON: unknown keys are rejected.
StudyConfig load_study_config(const std::filesystem::path& p);

enum class StabilityKind { input_data, hyperparameter, randomness };
std::string kind_name(StabilityKind kind);
StabilityKind parse_kind(const std::string& name);

// One fully pinned layout computation.
struct LayoutJob {
    std::size_t corpus_index = 0;
    std::string corpus_id;
    std::size_t lambda_index = 0;
    double lambda = 0.0;
    std::size_t embedding_index = 0;
    std::string embedding_name;  // display name including weighting and placement
    std::string embedding_base;  // display name minus weighting and placement
    bool convex = false;         // project topic positions, then place documents
    DrParams dr;

    // Canonical provenance string; job identity and sort order.
    std::string key() const;
    // Same, with weighting and placement neutralized; pair ids built from it
    // match across pipeline variants.
    std::string neutral_key() const;
};

// Full Cartesian product corpus x lambda x embedding x DR grids x seed,
// deduplicated and sorted by key. `convex` builds the topic-position variant
// (topic-model embeddings only).
std::vector<LayoutJob> enumerate_layout_jobs(const StudyConfig& config, bool convex = false);

struct PairingSpec {
    StabilityKind kind = StabilityKind::input_data;
    std::size_t job_a = 0;  // indices into the job list
    std::size_t job_b = 0;
    std::string varied_factor;
    std::string value_a;
    std::string value_b;
};

// Pair formation follows the configured grid/seed order, so the config is
// required alongside the jobs.
std::vector<PairingSpec> make_pairings(const StudyConfig& config,
                                       const std::vector<LayoutJob>& jobs, StabilityKind kind);

struct RunOptions {
    std::size_t workers = 1;
    std::filesystem::path cache_dir;  // empty disables the layout cache
    bool convex = false;
    std::ostream* log = nullptr;  // skipped-job notes; silent when null
};

// Computes all layouts for the kind's jobs (lambda varies only for
// input_data), forms pairings, and emits one record per comparable pairing.
// For input_data, the aggregate columns hold the adaptability values
// 1 - |high - low| computed against the weighted-matrix comparison; for the
// other kinds they are the plain aggregates. Output is sorted by provenance
// and independent of worker count.
std::vector<SimilarityRecord> run_experiment(const StudyConfig& config, StabilityKind kind,
                                             const RunOptions& opts);

struct BinaryTestResult {
    std::string hypothesis;
    std::size_t m = 0;  // trials
    std::size_t n = 0;  // successes (b strictly larger)
    double p = 1.0;     // exact one-sided upper tail
    bool rejected() const { return p < 0.05; }
};

// Exact P[X >= n] for X ~ Binomial(m, 1/2): integer arithmetic up to m = 62,
// log-space summation beyond.
double binomial_upper_tail(std::size_t m, std::size_t n);

// Matched comparison of variant values: successes are strict b > a.
BinaryTestResult binary_test(const std::vector<double>& a, const std::vector<double>& b);

// Binary tests per (embedding base, dr, metric) between raw and tf-idf
// pipeline records of one kind. Records must carry both variants.
std::vector<BinaryTestResult> tfidf_binary_tests(const std::vector<SimilarityRecord>& records,
                                                 StabilityKind kind, bool per_corpus);

// Same machinery between direct records and "-cc" placement records.
std::vector<BinaryTestResult> convex_binary_tests(const std::vector<SimilarityRecord>& records,
                                                  StabilityKind kind, bool per_corpus);

struct SummaryRow {
    std::string group;
    std::string metric;  // "alpha", "beta", "gamma"
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
    std::size_t count = 0;
};

// Quartiles by inclusive linear interpolation over the aggregate columns,
// grouped by the named provenance fields (subset of corpus, embedding, dr,
// varied_factor, value_a, value_b).
std::vector<SummaryRow> distribution_summary(const std::vector<SimilarityRecord>& records,
                                             const std::vector<std::string>& group_by);

struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<std::optional<double>>> values;  // absent = undefined
};

// Pearson correlations over the twelve metric columns of a seeded sample of
// complete records, stratified as equally as possible across corpora.
CorrelationMatrix metric_correlation_matrix(const std::vector<SimilarityRecord>& records,
                                            std::size_t sample_size, std::uint64_t seed);

// CSV round-trip for records (exact mandated column order; absent values are
// empty fields).
std::string records_to_csv(const std::vector<SimilarityRecord>& records);
void write_records_csv(const std::vector<SimilarityRecord>& records,
                       const std::filesystem::path& p);
std::vector<SimilarityRecord> parse_records_csv(const std::filesystem::path& p);

std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::string binary_tests_to_csv(const std::vector<BinaryTestResult>& results);
std::string correlation_to_csv(const CorrelationMatrix& matrix);

}  // namespace corpusmap
