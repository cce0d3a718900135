#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace corpusmap {

struct DtmEntry {
    std::uint32_t doc = 0;
    std::uint32_t term = 0;
    std::uint64_t freq = 0;  // strictly positive for stored entries
};

// Sparse document-term matrix of raw counts. Entries are sorted by (doc, term)
// and hold only nonzero frequencies. `labels` has one category per document;
// `vocabulary` is optional (empty or one string per term).
struct SparseDtm {
    std::size_t n_docs = 0;
    std::size_t n_terms = 0;
    std::vector<DtmEntry> entries;
    std::vector<std::string> labels;
    std::vector<std::string> vocabulary;

    std::size_t n_categories() const;
    std::vector<std::uint64_t> row_sums() const;
    Eigen::MatrixXd to_dense() const;
    // Throws InputError on shape/order/value violations.
    void validate() const;
};

struct WeightedEntry {
    std::uint32_t doc = 0;
    std::uint32_t term = 0;
    double value = 0.0;
};

// Real-valued sparse matrix sharing the document axis (and labels) of the
// SparseDtm it was derived from.
struct WeightedMatrix {
    std::size_t n_docs = 0;
    std::size_t n_terms = 0;
    std::vector<WeightedEntry> entries;
    std::vector<std::string> labels;
    std::string weighting;  // "raw" or "tfidf"

    Eigen::MatrixXd to_dense() const;
};

struct CorpusStats {
    std::size_t n_docs = 0;
    std::size_t n_terms = 0;
    std::size_t n_categories = 0;
    std::uint64_t median_doc_length = 0;  // lower median of document lengths
    double sparsity = 0.0;                // 1 - nonzeros / (n_docs * n_terms)
};

struct JitterSpec {
    // Throws InputError unless 0 <= lambda <= 1.
    JitterSpec(double lambda, std::uint64_t seed);

    double lambda;
    std::uint64_t seed;
};

// Tokenized documents to a DTM. Tokens are used verbatim (no normalization
// here); stopwords are dropped, the vocabulary is the sorted set of surviving
// tokens. Documents left empty stay as all-zero rows.
SparseDtm ingest_documents(const std::vector<std::vector<std::string>>& docs,
                           const std::vector<std::string>& labels,
                           const std::set<std::string>& stopwords = {});

CorpusStats corpus_stats(const SparseDtm& dtm);

// tfidf(w, d) = [n(w,d) / sum_d' n(w,d')] * ln(n_docs / df(w)). Terms that
// occur nowhere contribute no entries.
WeightedMatrix apply_tfidf(const SparseDtm& dtm);

// Raw counts as doubles, same pattern.
WeightedMatrix as_weighted(const SparseDtm& dtm);

// Multiplicative perturbation: each stored count becomes
// max{0, round(freq * (1 + eps))} with eps drawn uniformly from
// [-lambda, lambda], keyed by the cell index doc * n_terms + term so the
// draw for a cell is independent of the sparsity pattern. Rounding is
// half-away-from-zero. Entries perturbed to zero are dropped.
SparseDtm jitter(const SparseDtm& dtm, const JitterSpec& spec);

}  // namespace corpusmap
