#include "corpusmap/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

#include "corpusmap/errors.hpp"
#include "corpusmap/rng.hpp"

namespace corpusmap {

std::size_t SparseDtm::n_categories() const {
    std::set<std::string> cats(labels.begin(), labels.end());
    return cats.size();
}

std::vector<std::uint64_t> SparseDtm::row_sums() const {
    std::vector<std::uint64_t> sums(n_docs, 0);
    for (const auto& e : entries) sums[e.doc] += e.freq;
    return sums;
}

Eigen::MatrixXd SparseDtm::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_docs),
                                              static_cast<Eigen::Index>(n_terms));
    for (const auto& e : entries) m(e.doc, e.term) = static_cast<double>(e.freq);
    return m;
}

void SparseDtm::validate() const {
    if (labels.size() != n_docs)
        throw InputError("dtm: label count " + std::to_string(labels.size()) +
                         " does not match document count " + std::to_string(n_docs));
    if (!vocabulary.empty() && vocabulary.size() != n_terms)
        throw InputError("dtm: vocabulary size does not match term count");
    const DtmEntry* prev = nullptr;
    for (const auto& e : entries) {
        if (e.doc >= n_docs || e.term >= n_terms)
            throw InputError("dtm: entry index out of range");
        if (e.freq == 0) throw InputError("dtm: stored frequency must be positive");
        if (prev && !(prev->doc < e.doc || (prev->doc == e.doc && prev->term < e.term)))
            throw InputError("dtm: entries must be sorted by (doc, term) without duplicates");
        prev = &e;
    }
}

JitterSpec::JitterSpec(double lambda_, std::uint64_t seed_) : lambda(lambda_), seed(seed_) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InputError("jitter: lambda must lie in [0, 1]");
}

SparseDtm ingest_documents(const std::vector<std::vector<std::string>>& docs,
                           const std::vector<std::string>& labels,
                           const std::set<std::string>& stopwords) {
    if (docs.size() != labels.size())
        throw InputError("ingest: document count " + std::to_string(docs.size()) +
                         " does not match label count " + std::to_string(labels.size()));

    std::set<std::string> vocab_set;
    for (const auto& doc : docs)
        for (const auto& tok : doc)
            if (!stopwords.count(tok)) vocab_set.insert(tok);

    SparseDtm dtm;
    dtm.n_docs = docs.size();
    dtm.n_terms = vocab_set.size();
    dtm.labels = labels;
    dtm.vocabulary.assign(vocab_set.begin(), vocab_set.end());

    std::map<std::string, std::uint32_t> term_index;
    for (std::uint32_t t = 0; t < dtm.vocabulary.size(); ++t) term_index[dtm.vocabulary[t]] = t;

    for (std::uint32_t d = 0; d < docs.size(); ++d) {
        std::map<std::uint32_t, std::uint64_t> counts;
        for (const auto& tok : docs[d]) {
            auto it = term_index.find(tok);
            if (it != term_index.end()) ++counts[it->second];
        }
        for (const auto& [t, c] : counts) dtm.entries.push_back({d, t, c});
    }
    dtm.validate();
    return dtm;
}

CorpusStats corpus_stats(const SparseDtm& dtm) {
    dtm.validate();
    if (dtm.n_docs == 0) throw InputError("stats: corpus has no documents");

    CorpusStats s;
    s.n_docs = dtm.n_docs;
    s.n_terms = dtm.n_terms;
    s.n_categories = dtm.n_categories();

    std::vector<std::uint64_t> sums = dtm.row_sums();
    std::sort(sums.begin(), sums.end());
    // Lower median: element (N-1)/2 for odd N, N/2-1 for even N.
    s.median_doc_length = (sums.size() % 2 == 1) ? sums[(sums.size() - 1) / 2]
                                                 : sums[sums.size() / 2 - 1];

    double cells = static_cast<double>(dtm.n_docs) * static_cast<double>(dtm.n_terms);
    s.sparsity = cells > 0.0 ? 1.0 - static_cast<double>(dtm.entries.size()) / cells : 0.0;
    return s;
}

WeightedMatrix apply_tfidf(const SparseDtm& dtm) {
    dtm.validate();
    if (dtm.n_docs == 0) throw InputError("tfidf: corpus has no documents");

    std::vector<double> corpus_count(dtm.n_terms, 0.0);  // sum of the term over all documents
    std::vector<double> doc_freq(dtm.n_terms, 0.0);      // number of documents containing it
    for (const auto& e : dtm.entries) {
        corpus_count[e.term] += static_cast<double>(e.freq);
        doc_freq[e.term] += 1.0;
    }

    WeightedMatrix w;
    w.n_docs = dtm.n_docs;
    w.n_terms = dtm.n_terms;
    w.labels = dtm.labels;
    w.weighting = "tfidf";
    w.entries.reserve(dtm.entries.size());
    const double n_docs = static_cast<double>(dtm.n_docs);
    for (const auto& e : dtm.entries) {
        double tf = static_cast<double>(e.freq) / corpus_count[e.term];
        double idf = std::log(n_docs / doc_freq[e.term]);
        double v = tf * idf;
        if (v != 0.0) w.entries.push_back({e.doc, e.term, v});
    }
    return w;
}

WeightedMatrix as_weighted(const SparseDtm& dtm) {
    dtm.validate();
    WeightedMatrix w;
    w.n_docs = dtm.n_docs;
    w.n_terms = dtm.n_terms;
    w.labels = dtm.labels;
    w.weighting = "raw";
    w.entries.reserve(dtm.entries.size());
    for (const auto& e : dtm.entries)
        w.entries.push_back({e.doc, e.term, static_cast<double>(e.freq)});
    return w;
}

Eigen::MatrixXd WeightedMatrix::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_docs),
                                              static_cast<Eigen::Index>(n_terms));
    for (const auto& e : entries) m(e.doc, e.term) = e.value;
    return m;
}

SparseDtm jitter(const SparseDtm& dtm, const JitterSpec& spec) {
    dtm.validate();
    SparseDtm out;
    out.n_docs = dtm.n_docs;
    out.n_terms = dtm.n_terms;
    out.labels = dtm.labels;
    out.vocabulary = dtm.vocabulary;
    out.entries.reserve(dtm.entries.size());
    for (const auto& e : dtm.entries) {
        std::uint64_t cell = static_cast<std::uint64_t>(e.doc) * dtm.n_terms + e.term;
        double eps = counter_uniform_symmetric(spec.seed, cell, spec.lambda);
        double scaled = static_cast<double>(e.freq) * (1.0 + eps);
        long long rounded = std::llround(scaled);  // half away from zero
        if (rounded > 0)
            out.entries.push_back({e.doc, e.term, static_cast<std::uint64_t>(rounded)});
    }
    return out;
}

}  // namespace corpusmap
