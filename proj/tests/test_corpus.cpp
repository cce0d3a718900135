#include <doctest.h>

#include <cmath>
#include <set>

#include "corpusmap/corpus.hpp"
#include "corpusmap/errors.hpp"

using namespace corpusmap;

namespace {

SparseDtm make_dtm(std::size_t n_docs, std::size_t n_terms,
                   std::vector<DtmEntry> entries, std::vector<std::string> labels) {
    SparseDtm d;
    d.n_docs = n_docs;
    d.n_terms = n_terms;
    d.entries = std::move(entries);
    d.labels = std::move(labels);
    d.validate();
    return d;
}

}  // namespace

TEST_CASE("ingest counts tokens") {
    SparseDtm d = ingest_documents({{"cat", "cat", "dog"}}, {"a"});
    CHECK(d.n_docs == 1);
    CHECK(d.n_terms == 2);
    CHECK(d.vocabulary == std::vector<std::string>{"cat", "dog"});
    Eigen::MatrixXd dense = d.to_dense();
    CHECK(dense(0, 0) == 2.0);
    CHECK(dense(0, 1) == 1.0);
}

TEST_CASE("ingest drops stopwords") {
    SparseDtm d = ingest_documents({{"the", "cat"}}, {"a"}, {"the"});
    CHECK(d.vocabulary == std::vector<std::string>{"cat"});
    CHECK(d.to_dense()(0, 0) == 1.0);
}

TEST_CASE("ingest unions disjoint vocabularies") {
    SparseDtm d = ingest_documents({{"a", "b"}, {"c", "d", "e"}}, {"x", "y"});
    CHECK(d.n_terms == 5);
    Eigen::MatrixXd m = d.to_dense();
    CHECK(m.row(0).tail(3).isZero());
    CHECK(m.row(1).head(2).isZero());
}

TEST_CASE("ingest keeps emptied documents as zero rows") {
    SparseDtm d = ingest_documents({{"the"}, {"cat"}}, {"x", "y"}, {"the"});
    CHECK(d.n_docs == 2);
    CHECK(d.to_dense().row(0).isZero());
}

TEST_CASE("ingest rejects mismatched labels") {
    CHECK_THROWS_AS(ingest_documents({{"a"}}, {"x", "y"}), InputError);
}

TEST_CASE("stats of a dense matrix") {
    SparseDtm d = make_dtm(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}}, {"a", "b"});
    CorpusStats s = corpus_stats(d);
    CHECK(s.sparsity == 0.0);
    CHECK(s.n_categories == 2);
}

TEST_CASE("stats median of odd document count") {
    SparseDtm d = make_dtm(3, 1, {{0, 0, 2}, {1, 0, 5}, {2, 0, 9}}, {"a", "a", "a"});
    CHECK(corpus_stats(d).median_doc_length == 5);
}

TEST_CASE("stats lower median for even document count") {
    SparseDtm d = make_dtm(4, 1, {{0, 0, 1}, {1, 0, 3}, {2, 0, 7}, {3, 0, 9}},
                           {"a", "a", "a", "a"});
    CHECK(corpus_stats(d).median_doc_length == 3);
}

TEST_CASE("tfidf single-occurrence cell") {
    SparseDtm d = make_dtm(2, 2, {{0, 0, 2}, {0, 1, 1}, {1, 1, 3}}, {"a", "b"});
    Eigen::MatrixXd w = apply_tfidf(d).to_dense();
    CHECK(w(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("tfidf zeroes terms present everywhere") {
    SparseDtm d = make_dtm(2, 2, {{0, 0, 1}, {0, 1, 4}, {1, 0, 1}}, {"a", "b"});
    Eigen::MatrixXd w = apply_tfidf(d).to_dense();
    CHECK(w(0, 0) == 0.0);
    CHECK(w(1, 0) == 0.0);
    CHECK(w(0, 1) > 0.0);
}

TEST_CASE("tfidf corpus-wide denominator") {
    // 4 docs, n(w,d)=3, corpus count 6, document frequency 2.
    SparseDtm d = make_dtm(4, 2,
                           {{0, 0, 3}, {0, 1, 1}, {1, 0, 3}, {2, 1, 1}, {3, 1, 1}},
                           {"a", "b", "c", "d"});
    Eigen::MatrixXd w = apply_tfidf(d).to_dense();
    CHECK(w(0, 0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("jitter with lambda zero is the identity") {
    SparseDtm d = make_dtm(3, 4, {{0, 0, 5}, {1, 2, 7}, {2, 3, 1}}, {"a", "b", "a"});
    for (std::uint64_t seed : {1ull, 99ull, 123456789ull}) {
        SparseDtm j = jitter(d, JitterSpec(0.0, seed));
        CHECK(j.entries.size() == d.entries.size());
        for (std::size_t i = 0; i < d.entries.size(); ++i) {
            CHECK(j.entries[i].doc == d.entries[i].doc);
            CHECK(j.entries[i].term == d.entries[i].term);
            CHECK(j.entries[i].freq == d.entries[i].freq);
        }
    }
}

TEST_CASE("jitter rejects lambda outside range") {
    CHECK_THROWS_AS(JitterSpec(-0.1, 1), InputError);
    CHECK_THROWS_AS(JitterSpec(1.5, 1), InputError);
}

TEST_CASE("jitter is deterministic and respects bounds") {
    std::vector<DtmEntry> entries;
    for (std::uint32_t i = 0; i < 10; ++i)
        for (std::uint32_t j = 0; j < 8; ++j)
            if ((i + j) % 3 != 0) entries.push_back({i, j, (i * 8 + j) % 11 + 1});
    SparseDtm d = make_dtm(10, 8, entries, std::vector<std::string>(10, "a"));

    for (double lam : {0.25, 0.5, 1.0}) {
        SparseDtm j1 = jitter(d, JitterSpec(lam, 42));
        SparseDtm j2 = jitter(d, JitterSpec(lam, 42));
        REQUIRE(j1.entries.size() == j2.entries.size());
        for (std::size_t t = 0; t < j1.entries.size(); ++t)
            CHECK(j1.entries[t].freq == j2.entries[t].freq);

        CHECK(j1.n_docs == d.n_docs);
        CHECK(j1.n_terms == d.n_terms);
        CHECK(j1.labels == d.labels);

        Eigen::MatrixXd before = d.to_dense();
        Eigen::MatrixXd after = j1.to_dense();
        for (int r = 0; r < before.rows(); ++r)
            for (int c = 0; c < before.cols(); ++c) {
                double v = before(r, c);
                if (v == 0.0) {
                    CHECK(after(r, c) == 0.0);
                    continue;
                }
                double hi = std::round(v * (1.0 + lam));
                double lo = std::max(0.0, std::round(v * (1.0 - lam)));
                CHECK(after(r, c) <= hi);
                CHECK(after(r, c) >= lo);
            }
    }
}

TEST_CASE("jitter drops entries rounded to zero") {
    // lambda=1 on value 1: eps near -1 rounds to 0 for some cells; assert the
    // survivors are exactly the nonzeros of the dense evaluation.
    std::vector<DtmEntry> entries;
    for (std::uint32_t j = 0; j < 50; ++j) entries.push_back({0, j, 1});
    SparseDtm d = make_dtm(1, 50, entries, {"a"});
    SparseDtm j = jitter(d, JitterSpec(1.0, 7));
    Eigen::MatrixXd dense = j.to_dense();
    std::size_t nonzeros = 0;
    for (int c = 0; c < dense.cols(); ++c)
        if (dense(0, c) != 0.0) ++nonzeros;
    CHECK(j.entries.size() == nonzeros);
    CHECK(nonzeros < 50);  // with lambda=1 over 50 cells some must drop
    for (const auto& e : j.entries) CHECK(e.freq > 0);
}

TEST_CASE("jitter draw depends on the cell index not the pattern") {
    // Same cell value at (1,2) embedded in two different sparsity patterns
    // must perturb identically.
    SparseDtm a = make_dtm(3, 4, {{0, 0, 9}, {1, 2, 6}}, {"x", "x", "x"});
    SparseDtm b = make_dtm(3, 4, {{1, 2, 6}, {2, 3, 2}}, {"x", "x", "x"});
    SparseDtm ja = jitter(a, JitterSpec(0.5, 31));
    SparseDtm jb = jitter(b, JitterSpec(0.5, 31));
    auto freq_at = [](const SparseDtm& d, std::uint32_t doc, std::uint32_t term) {
        for (const auto& e : d.entries)
            if (e.doc == doc && e.term == term) return e.freq;
        return std::uint64_t{0};
    };
    CHECK(freq_at(ja, 1, 2) == freq_at(jb, 1, 2));
}

TEST_CASE("sparsity after jitter counts surviving nonzeros") {
    std::vector<DtmEntry> entries;
    for (std::uint32_t j = 0; j < 20; ++j) entries.push_back({0, j, 1});
    SparseDtm d = make_dtm(1, 20, entries, {"a"});
    SparseDtm j = jitter(d, JitterSpec(1.0, 3));
    CorpusStats s = corpus_stats(j);
    CHECK(s.sparsity ==
          doctest::Approx(1.0 - static_cast<double>(j.entries.size()) / 20.0).epsilon(1e-12));
}
