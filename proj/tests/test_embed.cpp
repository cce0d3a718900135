#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "corpusmap/corpus.hpp"
#include "corpusmap/embed.hpp"
#include "corpusmap/errors.hpp"
#include "corpusmap/rng.hpp"

using namespace corpusmap;

namespace {

WeightedMatrix from_dense(const Eigen::MatrixXd& m, const std::string& weighting = "raw") {
    WeightedMatrix w;
    w.n_docs = static_cast<std::size_t>(m.rows());
    w.n_terms = static_cast<std::size_t>(m.cols());
    w.weighting = weighting;
    w.labels.assign(w.n_docs, "doc");
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0)
                w.entries.push_back({static_cast<std::uint32_t>(i),
                                     static_cast<std::uint32_t>(j), m(i, j)});
    return w;
}

}  // namespace

TEST_CASE("cosine dissimilarity basics") {
    Eigen::MatrixXd rows(3, 3);
    rows << 1, 1, 0,
            1, 0, 0,
            0, 0, 1;
    Eigen::MatrixXd d = cosine_dissimilarity(rows);
    CHECK(d(0, 1) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(d(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d(1, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.diagonal().isZero());
    CHECK((d - d.transpose()).norm() == 0.0);
}

TEST_CASE("cosine dissimilarity ignores positive row scaling") {
    Rng rng(5);
    Eigen::MatrixXd rows(4, 6);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j) rows(i, j) = rng.uniform();
    Eigen::MatrixXd scaled = rows;
    scaled.row(1) *= 7.5;
    scaled.row(3) *= 0.01;
    CHECK((cosine_dissimilarity(rows) - cosine_dissimilarity(scaled)).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("all-zero rows sit at dissimilarity one") {
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(3, 4);
    rows(0, 0) = 2.0;
    Eigen::MatrixXd d = cosine_dissimilarity(rows);
    CHECK(d(0, 1) == 1.0);
    CHECK(d(1, 2) == 1.0);
    CHECK(d(1, 1) == 0.0);
}

TEST_CASE("dissimilarity matrix matches scalar recomputation") {
    Eigen::MatrixXd rows(3, 4);
    rows << 1, 2, 0, 1,
            0, 1, 3, 2,
            2, 0, 1, 0;
    EmbeddedCorpus c = embed_vsm(from_dense(rows));
    Eigen::MatrixXd d = dissimilarity_matrix(c);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double expected =
                i == j ? 0.0
                       : 1.0 - rows.row(i).dot(rows.row(j)) /
                                   (rows.row(i).norm() * rows.row(j).norm());
            CHECK(d(i, j) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("single document gives a 1x1 zero matrix") {
    Eigen::MatrixXd rows(1, 2);
    rows << 1, 2;
    Eigen::MatrixXd d = dissimilarity_matrix(embed_vsm(from_dense(rows)));
    CHECK(d.rows() == 1);
    CHECK(d(0, 0) == 0.0);
}

TEST_CASE("lsi recovers an exact rank-1 matrix") {
    Eigen::VectorXd u(4), v(3);
    u << 1, 2, 3, 4;
    v << 2, 1, 5;
    Eigen::MatrixXd m = u * v.transpose();
    LsiResult r = embed_lsi(from_dense(m), 1);
    Eigen::MatrixXd rec = r.corpus.vectors * r.topics.topic_term;
    CHECK((m - rec).norm() <= 1e-8 * m.norm());
}

TEST_CASE("lsi at full rank reconstructs a dense matrix") {
    Eigen::MatrixXd m(3, 4);
    m << 4, 1, 0, 2,
         1, 3, 2, 0,
         0, 2, 5, 1;
    LsiResult r = embed_lsi(from_dense(m), 3);
    Eigen::MatrixXd rec = r.corpus.vectors * r.topics.topic_term;
    CHECK((m - rec).norm() <= 1e-6 * m.norm());
}

TEST_CASE("lsi singular values match a dense eigensolver") {
    Eigen::MatrixXd m(4, 3);
    m << 2, 0, 1,
         1, 3, 0,
         0, 1, 4,
         2, 2, 2;
    LsiResult r = embed_lsi(from_dense(m), 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
    Eigen::VectorXd evs = es.eigenvalues();  // ascending
    CHECK(r.singular_values(0) ==
          doctest::Approx(std::sqrt(evs(2))).epsilon(1e-6));
    CHECK(r.singular_values(1) ==
          doctest::Approx(std::sqrt(evs(1))).epsilon(1e-6));
    CHECK(r.singular_values(0) >= r.singular_values(1));
}

TEST_CASE("lsi doc vectors preserve reconstruction inner products") {
    Eigen::MatrixXd m(5, 4);
    m << 1, 0, 2, 1,
         0, 3, 1, 0,
         2, 1, 0, 2,
         1, 1, 1, 1,
         0, 2, 3, 1;
    LsiResult r = embed_lsi(from_dense(m), 2);
    Eigen::MatrixXd mk = r.corpus.vectors * r.topics.topic_term;
    Eigen::MatrixXd gram_doc = r.corpus.vectors * r.corpus.vectors.transpose();
    Eigen::MatrixXd gram_rec = mk * mk.transpose();
    CHECK((gram_doc - gram_rec).norm() <= 1e-8 * gram_rec.norm());
}

TEST_CASE("lsi rejects out-of-range k") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 4);
    CHECK_THROWS_AS(embed_lsi(from_dense(m), 0), InputError);
    CHECK_THROWS_AS(embed_lsi(from_dense(m), 4), InputError);
}

TEST_CASE("lsi is deterministic") {
    Eigen::MatrixXd m(6, 5);
    Rng rng(11);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j) m(i, j) = rng.uniform(0.0, 3.0);
    LsiResult a = embed_lsi(from_dense(m), 3);
    LsiResult b = embed_lsi(from_dense(m), 3);
    CHECK((a.corpus.vectors - b.corpus.vectors).norm() == 0.0);
}

TEST_CASE("nmf fits a realizable factorization") {
    Eigen::VectorXd w(4), h(5);
    w << 1, 0.5, 2, 1.5;
    h << 0.2, 1, 0.7, 0.1, 0.5;
    Eigen::MatrixXd m = w * h.transpose();
    NmfResult r = embed_nmf(from_dense(m), 1, 500, 99);
    Eigen::MatrixXd rec = r.corpus.vectors * r.topics.topic_term;
    CHECK((m - rec).norm() / m.norm() <= 1e-3);
}

TEST_CASE("nmf objective trace is non-increasing") {
    Eigen::MatrixXd w(6, 2), h(2, 5);
    w << 1, 0, 0.5, 1, 2, 0.3, 0, 1.5, 1, 1, 0.2, 2;
    h << 0.5, 1, 0, 0.3, 1.2, 1, 0.1, 0.8, 1, 0;
    Eigen::MatrixXd m = w * h;
    NmfResult r = embed_nmf(from_dense(m), 2, 200, 4);
    REQUIRE(r.objective_trace.size() == 201);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
        CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-9);
}

TEST_CASE("nmf factors stay non-negative") {
    Eigen::MatrixXd m(4, 4);
    m << 1, 2, 0, 1,
         0, 1, 1, 0,
         2, 0, 1, 1,
         1, 1, 0, 2;
    NmfResult r = embed_nmf(from_dense(m), 2, 100, 8);
    CHECK(r.topics.doc_topic.minCoeff() >= 0.0);
    CHECK(r.topics.topic_term.minCoeff() >= 0.0);
}

TEST_CASE("nmf reaches the realizable optimum from different seeds") {
    Eigen::MatrixXd w(8, 2), h(2, 6);
    Rng rng(21);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 2; ++j) w(i, j) = rng.uniform();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 6; ++j) h(i, j) = rng.uniform();
    Eigen::MatrixXd m = w * h;
    for (std::uint64_t seed : {1, 2, 3}) {
        double objective = embed_nmf(from_dense(m), 2, 500, seed).objective_trace.back();
        CHECK(objective <= 1e-3 * m.norm());
    }
}

TEST_CASE("nmf rejects negative input") {
    Eigen::MatrixXd m(2, 2);
    m << 1, -1, 0, 2;
    CHECK_THROWS_AS(embed_nmf(from_dense(m), 1, 10, 1), InputError);
}

TEST_CASE("nmf allows k beyond matrix rank") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 3);
    NmfResult r = embed_nmf(from_dense(m), 5, 50, 2);
    CHECK(r.corpus.vectors.cols() == 5);
}

TEST_CASE("jensen shannon distance") {
    Eigen::VectorXd p(2), q(2);
    p << 1, 0;
    q << 0, 1;
    CHECK(jensen_shannon_distance(p, p) == doctest::Approx(0.0));
    CHECK(jensen_shannon_distance(p, q) == doctest::Approx(std::sqrt(std::log(2.0))));
    Eigen::VectorXd u(3), v(3);
    u << 2, 2, 2;  // normalizes to uniform
    v << 1, 1, 1;
    CHECK(jensen_shannon_distance(u, v) == doctest::Approx(0.0));
}

TEST_CASE("vsm keeps provenance") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(2, 3);
    EmbeddedCorpus c = embed_vsm(from_dense(m, "tfidf"));
    CHECK(c.info.method == "vsm");
    CHECK(c.info.weighting == "tfidf");
    CHECK(c.info.k_topics == 0);
}
