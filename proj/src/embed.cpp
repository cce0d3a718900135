#include "corpusmap/embed.hpp"

#include <algorithm>
#include <cmath>

#include "corpusmap/errors.hpp"
#include "corpusmap/rng.hpp"

namespace corpusmap {

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

void check_topic_count(std::size_t k, Eigen::Index rows, Eigen::Index cols, const char* who) {
    if (k < 1) throw InputError(std::string(who) + ": topic count must be at least 1");
    if (static_cast<Eigen::Index>(k) > std::min(rows, cols))
        throw InputError(std::string(who) + ": topic count " + std::to_string(k) +
                         " exceeds min(docs, terms) = " +
                         std::to_string(std::min(rows, cols)));
}

}  // namespace

EmbeddedCorpus embed_vsm(const WeightedMatrix& matrix) {
    EmbeddedCorpus c;
    c.vectors = matrix.to_dense();
    c.dissimilarity = Dissimilarity::cosine;
    c.info = {"vsm", matrix.weighting, 0};
    c.labels = matrix.labels;
    return c;
}

LsiResult embed_lsi_dense(const Eigen::MatrixXd& a, std::size_t k_topics) {
    check_topic_count(k_topics, a.rows(), a.cols(), "lsi");
    const Eigen::Index n = a.rows();
    const Eigen::Index d = a.cols();
    const Eigen::Index k = static_cast<Eigen::Index>(k_topics);
    const Eigen::Index p = std::min<Eigen::Index>(k + 4, std::min(n, d));

    Rng rng(0x5D51C0DEull);  // fixed: identical inputs give identical factors
    Eigen::MatrixXd omega(d, p);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < p; ++j) omega(i, j) = rng.normal();

    Eigen::MatrixXd q = thin_q(a * omega);
    for (int it = 0; it < 50; ++it) {
        Eigen::MatrixXd z = thin_q(a.transpose() * q);
        q = thin_q(a * z);
    }

    Eigen::MatrixXd b = q.transpose() * a;  // p x d
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd u = (q * svd.matrixU()).leftCols(k);
    Eigen::MatrixXd v = svd.matrixV().leftCols(k);
    Eigen::VectorXd s = svd.singularValues().head(k);

    // Fix the sign ambiguity per component.
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            double mag = std::abs(v(i, c));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (v(arg, c) < 0.0) {
            v.col(c) = -v.col(c);
            u.col(c) = -u.col(c);
        }
    }

    LsiResult r;
    r.singular_values = s;
    r.topics.doc_topic = u * s.asDiagonal();
    r.topics.topic_term = v.transpose();
    r.corpus.vectors = r.topics.doc_topic;
    r.corpus.dissimilarity = Dissimilarity::cosine;
    r.corpus.info = {"lsi", "", k_topics};
    return r;
}

LsiResult embed_lsi(const WeightedMatrix& matrix, std::size_t k_topics) {
    LsiResult r = embed_lsi_dense(matrix.to_dense(), k_topics);
    r.corpus.info.weighting = matrix.weighting;
    r.corpus.labels = matrix.labels;
    return r;
}

NmfResult embed_nmf_dense(const Eigen::MatrixXd& v, std::size_t k_topics, std::size_t max_iter,
                          std::uint64_t seed) {
    if (k_topics < 1) throw InputError("nmf: topic count must be at least 1");
    if ((v.array() < 0.0).any())
        throw InputError("nmf: input matrix must be nonnegative");

    const Eigen::Index n = v.rows();
    const Eigen::Index d = v.cols();
    const Eigen::Index k = static_cast<Eigen::Index>(k_topics);
    const double eps = 1e-12;

    Rng rng(seed);
    Eigen::MatrixXd w(n, k), h(k, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) w(i, j) = rng.uniform();
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < d; ++j) h(i, j) = rng.uniform();

    NmfResult r;
    r.objective_trace.reserve(max_iter + 1);
    r.objective_trace.push_back((v - w * h).norm());

    for (std::size_t it = 0; it < max_iter; ++it) {
        h.array() *= (w.transpose() * v).array() / ((w.transpose() * w * h).array() + eps);
        w.array() *= (v * h.transpose()).array() / ((w * h * h.transpose()).array() + eps);
        r.objective_trace.push_back((v - w * h).norm());
    }

    r.topics.doc_topic = w;
    r.topics.topic_term = h;
    r.corpus.vectors = w;
    r.corpus.dissimilarity = Dissimilarity::cosine;
    r.corpus.info = {"nmf", "", k_topics};
    return r;
}

NmfResult embed_nmf(const WeightedMatrix& matrix, std::size_t k_topics, std::size_t max_iter,
                    std::uint64_t seed) {
    NmfResult r = embed_nmf_dense(matrix.to_dense(), k_topics, max_iter, seed);
    r.corpus.info.weighting = matrix.weighting;
    r.corpus.labels = matrix.labels;
    return r;
}

Eigen::MatrixXd cosine_dissimilarity(const Eigen::MatrixXd& rows) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd gram = rows * rows.transpose();
    Eigen::VectorXd norm(n);
    for (Eigen::Index i = 0; i < n; ++i) norm(i) = std::sqrt(gram(i, i));

    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v;
            if (norm(i) == 0.0 || norm(j) == 0.0) {
                v = 1.0;
            } else {
                v = 1.0 - gram(i, j) / (norm(i) * norm(j));
                v = std::clamp(v, 0.0, 2.0);
            }
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

Eigen::MatrixXd dissimilarity_matrix(const EmbeddedCorpus& corpus) {
    switch (corpus.dissimilarity) {
        case Dissimilarity::cosine:
            return cosine_dissimilarity(corpus.vectors);
    }
    throw ComputeError("dissimilarity: unknown kind");
}

double jensen_shannon_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size())
        throw InputError("jensen_shannon: vectors differ in length");
    if ((p.array() < 0.0).any() || (q.array() < 0.0).any())
        throw InputError("jensen_shannon: vectors must be nonnegative");
    double sp = p.sum(), sq = q.sum();
    if (sp <= 0.0 || sq <= 0.0)
        throw InputError("jensen_shannon: vectors must have positive mass");

    double div = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        double pi = p(i) / sp, qi = q(i) / sq;
        double mi = 0.5 * (pi + qi);
        if (pi > 0.0) div += 0.5 * pi * std::log(pi / mi);
        if (qi > 0.0) div += 0.5 * qi * std::log(qi / mi);
    }
    return std::sqrt(std::max(0.0, div));
}

}  // namespace corpusmap
