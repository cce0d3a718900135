#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "corpusmap/corpus.hpp"

namespace corpusmap {

enum class Dissimilarity { cosine };

struct EmbeddingInfo {
    std::string method;      // "vsm", "lsi", "nmf"
    std::string weighting;   // "raw" or "tfidf"
    std::size_t k_topics = 0;  // 0 for vsm
};

// Documents as row vectors plus the dissimilarity the space is meant to be
// read with.
struct EmbeddedCorpus {
    Eigen::MatrixXd vectors;  // n_docs x dim
    Dissimilarity dissimilarity = Dissimilarity::cosine;
    EmbeddingInfo info;
    std::vector<std::string> labels;  // may be empty when loaded from file
};

struct TopicFactorization {
    Eigen::MatrixXd doc_topic;   // n_docs x K
    Eigen::MatrixXd topic_term;  // K x n_terms
};

struct LsiResult {
    EmbeddedCorpus corpus;
    TopicFactorization topics;
    Eigen::VectorXd singular_values;  // K, non-increasing
};

struct NmfResult {
    EmbeddedCorpus corpus;
    TopicFactorization topics;
    std::vector<double> objective_trace;  // Frobenius error, entry 0 before any update
};

// Identity embedding: document vectors are the (weighted) term counts.
EmbeddedCorpus embed_vsm(const WeightedMatrix& matrix);

// Rank-K truncated SVD by orthogonal power iteration (fixed internal seed,
// K+4 oversampling, 50 subspace refinements). Document vectors are U_K S_K;
// topic_term holds V_K^T. Component signs are normalized so each V column's
// largest-magnitude entry is positive.
LsiResult embed_lsi(const WeightedMatrix& matrix, std::size_t k_topics);
LsiResult embed_lsi_dense(const Eigen::MatrixXd& matrix, std::size_t k_topics);

// Multiplicative-update NMF (Frobenius objective). W and H start uniform(0,1)
// from `seed`; denominators are stabilized with +1e-12. Each iteration updates
// H then W. Document vectors are W.
NmfResult embed_nmf(const WeightedMatrix& matrix, std::size_t k_topics, std::size_t max_iter,
                    std::uint64_t seed);
NmfResult embed_nmf_dense(const Eigen::MatrixXd& matrix, std::size_t k_topics,
                          std::size_t max_iter, std::uint64_t seed);

// Pairwise cosine dissimilarity 1 - <x,y>/(|x||y|), zero diagonal, symmetric.
// All-zero rows sit at dissimilarity 1 from every other row. Entries land in
// [0, 2]; they stay in [0, 1] when the rows are nonnegative.
Eigen::MatrixXd cosine_dissimilarity(const Eigen::MatrixXd& rows);

Eigen::MatrixXd dissimilarity_matrix(const EmbeddedCorpus& corpus);

// Jensen-Shannon distance (square root of the divergence, natural log)
// between two nonnegative vectors, normalized to distributions first.
double jensen_shannon_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace corpusmap
