#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpusmap/embed.hpp"

namespace corpusmap {

// A 2-D layout of a corpus. `provenance` records everything needed to
// reproduce it: corpus id, jitter lambda/seed, embedding, projection name,
// hyperparameters, and the projection seed.
struct Scatterplot {
    Eigen::MatrixXd points;  // N x 2
    std::vector<std::string> labels;
    std::map<std::string, std::string> provenance;
};

struct DrParams {
    std::string name;  // "mds", "som", "tsne"
    std::size_t mds_max_iter = 300;
    std::size_t som_m = 10;
    std::size_t som_n = 10;
    bool som_dither = true;
    double tsne_perplexity = 30.0;
    std::size_t tsne_n_iter = 1000;
    std::optional<double> tsne_learning_rate;  // nullopt = auto = max(N/12, 50)
    std::uint64_t seed = 0;
};

struct MdsResult {
    Scatterplot plot;
    std::vector<double> stress_trace;  // raw stress; entry 0 is the seeded start
    std::size_t iterations = 0;
};

struct SomResult {
    Scatterplot plot;
    std::vector<std::uint32_t> bmu;  // linear unit index per document
    Eigen::MatrixXd codebook;        // (m*n) x reduced-dim
};

struct TsneResult {
    Scatterplot plot;
    std::vector<double> kl_trace;              // KL against the unexaggerated P
    std::vector<double> realized_perplexity;   // per point, after bandwidth search
};

// SMACOF majorization from a seeded uniform [-1,1]^2 start. Raw stress
// sigma(X) = sum_{i<j} (d_ij - |x_i - x_j|)^2 never increases along the
// recorded trace; stops at max_iter or when the relative decrease drops
// below 1e-9.
MdsResult layout_mds(const Eigen::MatrixXd& diss, const DrParams& params,
                     const std::vector<std::string>& labels);

// Batch SOM on a PCA reduction of the document vectors (smallest
// dimensionality keeping >= 95% of the variance). Gaussian neighborhood
// width shrinks linearly from max(m,n)/2 to 0.5 over 20 epochs; the codebook
// starts from a seeded sample of the training vectors; equidistant units
// resolve to the lowest linear index a*n + b. Each document lands on its
// best-matching unit's grid coordinate (x = a, y = b) plus a seeded uniform
// dither in (-0.4, 0.4)^2, switchable off.
SomResult layout_som(const EmbeddedCorpus& corpus, const DrParams& params);

// Exact t-SNE on squared dissimilarities. Per-point Gaussian bandwidths are
// bisected (50 steps) until the conditional perplexity 2^H matches
// params.tsne_perplexity within 1e-4; P is symmetrized; gradient descent uses
// early exaggeration 12 for the first 250 iterations and momentum 0.5
// switching to 0.8 at iteration 250; the start is seeded Gaussian scaled by
// 1e-4.
TsneResult layout_tsne(const Eigen::MatrixXd& diss, const DrParams& params,
                       const std::vector<std::string>& labels);
TsneResult layout_tsne(const EmbeddedCorpus& corpus, const DrParams& params);

// Smallest PCA projection of `rows` keeping at least `variance_kept` of the
// total variance. Exposed for tests.
Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& rows, double variance_kept);

// Conditional Gaussian row distributions and realized perplexities for the
// given squared dissimilarities. Exposed for tests.
struct TsneConditional {
    Eigen::MatrixXd p;  // row-stochastic, zero diagonal
    std::vector<double> realized_perplexity;
};
TsneConditional tsne_conditional(const Eigen::MatrixXd& squared_diss, double perplexity);

}  // namespace corpusmap
