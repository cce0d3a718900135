#include <cmath>

#include "corpusmap/errors.hpp"
#include "corpusmap/io.hpp"
#include "corpusmap/layout.hpp"
#include "corpusmap/rng.hpp"

namespace corpusmap {

Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& rows, double variance_kept) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();

    double total = 0.0;
    for (Eigen::Index c = 0; c < s.size(); ++c) total += s(c) * s(c);

    Eigen::Index q = 1;
    if (total > 0.0) {
        double cum = 0.0;
        for (q = 0; q < s.size(); ++q) {
            cum += s(q) * s(q);
            if (cum >= variance_kept * total) {
                ++q;
                break;
            }
        }
        if (q < 1) q = 1;
    }
    if (q > s.size()) q = s.size();
    if (q < 1) return Eigen::MatrixXd::Zero(n, 1);
    return svd.matrixU().leftCols(q) * s.head(q).asDiagonal();
}

SomResult layout_som(const EmbeddedCorpus& corpus, const DrParams& params) {
    const Eigen::Index n_docs = corpus.vectors.rows();
    if (n_docs < 1) throw InputError("som: corpus has no documents");
    if (corpus.labels.size() != static_cast<std::size_t>(n_docs))
        throw InputError("som: label count does not match document count");
    if (params.som_m < 2 || params.som_n < 2)
        throw InputError("som: grid must be at least 2x2");

    const Eigen::Index m = static_cast<Eigen::Index>(params.som_m);
    const Eigen::Index n = static_cast<Eigen::Index>(params.som_n);
    const Eigen::Index units = m * n;
    const std::size_t epochs = 20;

    Eigen::MatrixXd data = pca_reduce(corpus.vectors, 0.95);
    const Eigen::Index dim = data.cols();

    Rng rng(params.seed);
    Eigen::MatrixXd codebook(units, dim);
    for (Eigen::Index u = 0; u < units; ++u)
        codebook.row(u) = data.row(static_cast<Eigen::Index>(rng.index(n_docs)));

    std::vector<std::uint32_t> bmu(static_cast<std::size_t>(n_docs), 0);
    auto assign_bmus = [&]() {
        for (Eigen::Index i = 0; i < n_docs; ++i) {
            Eigen::Index best = 0;
            double best_d = (data.row(i) - codebook.row(0)).squaredNorm();
            for (Eigen::Index u = 1; u < units; ++u) {
                double d = (data.row(i) - codebook.row(u)).squaredNorm();
                if (d < best_d) {  // ties keep the lowest linear index
                    best_d = d;
                    best = u;
                }
            }
            bmu[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(best);
        }
    };

    const double sigma0 = static_cast<double>(std::max(m, n)) / 2.0;
    const double sigma_end = 0.5;
    Eigen::MatrixXd num(units, dim);
    Eigen::VectorXd den(units);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        double sigma = sigma0 + (sigma_end - sigma0) * static_cast<double>(epoch) /
                                    static_cast<double>(epochs - 1);
        assign_bmus();

        num.setZero();
        den.setZero();
        for (Eigen::Index i = 0; i < n_docs; ++i) {
            Eigen::Index bi = bmu[static_cast<std::size_t>(i)];
            double ba = static_cast<double>(bi / n);
            double bb = static_cast<double>(bi % n);
            for (Eigen::Index u = 0; u < units; ++u) {
                double da = static_cast<double>(u / n) - ba;
                double db = static_cast<double>(u % n) - bb;
                double h = std::exp(-(da * da + db * db) / (2.0 * sigma * sigma));
                num.row(u) += h * data.row(i);
                den(u) += h;
            }
        }
        for (Eigen::Index u = 0; u < units; ++u)
            if (den(u) > 0.0) codebook.row(u) = num.row(u) / den(u);
    }
    assign_bmus();

    SomResult result;
    result.bmu = bmu;
    result.codebook = codebook;
    result.plot.points.resize(n_docs, 2);
    for (Eigen::Index i = 0; i < n_docs; ++i) {
        Eigen::Index u = bmu[static_cast<std::size_t>(i)];
        double x = static_cast<double>(u / n);
        double y = static_cast<double>(u % n);
        if (params.som_dither) {
            x += rng.uniform(-0.4, 0.4);
            y += rng.uniform(-0.4, 0.4);
        }
        result.plot.points(i, 0) = x;
        result.plot.points(i, 1) = y;
    }
    result.plot.labels = corpus.labels;
    result.plot.provenance["dr"] = "som";
    result.plot.provenance["m"] = std::to_string(params.som_m);
    result.plot.provenance["n"] = std::to_string(params.som_n);
    result.plot.provenance["dither"] = params.som_dither ? "on" : "off";
    result.plot.provenance["seed"] = std::to_string(params.seed);
    return result;
}

}  // namespace corpusmap
