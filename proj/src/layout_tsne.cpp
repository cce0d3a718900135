#include <cmath>
#include <limits>

#include "corpusmap/errors.hpp"
#include "corpusmap/io.hpp"
#include "corpusmap/layout.hpp"
#include "corpusmap/rng.hpp"

namespace corpusmap {

namespace {

// Row entropy at precision beta, numerically shifted by the smallest
// distance. Returns exp(H) (the perplexity) and fills the normalized row.
double row_perplexity(const Eigen::MatrixXd& d2, Eigen::Index i, double beta,
                      Eigen::VectorXd& row) {
    const Eigen::Index n = d2.rows();
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
        if (j != i && d2(i, j) < dmin) dmin = d2(i, j);

    double sum = 0.0, weighted = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
            row(j) = 0.0;
            continue;
        }
        double u = std::exp(-beta * (d2(i, j) - dmin));
        row(j) = u;
        sum += u;
        weighted += u * (d2(i, j) - dmin);
    }
    row /= sum;
    double entropy = beta * weighted / sum + std::log(sum);
    return std::exp(entropy);
}

}  // namespace

TsneConditional tsne_conditional(const Eigen::MatrixXd& squared_diss, double perplexity) {
    const Eigen::Index n = squared_diss.rows();
    TsneConditional cond;
    cond.p.resize(n, n);
    cond.realized_perplexity.resize(static_cast<std::size_t>(n));

    Eigen::VectorXd row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double beta = 1.0;
        double beta_lo = 0.0;
        double beta_hi = std::numeric_limits<double>::infinity();
        double realized = row_perplexity(squared_diss, i, beta, row);
        for (int step = 0; step < 50 && std::abs(realized - perplexity) > 1e-4; ++step) {
            if (realized > perplexity) {
                beta_lo = beta;
                beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta_lo + beta_hi);
            } else {
                beta_hi = beta;
                beta = beta_lo == 0.0 ? beta / 2.0 : 0.5 * (beta_lo + beta_hi);
            }
            realized = row_perplexity(squared_diss, i, beta, row);
        }
        cond.p.row(i) = row;
        cond.realized_perplexity[static_cast<std::size_t>(i)] = realized;
    }
    return cond;
}

TsneResult layout_tsne(const Eigen::MatrixXd& diss, const DrParams& params,
                       const std::vector<std::string>& labels) {
    const Eigen::Index n = diss.rows();
    if (diss.cols() != n) throw InputError("tsne: dissimilarity matrix must be square");
    if (n < 2) throw InputError("tsne: need at least 2 points");
    if (static_cast<std::size_t>(n) != labels.size())
        throw InputError("tsne: label count does not match matrix size");
    if (!(params.tsne_perplexity > 1.0) ||
        params.tsne_perplexity >= static_cast<double>(n))
        throw InputError("tsne: perplexity must satisfy 1 < perplexity < n_docs (got " +
                         format_real(params.tsne_perplexity) + " for " + std::to_string(n) +
                         " documents)");
    if (params.tsne_n_iter < 250) throw InputError("tsne: n_iter must be at least 250");

    TsneConditional cond = tsne_conditional(diss.array().square(), params.tsne_perplexity);
    Eigen::MatrixXd p = (cond.p + cond.p.transpose()) / (2.0 * static_cast<double>(n));

    Rng rng(params.seed);
    Eigen::MatrixXd y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i, 0) = 1e-4 * rng.normal();
        y(i, 1) = 1e-4 * rng.normal();
    }

    const double lr = params.tsne_learning_rate.value_or(
        std::max(static_cast<double>(n) / 12.0, 50.0));

    TsneResult result;
    result.realized_perplexity = cond.realized_perplexity;
    result.kl_trace.reserve(params.tsne_n_iter + 1);

    Eigen::MatrixXd qnum(n, n), grad(n, 2);
    Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, 2);
    auto pass = [&](bool with_gradient, double exaggeration) {
        double z = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            qnum(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double dx = y(i, 0) - y(j, 0);
                double dy = y(i, 1) - y(j, 1);
                double q = 1.0 / (1.0 + dx * dx + dy * dy);
                qnum(i, j) = q;
                qnum(j, i) = q;
                z += 2.0 * q;
            }
        }
        double kl = 0.0;
        if (with_gradient) grad.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                double q = std::max(qnum(i, j) / z, 1e-12);
                if (p(i, j) > 0.0) kl += p(i, j) * std::log(p(i, j) / q);
                if (with_gradient) {
                    double mult = 4.0 * (exaggeration * p(i, j) - q) * qnum(i, j);
                    grad(i, 0) += mult * (y(i, 0) - y(j, 0));
                    grad(i, 1) += mult * (y(i, 1) - y(j, 1));
                }
            }
        return kl;
    };

    for (std::size_t it = 0; it < params.tsne_n_iter; ++it) {
        double exaggeration = it < 250 ? 12.0 : 1.0;
        double momentum = it < 250 ? 0.5 : 0.8;
        result.kl_trace.push_back(pass(true, exaggeration));
        velocity = momentum * velocity - lr * grad;
        y += velocity;
        y.rowwise() -= y.colwise().mean();
    }
    result.kl_trace.push_back(pass(false, 1.0));

    result.plot.points = y;
    result.plot.labels = labels;
    result.plot.provenance["dr"] = "tsne";
    result.plot.provenance["perplexity"] = format_real(params.tsne_perplexity);
    result.plot.provenance["n_iter"] = std::to_string(params.tsne_n_iter);
    result.plot.provenance["learning_rate"] =
        params.tsne_learning_rate ? format_real(*params.tsne_learning_rate) : std::string("auto");
    result.plot.provenance["seed"] = std::to_string(params.seed);
    return result;
}

TsneResult layout_tsne(const EmbeddedCorpus& corpus, const DrParams& params) {
    return layout_tsne(dissimilarity_matrix(corpus), params, corpus.labels);
}

}  // namespace corpusmap
