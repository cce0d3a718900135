#include <cmath>

#include "corpusmap/errors.hpp"
#include "corpusmap/io.hpp"
#include "corpusmap/layout.hpp"
#include "corpusmap/rng.hpp"

namespace corpusmap {

namespace {

double raw_stress(const Eigen::MatrixXd& diss, const Eigen::MatrixXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
            double dx = x(i, 0) - x(j, 0);
            double dy = x(i, 1) - x(j, 1);
            double gap = diss(i, j) - std::sqrt(dx * dx + dy * dy);
            s += gap * gap;
        }
    return s;
}

}  // namespace

MdsResult layout_mds(const Eigen::MatrixXd& diss, const DrParams& params,
                     const std::vector<std::string>& labels) {
    const Eigen::Index n = diss.rows();
    if (diss.cols() != n) throw InputError("mds: dissimilarity matrix must be square");
    if (n < 2) throw InputError("mds: need at least 2 points");
    if (static_cast<std::size_t>(n) != labels.size())
        throw InputError("mds: label count does not match matrix size");
    if (params.mds_max_iter < 1) throw InputError("mds: max_iter must be at least 1");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (diss(i, j) != diss(j, i))
                throw InputError("mds: dissimilarity matrix must be symmetric");
            if (diss(i, j) < 0.0) throw InputError("mds: dissimilarities must be nonnegative");
        }

    Rng rng(params.seed);
    Eigen::MatrixXd x(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(-1.0, 1.0);
        x(i, 1) = rng.uniform(-1.0, 1.0);
    }

    MdsResult result;
    result.stress_trace.push_back(raw_stress(diss, x));

    Eigen::MatrixXd b(n, n);
    for (std::size_t it = 0; it < params.mds_max_iter; ++it) {
        // Guttman transform with unit weights: X <- (1/N) B(X) X.
        b.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double dx = x(i, 0) - x(j, 0);
                double dy = x(i, 1) - x(j, 1);
                double dist = std::sqrt(dx * dx + dy * dy);
                double v = dist > 0.0 ? -diss(i, j) / dist : 0.0;
                b(i, j) = v;
                b(j, i) = v;
                b(i, i) -= v;
                b(j, j) -= v;
            }
        Eigen::MatrixXd xn = (b * x) / static_cast<double>(n);

        double prev = result.stress_trace.back();
        double cur = raw_stress(diss, xn);
        if (cur > prev) break;  // fp wobble at the fixpoint; keep the better layout
        x = xn;
        result.stress_trace.push_back(cur);
        ++result.iterations;
        if (cur == 0.0 || (prev > 0.0 && (prev - cur) / prev < 1e-9)) break;
    }

    result.plot.points = x;
    result.plot.labels = labels;
    result.plot.provenance["dr"] = "mds";
    result.plot.provenance["max_iter"] = std::to_string(params.mds_max_iter);
    result.plot.provenance["seed"] = std::to_string(params.seed);
    return result;
}

}  // namespace corpusmap
