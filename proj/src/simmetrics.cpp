#include "corpusmap/simmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "corpusmap/errors.hpp"

namespace corpusmap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_same_shape(const RankStructure& a, const RankStructure& b, std::size_t k,
                      const char* who) {
    if (a.n != b.n)
        throw InputError(std::string(who) + ": rank structures differ in size (" +
                         std::to_string(a.n) + " vs " + std::to_string(b.n) + ")");
    if (a.k != k || b.k != k)
        throw InputError(std::string(who) + ": rank structures were built with a different k");
}

// Sorted distinct labels to contiguous ids.
std::vector<std::uint32_t> label_ids(const std::vector<std::string>& labels,
                                     std::size_t* n_categories) {
    std::map<std::string, std::uint32_t> index;
    for (const auto& l : labels) index.emplace(l, 0);
    std::uint32_t next = 0;
    for (auto& [l, id] : index) id = next++;
    std::vector<std::uint32_t> ids;
    ids.reserve(labels.size());
    for (const auto& l : labels) ids.push_back(index[l]);
    if (n_categories) *n_categories = index.size();
    return ids;
}

Eigen::MatrixXd category_centroids(const Eigen::MatrixXd& pts,
                                   const std::vector<std::uint32_t>& ids,
                                   std::size_t n_categories) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_categories),
                                                 pts.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_categories));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        sums.row(ids[static_cast<std::size_t>(i)]) += pts.row(i);
        counts(ids[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Eigen::Index c = 0; c < sums.rows(); ++c) sums.row(c) /= counts(c);
    return sums;
}

void check_labels(const Eigen::MatrixXd& pts, const std::vector<std::string>& labels,
                  const char* who) {
    if (labels.size() != static_cast<std::size_t>(pts.rows()))
        throw InputError(std::string(who) + ": label count does not match point count");
}

}  // namespace

RankStructure rank_structure(const Eigen::MatrixXd& diss, std::size_t k) {
    const std::size_t n = static_cast<std::size_t>(diss.rows());
    if (static_cast<std::size_t>(diss.cols()) != n)
        throw InputError("rank_structure: dissimilarity matrix must be square");
    if (k < 1 || k >= n)
        throw InputError("rank_structure: need N > k >= 1 (N=" + std::to_string(n) +
                         ", k=" + std::to_string(k) + ")");

    RankStructure r;
    r.n = n;
    r.k = k;
    r.knn.assign(n, {});
    r.ranks.assign(n, std::vector<std::uint32_t>(n, 0));

    std::vector<std::uint32_t> order;
    order.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.push_back(static_cast<std::uint32_t>(j));
        std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
            double dx = diss(static_cast<Eigen::Index>(i), x);
            double dy = diss(static_cast<Eigen::Index>(i), y);
            return dx < dy || (dx == dy && x < y);
        });
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            r.ranks[i][order[pos]] = static_cast<std::uint32_t>(pos + 1);
        r.knn[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return r;
}

std::pair<double, double> trustworthiness_continuity(const RankStructure& a,
                                                     const RankStructure& b, std::size_t k) {
    check_same_shape(a, b, k, "trustworthiness");
    const double n = static_cast<double>(a.n);
    const double kk = static_cast<double>(k);
    const double denom = n * kk * (2.0 * n - 3.0 * kk - 1.0);
    if (denom <= 0.0)
        throw InputError("trustworthiness: k too large for the normalizer (need 3k + 1 < 2N)");

    double penalty_t = 0.0;  // intruders in B's neighborhoods, ranked by A
    double penalty_c = 0.0;  // intruders in A's neighborhoods, ranked by B
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::uint32_t j : b.knn[i]) {
            std::uint32_t r = a.ranks[i][j];
            if (r > k) penalty_t += static_cast<double>(r) - kk;
        }
        for (std::uint32_t j : a.knn[i]) {
            std::uint32_t r = b.ranks[i][j];
            if (r > k) penalty_c += static_cast<double>(r) - kk;
        }
    }
    return {1.0 - 2.0 * penalty_t / denom, 1.0 - 2.0 * penalty_c / denom};
}

std::pair<double, double> mrre(const RankStructure& a, const RankStructure& b, std::size_t k) {
    check_same_shape(a, b, k, "mrre");
    const double n = static_cast<double>(a.n);
    double c = 0.0;
    for (std::size_t l = 1; l <= k; ++l)
        c += std::abs(n - 2.0 * static_cast<double>(l) + 1.0) / static_cast<double>(l);
    c *= n;

    double err_m = 0.0, err_f = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::uint32_t j : a.knn[i]) {
            double ra = a.ranks[i][j], rb = b.ranks[i][j];
            err_m += std::abs(ra - rb) / ra;
        }
        for (std::uint32_t j : b.knn[i]) {
            double ra = a.ranks[i][j], rb = b.ranks[i][j];
            err_f += std::abs(ra - rb) / rb;
        }
    }
    return {1.0 - err_m / c, 1.0 - err_f / c};
}

double lcmc(const RankStructure& a, const RankStructure& b, std::size_t k,
            bool adjust_for_chance) {
    check_same_shape(a, b, k, "lcmc");
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::uint32_t j : b.knn[i])
            if (a.ranks[i][j] <= k) ++total;
    double value = static_cast<double>(total) / static_cast<double>(k * a.n);
    if (adjust_for_chance)
        value -= static_cast<double>(k) / static_cast<double>(a.n - 1);
    return value;
}

double label_preservation(const RankStructure& a, const RankStructure& b,
                          const std::vector<std::string>& labels, std::size_t k) {
    check_same_shape(a, b, k, "label_preservation");
    if (labels.size() != a.n)
        throw InputError("label_preservation: label count does not match structure size");

    std::size_t n_categories = 0;
    std::vector<std::uint32_t> ids = label_ids(labels, &n_categories);

    std::uint64_t total = 0;
    std::vector<std::uint32_t> count_a(n_categories), count_b(n_categories);
    for (std::size_t i = 0; i < a.n; ++i) {
        std::fill(count_a.begin(), count_a.end(), 0);
        std::fill(count_b.begin(), count_b.end(), 0);
        for (std::uint32_t j : a.knn[i]) ++count_a[ids[j]];
        for (std::uint32_t j : b.knn[i]) ++count_b[ids[j]];
        for (std::size_t c = 0; c < n_categories; ++c)
            total += std::min(count_a[c], count_b[c]);
    }
    return static_cast<double>(total) / static_cast<double>(k * a.n);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw InputError("pearson: vectors differ in length");
    if (x.size() < 2) throw ComputeError("pearson: need at least 2 values");

    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ComputeError("pearson: undefined correlation (zero-variance input)");
    if (x == y) return 1.0;  // keeps identity comparisons at the exact optimum
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> pearson_or_absent(const std::vector<double>& x,
                                        const std::vector<double>& y) {
    try {
        return pearson(x, y);
    } catch (const ComputeError&) {
        return std::nullopt;
    }
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return v[a] < v[b] || (v[a] == v[b] && a < b);
    });

    std::vector<double> ranks(v.size(), 0.0);
    std::size_t lo = 0;
    while (lo < idx.size()) {
        std::size_t hi = lo;
        while (hi + 1 < idx.size() && v[idx[hi + 1]] == v[idx[lo]]) ++hi;
        double avg = 0.5 * static_cast<double>(lo + hi) + 1.0;
        for (std::size_t p = lo; p <= hi; ++p) ranks[idx[p]] = avg;
        lo = hi + 1;
    }
    return ranks;
}

std::pair<double, double> shepard_correlations(const std::vector<double>& da,
                                               const std::vector<double>& db) {
    if (da.size() != db.size())
        throw InputError("shepard: distance vectors differ in length");
    double pc = pearson(da, db);
    double sc = pearson(average_ranks(da), average_ranks(db));
    return {pc, sc};
}

double distance_consistency_points(const Eigen::MatrixXd& pts,
                                   const std::vector<std::string>& labels) {
    check_labels(pts, labels, "distance_consistency");
    if (pts.rows() == 0) throw InputError("distance_consistency: empty point set");

    std::size_t n_categories = 0;
    std::vector<std::uint32_t> ids = label_ids(labels, &n_categories);
    Eigen::MatrixXd centroids = category_centroids(pts, ids, n_categories);

    std::size_t consistent = 0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        std::uint32_t own = ids[static_cast<std::size_t>(i)];
        double own_d = (pts.row(i) - centroids.row(own)).squaredNorm();
        bool ok = true;
        for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
            if (static_cast<std::uint32_t>(c) == own) continue;
            if ((pts.row(i) - centroids.row(c)).squaredNorm() < own_d) {
                ok = false;
                break;
            }
        }
        if (ok) ++consistent;
    }
    return static_cast<double>(consistent) / static_cast<double>(pts.rows());
}

double cluster_ordering_points(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               const std::vector<std::string>& labels) {
    check_labels(a, labels, "cluster_ordering");
    check_labels(b, labels, "cluster_ordering");

    std::size_t n_categories = 0;
    std::vector<std::uint32_t> ids = label_ids(labels, &n_categories);
    if (n_categories < 3)
        throw InputError("cluster_ordering: need at least 3 categories, got " +
                         std::to_string(n_categories));

    Eigen::MatrixXd ca = category_centroids(a, ids, n_categories);
    Eigen::MatrixXd cb = category_centroids(b, ids, n_categories);
    std::vector<double> da, db;
    da.reserve(n_categories * (n_categories - 1) / 2);
    db.reserve(da.capacity());
    for (Eigen::Index i = 0; i < ca.rows(); ++i)
        for (Eigen::Index j = i + 1; j < ca.rows(); ++j) {
            da.push_back((ca.row(i) - ca.row(j)).norm());
            db.push_back((cb.row(i) - cb.row(j)).norm());
        }
    try {
        return pearson(da, db);
    } catch (const ComputeError&) {
        throw ComputeError("cluster_ordering: undefined correlation (zero-variance centroid distances)");
    }
}

double silhouette_points(const Eigen::MatrixXd& pts, const std::vector<std::string>& labels) {
    check_labels(pts, labels, "silhouette");
    std::size_t n_categories = 0;
    std::vector<std::uint32_t> ids = label_ids(labels, &n_categories);
    if (n_categories < 2)
        throw InputError("silhouette: need at least 2 categories, got " +
                         std::to_string(n_categories));

    const Eigen::Index n = pts.rows();
    std::vector<std::size_t> category_size(n_categories, 0);
    for (std::uint32_t id : ids) ++category_size[id];

    double total = 0.0;
    std::vector<double> mean_d(n_categories);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::uint32_t own = ids[static_cast<std::size_t>(i)];
        if (category_size[own] == 1) continue;  // singleton silhouette is 0

        std::fill(mean_d.begin(), mean_d.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_d[ids[static_cast<std::size_t>(j)]] += (pts.row(i) - pts.row(j)).norm();
        }
        double a_i = mean_d[own] / static_cast<double>(category_size[own] - 1);
        double b_i = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < n_categories; ++c) {
            if (c == own) continue;
            b_i = std::min(b_i, mean_d[c] / static_cast<double>(category_size[c]));
        }
        double denom = std::max(a_i, b_i);
        total += denom > 0.0 ? (b_i - a_i) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

double distance_consistency(const Scatterplot& p) {
    return distance_consistency_points(p.points, p.labels);
}

double cluster_ordering(const Scatterplot& a, const Scatterplot& b) {
    if (a.labels != b.labels)
        throw InputError("cluster_ordering: plots have different labels");
    return cluster_ordering_points(a.points, b.points, a.labels);
}

double gamma_dc(const Scatterplot& a, const Scatterplot& b) {
    if (a.labels != b.labels)
        throw InputError("gamma_dc: plots have different labels");
    return std::abs(distance_consistency(a) - distance_consistency(b));
}

double silhouette(const Scatterplot& p) { return silhouette_points(p.points, p.labels); }

double procrustes_rotation_points(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows())
        throw InputError("procrustes: point sets differ in size");
    if (a.rows() < 2) throw InputError("procrustes: need at least 2 points");
    if (a.cols() != 2 || b.cols() != 2)
        throw InputError("procrustes: rotation is defined for 2-D point sets");

    Eigen::MatrixXd ca = a.rowwise() - a.colwise().mean();
    Eigen::MatrixXd cb = b.rowwise() - b.colwise().mean();
    if (ca.squaredNorm() == 0.0 || cb.squaredNorm() == 0.0)
        throw ComputeError("procrustes: undefined rotation (all points coincident)");

    double sin_sum = 0.0, cos_sum = 0.0;
    for (Eigen::Index i = 0; i < ca.rows(); ++i) {
        sin_sum += ca(i, 0) * cb(i, 1) - ca(i, 1) * cb(i, 0);
        cos_sum += ca(i, 0) * cb(i, 0) + ca(i, 1) * cb(i, 1);
    }
    return std::atan2(sin_sum, cos_sum) * 180.0 / kPi;
}

double procrustes_rotation(const Scatterplot& a, const Scatterplot& b) {
    return procrustes_rotation_points(a.points, b.points);
}

namespace {

void check_unit_range(double v, const char* who) {
    if (!(v >= 0.0 && v <= 1.0))
        throw InputError(std::string(who) + ": component outside [0, 1]");
}

void check_corr_range(double v, const char* who) {
    if (!(v >= -1.0 && v <= 1.0))
        throw InputError(std::string(who) + ": component outside [-1, 1]");
}

}  // namespace

double aggregate_alpha(double alpha_t, double alpha_c, double alpha_mm, double alpha_mf,
                       double alpha_lc, double alpha_lp) {
    for (double v : {alpha_t, alpha_c, alpha_mm, alpha_mf, alpha_lc, alpha_lp})
        check_unit_range(v, "aggregate_alpha");
    return ((alpha_t + alpha_c + alpha_mm + alpha_mf) / 4.0 + alpha_lc + alpha_lp) / 3.0;
}

double aggregate_beta(double beta_pc, double beta_sc, double beta_co) {
    for (double v : {beta_pc, beta_sc, beta_co}) check_corr_range(v, "aggregate_beta");
    return ((0.5 * (beta_pc + 1.0) + 0.5 * (beta_sc + 1.0)) / 2.0 + (beta_co + 1.0) / 2.0) / 2.0;
}

double aggregate_gamma(double gamma_dc_value) {
    check_unit_range(gamma_dc_value, "aggregate_gamma");
    return 1.0 - gamma_dc_value;
}

double adaptability(double value_high, double value_low) {
    check_unit_range(value_high, "adaptability");
    check_unit_range(value_low, "adaptability");
    return 1.0 - std::abs(value_high - value_low);
}

Scatterplot convex_combination_layout(const Eigen::MatrixXd& theta,
                                      const Eigen::MatrixXd& topic_positions,
                                      const std::vector<std::string>& labels) {
    if (topic_positions.cols() != 2)
        throw InputError("convex_combination: topic positions must be 2-D");
    if (theta.cols() != topic_positions.rows())
        throw InputError("convex_combination: theta has " + std::to_string(theta.cols()) +
                         " topics but " + std::to_string(topic_positions.rows()) +
                         " positions were given");
    if (labels.size() != static_cast<std::size_t>(theta.rows()))
        throw InputError("convex_combination: label count does not match theta rows");

    Scatterplot plot;
    plot.points.resize(theta.rows(), 2);
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < theta.cols(); ++j) {
            if (theta(i, j) < 0.0)
                throw InputError("convex_combination: negative topic weight in row " +
                                 std::to_string(i));
            sum += theta(i, j);
        }
        if (sum <= 0.0)
            throw InputError("convex_combination: zero topic-weight row " + std::to_string(i));
        double x = 0.0, y = 0.0;
        for (Eigen::Index j = 0; j < theta.cols(); ++j) {
            if (theta(i, j) == 0.0) continue;
            double w = theta(i, j) / sum;
            x += w * topic_positions(j, 0);
            y += w * topic_positions(j, 1);
        }
        plot.points(i, 0) = x;
        plot.points(i, 1) = y;
    }
    plot.labels = labels;
    plot.provenance["placement"] = "convex";
    return plot;
}

Eigen::MatrixXd euclidean_distance_matrix(const Eigen::MatrixXd& pts) {
    const Eigen::Index n = pts.rows();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = (pts.row(i) - pts.row(j)).norm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

std::vector<double> condensed_distances(const Eigen::MatrixXd& diss) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(diss.rows()) * (diss.rows() - 1) / 2);
    for (Eigen::Index i = 0; i < diss.rows(); ++i)
        for (Eigen::Index j = i + 1; j < diss.rows(); ++j) v.push_back(diss(i, j));
    return v;
}

MetricInput MetricInput::from_plot(const Scatterplot& plot) {
    if (plot.points.cols() != 2)
        throw InputError("compare: scatterplot points must be 2-D");
    MetricInput m;
    m.points_ = plot.points;
    m.diss_ = euclidean_distance_matrix(plot.points);
    m.has_points_ = true;
    m.is_plot_ = true;
    return m;
}

MetricInput MetricInput::from_points(const Eigen::MatrixXd& pts, Dissimilarity rank_diss) {
    MetricInput m;
    m.points_ = pts;
    switch (rank_diss) {
        case Dissimilarity::cosine:
            m.diss_ = cosine_dissimilarity(pts);
            break;
    }
    m.has_points_ = true;
    m.is_plot_ = false;
    return m;
}

MetricInput MetricInput::from_dissimilarity(const Eigen::MatrixXd& diss) {
    if (diss.rows() != diss.cols())
        throw InputError("compare: dissimilarity matrix must be square");
    MetricInput m;
    m.diss_ = diss;
    return m;
}

SimilarityRecord compare(const MetricInput& a, const MetricInput& b,
                         const std::vector<std::string>& labels, std::size_t k) {
    if (a.size() != b.size())
        throw InputError("compare: inputs differ in size (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    if (labels.size() != a.size())
        throw InputError("compare: label count does not match input size");

    RankStructure ra = rank_structure(a.diss(), k);
    RankStructure rb = rank_structure(b.diss(), k);

    SimilarityRecord rec;
    auto [at, ac] = trustworthiness_continuity(ra, rb, k);
    auto [amm, amf] = mrre(ra, rb, k);
    rec.alpha_T = at;
    rec.alpha_C = ac;
    rec.alpha_MM = amm;
    rec.alpha_MF = amf;
    rec.alpha_LC = lcmc(ra, rb, k);
    rec.alpha_LP = label_preservation(ra, rb, labels, k);
    rec.alpha = aggregate_alpha(*rec.alpha_T, *rec.alpha_C, *rec.alpha_MM, *rec.alpha_MF,
                                *rec.alpha_LC, *rec.alpha_LP);

    auto [pc, sc] = shepard_correlations(condensed_distances(a.diss()),
                                         condensed_distances(b.diss()));
    rec.beta_PC = pc;
    rec.beta_SC = sc;

    if (a.has_points() && b.has_points()) {
        rec.beta_CO = cluster_ordering_points(a.points(), b.points(), labels);
        rec.beta = aggregate_beta(*rec.beta_PC, *rec.beta_SC, *rec.beta_CO);
        rec.gamma_DC = std::abs(distance_consistency_points(a.points(), labels) -
                                distance_consistency_points(b.points(), labels));
        rec.gamma = aggregate_gamma(*rec.gamma_DC);
        rec.gamma_SC_abs_diff = std::abs(silhouette_points(a.points(), labels) -
                                         silhouette_points(b.points(), labels));
        if (a.is_plot() && b.is_plot())
            rec.theta_PA = procrustes_rotation_points(a.points(), b.points());
    }
    return rec;
}

SimilarityRecord compare(const Scatterplot& a, const Scatterplot& b, std::size_t k) {
    if (a.labels != b.labels)
        throw InputError("compare: plots have different labels");
    return compare(MetricInput::from_plot(a), MetricInput::from_plot(b), a.labels, k);
}

}  // namespace corpusmap
