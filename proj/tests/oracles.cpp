#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace oracle {

Eigen::MatrixXd euclidean(const Eigen::MatrixXd& pts) {
    const int n = static_cast<int>(pts.rows());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            d(i, j) = (pts.row(i) - pts.row(j)).norm();
    return d;
}

std::vector<std::vector<int>> rank_matrix(const Eigen::MatrixXd& diss) {
    const int n = static_cast<int>(diss.rows());
    std::vector<std::vector<int>> ranks(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i) {
        std::vector<int> order;
        for (int j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (diss(i, a) != diss(i, b)) return diss(i, a) < diss(i, b);
            return a < b;
        });
        for (int pos = 0; pos < static_cast<int>(order.size()); ++pos)
            ranks[i][order[pos]] = pos + 1;
    }
    return ranks;
}

std::vector<std::vector<int>> knn_of(const std::vector<std::vector<int>>& ranks, int k) {
    const int n = static_cast<int>(ranks.size());
    std::vector<std::vector<int>> knn(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i && ranks[i][j] <= k) knn[i].push_back(j);
    return knn;
}

double trustworthiness(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db, int k) {
    const int n = static_cast<int>(da.rows());
    auto ra = rank_matrix(da);
    auto rb = rank_matrix(db);
    auto ka = knn_of(ra, k);
    auto kb = knn_of(rb, k);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        std::set<int> in_a(ka[i].begin(), ka[i].end());
        for (int j : kb[i])
            if (!in_a.count(j)) sum += ra[i][j] - k;
    }
    double norm = 2.0 / (static_cast<double>(n) * k * (2.0 * n - 3.0 * k - 1.0));
    return 1.0 - norm * sum;
}

double mrre_m(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db, int k) {
    const int n = static_cast<int>(da.rows());
    auto ra = rank_matrix(da);
    auto rb = rank_matrix(db);
    auto ka = knn_of(ra, k);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j : ka[i])
            err += std::abs(static_cast<double>(ra[i][j]) - rb[i][j]) / ra[i][j];
    double c = 0.0;
    for (int l = 1; l <= k; ++l) c += std::abs(static_cast<double>(n) - 2.0 * l + 1.0) / l;
    c *= n;
    return 1.0 - err / c;
}

double lcmc(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db, int k) {
    const int n = static_cast<int>(da.rows());
    auto ka = knn_of(rank_matrix(da), k);
    auto kb = knn_of(rank_matrix(db), k);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        std::set<int> in_a(ka[i].begin(), ka[i].end());
        int inter = 0;
        for (int j : kb[i])
            if (in_a.count(j)) ++inter;
        sum += static_cast<double>(inter) / k;
    }
    return sum / n;
}

double label_preservation(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db,
                          const std::vector<std::string>& labels, int k) {
    const int n = static_cast<int>(da.rows());
    auto ka = knn_of(rank_matrix(da), k);
    auto kb = knn_of(rank_matrix(db), k);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        std::map<std::string, int> ca, cb;
        for (int j : ka[i]) ca[labels[j]]++;
        for (int j : kb[i]) cb[labels[j]]++;
        int inter = 0;
        for (const auto& [lab, cnt] : ca) {
            auto it = cb.find(lab);
            if (it != cb.end()) inter += std::min(cnt, it->second);
        }
        sum += static_cast<double>(inter) / k;
    }
    return sum / n;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::runtime_error("oracle: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

static std::vector<double> avg_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size(), 0.0);
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        double mean = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = mean;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(avg_ranks(x), avg_ranks(y));
}

std::vector<double> condensed(const Eigen::MatrixXd& diss) {
    std::vector<double> v;
    for (int i = 0; i < diss.rows(); ++i)
        for (int j = i + 1; j < diss.cols(); ++j) v.push_back(diss(i, j));
    return v;
}

static std::map<std::string, Eigen::RowVectorXd> centroids(
    const Eigen::MatrixXd& pts, const std::vector<std::string>& labels) {
    std::map<std::string, Eigen::RowVectorXd> sums;
    std::map<std::string, int> counts;
    for (int i = 0; i < pts.rows(); ++i) {
        auto it = sums.find(labels[i]);
        if (it == sums.end())
            sums[labels[i]] = pts.row(i);
        else
            it->second += pts.row(i);
        counts[labels[i]]++;
    }
    for (auto& [lab, s] : sums) s /= counts[lab];
    return sums;
}

double cluster_ordering(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const std::vector<std::string>& labels) {
    auto ca = centroids(a, labels);
    auto cb = centroids(b, labels);
    std::vector<std::string> names;
    for (const auto& [lab, c] : ca) names.push_back(lab);
    std::vector<double> da, db;
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            da.push_back((ca[names[i]] - ca[names[j]]).norm());
            db.push_back((cb[names[i]] - cb[names[j]]).norm());
        }
    return pearson(da, db);
}

double distance_consistency(const Eigen::MatrixXd& pts, const std::vector<std::string>& labels) {
    auto cent = centroids(pts, labels);
    int good = 0;
    for (int i = 0; i < pts.rows(); ++i) {
        double own = (pts.row(i) - cent[labels[i]]).norm();
        bool consistent = true;
        for (const auto& [lab, c] : cent)
            if (lab != labels[i] && (pts.row(i) - c).norm() < own) consistent = false;
        if (consistent) ++good;
    }
    return static_cast<double>(good) / pts.rows();
}

double silhouette(const Eigen::MatrixXd& pts, const std::vector<std::string>& labels) {
    const int n = static_cast<int>(pts.rows());
    Eigen::MatrixXd d = euclidean(pts);
    std::map<std::string, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[labels[i]].push_back(i);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& own = groups[labels[i]];
        if (own.size() == 1) continue;  // singleton gets 0
        double a = 0.0;
        for (int j : own)
            if (j != i) a += d(i, j);
        a /= static_cast<double>(own.size() - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [lab, members] : groups) {
            if (lab == labels[i]) continue;
            double m = 0.0;
            for (int j : members) m += d(i, j);
            m /= static_cast<double>(members.size());
            b = std::min(b, m);
        }
        double denom = std::max(a, b);
        total += denom == 0.0 ? 0.0 : (b - a) / denom;
    }
    return total / n;
}

double procrustes_deg(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd ca = a.rowwise() - a.colwise().mean();
    Eigen::MatrixXd cb = b.rowwise() - b.colwise().mean();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        num += ca(i, 0) * cb(i, 1) - ca(i, 1) * cb(i, 0);
        den += ca(i, 0) * cb(i, 0) + ca(i, 1) * cb(i, 1);
    }
    return std::atan2(num, den) * 180.0 / M_PI;
}

double binomial_tail(int m, int n) {
    if (n > m) throw std::runtime_error("oracle: n > m");
    // Pascal's triangle row m in exact integers.
    std::vector<unsigned long long> row(static_cast<std::size_t>(m) + 1, 0);
    row[0] = 1;
    for (int r = 1; r <= m; ++r)
        for (int j = r; j >= 1; --j) row[j] += row[j - 1];
    long double sum = 0.0L;
    for (int j = n; j <= m; ++j) sum += row[j];
    return static_cast<double>(sum / std::pow(2.0L, m));
}

double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double h = p * (static_cast<double>(v.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace oracle
