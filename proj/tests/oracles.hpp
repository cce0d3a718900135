#pragma once

// Naive direct-from-definition implementations used only to cross-check the
// library. Kept deliberately simple and separate from src/.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

// Full N x N Euclidean distances of row vectors.
Eigen::MatrixXd euclidean(const Eigen::MatrixXd& pts);

// ranks[i][j]: position of j in i's distance ordering, 1 = nearest, 0 on the
// diagonal. Ties resolve to the smaller index.
std::vector<std::vector<int>> rank_matrix(const Eigen::MatrixXd& diss);

std::vector<std::vector<int>> knn_of(const std::vector<std::vector<int>>& ranks, int k);

double trustworthiness(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db, int k);
double mrre_m(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db, int k);
double lcmc(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db, int k);
double label_preservation(const Eigen::MatrixXd& da, const Eigen::MatrixXd& db,
                          const std::vector<std::string>& labels, int k);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> condensed(const Eigen::MatrixXd& diss);

double cluster_ordering(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const std::vector<std::string>& labels);
double distance_consistency(const Eigen::MatrixXd& pts, const std::vector<std::string>& labels);
double silhouette(const Eigen::MatrixXd& pts, const std::vector<std::string>& labels);
double procrustes_deg(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Exact tail sum P[X >= n] for X ~ Binomial(m, 1/2); integer arithmetic, valid
// for m <= 62.
double binomial_tail(int m, int n);

// Linear-interpolation quantile of a sorted vector, h = p * (size - 1).
double quantile(std::vector<double> v, double p);

}  // namespace oracle
