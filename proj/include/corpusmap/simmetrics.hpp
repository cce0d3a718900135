#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corpusmap/layout.hpp"

namespace corpusmap {

// Neighborhood ranks of one representation. ranks[i][j] is the position of j
// in i's distance ordering (1 = nearest, 0 on the diagonal); knn[i] holds the
// k indices with ranks <= k. Ties order by index (smaller = nearer).
struct RankStructure {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::vector<std::uint32_t>> knn;
    std::vector<std::vector<std::uint32_t>> ranks;
};

// All metrics of one ordered comparison. Fields may be absent when the inputs
// cannot support them (centroid metrics need point coordinates, theta_PA needs
// two 2-D plots); aggregates that depend on absent components are absent too.
struct SimilarityRecord {
    std::string pair_id;
    std::string corpus;
    std::string embedding;
    std::string dr;
    std::string varied_factor;
    std::string value_a;
    std::string value_b;
    std::optional<double> alpha_T, alpha_C, alpha_MM, alpha_MF, alpha_LC, alpha_LP;
    std::optional<double> beta_PC, beta_SC, beta_CO;
    std::optional<double> gamma_DC, gamma_SC_abs_diff, theta_PA;
    std::optional<double> alpha, beta, gamma;
};

RankStructure rank_structure(const Eigen::MatrixXd& diss, std::size_t k);

// (alpha_T, alpha_C). The first structure plays the reference role.
std::pair<double, double> trustworthiness_continuity(const RankStructure& a,
                                                     const RankStructure& b, std::size_t k);

// (alpha_MM, alpha_MF): mean relative rank errors mapped to the 1-is-optimal
// scale via the worst-case normalizer N * sum_{l=1..k} |N - 2l + 1| / l.
std::pair<double, double> mrre(const RankStructure& a, const RankStructure& b, std::size_t k);

// Mean kNN overlap fraction. `adjust_for_chance` subtracts the random-overlap
// expectation k/(N-1) (off by default).
double lcmc(const RankStructure& a, const RankStructure& b, std::size_t k,
            bool adjust_for_chance = false);

// Mean multiset intersection (per-label minimum counts) of neighbor labels.
double label_preservation(const RankStructure& a, const RankStructure& b,
                          const std::vector<std::string>& labels, std::size_t k);

// Pearson and Spearman (average-rank ties) correlation of two condensed
// distance vectors in identical pair order.
std::pair<double, double> shepard_correlations(const std::vector<double>& da,
                                               const std::vector<double>& db);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
std::optional<double> pearson_or_absent(const std::vector<double>& x,
                                        const std::vector<double>& y);
std::vector<double> average_ranks(const std::vector<double>& v);

// Labeled point-set metrics; rows are points of any dimension.
double distance_consistency_points(const Eigen::MatrixXd& pts,
                                   const std::vector<std::string>& labels);
double cluster_ordering_points(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               const std::vector<std::string>& labels);
double silhouette_points(const Eigen::MatrixXd& pts, const std::vector<std::string>& labels);

double distance_consistency(const Scatterplot& p);
double cluster_ordering(const Scatterplot& a, const Scatterplot& b);
double gamma_dc(const Scatterplot& a, const Scatterplot& b);
double silhouette(const Scatterplot& p);

// Rotation (degrees, counterclockwise positive) that best aligns centered A
// onto centered B: atan2(sum(x_a y_b - y_a x_b), sum(x_a x_b + y_a y_b)).
double procrustes_rotation(const Scatterplot& a, const Scatterplot& b);
double procrustes_rotation_points(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

double aggregate_alpha(double alpha_t, double alpha_c, double alpha_mm, double alpha_mf,
                       double alpha_lc, double alpha_lp);
double aggregate_beta(double beta_pc, double beta_sc, double beta_co);
double aggregate_gamma(double gamma_dc_value);
double adaptability(double value_high, double value_low);

// Document positions as convex combinations of topic positions: row i of the
// result is sum_j theta(i,j) * position(j) after normalizing the theta row to
// sum 1.
Scatterplot convex_combination_layout(const Eigen::MatrixXd& theta,
                                      const Eigen::MatrixXd& topic_positions,
                                      const std::vector<std::string>& labels);

Eigen::MatrixXd euclidean_distance_matrix(const Eigen::MatrixXd& pts);
std::vector<double> condensed_distances(const Eigen::MatrixXd& diss);

// One side of a comparison: a 2-D scatterplot, a labeled point set of any
// dimension, or a bare dissimilarity matrix. Rank-based metrics use the
// dissimilarities; centroid metrics additionally need points; theta_PA needs
// both sides to be 2-D plots.
class MetricInput {
  public:
    static MetricInput from_plot(const Scatterplot& plot);
    static MetricInput from_points(const Eigen::MatrixXd& pts, Dissimilarity rank_diss);
    static MetricInput from_dissimilarity(const Eigen::MatrixXd& diss);

    std::size_t size() const { return static_cast<std::size_t>(diss_.rows()); }
    const Eigen::MatrixXd& diss() const { return diss_; }
    bool has_points() const { return has_points_; }
    bool is_plot() const { return is_plot_; }
    const Eigen::MatrixXd& points() const { return points_; }

  private:
    Eigen::MatrixXd diss_;
    Eigen::MatrixXd points_;
    bool has_points_ = false;
    bool is_plot_ = false;
};

// Every computable metric plus aggregates for the ordered pair (a =
// reference). Provenance fields are left empty for the caller.
SimilarityRecord compare(const MetricInput& a, const MetricInput& b,
                         const std::vector<std::string>& labels, std::size_t k);
SimilarityRecord compare(const Scatterplot& a, const Scatterplot& b, std::size_t k);

}  // namespace corpusmap
