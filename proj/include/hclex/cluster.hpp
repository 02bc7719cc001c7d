#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hclex {

using PointMatrix = Eigen::MatrixXd;  // one row per point

struct PointSet {
  std::vector<std::string> labels;                 // size N
  PointMatrix points;                              // N x D
  std::map<std::string, std::string> category_of;  // optional
};

struct PcaResult {
  PointMatrix projected;                     // N x c
  Eigen::VectorXd explained_variance_ratio;  // c entries, non-increasing
  PointMatrix components;                    // c x D principal axes
  Eigen::RowVectorXd mean;                   // centering offset
};

// Mean-centered projection onto the top-c covariance eigenvectors. Axis sign
// fixed so the largest-magnitude loading is positive.
PcaResult pca_project(const Eigen::Ref<const PointMatrix>& points, int components = 3);

struct ClusterReport {
  int k = 0;
  std::vector<int> assignments;    // per point, in input order
  PointMatrix centroids;           // k x D
  double inertia = 0.0;            // sum of squared distances to own centroid
  double silhouette_score = 0.0;   // mean silhouette of the returned clustering
  std::vector<long long> sizes;    // per cluster, sums to N
};

// k-means++ initialization, Lloyd iterations to an assignment fixpoint,
// best-inertia restart wins. Restart seeds derive from `seed`, so more
// restarts can only improve (or tie) the run with fewer.
ClusterReport kmeans(const Eigen::Ref<const PointMatrix>& points, int k, std::uint64_t seed,
                     int max_iters = 300, int restarts = 10, int workers = 1);

// Mean over points of (b-a)/max(a,b); singleton-cluster points score 0.
// Requires at least two nonempty clusters.
double silhouette(const Eigen::Ref<const PointMatrix>& points,
                  const std::vector<int>& assignments);

struct SweepEntry {
  int k = 0;
  double silhouette_score = 0.0;
  double inertia = 0.0;
};

std::vector<SweepEntry> silhouette_sweep(const Eigen::Ref<const PointMatrix>& points,
                                         int k_min, int k_max, std::uint64_t seed,
                                         int workers = 1);

struct ClusterComposition {
  int cluster = 0;
  long long size = 0;
  double share = 0.0;  // size / N
  std::string top_category;
  double top_category_share = 0.0;  // within the cluster
  std::map<std::string, long long> category_counts;
};

struct CompositionReport {
  std::vector<ClusterComposition> clusters;
  double max_cluster_share = 0.0;
};

CompositionReport composition_report(const ClusterReport& report,
                                     const std::vector<std::string>& labels,
                                     const std::map<std::string, std::string>& category_of);

// CSV writers. The 3-D export round-trips coordinates exactly; sweep uses
// lossless doubles, composition uses 4-decimal fixed point.
void write_sweep_csv(const std::vector<SweepEntry>& sweep, std::ostream& out);
void write_composition_csv(const CompositionReport& report, std::ostream& out);
void export_3d(const std::vector<std::string>& labels,
               const Eigen::Ref<const PointMatrix>& projected,
               const std::map<std::string, std::string>& category_of, std::ostream& out);

}  // namespace hclex
