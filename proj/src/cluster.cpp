#include "hclex/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "hclex/csv.hpp"
#include "hclex/error.hpp"
#include "hclex/rng.hpp"

namespace hclex {
namespace {

// Scalar loop on purpose: the brute-force silhouette oracle accumulates in
// the same order, so the two agree bit-for-bit.
double point_distance(const Eigen::Ref<const PointMatrix>& p, Eigen::Index i, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const double d = p(i, c) - p(j, c);
    s += d * d;
  }
  return std::sqrt(s);
}

void assign_points(const Eigen::Ref<const PointMatrix>& points, const PointMatrix& centroids,
                   std::vector<int>& assignments, double& inertia, int workers) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  std::vector<double> dists(static_cast<std::size_t>(n));
  auto run = [&](Eigen::Index lo, Eigen::Index hi) {
    for (Eigen::Index i = lo; i < hi; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignments[static_cast<std::size_t>(i)] = best;
      dists[static_cast<std::size_t>(i)] = best_d;
    }
  };
  if (workers <= 1 || n < 2 * workers) {
    run(0, n);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w)
      threads.emplace_back(run, n * w / workers, n * (w + 1) / workers);
    for (auto& t : threads) t.join();
  }
  inertia = 0.0;
  for (double d : dists) inertia += d;
}

std::vector<Eigen::Index> kmeanspp_init(const Eigen::Ref<const PointMatrix>& points, int k,
                                        Rng& rng) {
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> chosen;
  chosen.push_back(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2 =
      (points.rowwise() - points.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double u = rng.unit() * total;
      double cum = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2(i);
        if (cum > u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    chosen.push_back(pick);
    d2 = d2.cwiseMin((points.rowwise() - points.row(pick)).rowwise().squaredNorm());
  }
  return chosen;
}

}  // namespace

PcaResult pca_project(const Eigen::Ref<const PointMatrix>& points, int components) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (n < 2) throw DataError("pca_project: need at least 2 points");
  if (points.hasNaN()) throw DataError("pca_project: NaN in input");
  if (components < 1 || components > std::min<Eigen::Index>(n - 1, d))
    throw DataError("pca_project: components exceeds rank bound min(N-1, D)");

  PcaResult r;
  r.mean = points.colwise().mean();
  const PointMatrix centered = points.rowwise() - r.mean;
  const PointMatrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<PointMatrix> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("pca_project: eigensolver failed");

  const Eigen::VectorXd evals = solver.eigenvalues();  // ascending
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) total += std::max(0.0, evals(i));

  r.components.resize(components, d);
  r.explained_variance_ratio.resize(components);
  for (int c = 0; c < components; ++c) {
    Eigen::RowVectorXd axis = solver.eigenvectors().col(d - 1 - c).transpose();
    Eigen::Index max_idx = 0;
    axis.cwiseAbs().maxCoeff(&max_idx);
    if (axis(max_idx) < 0.0) axis = -axis;
    r.components.row(c) = axis;
    r.explained_variance_ratio(c) =
        total > 0.0 ? std::max(0.0, evals(d - 1 - c)) / total : 0.0;
  }
  r.projected = centered * r.components.transpose();
  return r;
}

ClusterReport kmeans(const Eigen::Ref<const PointMatrix>& points, int k, std::uint64_t seed,
                     int max_iters, int restarts, int workers) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (max_iters < 1 || restarts < 1)
    throw std::invalid_argument("kmeans: max_iters and restarts must be >= 1");
  if (static_cast<Eigen::Index>(k) > n)
    throw DataError("kmeans: k (" + std::to_string(k) + ") exceeds point count (" +
                    std::to_string(n) + ")");

  ClusterReport best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(mix_seed(seed, "restart"), static_cast<std::uint64_t>(r)));
    const auto chosen = kmeanspp_init(points, k, rng);
    PointMatrix centroids(k, points.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = points.row(chosen[static_cast<std::size_t>(c)]);

    std::vector<int> assignments(static_cast<std::size_t>(n), -1);
    std::vector<int> prev;
    double inertia = 0.0;
    for (int it = 0; it < max_iters; ++it) {
      assign_points(points, centroids, assignments, inertia, workers);
      if (assignments == prev) break;
      prev = assignments;
      PointMatrix sums = PointMatrix::Zero(k, points.cols());
      std::vector<long long> counts(static_cast<std::size_t>(k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(assignments[static_cast<std::size_t>(i)]) += points.row(i);
        ++counts[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])];
      }
      for (int c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0)
          centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      // empty cluster: centroid stays put
    }
    if (inertia < best.inertia) {
      best.k = k;
      best.assignments = assignments;
      best.centroids = centroids;
      best.inertia = inertia;
    }
  }

  best.sizes.assign(static_cast<std::size_t>(k), 0);
  for (int a : best.assignments) ++best.sizes[static_cast<std::size_t>(a)];
  const long long nonempty =
      static_cast<long long>(std::count_if(best.sizes.begin(), best.sizes.end(),
                                           [](long long s) { return s > 0; }));
  best.silhouette_score = nonempty >= 2 ? silhouette(points, best.assignments) : 0.0;
  return best;
}

double silhouette(const Eigen::Ref<const PointMatrix>& points,
                  const std::vector<int>& assignments) {
  const Eigen::Index n = points.rows();
  if (static_cast<Eigen::Index>(assignments.size()) != n)
    throw std::invalid_argument("silhouette: assignment size mismatch");
  int k = 0;
  for (int a : assignments) {
    if (a < 0) throw std::invalid_argument("silhouette: negative cluster id");
    k = std::max(k, a + 1);
  }
  std::vector<long long> sizes(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  if (std::count_if(sizes.begin(), sizes.end(), [](long long s) { return s > 0; }) < 2)
    throw std::invalid_argument("silhouette: need at least two nonempty clusters");

  double total = 0.0;
  std::vector<double> sums(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sums[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] +=
          point_distance(points, i, j);
    const int own = assignments[static_cast<std::size_t>(i)];
    if (sizes[static_cast<std::size_t>(own)] == 1) continue;  // singleton scores 0
    const double a =
        sums[static_cast<std::size_t>(own)] / static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != own && sizes[static_cast<std::size_t>(c)] > 0)
        b = std::min(b, sums[static_cast<std::size_t>(c)] /
                            static_cast<double>(sizes[static_cast<std::size_t>(c)]));
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

std::vector<SweepEntry> silhouette_sweep(const Eigen::Ref<const PointMatrix>& points, int k_min,
                                         int k_max, std::uint64_t seed, int workers) {
  if (k_min < 2 || k_min > k_max) throw std::invalid_argument("silhouette_sweep: need 2 <= k_min <= k_max");
  if (static_cast<Eigen::Index>(k_max) > points.rows())
    throw DataError("silhouette_sweep: k_max (" + std::to_string(k_max) +
                    ") exceeds point count (" + std::to_string(points.rows()) + ")");
  std::vector<SweepEntry> out;
  out.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) {
    const auto report = kmeans(points, k, mix_seed(seed, static_cast<std::uint64_t>(k)), 300, 10,
                               workers);
    out.push_back({k, report.silhouette_score, report.inertia});
  }
  return out;
}

CompositionReport composition_report(const ClusterReport& report,
                                     const std::vector<std::string>& labels,
                                     const std::map<std::string, std::string>& category_of) {
  if (labels.size() != report.assignments.size())
    throw std::invalid_argument("composition_report: label/assignment size mismatch");
  const auto n = static_cast<double>(labels.size());
  CompositionReport comp;
  comp.clusters.resize(static_cast<std::size_t>(report.k));
  for (int c = 0; c < report.k; ++c) comp.clusters[static_cast<std::size_t>(c)].cluster = c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = category_of.find(labels[i]);
    if (it == category_of.end())
      throw DataError("composition_report: no category for term '" + labels[i] + "'");
    auto& cl = comp.clusters[static_cast<std::size_t>(report.assignments[i])];
    ++cl.size;
    ++cl.category_counts[it->second];
  }
  for (auto& cl : comp.clusters) {
    cl.share = n > 0 ? static_cast<double>(cl.size) / n : 0.0;
    comp.max_cluster_share = std::max(comp.max_cluster_share, cl.share);
    long long best = 0;
    for (const auto& [category, count] : cl.category_counts) {
      if (count > best) {  // ties keep the lexicographically first (map order)
        best = count;
        cl.top_category = category;
      }
    }
    cl.top_category_share = cl.size > 0 ? static_cast<double>(best) / static_cast<double>(cl.size) : 0.0;
  }
  return comp;
}

void write_sweep_csv(const std::vector<SweepEntry>& sweep, std::ostream& out) {
  csv::write_row(out, {"k", "silhouette", "inertia"});
  for (const auto& e : sweep)
    csv::write_row(out, {std::to_string(e.k), csv::dtos(e.silhouette_score), csv::dtos(e.inertia)});
}

void write_composition_csv(const CompositionReport& report, std::ostream& out) {
  csv::write_row(out, {"cluster", "size", "share", "top_category", "top_category_share"});
  for (const auto& cl : report.clusters)
    csv::write_row(out, {std::to_string(cl.cluster), std::to_string(cl.size),
                         csv::fixed4(cl.share), cl.top_category,
                         csv::fixed4(cl.top_category_share)});
}

void export_3d(const std::vector<std::string>& labels,
               const Eigen::Ref<const PointMatrix>& projected,
               const std::map<std::string, std::string>& category_of, std::ostream& out) {
  if (projected.cols() < 3) throw std::invalid_argument("export_3d: need at least 3 columns");
  if (static_cast<Eigen::Index>(labels.size()) != projected.rows())
    throw std::invalid_argument("export_3d: label/row count mismatch");
  csv::write_row(out, {"term", "x", "y", "z", "category"});
  for (Eigen::Index i = 0; i < projected.rows(); ++i) {
    auto it = category_of.find(labels[static_cast<std::size_t>(i)]);
    if (it == category_of.end())
      throw DataError("export_3d: no category for term '" + labels[static_cast<std::size_t>(i)] + "'");
    csv::write_row(out, {labels[static_cast<std::size_t>(i)], csv::dtos(projected(i, 0)),
                         csv::dtos(projected(i, 1)), csv::dtos(projected(i, 2)), it->second});
  }
}

}  // namespace hclex
