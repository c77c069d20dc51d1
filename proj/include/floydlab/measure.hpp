#pragma once

#include "floydlab/floyd.hpp"
#include "floydlab/trees.hpp"

namespace floydlab {

/// exp(-s d(v,g)) / Theta_s(T,1) over the materialized tree, per level.
struct DiscreteMeasure {
  double s = 0.0;
  int depth = 0;  // deepest level included
  double theta = 0.0;
  bool diverging_warning = false;  // s at or below the tree's growth estimate
  std::vector<std::vector<double>> weights;

  double total_mass() const;
  /// boundary pushforward: mass carried by the deepest-level vertices
  const std::vector<double>& leaf_masses() const { return weights[depth]; }
};

DiscreteMeasure ps_measure(ElementPool& pool, const IteratedTree& tree, ElementId v,
                           double s, int depth);
DiscreteMeasure ps_measure_serial(ElementPool& pool, const IteratedTree& tree,
                                  ElementId v, double s, int depth);

/// leaves whose tree geodesic from the root meets B(g, r)
std::vector<std::int32_t> shadow(ElementPool& pool, const IteratedTree& tree, int level,
                                 std::int32_t idx, int r, int leaf_level);

struct ShadowStats {
  double min_ratio = 0.0, max_ratio = 0.0;
  std::vector<double> ratios;  // mu(shadow) * exp(delta * d(1,g)) per vertex
  double band() const { return min_ratio > 0 ? max_ratio / min_ratio : 1e300; }
};

ShadowStats shadow_ratio_stats(ElementPool& pool, const IteratedTree& tree,
                               const DiscreteMeasure& mu, int r, int level_min,
                               int level_max, double delta_hat);

/// Options for certified boundary distances between leaves.
struct LeafMetricOptions {
  double lambda = 0.5;
  bool shortcut = false;   // zero distance within a parabolic fiber
  int window_radius = 8;   // frame window for non-tree groups
  const Ball* window_ball = nullptr;  // shared B(1, window_radius), optional
  EnumerationOptions enumeration;
};

std::vector<BoundaryRay> leaf_rays(ElementPool& pool, const IteratedTree& tree,
                                   int leaf_level);

/// Certified distances from one leaf to every leaf on the same level.
/// Tree Cayley graphs are answered exactly; otherwise the pairs are grouped
/// by branch level and solved by windowed Dijkstra around the common
/// ancestor, one fan per level.
std::vector<FloydInterval> leaf_distances(ElementPool& pool, const IteratedTree& tree,
                                          int leaf_level,
                                          std::span<const BoundaryRay> rays,
                                          std::int32_t center,
                                          const LeafMetricOptions& opts);

struct BallMassResult {
  double mass = 0.0;
  double boundary_slack = 0.0;  // mass of leaves whose interval straddles t
  double max_width = 0.0;       // widest straddling interval
  bool rejected = false;        // straddling width exceeded t / 10
};

BallMassResult ball_mass(std::span<const double> masses,
                         std::span<const FloydInterval> dist, double t);

struct ScalePoint {
  double t = 0.0;
  double mass = 0.0;
  double slack = 0.0;
  bool rejected = false;
};

struct AhlforsFit {
  double Q = 0.0;
  double residual = 0.0;  // max absolute log-mass residual of the fit
  double target = 0.0;    // -delta_T / log lambda
  std::vector<ScalePoint> points;
  int centers_used = 0;
};

/// Least-squares slope of log mass(B(xi,t)) against log t over the scale
/// grid, averaged over deterministic sample centers.
AhlforsFit ahlfors_fit(ElementPool& pool, const IteratedTree& tree,
                       const DiscreteMeasure& mu, std::span<const double> scales,
                       int n_centers, std::uint64_t seed, const LeafMetricOptions& opts,
                       double target_exponent);

/// sum over the sphere S_n of (2 lambda^n / (1-lambda))^s
double covering_sum(const GroupSpec& spec, double s, int n, double lambda);

struct DimensionReport {
  std::vector<double> scales;
  std::vector<double> log_counts;
  std::vector<double> covering_sums;
  double exponent = 0.0;
  double residual = 0.0;
  double target = 0.0;
};

/// Box-counting fit from exact sphere counts at scales 2 lambda^n / (1-lambda).
DimensionReport box_dimension(const GroupSpec& spec, double lambda, int n_lo, int n_hi,
                              double s_for_sums, double target);

struct HausdorffComparison {
  double hausdorff_sum = 0.0;
  double ps_mass = 0.0;
  double ratio = 0.0;  // hausdorff_sum / ps_mass (0 when both empty)
  int balls_kept = 0;
};

/// Finite-scale Hausdorff sum of a union of leaf cones via a greedy disjoint
/// 5r-covering, against the PS mass of the same set.
HausdorffComparison hausdorff_vs_ps(ElementPool& pool, const IteratedTree& tree,
                                    const DiscreteMeasure& mu,
                                    std::span<const std::pair<int, std::int32_t>> cones,
                                    double sigma, double scale,
                                    const LeafMetricOptions& opts);

}  // namespace floydlab
