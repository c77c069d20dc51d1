#include "floydlab/measure.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace floydlab {

double DiscreteMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& lv : weights)
    for (double w : lv) m += w;
  return m;
}

namespace {

DiscreteMeasure ps_measure_impl(ElementPool& pool, const IteratedTree& tree,
                                ElementId v, double s, int depth, bool parallel) {
  if (depth < 0 || depth >= int(tree.levels.size()))
    throw input_error("measure depth outside the materialized tree");
  bool found = false;
  for (int l = 0; l <= depth && !found; l++)
    for (const TreeNode& n : tree.levels[l])
      if (n.elem == v) {
        found = true;
        break;
      }
  if (!found) throw precondition_error("measure viewpoint must be a tree vertex");

  DiscreteMeasure mu;
  mu.s = s;
  mu.depth = depth;
  mu.weights.resize(depth + 1);

  // normalization from the root viewpoint over the same truncation
  double theta = 0.0;
  for (int l = 0; l <= depth; l++)
    for (const TreeNode& n : tree.levels[l]) theta += std::exp(-s * pool.length(n.elem));
  mu.theta = theta;

  for (int l = 0; l <= depth; l++) {
    const auto& nodes = tree.levels[l];
    auto& w = mu.weights[l];
    w.resize(nodes.size());
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < std::int64_t(nodes.size()); i++)
        w[i] = std::exp(-s * pool.distance(v, nodes[i].elem)) / theta;
    } else {
      for (std::size_t i = 0; i < nodes.size(); i++)
        w[i] = std::exp(-s * pool.distance(v, nodes[i].elem)) / theta;
    }
  }

  if (!tree.full_group) {
    CriticalExponent ce = critical_exponent(pool, tree,
                                            std::max(32, 4 * (tree.params.L + 1)));
    mu.diverging_warning = s <= ce.estimate;
  } else {
    mu.diverging_warning = s <= growth_rate(pool.spec(), 16).estimate;
  }
  return mu;
}

}  // namespace

DiscreteMeasure ps_measure(ElementPool& pool, const IteratedTree& tree, ElementId v,
                           double s, int depth) {
  return ps_measure_impl(pool, tree, v, s, depth, true);
}

DiscreteMeasure ps_measure_serial(ElementPool& pool, const IteratedTree& tree,
                                  ElementId v, double s, int depth) {
  return ps_measure_impl(pool, tree, v, s, depth, false);
}

std::vector<std::int32_t> shadow(ElementPool& pool, const IteratedTree& tree, int level,
                                 std::int32_t idx, int r, int leaf_level) {
  if (leaf_level >= int(tree.levels.size()) || level > leaf_level)
    throw input_error("shadow levels outside the materialized tree");
  ElementId g = tree.node(level, idx);
  std::vector<std::int32_t> out;
  const auto& leaves = tree.levels[leaf_level];
  for (std::int32_t i = 0; i < std::int32_t(leaves.size()); i++) {
    // walk the realized geodesic root -> leaf and test the ball B(g, r)
    std::vector<std::pair<int, std::int32_t>> chain;
    std::int32_t cur = i;
    for (int l = leaf_level; l > 0; l--) {
      chain.push_back({l, cur});
      cur = tree.levels[l][cur].parent;
    }
    std::reverse(chain.begin(), chain.end());
    bool hit = pool.distance(g, tree.levels[0][0].elem) <= std::uint32_t(r);
    ElementId prev = tree.levels[0][0].elem;
    for (auto [l, ci] : chain) {
      if (hit) break;
      ElementId next = tree.levels[l][ci].elem;
      ElementId u = pool.mul(pool.inverse(prev), next);
      ElementId walk = prev;
      for (int gen : pool.canonical_word(u)) {
        walk = pool.mul_gen(walk, gen);
        if (pool.distance(g, walk) <= std::uint32_t(r)) {
          hit = true;
          break;
        }
      }
      prev = next;
    }
    if (hit) out.push_back(i);
  }
  return out;
}

ShadowStats shadow_ratio_stats(ElementPool& pool, const IteratedTree& tree,
                               const DiscreteMeasure& mu, int r, int level_min,
                               int level_max, double delta_hat) {
  ShadowStats out;
  const auto& leaf_mass = mu.leaf_masses();
  for (int l = level_min; l <= level_max; l++) {
    for (std::int32_t i = 0; i < std::int32_t(tree.levels[l].size()); i++) {
      std::vector<std::int32_t> sh = shadow(pool, tree, l, i, r, mu.depth);
      double mass = 0.0;
      for (std::int32_t leaf : sh) mass += leaf_mass[leaf];
      double ratio = mass * std::exp(delta_hat * pool.length(tree.node(l, i)));
      out.ratios.push_back(ratio);
    }
  }
  if (!out.ratios.empty()) {
    out.min_ratio = *std::min_element(out.ratios.begin(), out.ratios.end());
    out.max_ratio = *std::max_element(out.ratios.begin(), out.ratios.end());
  }
  return out;
}

std::vector<BoundaryRay> leaf_rays(ElementPool& pool, const IteratedTree& tree,
                                   int leaf_level) {
  std::vector<BoundaryRay> rays;
  const auto& leaves = tree.levels[leaf_level];
  rays.reserve(leaves.size());
  if (!tree.full_group) {
    for (std::int32_t i = 0; i < std::int32_t(leaves.size()); i++) {
      RayWords w = leaf_ray_words(pool, tree, leaf_level, i);
      rays.push_back(make_ray(pool, std::move(w.prefix), std::move(w.period)));
    }
    return rays;
  }
  // full-group tree: continue each branch along a free-abelian letter
  for (std::int32_t i = 0; i < std::int32_t(leaves.size()); i++) {
    std::vector<int> prefix = tree.branch_word(pool, leaf_level, i);
    ElementId leaf = leaves[i].elem;
    int period_gen = -1;
    for (int g = 0; g < int(pool.spec().generators.size()); g++) {
      const Generator& gen = pool.spec().generators[g];
      if (pool.spec().factors[gen.factor].type != FactorType::FreeAbelian) continue;
      ElementId step = pool.mul_gen(leaf, g);
      if (pool.length(step) == pool.length(leaf) + 1) {
        // also require stability one more step ahead
        ElementId step2 = pool.mul_gen(step, g);
        if (pool.length(step2) == pool.length(leaf) + 2) {
          period_gen = g;
          break;
        }
      }
    }
    if (period_gen < 0)
      throw unsupported_error("no straight continuation for a full-group leaf");
    rays.push_back(make_ray(pool, std::move(prefix), {period_gen}));
  }
  return rays;
}

namespace {

// ancestor index of a leaf at each level
std::vector<std::int32_t> ancestor_chain(const IteratedTree& tree, int leaf_level,
                                         std::int32_t idx) {
  std::vector<std::int32_t> anc(leaf_level + 1);
  anc[leaf_level] = idx;
  for (int l = leaf_level; l > 0; l--) anc[l - 1] = tree.levels[l][anc[l]].parent;
  return anc;
}

}  // namespace

std::vector<FloydInterval> leaf_distances(ElementPool& pool, const IteratedTree& tree,
                                          int leaf_level,
                                          std::span<const BoundaryRay> rays,
                                          std::int32_t center,
                                          const LeafMetricOptions& opts) {
  const std::size_t n = rays.size();
  std::vector<FloydInterval> out(n);
  std::vector<FiberClass> cls;
  if (opts.shortcut) {
    cls.resize(n);
    for (std::size_t i = 0; i < n; i++) cls[i] = classify_ray(pool, rays[i]);
  }

  if (pool.spec().is_tree()) {
    for (std::size_t i = 0; i < n; i++) {
      double v = tree_boundary_distance(pool, rays[center], rays[i], opts.lambda);
      out[i] = {v, v, 0, false};
    }
  } else {
    // group targets by branch level; one windowed fan per common ancestor
    std::vector<std::int32_t> canc = ancestor_chain(tree, leaf_level, center);
    std::vector<std::vector<std::int32_t>> by_level(leaf_level + 1);
    for (std::int32_t i = 0; i < std::int32_t(n); i++) {
      if (i == center) {
        out[i] = {0.0, 0.0, 0, false};
        continue;
      }
      std::vector<std::int32_t> ia = ancestor_chain(tree, leaf_level, i);
      int b = 0;
      while (b < leaf_level && ia[b + 1] == canc[b + 1]) b++;
      by_level[b].push_back(i);
    }
    Ball local;
    const Ball* wball = opts.window_ball;
    if (!wball) {
      local = enumerate_ball(pool, opts.window_radius, opts.enumeration);
      wball = &local;
    }
    for (int b = 0; b <= leaf_level; b++) {
      if (by_level[b].empty()) continue;
      ElementId frame = tree.node(b, canc[b]);
      WindowQuery q(pool, *wball, frame);
      std::vector<BoundaryRay> targets;
      for (std::int32_t i : by_level[b]) targets.push_back(rays[i]);
      std::vector<FloydInterval> fan = q.ray_fan(rays[center], targets, opts.lambda);
      for (std::size_t k = 0; k < fan.size(); k++) out[by_level[b][k]] = fan[k];
    }
  }

  if (opts.shortcut) {
    for (std::size_t i = 0; i < n; i++)
      if (i != std::size_t(center) && same_fiber(cls[center], cls[i]))
        out[i] = {0.0, 0.0, out[i].radius, out[i].escaped};
  }
  return out;
}

BallMassResult ball_mass(std::span<const double> masses,
                         std::span<const FloydInterval> dist, double t) {
  BallMassResult out;
  for (std::size_t i = 0; i < masses.size(); i++) {
    const FloydInterval& iv = dist[i];
    if (iv.mid() <= t) out.mass += masses[i];
    if (iv.lower <= t && iv.upper > t) {
      out.boundary_slack += masses[i];
      out.max_width = std::max(out.max_width, iv.width());
    }
  }
  out.rejected = out.max_width > t / 10.0;
  return out;
}

AhlforsFit ahlfors_fit(ElementPool& pool, const IteratedTree& tree,
                       const DiscreteMeasure& mu, std::span<const double> scales,
                       int n_centers, std::uint64_t seed, const LeafMetricOptions& opts,
                       double target_exponent) {
  AhlforsFit fit;
  fit.target = target_exponent;
  int leaf_level = mu.depth;
  const auto& leaves = tree.levels[leaf_level];
  const auto& masses = mu.leaf_masses();
  std::vector<BoundaryRay> rays = leaf_rays(pool, tree, leaf_level);

  // deterministic center choice: a fixed-stride walk seeded by `seed`
  std::vector<std::int32_t> centers;
  std::size_t n = leaves.size();
  std::uint64_t state = seed * 6364136223846793005ull + 1442695040888963407ull;
  for (int c = 0; c < n_centers && centers.size() < n; c++) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    centers.push_back(std::int32_t((state >> 33) % n));
  }
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  fit.centers_used = int(centers.size());

  std::vector<double> sum_mass(scales.size(), 0.0), sum_slack(scales.size(), 0.0);
  std::vector<bool> rejected(scales.size(), false);
  for (std::int32_t c : centers) {
    std::vector<FloydInterval> dist = leaf_distances(pool, tree, leaf_level, rays, c, opts);
    for (std::size_t j = 0; j < scales.size(); j++) {
      BallMassResult b = ball_mass(masses, dist, scales[j]);
      sum_mass[j] += b.mass;
      sum_slack[j] += b.boundary_slack;
      rejected[j] = rejected[j] || b.rejected;
    }
  }

  double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < scales.size(); j++) {
    ScalePoint pt;
    pt.t = scales[j];
    pt.mass = sum_mass[j] / std::max(1, fit.centers_used);
    pt.slack = sum_slack[j] / std::max(1, fit.centers_used);
    pt.rejected = rejected[j] || pt.mass <= 0.0 || pt.mass >= total * 0.999;
    fit.points.push_back(pt);
    if (!pt.rejected) {
      xs.push_back(std::log(pt.t));
      ys.push_back(std::log(pt.mass));
    }
  }
  if (xs.size() >= 2) {
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); i++) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.Q = sxy / sxx;
    for (std::size_t i = 0; i < xs.size(); i++)
      fit.residual = std::max(fit.residual,
                              std::fabs(ys[i] - (my + fit.Q * (xs[i] - mx))));
  }
  return fit;
}

double covering_sum(const GroupSpec& spec, double s, int n, double lambda) {
  SphereCounter c(spec, n);
  double diam = 2.0 * std::pow(lambda, n) / (1.0 - lambda);
  if (c.sphere(n) == 0) return 0.0;
  return std::exp(log_big(c.sphere(n)) + s * std::log(diam));
}

DimensionReport box_dimension(const GroupSpec& spec, double lambda, int n_lo, int n_hi,
                              double s_for_sums, double target) {
  if (n_lo < 1 || n_hi <= n_lo) throw input_error("box_dimension needs 1 <= n_lo < n_hi");
  DimensionReport rep;
  rep.target = target;
  SphereCounter c(spec, n_hi);
  std::vector<double> xs, ys;
  for (int n = n_lo; n <= n_hi; n++) {
    double eps = 2.0 * std::pow(lambda, n) / (1.0 - lambda);
    rep.scales.push_back(eps);
    double lc = c.sphere(n) > 0 ? log_big(c.sphere(n)) : 0.0;
    rep.log_counts.push_back(lc);
    rep.covering_sums.push_back(std::exp(lc + s_for_sums * std::log(eps)));
    xs.push_back(std::log(1.0 / eps));
    ys.push_back(lc);
  }
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); i++) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  rep.exponent = sxy / sxx;
  for (std::size_t i = 0; i < xs.size(); i++)
    rep.residual = std::max(rep.residual,
                            std::fabs(ys[i] - (my + rep.exponent * (xs[i] - mx))));
  return rep;
}

HausdorffComparison hausdorff_vs_ps(ElementPool& pool, const IteratedTree& tree,
                                    const DiscreteMeasure& mu,
                                    std::span<const std::pair<int, std::int32_t>> cones,
                                    double sigma, double scale,
                                    const LeafMetricOptions& opts) {
  HausdorffComparison out;
  int leaf_level = mu.depth;
  // leaves of the union of cones
  std::vector<std::int32_t> members;
  for (std::int32_t i = 0; i < std::int32_t(tree.levels[leaf_level].size()); i++) {
    std::vector<std::int32_t> anc = ancestor_chain(tree, leaf_level, i);
    for (auto [lvl, idx] : cones)
      if (lvl <= leaf_level && anc[lvl] == idx) {
        members.push_back(i);
        break;
      }
  }
  if (members.empty()) return out;

  const auto& masses = mu.leaf_masses();
  for (std::int32_t i : members) out.ps_mass += masses[i];

  // greedy disjoint balls of radius scale/10; the 5x dilations cover
  std::vector<BoundaryRay> rays = leaf_rays(pool, tree, leaf_level);
  bool tree_metric = pool.spec().is_tree();
  double r = scale / 10.0;
  std::vector<std::int32_t> kept;
  for (std::int32_t i : members) {
    std::vector<FloydInterval> dist;
    if (!tree_metric) dist = leaf_distances(pool, tree, leaf_level, rays, i, opts);
    bool ok = true;
    for (std::int32_t k : kept) {
      double d = tree_metric
                     ? tree_boundary_distance(pool, rays[i], rays[k], opts.lambda)
                     : dist[k].mid();
      if (d <= 2.0 * r) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(i);
  }
  out.balls_kept = int(kept.size());
  out.hausdorff_sum = double(kept.size()) * std::pow(10.0 * r, sigma);
  out.ratio = out.ps_mass > 0 ? out.hausdorff_sum / out.ps_mass : 0.0;
  return out;
}

}  // namespace floydlab
