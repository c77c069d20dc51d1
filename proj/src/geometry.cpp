#include "floydlab/geometry.hpp"

#include <omp.h>

#include <algorithm>

namespace floydlab {

DeepVerdict classify_point(ElementPool& pool, const PathWord& path, int v,
                           const TransitionParams& p) {
  p.validate();
  if (v < 0 || v >= int(path.vertices.size()))
    throw input_error("vertex index outside the path");
  ElementId center = path.vertices[v];
  std::vector<ElementId> window;
  for (ElementId w : path.vertices)
    if (pool.distance(center, w) <= std::uint32_t(p.R)) window.push_back(w);
  for (const Coset& c : nearby_peripheral_cosets(pool, center, p.eps)) {
    bool inside = true;
    for (ElementId w : window)
      if (coset_geometry(pool, w, c).distance > std::uint32_t(p.eps)) {
        inside = false;
        break;
      }
    if (inside) return {true, c};
  }
  return {false, Coset{kNoElement, -1}};
}

std::vector<DeepVerdict> classify_path(ElementPool& pool, const PathWord& path,
                                       const TransitionParams& p) {
  std::vector<DeepVerdict> out(path.vertices.size());
  for (int v = 0; v < int(path.vertices.size()); v++)
    out[v] = classify_point(pool, path, v, p);
  return out;
}

std::vector<std::vector<DeepVerdict>> classify_batch_serial(
    ElementPool& pool, std::span<const PathWord> paths, const TransitionParams& p) {
  std::vector<std::vector<DeepVerdict>> out(paths.size());
  for (std::size_t i = 0; i < paths.size(); i++)
    out[i] = classify_path(pool, paths[i], p);
  return out;
}

std::vector<std::vector<DeepVerdict>> classify_batch(
    ElementPool& pool, std::span<const PathWord> paths, const TransitionParams& p) {
  std::vector<std::vector<DeepVerdict>> out(paths.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < std::int64_t(paths.size()); i++)
    out[i] = classify_path(pool, paths[i], p);
  return out;
}

TransitionalReport is_transitional_path(ElementPool& pool, const PathWord& path,
                                        const TransitionParams& p) {
  p.validate();
  int n = int(path.vertices.size());
  if (n <= 1) return {true, 0};
  std::vector<DeepVerdict> verdicts = classify_path(pool, path, p);
  std::vector<int> trans;
  for (int i = 0; i < n; i++)
    if (!verdicts[i].deep) trans.push_back(i);
  if (trans.empty()) return {false, n};
  int max_gap = 0;
  for (int i = 0; i < n; i++) {
    int best = n;
    for (int t : trans) best = std::min(best, std::abs(t - i));
    max_gap = std::max(max_gap, best);
  }
  return {max_gap <= p.L, max_gap};
}

bool is_tight(ElementPool& pool, const PathWord& path, double c, int l) {
  if (c < 1.0) throw input_error("tightness constant c must be >= 1");
  int n = int(path.vertices.size());
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) {
      std::uint32_t d = pool.distance(path.vertices[i], path.vertices[j]);
      if (d <= std::uint32_t(l) && double(j - i) > c * double(d) + c) return false;
    }
  return true;
}

PathWord truncate_path(ElementPool& pool, const PathWord& path, int K, int eps,
                       int overlap_bound) {
  if (K <= 2 * overlap_bound)
    throw precondition_error("truncation needs K > 2 * overlap bound");
  int n = int(path.vertices.size());
  if (n <= 1) return path;

  // maximal components per horosphere: first to last vertex in N_eps(X)
  struct Component {
    int a, b;
    Coset X;
  };
  std::vector<Coset> candidates;
  for (ElementId v : path.vertices)
    for (const Coset& c : nearby_peripheral_cosets(pool, v, eps))
      if (std::find(candidates.begin(), candidates.end(), c) == candidates.end())
        candidates.push_back(c);
  std::vector<Component> comps;
  for (const Coset& X : candidates) {
    int a = -1, b = -1;
    for (int i = 0; i < n; i++)
      if (coset_geometry(pool, path.vertices[i], X).distance <= std::uint32_t(eps)) {
        if (a < 0) a = i;
        b = i;
      }
    if (a >= 0 && b - a >= K) comps.push_back({a, b, X});
  }
  if (comps.empty()) return path;
  std::sort(comps.begin(), comps.end(), [](const Component& x, const Component& y) {
    return x.a < y.a || (x.a == y.a && x.b < y.b);
  });

  PathWord out;
  out.base = path.base;
  out.vertices.push_back(path.base);
  auto copy_range = [&](int from, int to) {  // letters from..to-1
    for (int i = from; i < to; i++) {
      out.letters.push_back(path.letters[i]);
      out.vertices.push_back(path.vertices[i + 1]);
    }
  };
  auto splice_geodesic = [&](int from, int to) {
    ElementId u = pool.mul(pool.inverse(path.vertices[from]), path.vertices[to]);
    for (int g : pool.canonical_word(u)) {
      out.letters.push_back(g);
      out.vertices.push_back(pool.mul_gen(out.vertices.back(), g));
    }
  };
  int cursor = 0;
  for (const Component& comp : comps) {
    int y = std::max(comp.a, cursor);  // overlapping components chain on
    if (y >= comp.b) continue;
    copy_range(cursor, y);
    splice_geodesic(y, comp.b);
    cursor = comp.b;
  }
  copy_range(cursor, n - 1);
  return out;
}

std::uint32_t projection_diameter(ElementPool& pool, const PathWord& path,
                                  const Coset& X, int mu) {
  std::vector<ElementId> proj;
  for (std::size_t i = 0; i < path.vertices.size(); i++) {
    CosetGeometry g = coset_geometry(pool, path.vertices[i], X);
    if (g.distance <= std::uint32_t(mu))
      throw precondition_error("clearance violated at path vertex " +
                               std::to_string(i) + " (" +
                               pool.to_string(path.vertices[i]) + ")");
    for (ElementId p : g.nearest)
      if (std::find(proj.begin(), proj.end(), p) == proj.end()) proj.push_back(p);
  }
  std::uint32_t diam = 0;
  for (std::size_t i = 0; i < proj.size(); i++)
    for (std::size_t j = i + 1; j < proj.size(); j++)
      diam = std::max(diam, pool.distance(proj[i], proj[j]));
  return diam;
}

}  // namespace floydlab
