#pragma once

// Shared test fixtures and brute-force oracles. The oracles recompute the
// quantities under test by enumeration, independent of the closed forms and
// search structures they validate.

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "floydlab/cayley.hpp"
#include "floydlab/geometry.hpp"
#include "floydlab/group.hpp"

namespace oracles {

using namespace floydlab;

inline GroupSpec f2() {
  Factor a{FactorType::FreeAbelian, 1, 0, false, {"a"}};
  Factor b{FactorType::FreeAbelian, 1, 0, false, {"b"}};
  return GroupSpec::from_factors({a, b});
}

inline GroupSpec g2() {
  Factor ab{FactorType::FreeAbelian, 2, 0, true, {"x", "y"}};
  Factor t{FactorType::FreeAbelian, 1, 0, false, {"t"}};
  return GroupSpec::from_factors({ab, t});
}

inline GroupSpec g3() {
  Factor u{FactorType::Cyclic, 1, 2, false, {"u"}};
  Factor v{FactorType::Cyclic, 1, 3, false, {"v"}};
  return GroupSpec::from_factors({u, v});
}

inline GroupSpec zline() {
  Factor t{FactorType::FreeAbelian, 1, 0, false, {"t"}};
  return GroupSpec::from_factors({t});
}

// breadth-first word metric, independent of the syllable length formula
inline std::uint32_t bfs_distance(ElementPool& pool, ElementId a, ElementId b,
                                  int cap = 16) {
  if (a == b) return 0;
  std::map<ElementId, int> dist{{a, 0}};
  std::queue<ElementId> q;
  q.push(a);
  while (!q.empty()) {
    ElementId v = q.front();
    q.pop();
    int d = dist[v];
    if (d >= cap) continue;
    for (int g = 0; g < int(pool.spec().generators.size()); g++) {
      ElementId w = pool.mul_gen(v, g);
      if (dist.count(w)) continue;
      if (w == b) return d + 1;
      dist[w] = d + 1;
      q.push(w);
    }
  }
  throw std::runtime_error("bfs_distance cap too small");
}

inline std::vector<std::size_t> bfs_sphere_sizes(ElementPool& pool, int n) {
  std::set<ElementId> seen{pool.identity()};
  std::vector<ElementId> frontier{pool.identity()};
  std::vector<std::size_t> sizes{1};
  for (int k = 0; k < n; k++) {
    std::vector<ElementId> next;
    for (ElementId v : frontier)
      for (int g = 0; g < int(pool.spec().generators.size()); g++) {
        ElementId w = pool.mul_gen(v, g);
        if (seen.insert(w).second) next.push_back(w);
      }
    sizes.push_back(next.size());
    frontier = std::move(next);
  }
  return sizes;
}

// structural coset membership: rep^-1 h lies in the factor subgroup
inline bool in_coset(ElementPool& pool, ElementId h, const Coset& c) {
  ElementId w = pool.mul(pool.inverse(c.rep), h);
  int n = pool.syllable_count(w);
  if (n == 0) return true;
  return n == 1 && pool.syllable(w, 0).factor == c.factor;
}

// coset points inside the ball, collected once so brute scans stay cheap
inline std::vector<ElementId> coset_members(ElementPool& pool, const Coset& c,
                                            const Ball& ball) {
  std::vector<ElementId> out;
  for (ElementId p : ball.all)
    if (in_coset(pool, p, c)) out.push_back(p);
  return out;
}

// brute minimum of d(h, .) over the collected coset points
inline std::pair<std::uint32_t, std::vector<ElementId>> brute_coset_over(
    ElementPool& pool, ElementId h, std::span<const ElementId> members) {
  std::uint32_t best = UINT32_MAX;
  std::vector<ElementId> argmin;
  for (ElementId p : members) {
    std::uint32_t d = pool.distance(h, p);
    if (d < best) {
      best = d;
      argmin = {p};
    } else if (d == best) {
      argmin.push_back(p);
    }
  }
  return {best, argmin};
}

inline std::pair<std::uint32_t, std::vector<ElementId>> brute_coset(
    ElementPool& pool, ElementId h, const Coset& c, const Ball& ball) {
  auto members = coset_members(pool, c, ball);
  return brute_coset_over(pool, h, members);
}

inline ElementId random_element(ElementPool& pool, std::mt19937_64& rng,
                                int max_syllables, int max_coord) {
  const GroupSpec& spec = pool.spec();
  std::uniform_int_distribution<int> nsyl(0, max_syllables);
  int n = nsyl(rng);
  std::vector<std::int32_t> nf;
  int prev = -1;
  for (int i = 0; i < n; i++) {
    std::uniform_int_distribution<int> pick(0, int(spec.factors.size()) - 1);
    int f = pick(rng);
    if (f == prev) f = (f + 1) % int(spec.factors.size());
    if (f == prev) break;  // single-factor group
    const Factor& fac = spec.factors[f];
    nf.push_back(f);
    if (fac.type == FactorType::Cyclic) {
      std::uniform_int_distribution<int> res(1, fac.order - 1);
      nf.push_back(res(rng));
    } else {
      bool nonzero = false;
      std::vector<std::int32_t> coords(fac.rank);
      while (!nonzero) {
        for (int a = 0; a < fac.rank; a++) {
          std::uniform_int_distribution<int> co(-max_coord, max_coord);
          coords[a] = co(rng);
          if (coords[a] != 0) nonzero = true;
        }
      }
      for (auto cvalue : coords) nf.push_back(cvalue);
    }
    prev = f;
  }
  return pool.intern(nf);
}

// a uniformly random geodesic spelling of h
inline std::vector<int> random_geodesic_word(ElementPool& pool, ElementId h,
                                             std::mt19937_64& rng) {
  std::vector<int> word;
  const GroupSpec& spec = pool.spec();
  for (int i = 0; i < pool.syllable_count(h); i++) {
    SyllableRef s = pool.syllable(h, i);
    const Factor& f = spec.factors[s.factor];
    auto gen_of = [&](int axis, int sign) {
      for (int g = 0; g < int(spec.generators.size()); g++)
        if (spec.generators[g].factor == s.factor && spec.generators[g].axis == axis &&
            spec.generators[g].sign == sign)
          return g;
      return -1;
    };
    if (f.type == FactorType::Cyclic) {
      std::int32_t cres = s.coords[0];
      bool positive = cres <= f.order - cres;
      if (2 * cres == f.order && f.order > 2) positive = rng() & 1;
      int reps = positive ? cres : f.order - cres;
      for (int r = 0; r < reps; r++) word.push_back(gen_of(0, positive ? 1 : -1));
    } else {
      std::vector<int> letters;
      for (int a = 0; a < f.rank; a++)
        for (int r = 0; r < std::abs(s.coords[a]); r++)
          letters.push_back(gen_of(a, s.coords[a] > 0 ? 1 : -1));
      std::shuffle(letters.begin(), letters.end(), rng);
      word.insert(word.end(), letters.begin(), letters.end());
    }
  }
  return word;
}

// literal deep verdict by exhaustive candidate enumeration; candidates come
// from BFS around every window vertex and distances from the brute minimum
inline DeepVerdict brute_classify(ElementPool& pool, const PathWord& path, int v,
                                  const TransitionParams& p, const Ball& ball) {
  ElementId center = path.vertices[v];
  std::vector<ElementId> window;
  for (ElementId w : path.vertices)
    if (bfs_distance(pool, center, w, p.R + 1) <= std::uint32_t(p.R)) window.push_back(w);

  std::vector<Coset> candidates;
  for (ElementId w : window) {
    std::set<ElementId> around{w};
    std::vector<ElementId> frontier{w};
    for (int step = 0; step < p.eps; step++) {
      std::vector<ElementId> next;
      for (ElementId z : frontier)
        for (int g = 0; g < int(pool.spec().generators.size()); g++) {
          ElementId zz = pool.mul_gen(z, g);
          if (around.insert(zz).second) next.push_back(zz);
        }
      frontier = std::move(next);
    }
    for (ElementId z : around)
      for (int f : pool.spec().peripheral_factors()) {
        Coset c = make_coset(pool, z, f);
        if (std::find(candidates.begin(), candidates.end(), c) == candidates.end())
          candidates.push_back(c);
      }
  }
  for (const Coset& c : candidates) {
    bool deep = true;
    for (ElementId w : window) {
      auto [d, unused] = brute_coset(pool, w, c, ball);
      (void)unused;
      if (d > std::uint32_t(p.eps)) {
        deep = false;
        break;
      }
    }
    if (deep) return {true, c};
  }
  return {false, Coset{kNoElement, -1}};
}

}  // namespace oracles
