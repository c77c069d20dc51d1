#include "floydlab/trees.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace floydlab {

namespace {

std::int32_t sign_of(std::int32_t v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

std::vector<std::int32_t> last_syllable_marks(const GroupSpec& spec, int factor,
                                              std::span<const std::int32_t> coords) {
  const Factor& f = spec.factors[factor];
  std::vector<std::int32_t> out;
  if (f.type == FactorType::Cyclic) {
    out.push_back(coords[0]);  // exact residue
  } else {
    for (auto c : coords) out.push_back(sign_of(c));
  }
  return out;
}

// trims a back-to-front syllable list to the profile window
TailProfile trim_profile(std::vector<TailProfile::Syl> back, bool whole, int window) {
  TailProfile out;
  std::int64_t cum = 0;
  std::size_t used = 0;
  bool any_capped = false;
  for (; used < back.size(); used++) {
    auto& s = back[used];
    if (cum >= window + 1) break;
    if (s.len > window + 1) {
      s.len = window + 1;
      s.capped = true;
    }
    if (s.capped) any_capped = true;
    cum += s.len;
  }
  bool trimmed = used < back.size();
  out.bos = whole && !trimmed && !any_capped;
  back.resize(used);
  for (std::size_t i = 1; i < back.size(); i++) back[i].coords.clear();
  out.syls.assign(back.rbegin(), back.rend());
  return out;
}

}  // namespace

std::vector<std::int32_t> TailProfile::key() const {
  std::vector<std::int32_t> k;
  k.push_back(bos ? 1 : 0);
  k.push_back(std::int32_t(syls.size()));
  for (const auto& s : syls) {
    k.push_back(s.factor);
    k.push_back(s.len);
    k.push_back(s.capped ? 1 : 0);
    k.push_back(std::int32_t(s.coords.size()));
    k.insert(k.end(), s.coords.begin(), s.coords.end());
  }
  return k;
}

TailProfile tail_profile(ElementPool& pool, ElementId x, int window) {
  const GroupSpec& spec = pool.spec();
  int n = pool.syllable_count(x);
  std::vector<TailProfile::Syl> back;
  for (int i = n - 1; i >= 0; i--) {
    SyllableRef s = pool.syllable(x, i);
    TailProfile::Syl ps;
    ps.factor = s.factor;
    ps.len = std::int32_t(syllable_length(spec.factors[s.factor], s.coords));
    if (i == n - 1) ps.coords = last_syllable_marks(spec, s.factor, s.coords);
    back.push_back(std::move(ps));
  }
  return trim_profile(std::move(back), true, window);
}

namespace {

// geodesic-interface check and merged-syllable marks at the junction
struct InterfaceMerge {
  bool compatible = true;
  bool merged = false;
  std::int32_t merged_ulen = 0;  // u-side letters of the merged syllable
  std::vector<std::int32_t> merged_marks;
};

InterfaceMerge merge_interface(const GroupSpec& spec, const TailProfile& prof,
                               ElementPool& pool, ElementId u) {
  InterfaceMerge out;
  if (prof.syls.empty() || pool.syllable_count(u) == 0) return out;
  const TailProfile::Syl& last = prof.syls.back();
  SyllableRef first = pool.syllable(u, 0);
  if (last.factor != first.factor) return out;
  const Factor& f = spec.factors[first.factor];
  out.merged = true;
  out.merged_ulen = std::int32_t(syllable_length(f, first.coords));
  if (f.type == FactorType::Cyclic) {
    std::int32_t a = last.coords[0], b = first.coords[0];
    std::int32_t sum = std::int32_t((std::int64_t(a) + b) % f.order);
    std::uint32_t la = syllable_length(f, std::span<const std::int32_t>(&a, 1));
    std::uint32_t ls =
        sum == 0 ? 0 : syllable_length(f, std::span<const std::int32_t>(&sum, 1));
    out.compatible = ls == la + std::uint32_t(out.merged_ulen);
    out.merged_marks = {sum};
  } else {
    out.merged_marks.resize(f.rank);
    for (int a = 0; a < f.rank; a++) {
      std::int32_t sa = last.coords[a], cb = first.coords[a];
      if (sa != 0 && cb != 0 && sign_of(cb) != sa) out.compatible = false;
      out.merged_marks[a] = cb != 0 ? sign_of(cb) : sa;
    }
  }
  return out;
}

// syllable extents around the junction; positions are letters relative to g
struct RelLayout {
  struct Span {
    bool peripheral;
    std::int64_t lo, hi;
  };
  std::vector<Span> spans;
  std::int64_t left_clip;
  std::int64_t right_clip;
};

constexpr std::int64_t kFarLeft = -(std::int64_t(1) << 40);

RelLayout relative_layout(const GroupSpec& spec, const TailProfile& prof,
                          ElementPool& pool, ElementId u, const InterfaceMerge& im) {
  RelLayout out;
  std::int64_t pos = 0;
  std::vector<RelLayout::Span> back;
  for (int i = int(prof.syls.size()) - 1; i >= 0; i--) {
    const auto& s = prof.syls[i];
    bool periph = spec.factors[s.factor].peripheral;
    std::int64_t lo = s.capped ? kFarLeft : pos - s.len;
    std::int64_t hi = (i == int(prof.syls.size()) - 1 && im.merged) ? im.merged_ulen : pos;
    back.push_back({periph, lo, hi});
    if (s.capped) {
      pos = kFarLeft;
      break;
    }
    pos -= s.len;
  }
  out.left_clip = prof.bos ? pos : kFarLeft;
  out.spans.assign(back.rbegin(), back.rend());

  pos = 0;
  int n = pool.syllable_count(u);
  for (int i = 0; i < n; i++) {
    SyllableRef s = pool.syllable(u, i);
    std::int64_t l = syllable_length(spec.factors[s.factor], s.coords);
    if (i == 0 && im.merged) {
      pos += l;
      continue;
    }
    out.spans.push_back({spec.factors[s.factor].peripheral, pos, pos + l});
    pos += l;
  }
  out.right_clip = pool.length(u);
  return out;
}

bool deep_at(const RelLayout& lay, std::int64_t p, int eps, int R) {
  std::int64_t wl = std::max(lay.left_clip, p - R);
  std::int64_t wr = std::min(lay.right_clip, p + R);
  for (const auto& s : lay.spans)
    if (s.peripheral && s.lo - eps <= wl && wr <= s.hi + eps) return true;
  return false;
}

bool has_transition_near_junction(const RelLayout& lay, int eps, int R, int reach,
                                  bool back) {
  std::int64_t from = back ? std::max(lay.left_clip, std::int64_t(-reach))
                           : std::int64_t(0);
  std::int64_t to = std::min(lay.right_clip, std::int64_t(reach));
  for (std::int64_t p = from; p <= to; p++)
    if (!deep_at(lay, p, eps, R)) return true;
  return false;
}

}  // namespace

TailProfile compose_profile(ElementPool& pool, const TailProfile& parent, ElementId u,
                            int window) {
  const GroupSpec& spec = pool.spec();
  InterfaceMerge im = merge_interface(spec, parent, pool, u);
  int n = pool.syllable_count(u);
  std::vector<TailProfile::Syl> back;
  for (int i = n - 1; i >= 0; i--) {
    SyllableRef s = pool.syllable(u, i);
    TailProfile::Syl ps;
    ps.factor = s.factor;
    ps.len = std::int32_t(syllable_length(spec.factors[s.factor], s.coords));
    if (i == n - 1) ps.coords = last_syllable_marks(spec, s.factor, s.coords);
    if (i == 0 && im.merged) {
      const auto& plast = parent.syls.back();
      ps.len += plast.len;
      ps.capped = plast.capped;
      if (n == 1) ps.coords = im.merged_marks;
    }
    back.push_back(std::move(ps));
  }
  int skip_parent = im.merged ? 1 : 0;
  for (int i = int(parent.syls.size()) - 1 - skip_parent; i >= 0; i--) {
    TailProfile::Syl ps = parent.syls[i];
    ps.coords.clear();
    back.push_back(std::move(ps));
  }
  return trim_profile(std::move(back), parent.bos, window);
}

bool partial_cone_contains(ElementPool& pool, ElementId g, ElementId h, int eps, int R) {
  ElementId u = pool.mul(pool.inverse(g), h);
  if (!pool.geodesic_concat(g, u)) return false;
  if (pool.length(u) <= std::uint32_t(2 * R)) return true;
  TailProfile prof = tail_profile(pool, g, INT32_MAX / 4);  // uncapped
  InterfaceMerge im = merge_interface(pool.spec(), prof, pool, u);
  RelLayout lay = relative_layout(pool.spec(), prof, pool, u, im);
  return has_transition_near_junction(lay, eps, R, 2 * R, /*back=*/true);
}

std::vector<ElementId> partial_cone_members(ElementPool& pool, const PartialConeQuery& q,
                                            const EnumerationOptions& opts) {
  Ball ball = enumerate_ball(pool, q.depth, opts);
  std::vector<ElementId> out;
  for (ElementId u : ball.all) {
    if (!pool.geodesic_concat(q.apex, u)) continue;
    ElementId h = pool.mul(q.apex, u);
    if (partial_cone_contains(pool, q.apex, h, q.eps, q.R)) out.push_back(h);
  }
  std::sort(out.begin(), out.end(),
            [&](ElementId a, ElementId b) { return pool.compare(a, b) < 0; });
  return out;
}

std::vector<std::int32_t> cone_fingerprint(ElementPool& pool, ElementId g, int eps,
                                           int R, int D, const EnumerationOptions& opts) {
  Ball ball = enumerate_ball(pool, D, opts);
  std::vector<std::int32_t> print;
  for (ElementId u : ball.all) {
    if (!pool.geodesic_concat(g, u)) continue;
    ElementId h = pool.mul(g, u);
    if (!partial_cone_contains(pool, g, h, eps, R)) continue;
    auto d = pool.data(u);
    print.push_back(std::int32_t(d.size()));
    print.insert(print.end(), d.begin(), d.end());
  }
  return print;
}

int distinct_fingerprints(ElementPool& pool, int eps, int R, int D, int n,
                          const EnumerationOptions& opts) {
  Ball ball = enumerate_ball(pool, n, opts);
  std::set<std::vector<std::int32_t>> prints;
  for (ElementId g : ball.all) prints.insert(cone_fingerprint(pool, g, eps, R, D, opts));
  return int(prints.size());
}

std::vector<ElementId> separated_subset(ElementPool& pool, std::span<const ElementId> Y,
                                        int C) {
  std::vector<ElementId> out;
  if (C <= 0) {
    out.assign(Y.begin(), Y.end());
    return out;
  }
  for (ElementId y : Y) {
    bool ok = true;
    for (ElementId z : out)
      if (pool.distance(y, z) < std::uint32_t(C)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// iterated tree construction

namespace {

int profile_window(const TreeParams& p) { return p.R + p.eps; }

int make_template(ElementPool& pool, const TreeParams& params, const Ball& uball,
                  const TailProfile& prof, std::vector<ConeTemplate>& templates,
                  std::map<std::vector<std::int32_t>, int>& cache) {
  auto key = prof.key();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const GroupSpec& spec = pool.spec();
  std::vector<ElementId> candidates;
  for (ElementId u : uball.all) {
    int lu = int(pool.length(u));
    if (lu < params.L - params.delta || lu >= params.L + params.delta) continue;
    InterfaceMerge im = merge_interface(spec, prof, pool, u);
    if (!im.compatible) continue;
    RelLayout lay = relative_layout(spec, prof, pool, u, im);
    if (!has_transition_near_junction(lay, params.eps, params.R, 2 * params.R,
                                      /*back=*/false))
      continue;
    candidates.push_back(u);
  }
  if (candidates.empty())
    throw construction_error(
        "empty forward cone annulus at (L=" + std::to_string(params.L) +
        ", delta=" + std::to_string(params.delta) + ", C=" + std::to_string(params.C) +
        ")");

  // largest same-profile class, then greedy C-separation inside it
  std::map<std::vector<std::int32_t>, std::vector<ElementId>> classes;
  for (ElementId u : candidates)
    classes[compose_profile(pool, prof, u, profile_window(params)).key()].push_back(u);
  const std::vector<ElementId>* best = nullptr;
  for (const auto& [k, v] : classes)
    if (!best || v.size() > best->size()) best = &v;

  ConeTemplate tmpl;
  tmpl.candidate_count = candidates.size();
  tmpl.class_count = best->size();
  tmpl.children = separated_subset(pool, *best, params.C);
  if (tmpl.children.empty())
    throw construction_error("empty child template at (L=" + std::to_string(params.L) +
                             ", delta=" + std::to_string(params.delta) + ", C=" +
                             std::to_string(params.C) + ")");
  tmpl.child_profile =
      compose_profile(pool, prof, tmpl.children.front(), profile_window(params));
  for (ElementId u : tmpl.children) tmpl.child_lengths.push_back(int(pool.length(u)));
  int idx = int(templates.size());
  templates.push_back(std::move(tmpl));
  cache.emplace(std::move(key), idx);
  return idx;
}

void verify_realization(ElementPool& pool, const IteratedTree& tree) {
  std::unordered_set<ElementId> vertices;
  std::unordered_set<std::uint64_t> edges;
  vertices.insert(tree.levels[0][0].elem);
  for (int l = 1; l < int(tree.levels.size()); l++) {
    for (const TreeNode& n : tree.levels[l]) {
      ElementId parent = tree.levels[l - 1][n.parent].elem;
      ElementId u = pool.mul(pool.inverse(parent), n.elem);
      ElementId cur = parent;
      for (int g : pool.canonical_word(u)) {
        ElementId nxt = pool.mul_gen(cur, g);
        ElementId a = std::min(cur, nxt), b = std::max(cur, nxt);
        vertices.insert(nxt);
        edges.insert((std::uint64_t(a) << 32) | b);
        cur = nxt;
      }
    }
  }
  if (edges.size() + 1 != vertices.size())
    throw construction_error("realized graph is not a tree (" +
                             std::to_string(vertices.size()) + " vertices, " +
                             std::to_string(edges.size()) + " edges)");
}

}  // namespace

std::pair<std::int32_t, std::int32_t> IteratedTree::children_of(int level,
                                                                std::int32_t idx) const {
  const auto& next = levels[level + 1];
  auto lo = std::lower_bound(
      next.begin(), next.end(), idx,
      [](const TreeNode& n, std::int32_t p) { return n.parent < p; });
  auto hi = std::upper_bound(
      next.begin(), next.end(), idx,
      [](std::int32_t p, const TreeNode& n) { return p < n.parent; });
  return {std::int32_t(lo - next.begin()), std::int32_t(hi - next.begin())};
}

std::vector<int> IteratedTree::branch_word(ElementPool& pool, int level,
                                           std::int32_t idx) const {
  std::vector<std::pair<int, std::int32_t>> chain;
  for (int l = level; l > 0; l--) {
    chain.push_back({l, idx});
    idx = levels[l][idx].parent;
  }
  std::reverse(chain.begin(), chain.end());
  std::vector<int> word;
  ElementId prev = levels[0][0].elem;
  for (auto [l, i] : chain) {
    ElementId u = pool.mul(pool.inverse(prev), levels[l][i].elem);
    auto w = pool.canonical_word(u);
    word.insert(word.end(), w.begin(), w.end());
    prev = levels[l][i].elem;
  }
  return word;
}

int IteratedTree::template_index_at(int level) const {
  if (level < int(level_template.size())) return level_template[level];
  if (level_template.empty()) throw unsupported_error("tree has no templates");
  return level_template[t0 + (level - t0) % n0];
}

std::vector<BigInt> IteratedTree::depth_counts(int n_max) const {
  if (full_group)
    throw unsupported_error("depth_counts applies to iterated trees");
  std::vector<BigInt> counts(n_max + 1, BigInt(0));
  counts[0] = 1;
  std::map<int, BigInt> cur;
  cur[0] = 1;
  int level = 0;
  while (!cur.empty()) {
    const ConeTemplate& tmpl = templates[template_index_at(level)];
    std::map<int, int> by_len;
    for (int l : tmpl.child_lengths) by_len[l]++;
    std::map<int, BigInt> next;
    for (const auto& [d, c] : cur)
      for (const auto& [l, mult] : by_len)
        if (d + l <= n_max) next[d + l] += c * mult;
    for (const auto& [d, c] : next) counts[d] += c;
    cur = std::move(next);
    level++;
  }
  return counts;
}

double IteratedTree::measured_theta(double group_growth) const {
  double theta = 1e300;
  for (const auto& t : templates)
    theta =
        std::min(theta, double(t.children.size()) / std::exp(group_growth * params.L));
  return theta;
}

IteratedTree build_iterated_tree(ElementPool& pool, const TreeParams& params) {
  params.validate();
  if (params.eps > params.R)
    throw input_error("tree construction needs eps <= R");
  IteratedTree tree;
  tree.params = params;

  Ball uball = enumerate_ball(pool, params.L + params.delta - 1, params.enumeration);

  std::map<std::vector<std::int32_t>, int> cache;
  tree.levels.push_back({TreeNode{pool.identity(), -1}});
  TailProfile prof = tail_profile(pool, pool.identity(), profile_window(params));

  // chase the template chain until it cycles; materialize the first `levels`
  std::map<int, int> first_seen;
  int level = 0;
  while (true) {
    int ti = make_template(pool, params, uball, prof, tree.templates, cache);
    auto seen = first_seen.find(ti);
    if (seen != first_seen.end() && level >= params.levels) {
      tree.t0 = seen->second;
      tree.n0 = level - seen->second;
      break;
    }
    if (seen == first_seen.end()) first_seen.emplace(ti, level);
    tree.level_template.push_back(ti);
    if (level < params.levels) {
      const ConeTemplate& tmpl = tree.templates[ti];
      const auto& cur = tree.levels[level];
      if (cur.size() * tmpl.children.size() > params.node_cap)
        throw resource_error("tree would exceed the node cap of " +
                             std::to_string(params.node_cap) + " at level " +
                             std::to_string(level + 1));
      std::vector<TreeNode> next;
      next.reserve(cur.size() * tmpl.children.size());
      for (std::int32_t i = 0; i < std::int32_t(cur.size()); i++)
        for (ElementId u : tmpl.children)
          next.push_back(TreeNode{pool.mul(cur[i].elem, u), i});
      tree.levels.push_back(std::move(next));
    }
    prof = tree.templates[ti].child_profile;
    level++;
    if (level > 64 + params.levels)
      throw construction_error("template chain failed to cycle");
  }
  if (tree.n0 < 1) tree.n0 = 1;

  verify_realization(pool, tree);
  return tree;
}

IteratedTree full_group_tree(ElementPool& pool, int depth, const EnumerationOptions& opts) {
  IteratedTree tree;
  tree.full_group = true;
  tree.params.L = 1;
  tree.params.levels = depth;
  Ball ball = enumerate_ball(pool, depth, opts);
  tree.levels.resize(depth + 1);
  std::unordered_map<ElementId, std::int32_t> pos_in_level;
  for (int k = 0; k <= depth; k++) {
    for (ElementId e : ball.spheres[k]) {
      std::int32_t parent = -1;
      if (k > 0) parent = pos_in_level.at(ball.parent[ball.position(e)]);
      tree.levels[k].push_back(TreeNode{e, parent});
    }
    if (k > 0)
      std::stable_sort(
          tree.levels[k].begin(), tree.levels[k].end(),
          [](const TreeNode& a, const TreeNode& b) { return a.parent < b.parent; });
    pos_in_level.clear();
    for (std::int32_t i = 0; i < std::int32_t(tree.levels[k].size()); i++)
      pos_in_level.emplace(tree.levels[k][i].elem, i);
  }
  return tree;
}

int audit_transitional_gap(ElementPool& pool, const IteratedTree& tree) {
  if (tree.full_group)
    throw unsupported_error("transitional audit applies to iterated trees");
  const GroupSpec& spec = pool.spec();
  const TreeParams& p = tree.params;
  int chain_len = tree.t0 + tree.n0;
  int worst = 0;
  // A deep stretch is carried by one syllable run, and no template word is a
  // single peripheral run (such words never enter the forward cone), so every
  // run is seen inside some pair of consecutive template words. Successor
  // words matter only through their first syllable, which can merge into the
  // run at the junction.
  for (int a = 0; a < chain_len; a++) {
    const ConeTemplate& ta = tree.templates[tree.template_index_at(a)];
    TailProfile before =
        a == 0 ? tail_profile(pool, pool.identity(), profile_window(p))
               : tree.templates[tree.template_index_at(a - 1)].child_profile;
    const ConeTemplate& tb = tree.templates[tree.template_index_at(a + 1)];
    std::set<ElementId> next_heads;
    for (ElementId v : tb.children) {
      SyllableRef s = pool.syllable(v, 0);
      std::vector<std::int32_t> one(1 + s.coords.size());
      one[0] = s.factor;
      std::copy(s.coords.begin(), s.coords.end(), one.begin() + 1);
      next_heads.insert(pool.intern(one));
    }
    for (ElementId u : ta.children) {
      for (ElementId head : next_heads) {
        ElementId uv = pool.mul(u, head);
        if (!pool.geodesic_concat(u, head)) continue;
        InterfaceMerge im = merge_interface(spec, before, pool, uv);
        RelLayout lay = relative_layout(spec, before, pool, uv, im);
        std::vector<std::int64_t> trans;
        std::int64_t from = std::max(lay.left_clip, -std::int64_t(2 * p.R + p.eps));
        for (std::int64_t q = from; q <= lay.right_clip; q++)
          if (!deep_at(lay, q, p.eps, p.R)) trans.push_back(q);
        std::int64_t ulen = pool.length(u);
        for (std::int64_t q = 0; q <= ulen; q++) {
          std::int64_t best = INT64_MAX;
          for (std::int64_t t : trans) best = std::min(best, std::abs(t - q));
          worst = int(std::max<std::int64_t>(worst, std::min<std::int64_t>(best, INT32_MAX)));
        }
      }
    }
  }
  return worst;
}

CriticalExponent critical_exponent(ElementPool& pool, const IteratedTree& tree,
                                   int n_max) {
  CriticalExponent out;
  std::vector<BigInt> counts;
  int window;
  if (tree.full_group) {
    SphereCounter c(pool.spec(), n_max);
    counts.resize(n_max + 1);
    for (int n = 0; n <= n_max; n++) counts[n] = c.sphere(n);
    window = 1;
  } else {
    counts = tree.depth_counts(n_max);
    window = 3 * (tree.params.delta + tree.params.L + 2 * tree.params.R);
  }
  std::vector<BigInt> a(n_max + 1, BigInt(0));
  for (int n = 0; n <= n_max; n++)
    for (int d = std::max(0, n - window + 1); d < std::min(n_max + 1, n + window); d++)
      a[n] += counts[d];

  std::vector<double> la(n_max + 1, -1e300);
  for (int n = 0; n <= n_max; n++)
    if (a[n] > 0) {
      la[n] = log_big(a[n]);
      out.log_annuli.push_back({n, la[n]});
    }

  double best = 0.0, best_err = 1e300;
  int max_period = tree.full_group ? 6 : tree.params.L + tree.params.delta;
  for (int p = 1; p <= std::max(1, max_period); p++) {
    if (n_max - 3 * p < 0) break;
    if (a[n_max] == 0 || a[n_max - p] == 0 || a[n_max - 2 * p] == 0 ||
        a[n_max - 3 * p] == 0)
      continue;
    double r0 = (la[n_max] - la[n_max - p]) / p;
    double r1 = (la[n_max - p] - la[n_max - 2 * p]) / p;
    double r2 = (la[n_max - 2 * p] - la[n_max - 3 * p]) / p;
    double err = std::fabs(r0 - r1);
    double est = r0;
    double denom = (r0 - r1) - (r1 - r2);
    if (std::fabs(denom) > 1e-14) {
      double ait = r0 - (r0 - r1) * (r0 - r1) / denom;
      if (std::isfinite(ait) && std::fabs(ait - r0) < 0.5) est = ait;
    }
    if (err < best_err) {
      best_err = err;
      best = est;
    }
  }
  out.estimate = std::max(0.0, best);

  // brackets from the measured multiplicativity defects of the annulus counts
  double csub = 0.0, csuper = 0.0;
  for (int n = window; n <= n_max; n++)
    for (int m = window; m <= n_max - n; m++) {
      if (a[n] == 0 || a[m] == 0 || a[n + m] == 0) continue;
      csub = std::max(csub, la[n + m] - la[n] - la[m]);
      csuper = std::max(csuper, la[n] + la[m] - la[n + m]);
    }
  out.upper = 1e300;
  out.lower = 0.0;
  for (int n = window; n <= n_max; n++) {
    if (a[n] == 0) continue;
    out.upper = std::min(out.upper, (la[n] + csub) / n);
    out.lower = std::max(out.lower, std::max(0.0, (la[n] - csuper) / n));
  }
  if (out.upper > 1e299) out.upper = out.estimate;
  return out;
}

PoincareSeries poincare_partial(ElementPool& pool, const IteratedTree& tree, double s,
                                int n_max) {
  PoincareSeries out;
  out.s = s;
  out.depth = n_max;
  std::vector<BigInt> counts;
  if (tree.full_group) {
    SphereCounter c(pool.spec(), n_max);
    counts.resize(n_max + 1);
    for (int n = 0; n <= n_max; n++) counts[n] = c.sphere(n);
  } else {
    counts = tree.depth_counts(n_max);
  }
  double total = 0.0;
  for (int d = 0; d <= n_max; d++)
    if (counts[d] > 0) total += std::exp(log_big(counts[d]) - s * d);
  out.partial_sum = total;
  out.diverging = s <= critical_exponent(pool, tree, n_max).estimate;
  return out;
}

RayWords leaf_ray_words(ElementPool& pool, const IteratedTree& tree, int level,
                        std::int32_t idx) {
  if (tree.full_group)
    throw unsupported_error("leaf rays need an iterated tree");
  RayWords out;
  out.prefix = tree.branch_word(pool, level, idx);
  // walk into the periodic part of the chain, then cycle
  int li = level;
  while (li < tree.t0) {
    const ConeTemplate& t = tree.templates[tree.template_index_at(li)];
    auto w = pool.canonical_word(t.children.front());
    out.prefix.insert(out.prefix.end(), w.begin(), w.end());
    li++;
  }
  for (int steps = 0; steps < std::max(1, tree.n0); steps++) {
    const ConeTemplate& t = tree.templates[tree.template_index_at(li + steps)];
    auto w = pool.canonical_word(t.children.front());
    out.period.insert(out.period.end(), w.begin(), w.end());
  }
  return out;
}

}  // namespace floydlab
