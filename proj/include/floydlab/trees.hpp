#pragma once

#include "floydlab/geometry.hpp"

namespace floydlab {

/// Capped description of the tail of a normal form: the data that decides
/// which extensions continue a geodesic and where transition points can sit
/// near the junction. Two elements with equal profiles have translated-equal
/// forward cones at every depth.
struct TailProfile {
  struct Syl {
    std::int32_t factor = -1;
    std::int32_t len = 0;  // capped when `capped`
    bool capped = false;
    std::vector<std::int32_t> coords;  // last syllable only: sign pattern /
                                       // residue; empty for interior syllables
  };
  bool bos = true;  // profile covers the whole element
  std::vector<Syl> syls;

  std::vector<std::int32_t> key() const;
};

TailProfile tail_profile(ElementPool& pool, ElementId x, int window);
TailProfile compose_profile(ElementPool& pool, const TailProfile& parent, ElementId u,
                            int window);

/// Partial cone membership at apex g: some geodesic [1, g u] passes g and
/// either |u| <= 2R or carries an (eps,R)-transition point within 2R of g.
/// Decided positionally on the syllable layout; geodesic spellings agree on
/// the verdict for this family (oracle-checked in the tests).
bool partial_cone_contains(ElementPool& pool, ElementId g, ElementId h, int eps, int R);

struct PartialConeQuery {
  ElementId apex = 0;
  int eps = 1;
  int R = 3;
  int depth = 6;  // members within g * B(1, depth)
};

std::vector<ElementId> partial_cone_members(ElementPool& pool, const PartialConeQuery& q,
                                            const EnumerationOptions& opts = {});

/// Canonical fingerprint of the depth-D cone at g: the relative member set
/// g^-1 (Omega(g) cap B(g, D)), encoded as a stream.
std::vector<std::int32_t> cone_fingerprint(ElementPool& pool, ElementId g, int eps,
                                           int R, int D,
                                           const EnumerationOptions& opts = {});
int distinct_fingerprints(ElementPool& pool, int eps, int R, int D, int n,
                          const EnumerationOptions& opts = {});

/// Greedy maximal C-separated subset in canonical order.
std::vector<ElementId> separated_subset(ElementPool& pool, std::span<const ElementId> Y,
                                        int C);

struct TreeParams {
  int eps = 1;
  int R = 3;
  int L = 8;
  int delta = 1;
  int C = 6;
  int levels = 4;
  std::size_t node_cap = 2'000'000;
  EnumerationOptions enumeration;

  void validate() const {
    if (L <= delta) throw input_error("tree construction needs L > delta");
    if (delta < 1) throw input_error("tree construction needs delta >= 1");
    if (C < 0) throw input_error("separation C must be >= 0");
    if (levels < 0) throw input_error("levels must be >= 0");
  }
};

/// The translated child set shared by every node with one tail profile.
struct ConeTemplate {
  TailProfile child_profile;
  std::vector<ElementId> children;    // relative elements u, canonical order
  std::vector<int> child_lengths;
  std::size_t candidate_count = 0;    // forward-cone members in the annulus
  std::size_t class_count = 0;        // members of the chosen profile class
};

struct TreeNode {
  ElementId elem = 0;
  std::int32_t parent = -1;  // index into the previous level
};

/// Iterated transitional tree: periodic templates, materialized levels, and
/// a geodesic realization in the Cayley graph.
struct IteratedTree {
  TreeParams params;
  bool full_group = false;  // BFS tree of the whole group (degenerate case)
  std::vector<std::vector<TreeNode>> levels;
  std::vector<ConeTemplate> templates;
  std::vector<int> level_template;  // template index used to expand level i
  int t0 = 0, n0 = 1;               // onset and period of the template chain

  const ConeTemplate& template_at(int level) const {
    return templates[template_index_at(level)];
  }
  /// template index expanding the given level, extended periodically
  int template_index_at(int level) const;
  std::size_t node_count() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.size();
    return n;
  }
  ElementId node(int level, int idx) const { return levels[level][idx].elem; }
  /// children of (level, idx) as an index range into level+1 (parent-major)
  std::pair<std::int32_t, std::int32_t> children_of(int level, std::int32_t idx) const;
  std::vector<int> branch_word(ElementPool& pool, int level, std::int32_t idx) const;
  /// depth-count table of the (symbolically extended) tree set
  std::vector<BigInt> depth_counts(int n_max) const;
  /// measured theta: min over templates of #children / exp(L * growth)
  double measured_theta(double group_growth) const;
};

IteratedTree build_iterated_tree(ElementPool& pool, const TreeParams& params);
IteratedTree full_group_tree(ElementPool& pool, int depth,
                             const EnumerationOptions& opts = {});

/// Largest distance from any branch position to a transition point, maximized
/// over all junction patterns of the periodic template chain.
int audit_transitional_gap(ElementPool& pool, const IteratedTree& tree);

struct CriticalExponent {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::pair<int, double>> log_annuli;  // (n, log a_n)
};

/// Growth of annulus counts A_T(1, n, 3*Delta0) with ratio estimation and
/// Fekete-style brackets from the measured sub/super-multiplicativity defect.
CriticalExponent critical_exponent(ElementPool& pool, const IteratedTree& tree,
                                   int n_max);

struct PoincareSeries {
  double s = 0.0;
  double partial_sum = 0.0;
  int depth = 0;
  bool diverging = false;  // s at or below the estimated critical exponent
};

PoincareSeries poincare_partial(ElementPool& pool, const IteratedTree& tree, double s,
                                int n_max);

struct RayWords {
  std::vector<int> prefix, period;
};

/// Eventually periodic ray through a leaf, extending its branch word with the
/// canonical template children around one period of the chain.
RayWords leaf_ray_words(ElementPool& pool, const IteratedTree& tree, int level,
                        std::int32_t idx);

}  // namespace floydlab
