#pragma once

#include "floydlab/cayley.hpp"

namespace floydlab {

struct TransitionParams {
  int eps = 1;
  int R = 3;
  int L = 8;

  void validate() const {
    if (eps < 0) throw input_error("eps must be >= 0");
    if (R < 1) throw input_error("R must be >= 1");
    if (L < 0) throw input_error("L must be >= 0");
  }
};

/// Verdict for one path vertex: deep in a named horosphere, or transitional.
struct DeepVerdict {
  bool deep = false;
  Coset witness{kNoElement, -1};
};

/// Literal deep/transitional test: v is deep in X iff every path vertex
/// within word distance R of v lies in the eps-neighborhood of X. Candidate
/// horospheres are the finitely many within eps of v.
DeepVerdict classify_point(ElementPool& pool, const PathWord& path, int v,
                           const TransitionParams& p);

std::vector<DeepVerdict> classify_path(ElementPool& pool, const PathWord& path,
                                       const TransitionParams& p);
std::vector<std::vector<DeepVerdict>> classify_batch(
    ElementPool& pool, std::span<const PathWord> paths, const TransitionParams& p);
std::vector<std::vector<DeepVerdict>> classify_batch_serial(
    ElementPool& pool, std::span<const PathWord> paths, const TransitionParams& p);

struct TransitionalReport {
  bool transitional = false;
  int max_gap = 0;  // path length + 1 when some vertex sees no transition point
};

/// True iff every vertex has an (eps,R)-transition point within path length L.
/// Paths without edges are transitional by convention.
TransitionalReport is_transitional_path(ElementPool& pool, const PathWord& path,
                                        const TransitionParams& p);

/// (c,l)-tightness: every subpath between vertices at word distance <= l has
/// length <= c * d + c.
bool is_tight(ElementPool& pool, const PathWord& path, double c, int l);

/// Replaces every maximal horospherical component of length >= K whose
/// endpoints hug one horosphere by a geodesic between the paper-style entry
/// and exit points. Pre: K > 2 * overlap_bound.
PathWord truncate_path(ElementPool& pool, const PathWord& path, int K, int eps,
                       int overlap_bound = 2);

/// Diameter of the projection of the path to the horosphere X, requiring
/// clearance d(path, X) > mu.
std::uint32_t projection_diameter(ElementPool& pool, const PathWord& path,
                                  const Coset& X, int mu);

}  // namespace floydlab
