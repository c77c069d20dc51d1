#pragma once

#include <memory>
#include <sstream>

#include "floydlab/cayley.hpp"

namespace floydlab {

struct FloydParams {
  double lambda = 0.5;
  ElementId basepoint = 0;  // o
  int radius = 14;          // truncation radius N

  void validate() const {
    if (!(lambda > 0.0 && lambda < 1.0))
      throw input_error("lambda must lie in (0,1)");
    if (radius < 1) throw input_error("truncation radius must be >= 1");
  }
};

/// Certified lower/upper bounds on a Floyd or shortcut distance.
struct FloydInterval {
  double lower = 0.0;
  double upper = 0.0;
  int radius = 0;
  bool escaped = false;  // the lower bound's witness path left the window

  double width() const { return upper - lower; }
  double mid() const { return 0.5 * (lower + upper); }
};

/// Eventually periodic geodesic ray prefix.period^inf from the basepoint,
/// stored as generator letters. Every finite truncation must be a geodesic
/// word; construction validates this over the first periods.
struct BoundaryRay {
  std::vector<int> prefix;
  std::vector<int> period;

  bool operator==(const BoundaryRay& o) const {
    return prefix == o.prefix && period == o.period;
  }
};

BoundaryRay make_ray(ElementPool& pool, std::vector<int> prefix, std::vector<int> period);
BoundaryRay parse_ray(ElementPool& pool, const std::string& prefix,
                      const std::string& period);
/// Minimal-prefix primitive-period representation of the same letter stream.
BoundaryRay canonical_ray(const BoundaryRay& r);
int ray_letter(const BoundaryRay& r, int k);
ElementId ray_vertex(ElementPool& pool, const BoundaryRay& r, int depth);

/// Fiber of the Floyd map containing the ray's endpoint: parabolic rays fall
/// into the horosphere they stabilize, conical classes are singletons.
struct FiberClass {
  bool parabolic = false;
  Coset coset{kNoElement, -1};
  BoundaryRay canonical;
};

FiberClass classify_ray(ElementPool& pool, const BoundaryRay& r);
bool same_fiber(const FiberClass& a, const FiberClass& b);

/// lambda^d(o, e) for the edge between adjacent a and b.
double edge_weight(ElementPool& pool, ElementId a, ElementId b, const FloydParams& p);

/// Component label of an exterior vertex of B(1, m), from its normal form.
/// Vertices in different components cannot be joined outside the ball.
std::vector<std::int32_t> exterior_key(const GroupSpec& spec,
                                       std::span<const std::int32_t> nf, int m);

/// Weighted window graph over a ball translated to `frame`, with the
/// exterior collapsed one vertex per component. Supports certified Dijkstra:
/// interior-only paths give upper bounds, exterior-collapsed paths lower
/// bounds (each crossing edge is priced exactly, excursions cost >= 0).
class WindowGraph {
 public:
  WindowGraph(ElementPool& pool, const Ball& ball, ElementId frame);

  const Ball& ball() const { return *ball_; }
  ElementId frame() const { return frame_; }
  int exterior_classes() const { return n_classes_; }
  std::uint32_t global_depth(std::int32_t pos) const { return gdepth_[pos]; }

  struct Distances {
    std::vector<double> lower, upper;  // by ball position
    std::vector<std::uint8_t> escaped;
  };
  Distances from(std::int32_t source_pos, double lambda) const;
  FloydInterval pair(std::int32_t a, std::int32_t b, double lambda) const;

 private:
  ElementPool* pool_;
  const Ball* ball_;
  ElementId frame_;
  std::vector<std::uint32_t> gdepth_;
  std::vector<std::uint32_t> adj_off_;
  std::vector<std::int32_t> adj_to_;
  std::vector<std::uint16_t> adj_exp_;
  std::vector<std::uint32_t> ext_off_;
  std::vector<std::int32_t> ext_class_;
  std::vector<std::uint16_t> ext_exp_;
  std::vector<std::vector<std::pair<std::int32_t, std::uint16_t>>> class_adj_;
  int n_classes_ = 0;
  std::uint32_t max_exp_ = 0;
};

/// Shared machinery for certified Floyd queries at one truncation radius.
/// Queries are canonicalized to the identity frame via equivariance, so
/// equal translated queries produce bit-identical intervals.
class FloydContext {
 public:
  FloydContext(ElementPool& pool, int radius, EnumerationOptions opts = {});

  ElementPool& pool() { return *pool_; }
  const Ball& ball() const { return ball_; }
  int radius() const { return radius_; }
  bool tree_exact() const { return tree_; }

  /// Certified rho_{lambda,o}(x, y); pre: x, y in B(o, N-1).
  FloydInterval distance(ElementId x, ElementId y, const FloydParams& p);
  std::vector<FloydInterval> distance_batch(
      std::span<const std::pair<ElementId, ElementId>> pairs, const FloydParams& p);
  std::vector<FloydInterval> distance_batch_serial(
      std::span<const std::pair<ElementId, ElementId>> pairs, const FloydParams& p);

  /// Certified distance between ray endpoints, exact ray tails added.
  FloydInterval boundary_distance(const BoundaryRay& xi, const BoundaryRay& eta,
                                  const FloydParams& p);
  std::vector<FloydInterval> boundary_batch(std::span<const BoundaryRay> rays,
                                            std::span<const std::pair<int, int>> pairs,
                                            const FloydParams& p);

  const WindowGraph& root_graph();

  /// Forces the generic window machinery even on trees (used by tests).
  void set_force_generic(bool v) { force_generic_ = v; }

 private:
  FloydInterval pair_root(ElementId x, ElementId y, double lambda);

  ElementPool* pool_;
  int radius_;
  bool tree_;
  bool force_generic_ = false;
  EnumerationOptions opts_;
  Ball ball_;
  std::unique_ptr<WindowGraph> root_graph_;
};

/// Exact Floyd distances on tree Cayley graphs (unique simple paths).
double tree_floyd_distance(ElementPool& pool, ElementId x, ElementId y, double lambda);
double tree_boundary_distance(ElementPool& pool, const BoundaryRay& xi,
                              const BoundaryRay& eta, double lambda);

/// Windowed certified query around a deep frame; rays are truncated at their
/// last vertex inside frame*B(1,m) and the exact tail mass is added.
class WindowQuery {
 public:
  WindowQuery(ElementPool& pool, const Ball& window_ball, ElementId frame);

  struct Trunc {
    std::int32_t pos;  // ball position of the truncation point
    int depth;         // depth along the ray
  };
  std::optional<Trunc> locate(const BoundaryRay& r);
  FloydInterval ray_pair(const BoundaryRay& xi, const BoundaryRay& eta, double lambda);
  /// Distances from one truncated ray to many, sharing a single Dijkstra.
  std::vector<FloydInterval> ray_fan(const BoundaryRay& xi,
                                     std::span<const BoundaryRay> others, double lambda);

  const WindowGraph& graph() const { return graph_; }

 private:
  ElementPool* pool_;
  const Ball* ball_;
  ElementId frame_, frame_inv_;
  WindowGraph graph_;
};

struct GromovProduct {
  double value = 0.0;
  bool stabilized = false;
};

/// (xi | eta)_o at increasing depth with stabilization detection.
/// Requires a hyperbolic group (no Z^d factor with d >= 2).
GromovProduct gromov_product(ElementPool& pool, const BoundaryRay& xi,
                             const BoundaryRay& eta, int depth);
double visual_distance(ElementPool& pool, const BoundaryRay& xi,
                       const BoundaryRay& eta, double a, int depth);

struct BusemannValue {
  long long value = 0;
  bool stable = false;  // constant over the last five depths
};
BusemannValue busemann(ElementPool& pool, const BoundaryRay& xi, ElementId x,
                       ElementId y, int depth);

struct ShortcutResult {
  FloydInterval interval;
  double chain_lower = 0.0;  // sample-relative lower diagnostic
  std::vector<int> chain;    // sample indices along the best chain
  bool same_class = false;
};

/// Shortest chain through the sample with zero-cost hops inside a parabolic
/// fiber. Upper bounds the shortcut distance exactly over the sample; the
/// true infimum ranges over all chains, so the certified lower bound is 0
/// for distinct classes (and the Floyd lower bound when the peripheral
/// system is empty, where the two metrics coincide).
ShortcutResult shortcut_distance(FloydContext& ctx, const BoundaryRay& xi,
                                 const BoundaryRay& eta,
                                 std::span<const BoundaryRay> sample,
                                 const FloydParams& p);

}  // namespace floydlab
