#include "floydlab/floyd.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <queue>

namespace floydlab {

namespace {

std::vector<double> lambda_powers(double lambda, std::uint32_t max_exp) {
  std::vector<double> pw(max_exp + 1);
  pw[0] = 1.0;
  for (std::uint32_t k = 1; k <= max_exp; k++) pw[k] = pw[k - 1] * lambda;
  return pw;
}

// sum_{k=a}^{b-1} lambda^k, exact geometric series
double geometric_block(double lambda, int a, int b) {
  double s = 0.0, p = std::pow(lambda, a);
  for (int k = a; k < b; k++) {
    s += p;
    p *= lambda;
  }
  return s;
}

double ray_tail(double lambda, int depth) {
  // sum_{k>=depth} lambda^k
  return std::pow(lambda, depth) / (1.0 - lambda);
}

}  // namespace

int ray_letter(const BoundaryRay& r, int k) {
  if (k < int(r.prefix.size())) return r.prefix[k];
  return r.period[(k - r.prefix.size()) % r.period.size()];
}

ElementId ray_vertex(ElementPool& pool, const BoundaryRay& r, int depth) {
  ElementId cur = pool.identity();
  for (int k = 0; k < depth; k++) cur = pool.mul_gen(cur, ray_letter(r, k));
  return cur;
}

BoundaryRay make_ray(ElementPool& pool, std::vector<int> prefix, std::vector<int> period) {
  if (period.empty()) throw input_error("boundary ray needs a nonempty period");
  BoundaryRay r{std::move(prefix), std::move(period)};
  // every truncation must be geodesic; the merge pattern at period junctions
  // repeats, so checking the first eight periods settles the rest
  int check = int(r.prefix.size() + 8 * r.period.size());
  ElementId cur = pool.identity();
  for (int k = 0; k < check; k++) {
    cur = pool.mul_gen(cur, ray_letter(r, k));
    if (pool.length(cur) != std::uint32_t(k + 1))
      throw input_error("ray truncation at depth " + std::to_string(k + 1) +
                        " is not a geodesic word");
  }
  return r;
}

BoundaryRay parse_ray(ElementPool& pool, const std::string& prefix,
                      const std::string& period) {
  auto letters = [&](const std::string& text) {
    std::vector<int> out;
    std::string tok;
    std::istringstream is(text);
    while (is >> tok) {
      if (tok == "e" || tok == "1") continue;
      out.push_back(pool.spec().generator_index(tok));
    }
    return out;
  };
  return make_ray(pool, letters(prefix), letters(period));
}

BoundaryRay canonical_ray(const BoundaryRay& r) {
  BoundaryRay out = r;
  // primitive period
  int n = int(out.period.size());
  for (int d = 1; d <= n; d++) {
    if (n % d != 0) continue;
    bool ok = true;
    for (int i = d; i < n && ok; i++) ok = out.period[i] == out.period[i % d];
    if (ok) {
      out.period.resize(d);
      break;
    }
  }
  // absorb trailing period copies into the cycle
  while (!out.prefix.empty() && out.prefix.back() == out.period.back()) {
    out.prefix.pop_back();
    std::rotate(out.period.rbegin(), out.period.rbegin() + 1, out.period.rend());
  }
  return out;
}

FiberClass classify_ray(ElementPool& pool, const BoundaryRay& r) {
  FiberClass out;
  out.canonical = canonical_ray(r);
  ElementId r4 = ray_vertex(pool, r, int(r.prefix.size() + 4 * r.period.size()));
  ElementId r5 = ray_vertex(pool, r, int(r.prefix.size() + 5 * r.period.size()));
  ElementId r6 = ray_vertex(pool, r, int(r.prefix.size() + 6 * r.period.size()));
  int n4 = pool.syllable_count(r4);
  if (pool.syllable_count(r5) != n4 || pool.syllable_count(r6) != n4) return out;
  int f = pool.last_syllable(r6).factor;
  if (pool.last_syllable(r4).factor != f || pool.last_syllable(r5).factor != f)
    return out;
  if (!pool.spec().factors[f].peripheral) return out;
  ElementId head = pool.drop_last_syllable(r6);
  if (pool.drop_last_syllable(r4) != head || pool.drop_last_syllable(r5) != head)
    return out;
  out.parabolic = true;
  out.coset = make_coset(pool, r6, f);
  return out;
}

bool same_fiber(const FiberClass& a, const FiberClass& b) {
  if (a.parabolic != b.parabolic) return false;
  if (a.parabolic) return a.coset == b.coset;
  return a.canonical == b.canonical;
}

double edge_weight(ElementPool& pool, ElementId a, ElementId b, const FloydParams& p) {
  p.validate();
  if (pool.distance(a, b) != 1)
    throw precondition_error("edge_weight needs adjacent endpoints");
  std::uint32_t da = pool.distance(p.basepoint, a);
  std::uint32_t db = pool.distance(p.basepoint, b);
  return std::pow(p.lambda, double(std::min(da, db)));
}

// ---------------------------------------------------------------------------
// exterior components

namespace {
constexpr std::int32_t kAnnulus = INT32_MIN;
constexpr std::int32_t kRayPos = INT32_MIN + 1;
constexpr std::int32_t kRayNeg = INT32_MIN + 2;
constexpr std::int32_t kArc = INT32_MIN + 3;
}  // namespace

std::vector<std::int32_t> exterior_key(const GroupSpec& spec,
                                       std::span<const std::int32_t> nf, int m) {
  std::vector<std::int32_t> out;
  std::int64_t depth = 0;
  for (size_t i = 0; i < nf.size();) {
    const Factor& f = spec.factors[nf[i]];
    int cc = f.coord_count();
    auto coords = nf.subspan(i + 1, cc);
    std::int64_t l = syllable_length(f, coords);
    if (depth + l > m) {
      out.push_back(nf[i]);
      if (f.type == FactorType::Cyclic) {
        // ball positions cover one contiguous block of the cycle around the
        // identity, so the exterior positions form a single connected arc
        out.push_back(kArc);
      } else if (f.rank >= 2) {
        // the region |v|_1 > m' of Z^d is connected for d >= 2
        out.push_back(kAnnulus);
      } else {
        out.push_back(coords[0] > 0 ? kRayPos : kRayNeg);
      }
      return out;
    }
    out.push_back(nf[i]);
    out.insert(out.end(), coords.begin(), coords.end());
    depth += l;
    i += 1 + cc;
  }
  throw precondition_error("exterior_key called on a vertex inside the ball");
}

// ---------------------------------------------------------------------------
// window graph

WindowGraph::WindowGraph(ElementPool& pool, const Ball& ball, ElementId frame)
    : pool_(&pool), ball_(&ball), frame_(frame) {
  const auto& spec = pool.spec();
  const int ngens = int(spec.generators.size());
  const std::size_t W = ball.size();
  const int m = ball.radius;

  gdepth_.resize(W);
  if (frame == pool.identity()) {
    for (std::size_t i = 0; i < W; i++) gdepth_[i] = ball.dist[i];
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(W); i++)
      gdepth_[i] = pool.length_of_product(frame, ball.all[i]);
  }
  max_exp_ = 0;
  for (std::size_t i = 0; i < W; i++) max_exp_ = std::max(max_exp_, gdepth_[i] + 1);

  std::map<std::vector<std::int32_t>, int> class_ids;
  adj_off_.assign(W + 1, 0);
  ext_off_.assign(W + 1, 0);

  std::vector<std::int32_t> buf;
  // counting pass
  for (std::size_t i = 0; i < W; i++) {
    for (int g = 0; g < ngens; g++) {
      pool.mul_raw(ball.all[i], g, buf);
      auto hit = pool.find(buf);
      if (hit && ball.contains(*hit))
        adj_off_[i + 1]++;
      else
        ext_off_[i + 1]++;
    }
  }
  for (std::size_t i = 0; i < W; i++) {
    adj_off_[i + 1] += adj_off_[i];
    ext_off_[i + 1] += ext_off_[i];
  }
  adj_to_.resize(adj_off_[W]);
  adj_exp_.resize(adj_off_[W]);
  ext_class_.resize(ext_off_[W]);
  ext_exp_.resize(ext_off_[W]);

  std::vector<std::uint32_t> apos(adj_off_.begin(), adj_off_.end() - 1);
  std::vector<std::uint32_t> epos(ext_off_.begin(), ext_off_.end() - 1);
  for (std::size_t i = 0; i < W; i++) {
    for (int g = 0; g < ngens; g++) {
      pool.mul_raw(ball.all[i], g, buf);
      auto hit = pool.find(buf);
      std::int32_t j = (hit && ball.contains(*hit)) ? ball.position(*hit) : -1;
      if (j >= 0) {
        adj_to_[apos[i]] = j;
        adj_exp_[apos[i]] = std::uint16_t(std::min(gdepth_[i], gdepth_[j]));
        apos[i]++;
      } else {
        std::uint32_t out_depth = pool.length_of_product_raw(frame, buf);
        max_exp_ = std::max(max_exp_, out_depth);
        auto key = exterior_key(spec, buf, m);
        auto it = class_ids.emplace(std::move(key), int(class_ids.size())).first;
        ext_class_[epos[i]] = it->second;
        ext_exp_[epos[i]] = std::uint16_t(std::min(gdepth_[i], out_depth));
        epos[i]++;
      }
    }
  }
  n_classes_ = int(class_ids.size());
  class_adj_.resize(n_classes_);
  for (std::size_t i = 0; i < W; i++)
    for (std::uint32_t e = ext_off_[i]; e < ext_off_[i + 1]; e++)
      class_adj_[ext_class_[e]].push_back({std::int32_t(i), ext_exp_[e]});
}

WindowGraph::Distances WindowGraph::from(std::int32_t source, double lambda) const {
  const std::size_t W = ball_->size();
  auto pw = lambda_powers(lambda, max_exp_ + 1);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  Distances out;
  out.upper.assign(W, kInf);
  out.lower.assign(W + n_classes_, kInf);
  out.escaped.assign(W + n_classes_, 0);

  using Item = std::pair<double, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;

  // interior-only pass: an infimum over fewer paths, hence an upper bound
  out.upper[source] = 0.0;
  heap.push({0.0, source});
  std::vector<std::uint8_t> done(W, 0);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (std::uint32_t e = adj_off_[v]; e < adj_off_[v + 1]; e++) {
      std::int32_t w = adj_to_[e];
      double nd = d + pw[adj_exp_[e]];
      if (nd < out.upper[w]) {
        out.upper[w] = nd;
        heap.push({nd, w});
      }
    }
  }

  // exterior-collapsed pass: every witness path is undercharged, lower bound
  out.lower[source] = 0.0;
  heap.push({0.0, source});
  std::vector<std::uint8_t> done2(W + n_classes_, 0);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done2[v]) continue;
    done2[v] = 1;
    if (v < std::int32_t(W)) {
      for (std::uint32_t e = adj_off_[v]; e < adj_off_[v + 1]; e++) {
        std::int32_t w = adj_to_[e];
        double nd = d + pw[adj_exp_[e]];
        if (nd < out.lower[w]) {
          out.lower[w] = nd;
          out.escaped[w] = out.escaped[v];
          heap.push({nd, w});
        }
      }
      for (std::uint32_t e = ext_off_[v]; e < ext_off_[v + 1]; e++) {
        std::int32_t w = std::int32_t(W) + ext_class_[e];
        double nd = d + pw[ext_exp_[e]];
        if (nd < out.lower[w]) {
          out.lower[w] = nd;
          out.escaped[w] = 1;
          heap.push({nd, w});
        }
      }
    } else {
      for (auto [w, exp] : class_adj_[v - W]) {
        double nd = d + pw[exp];
        if (nd < out.lower[w]) {
          out.lower[w] = nd;
          out.escaped[w] = 1;
          heap.push({nd, w});
        }
      }
    }
  }
  return out;
}

FloydInterval WindowGraph::pair(std::int32_t a, std::int32_t b, double lambda) const {
  Distances d = from(a, lambda);
  FloydInterval iv;
  iv.lower = d.lower[b];
  iv.upper = d.upper[b];
  iv.radius = ball_->radius;
  iv.escaped = d.escaped[b] != 0;
  return iv;
}

// ---------------------------------------------------------------------------
// tree-exact fast path

double tree_floyd_distance(ElementPool& pool, ElementId x, ElementId y, double lambda) {
  std::uint32_t d = pool.distance(x, y);
  std::uint32_t lx = pool.length(x), ly = pool.length(y);
  std::uint32_t cp = (lx + ly - d) / 2;
  return geometric_block(lambda, cp, lx) + geometric_block(lambda, cp, ly);
}

double tree_boundary_distance(ElementPool& pool, const BoundaryRay& xi,
                              const BoundaryRay& eta, double lambda) {
  (void)pool;
  BoundaryRay a = canonical_ray(xi), b = canonical_ray(eta);
  if (a == b) return 0.0;
  int bound = int(a.prefix.size() + b.prefix.size() +
                  2 * std::lcm(a.period.size(), b.period.size()));
  int branch = bound;
  for (int k = 0; k < bound; k++) {
    if (ray_letter(a, k) != ray_letter(b, k)) {
      branch = k;
      break;
    }
  }
  if (branch == bound) return 0.0;  // identical streams
  return 2.0 * ray_tail(lambda, branch);
}

// ---------------------------------------------------------------------------
// FloydContext

FloydContext::FloydContext(ElementPool& pool, int radius, EnumerationOptions opts)
    : pool_(&pool), radius_(radius), tree_(pool.spec().is_tree()) {
  if (radius < 1) throw input_error("truncation radius must be >= 1");
  opts_ = opts;
  // tree groups answer queries in closed form; the ball is built lazily
  // only when the generic machinery is forced
  if (!tree_) ball_ = enumerate_ball(pool, radius, opts);
}

const WindowGraph& FloydContext::root_graph() {
  if (!root_graph_) {
    if (tree_ && ball_.all.empty()) ball_ = enumerate_ball(*pool_, radius_, opts_);
    root_graph_ = std::make_unique<WindowGraph>(*pool_, ball_, pool_->identity());
  }
  return *root_graph_;
}

FloydInterval FloydContext::pair_root(ElementId x, ElementId y, double lambda) {
  if (x == y) return {0.0, 0.0, radius_, false};
  if (pool_->length(x) > std::uint32_t(radius_ - 1) ||
      pool_->length(y) > std::uint32_t(radius_ - 1))
    throw precondition_error("query points must lie in B(o, N-1)");
  const WindowGraph& g = root_graph();
  return g.pair(ball_.position(x), ball_.position(y), lambda);
}

FloydInterval FloydContext::distance(ElementId x, ElementId y, const FloydParams& p) {
  p.validate();
  ElementId oinv = pool_->inverse(p.basepoint);
  ElementId xo = pool_->mul(oinv, x), yo = pool_->mul(oinv, y);
  if (tree_ && !force_generic_) {
    if (pool_->length(xo) > std::uint32_t(radius_ - 1) ||
        pool_->length(yo) > std::uint32_t(radius_ - 1))
      throw precondition_error("query points must lie in B(o, N-1)");
    double v = tree_floyd_distance(*pool_, xo, yo, p.lambda);
    return {v, v, radius_, false};
  }
  return pair_root(xo, yo, p.lambda);
}

std::vector<FloydInterval> FloydContext::distance_batch_serial(
    std::span<const std::pair<ElementId, ElementId>> pairs, const FloydParams& p) {
  std::vector<FloydInterval> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); i++)
    out[i] = distance(pairs[i].first, pairs[i].second, p);
  return out;
}

std::vector<FloydInterval> FloydContext::distance_batch(
    std::span<const std::pair<ElementId, ElementId>> pairs, const FloydParams& p) {
  p.validate();
  // canonicalize serially (interning), then solve queries in parallel
  ElementId oinv = pool_->inverse(p.basepoint);
  std::vector<std::pair<ElementId, ElementId>> canon(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); i++)
    canon[i] = {pool_->mul(oinv, pairs[i].first), pool_->mul(oinv, pairs[i].second)};
  std::vector<FloydInterval> out(pairs.size());
  if (tree_ && !force_generic_) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < std::int64_t(pairs.size()); i++) {
      double v = tree_floyd_distance(*pool_, canon[i].first, canon[i].second, p.lambda);
      out[i] = {v, v, radius_, false};
    }
    return out;
  }
  root_graph();
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < std::int64_t(pairs.size()); i++)
    out[i] = pair_root(canon[i].first, canon[i].second, p.lambda);
  return out;
}

FloydInterval FloydContext::boundary_distance(const BoundaryRay& xi,
                                              const BoundaryRay& eta,
                                              const FloydParams& p) {
  p.validate();
  if (tree_ && !force_generic_) {
    double v = tree_boundary_distance(*pool_, xi, eta, p.lambda);
    return {v, v, radius_, false};
  }
  int t = radius_ - 1;
  ElementId x = ray_vertex(*pool_, xi, t), y = ray_vertex(*pool_, eta, t);
  FloydInterval iv = pair_root(x, y, p.lambda);
  double tails = 2.0 * ray_tail(p.lambda, t);
  iv.lower = std::max(0.0, iv.lower - tails);
  iv.upper += tails;
  return iv;
}

std::vector<FloydInterval> FloydContext::boundary_batch(
    std::span<const BoundaryRay> rays, std::span<const std::pair<int, int>> pairs,
    const FloydParams& p) {
  p.validate();
  std::vector<FloydInterval> out(pairs.size());
  if (tree_ && !force_generic_) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < std::int64_t(pairs.size()); i++) {
      double v = tree_boundary_distance(*pool_, rays[pairs[i].first],
                                        rays[pairs[i].second], p.lambda);
      out[i] = {v, v, radius_, false};
    }
    return out;
  }
  int t = radius_ - 1;
  std::vector<ElementId> pts(rays.size());
  for (std::size_t i = 0; i < rays.size(); i++) pts[i] = ray_vertex(*pool_, rays[i], t);
  root_graph();
  double tails = 2.0 * ray_tail(p.lambda, t);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < std::int64_t(pairs.size()); i++) {
    FloydInterval iv = pair_root(pts[pairs[i].first], pts[pairs[i].second], p.lambda);
    iv.lower = std::max(0.0, iv.lower - tails);
    iv.upper += tails;
    out[i] = iv;
  }
  return out;
}

// ---------------------------------------------------------------------------
// windowed queries around a deep frame

WindowQuery::WindowQuery(ElementPool& pool, const Ball& window_ball, ElementId frame)
    : pool_(&pool),
      ball_(&window_ball),
      frame_(frame),
      frame_inv_(pool.inverse(frame)),
      graph_(pool, window_ball, frame) {}

std::optional<WindowQuery::Trunc> WindowQuery::locate(const BoundaryRay& r) {
  int limit = int(pool_->length(frame_)) + ball_->radius + 1;
  ElementId cur = frame_inv_;
  std::optional<Trunc> best;
  for (int k = 0; k <= limit; k++) {
    if (ball_->contains(cur)) best = Trunc{ball_->position(cur), k};
    if (k < limit) cur = pool_->mul_gen(cur, ray_letter(r, k));
  }
  return best;
}

FloydInterval WindowQuery::ray_pair(const BoundaryRay& xi, const BoundaryRay& eta,
                                    double lambda) {
  auto a = locate(xi), b = locate(eta);
  if (!a || !b) throw precondition_error("ray does not enter the query window");
  FloydInterval iv = graph_.pair(a->pos, b->pos, lambda);
  double tails = ray_tail(lambda, a->depth) + ray_tail(lambda, b->depth);
  iv.lower = std::max(0.0, iv.lower - tails);
  iv.upper += tails;
  return iv;
}

std::vector<FloydInterval> WindowQuery::ray_fan(const BoundaryRay& xi,
                                                std::span<const BoundaryRay> others,
                                                double lambda) {
  auto a = locate(xi);
  if (!a) throw precondition_error("ray does not enter the query window");
  std::vector<std::optional<Trunc>> locs(others.size());
  for (std::size_t i = 0; i < others.size(); i++) locs[i] = locate(others[i]);
  WindowGraph::Distances d = graph_.from(a->pos, lambda);
  std::vector<FloydInterval> out(others.size());
  for (std::size_t i = 0; i < others.size(); i++) {
    if (!locs[i]) throw precondition_error("ray does not enter the query window");
    FloydInterval iv;
    iv.radius = ball_->radius;
    iv.lower = d.lower[locs[i]->pos];
    iv.upper = d.upper[locs[i]->pos];
    iv.escaped = d.escaped[locs[i]->pos] != 0;
    double tails = ray_tail(lambda, a->depth) + ray_tail(lambda, locs[i]->depth);
    iv.lower = std::max(0.0, iv.lower - tails);
    iv.upper += tails;
    out[i] = iv;
  }
  return out;
}

// ---------------------------------------------------------------------------
// products, visual metric, horofunctions

GromovProduct gromov_product(ElementPool& pool, const BoundaryRay& xi,
                             const BoundaryRay& eta, int depth) {
  if (!pool.spec().is_hyperbolic())
    throw unsupported_error("gromov products need a hyperbolic group");
  if (depth < 1) throw input_error("depth must be >= 1");
  GromovProduct out;
  std::vector<double> values;
  for (int k = 1; k <= depth; k++) {
    ElementId x = ray_vertex(pool, xi, k), y = ray_vertex(pool, eta, k);
    values.push_back(0.5 * (2.0 * k - pool.distance(x, y)));
  }
  out.value = values.back();
  out.stabilized = values.size() >= 5;
  if (out.stabilized)
    for (std::size_t i = values.size() - 5; i < values.size(); i++)
      if (values[i] != out.value) out.stabilized = false;
  return out;
}

double visual_distance(ElementPool& pool, const BoundaryRay& xi, const BoundaryRay& eta,
                       double a, int depth) {
  if (canonical_ray(xi) == canonical_ray(eta)) return 0.0;
  GromovProduct g = gromov_product(pool, xi, eta, depth);
  return std::exp(-a * g.value);
}

BusemannValue busemann(ElementPool& pool, const BoundaryRay& xi, ElementId x,
                       ElementId y, int depth) {
  if (depth < int(pool.length(x) + pool.length(y)))
    throw precondition_error("busemann depth must be >= d(o,x) + d(o,y)");
  BusemannValue out;
  std::vector<long long> vals;
  for (int k = std::max(1, depth - 4); k <= depth; k++) {
    ElementId z = ray_vertex(pool, xi, k);
    vals.push_back(std::int64_t(pool.distance(z, x)) - std::int64_t(pool.distance(z, y)));
  }
  out.value = vals.back();
  out.stable = std::all_of(vals.begin(), vals.end(),
                           [&](long long v) { return v == out.value; });
  return out;
}

// ---------------------------------------------------------------------------
// shortcut metric

ShortcutResult shortcut_distance(FloydContext& ctx, const BoundaryRay& xi,
                                 const BoundaryRay& eta,
                                 std::span<const BoundaryRay> sample,
                                 const FloydParams& p) {
  p.validate();
  ElementPool& pool = ctx.pool();
  const int n = int(sample.size());
  int si = -1, ti = -1;
  for (int i = 0; i < n; i++) {
    if (canonical_ray(sample[i]) == canonical_ray(xi)) si = i;
    if (canonical_ray(sample[i]) == canonical_ray(eta)) ti = i;
  }
  if (si < 0 || ti < 0)
    throw precondition_error("shortcut sample must contain both endpoints");

  std::vector<FiberClass> cls(n);
  for (int i = 0; i < n; i++) cls[i] = classify_ray(pool, sample[i]);

  std::vector<std::pair<int, int>> want;
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++)
      if (!(cls[i].parabolic && cls[j].parabolic && cls[i].coset == cls[j].coset))
        want.push_back({i, j});
  std::vector<FloydInterval> ivs = ctx.boundary_batch(sample, want, p);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> wlow(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> wup(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<bool>> wesc(n, std::vector<bool>(n, false));
  for (std::size_t k = 0; k < want.size(); k++) {
    auto [i, j] = want[k];
    wlow[i][j] = wlow[j][i] = ivs[k].lower;
    wup[i][j] = wup[j][i] = ivs[k].upper;
    wesc[i][j] = wesc[j][i] = ivs[k].escaped;
  }

  auto chain_dijkstra = [&](const std::vector<std::vector<double>>& w,
                            std::vector<int>* chain_out) {
    std::vector<double> dist(n, kInf);
    std::vector<int> prev(n, -1);
    std::vector<bool> done(n, false);
    dist[si] = 0.0;
    for (int round = 0; round < n; round++) {
      int v = -1;
      for (int i = 0; i < n; i++)
        if (!done[i] && (v < 0 || dist[i] < dist[v])) v = i;
      if (v < 0 || dist[v] == kInf) break;
      done[v] = true;
      for (int i = 0; i < n; i++) {
        if (done[i]) continue;
        double nd = dist[v] + w[v][i];
        if (nd < dist[i]) {
          dist[i] = nd;
          prev[i] = v;
        }
      }
    }
    if (chain_out) {
      chain_out->clear();
      for (int v = ti; v >= 0; v = prev[v]) chain_out->push_back(v);
      std::reverse(chain_out->begin(), chain_out->end());
    }
    return dist[ti];
  };

  ShortcutResult out;
  out.same_class = same_fiber(cls[si], cls[ti]);
  out.interval.radius = p.radius;
  out.interval.upper = chain_dijkstra(wup, &out.chain);
  out.chain_lower = chain_dijkstra(wlow, nullptr);
  bool esc = false;
  for (std::size_t k = 0; k + 1 < out.chain.size(); k++)
    esc = esc || wesc[out.chain[k]][out.chain[k + 1]];
  out.interval.escaped = esc;
  if (out.same_class) {
    out.interval.lower = 0.0;
    out.interval.upper = 0.0;
  } else if (!pool.spec().has_peripheral()) {
    // trivial fiber relation: the shortcut metric equals the Floyd metric
    out.interval.lower = wlow[si][ti];
  } else {
    out.interval.lower = 0.0;
  }
  return out;
}

}  // namespace floydlab
