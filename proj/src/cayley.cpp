#include "floydlab/cayley.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>

namespace floydlab {

double log_big(const BigInt& x) {
  if (x <= 0) throw precondition_error("log_big needs a positive value");
  std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 62) return std::log(double(x.convert_to<std::uint64_t>()));
  BigInt top = x >> (bits - 62);
  return std::log(double(top.convert_to<std::uint64_t>())) +
         double(bits - 62) * std::log(2.0);
}

PathWord make_path(ElementPool& pool, ElementId base, std::span<const int> letters) {
  PathWord p;
  p.base = base;
  p.letters.assign(letters.begin(), letters.end());
  p.vertices.reserve(letters.size() + 1);
  ElementId cur = base;
  p.vertices.push_back(cur);
  for (int g : letters) {
    cur = pool.mul_gen(cur, g);
    p.vertices.push_back(cur);
  }
  return p;
}

namespace {

void check_cap(const GroupSpec& spec, int radius, std::size_t cap) {
  // project the cost with the exact DP before touching memory
  SphereCounter counter(spec, radius);
  if (counter.ball(radius) > BigInt(cap))
    throw resource_error("ball of radius " + std::to_string(radius) +
                         " exceeds the enumeration cap of " + std::to_string(cap));
}

Ball finalize_ball(ElementPool& pool, int radius,
                   std::vector<std::vector<ElementId>> spheres,
                   std::unordered_map<ElementId, std::pair<ElementId, int>> preds) {
  Ball b;
  b.radius = radius;
  for (auto& s : spheres)
    std::sort(s.begin(), s.end(),
              [&](ElementId x, ElementId y) { return pool.compare(x, y) < 0; });
  b.spheres = std::move(spheres);
  for (int k = 0; k < int(b.spheres.size()); k++)
    for (ElementId e : b.spheres[k]) {
      b.index.emplace(e, std::int32_t(b.all.size()));
      b.all.push_back(e);
      b.dist.push_back(k);
      auto it = preds.find(e);
      b.parent.push_back(it == preds.end() ? kNoElement : it->second.first);
      b.parent_letter.push_back(it == preds.end() ? -1 : it->second.second);
    }
  return b;
}

}  // namespace

Ball enumerate_ball_serial(ElementPool& pool, int radius, const EnumerationOptions& opts) {
  check_cap(pool.spec(), radius, opts.element_cap);
  const int ngens = int(pool.spec().generators.size());
  std::vector<std::vector<ElementId>> spheres(radius + 1);
  std::unordered_map<ElementId, std::pair<ElementId, int>> preds;
  std::unordered_map<ElementId, int> seen;
  spheres[0].push_back(pool.identity());
  seen.emplace(pool.identity(), 0);

  std::vector<std::int32_t> buf;
  for (int k = 0; k < radius; k++) {
    for (ElementId v : spheres[k]) {
      for (int g = 0; g < ngens; g++) {
        pool.mul_raw(v, g, buf);
        if (pool.length_raw(buf) != std::uint32_t(k + 1)) continue;
        ElementId w = pool.intern(buf);
        if (seen.emplace(w, k + 1).second) {
          spheres[k + 1].push_back(w);
          preds.emplace(w, std::make_pair(v, g));
        }
      }
    }
  }
  return finalize_ball(pool, radius, std::move(spheres), std::move(preds));
}

Ball enumerate_ball(ElementPool& pool, int radius, const EnumerationOptions& opts) {
  if (!opts.parallel) return enumerate_ball_serial(pool, radius, opts);
  check_cap(pool.spec(), radius, opts.element_cap);
  const int ngens = int(pool.spec().generators.size());
  std::vector<std::vector<ElementId>> spheres(radius + 1);
  std::unordered_map<ElementId, std::pair<ElementId, int>> preds;
  std::unordered_map<ElementId, int> seen;
  spheres[0].push_back(pool.identity());
  seen.emplace(pool.identity(), 0);

  // Frontier products are computed in parallel into per-thread arenas; the
  // merge interns in frontier order, so the result matches the serial run.
  constexpr std::size_t kBlock = 1 << 15;
  for (int k = 0; k < radius; k++) {
    const auto& frontier = spheres[k];
    for (std::size_t base = 0; base < frontier.size(); base += kBlock) {
      std::size_t end = std::min(frontier.size(), base + kBlock);
      std::size_t items = end - base;
      std::vector<std::vector<std::int32_t>> streams(items);
      std::vector<std::vector<std::uint32_t>> bounds(items);
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < std::int64_t(items); i++) {
        std::vector<std::int32_t> buf;
        ElementId v = frontier[base + i];
        for (int g = 0; g < ngens; g++) {
          pool.mul_raw(v, g, buf);
          if (pool.length_raw(buf) != std::uint32_t(k + 1)) {
            bounds[i].push_back(std::uint32_t(streams[i].size()));
            continue;
          }
          streams[i].insert(streams[i].end(), buf.begin(), buf.end());
          bounds[i].push_back(std::uint32_t(streams[i].size()));
        }
      }
      for (std::size_t i = 0; i < items; i++) {
        ElementId v = frontier[base + i];
        std::uint32_t prev = 0;
        for (int g = 0; g < ngens; g++) {
          std::uint32_t b = bounds[i][g];
          if (b == prev) continue;
          std::span<const std::int32_t> nf(streams[i].data() + prev, b - prev);
          prev = b;
          ElementId w = pool.intern(nf);
          if (seen.emplace(w, k + 1).second) {
            spheres[k + 1].push_back(w);
            preds.emplace(w, std::make_pair(v, g));
          }
        }
      }
    }
  }
  return finalize_ball(pool, radius, std::move(spheres), std::move(preds));
}

namespace {

// elements of the factor itself at distance exactly k from the identity
BigInt factor_sphere(const Factor& f, int k) {
  if (k == 0) return 1;
  if (f.type == FactorType::Cyclic) {
    int half = f.order / 2;
    if (2 * k < f.order) return 2;
    if (f.order % 2 == 0 && k == half) return 1;
    return 0;
  }
  // lattice points of l1 norm k in Z^d
  BigInt total = 0;
  int d = f.rank;
  for (int j = 1; j <= std::min(d, k); j++) {
    BigInt term = BigInt(1) << j;  // sign choices
    // C(d, j) * C(k-1, j-1)
    BigInt c1 = 1, c2 = 1;
    for (int i = 0; i < j; i++) c1 = c1 * (d - i) / (i + 1);
    for (int i = 0; i < j - 1; i++) c2 = c2 * (k - 1 - i) / (i + 1);
    total += term * c1 * c2;
  }
  return total;
}

}  // namespace

SphereCounter::SphereCounter(const GroupSpec& spec, int n_max) {
  int r = int(spec.factors.size());
  std::vector<std::vector<BigInt>> f(r, std::vector<BigInt>(n_max + 1));
  for (int i = 0; i < r; i++)
    for (int k = 1; k <= n_max; k++) f[i][k] = factor_sphere(spec.factors[i], k);

  by_last_.assign(r, std::vector<BigInt>(n_max + 1, BigInt(0)));
  sphere_.assign(n_max + 1, BigInt(0));
  ball_.assign(n_max + 1, BigInt(0));
  sphere_[0] = 1;
  ball_[0] = 1;
  for (int m = 1; m <= n_max; m++) {
    for (int i = 0; i < r; i++) {
      BigInt total = 0;
      for (int k = 1; k <= m; k++) {
        if (f[i][k] == 0) continue;
        BigInt tails = 0;
        if (m - k == 0) {
          tails = 1;
        } else {
          for (int j = 0; j < r; j++)
            if (j != i) tails += by_last_[j][m - k];
        }
        total += f[i][k] * tails;
      }
      by_last_[i][m] = total;
      sphere_[m] += total;
    }
    ball_[m] = ball_[m - 1] + sphere_[m];
  }
}

BigInt sphere_count(const GroupSpec& spec, int n) {
  return SphereCounter(spec, n).sphere(n);
}

GrowthRate growth_rate(const GroupSpec& spec, int n_max) {
  if (n_max < 2) throw precondition_error("growth_rate needs n_max >= 2");
  SphereCounter c(spec, n_max);
  GrowthRate out;
  for (int n = 1; n <= n_max; n++) {
    GrowthData d;
    d.n = n;
    d.sphere = c.sphere(n);
    d.ball = c.ball(n);
    d.log_ball_over_n = log_big(d.ball) / n;
    out.data.push_back(d);
  }

  // certified upper bracket: #B(n+m) <= #B(n) #B(m), so every log#B(n)/n
  // bounds the limit from above
  double upper = 1e300;
  for (int n = 2; n <= n_max; n++) upper = std::min(upper, log_big(c.ball(n)) / n);

  // certified lower bracket: words built from length-N blocks whose first
  // factor avoids the previous block's last factor concatenate without
  // cancellation, so s_{kN} >= (s_N - max_i s_N^{(i)})^k
  double lower = 0.0;
  int r = int(spec.factors.size());
  if (r >= 2) {
    for (int n = 1; n <= n_max; n++) {
      BigInt worst = 0;
      for (int i = 0; i < r; i++) worst = std::max(worst, c.sphere_ending_in(i, n));
      BigInt m = c.sphere(n) - worst;
      if (m >= 1) lower = std::max(lower, log_big(m) / n);
    }
  }

  // period-aware ratio estimate with one Aitken step
  double best = log_big(c.ball(n_max)) / n_max;
  double best_err = 1e300;
  for (int p = 1; p <= 6 && 3 * p < n_max; p++) {
    if (c.sphere(n_max - 3 * p) == 0) continue;
    auto ratio = [&](int n) {
      return (log_big(c.sphere(n)) - log_big(c.sphere(n - p))) / p;
    };
    double r0 = ratio(n_max), r1 = ratio(n_max - p), r2 = ratio(n_max - 2 * p);
    double err = std::fabs(r0 - r1);
    double est = r0;
    double denom = (r0 - r1) - (r1 - r2);
    if (std::fabs(denom) > 1e-14) {
      double aitken = r0 - (r0 - r1) * (r0 - r1) / denom;
      if (std::isfinite(aitken) && std::fabs(aitken - r0) < 0.5) est = aitken;
    }
    if (err < best_err) {
      best_err = err;
      best = est;
    }
  }
  if (spec.factors.size() == 1 && spec.factors[0].type == FactorType::FreeAbelian) {
    best = 0.0;  // polynomial growth
  }
  out.estimate = std::max(best, 0.0);
  out.lower = lower;
  out.upper = upper;
  return out;
}

namespace {

// Spellings of one syllable: interleavings of per-axis sign runs for a free
// abelian factor, the one or two shortest arcs for a cyclic factor.
void syllable_spellings(const GroupSpec& spec, const SyllableRef& s,
                        std::vector<std::vector<int>>& out, std::size_t cap) {
  const Factor& f = spec.factors[s.factor];
  out.clear();
  auto gen_of = [&](int axis, int sign) {
    for (int g = 0; g < int(spec.generators.size()); g++)
      if (spec.generators[g].factor == s.factor && spec.generators[g].axis == axis &&
          spec.generators[g].sign == sign)
        return g;
    return -1;
  };
  if (f.type == FactorType::Cyclic) {
    std::int32_t c = s.coords[0];
    int fwd = f.order - c;
    if (c <= fwd) out.push_back(std::vector<int>(c, gen_of(0, +1)));
    if (fwd <= c && f.order > 2) out.push_back(std::vector<int>(fwd, gen_of(0, -1)));
    return;
  }
  std::vector<int> remaining(f.rank);
  for (int a = 0; a < f.rank; a++) remaining[a] = std::abs(s.coords[a]);
  std::vector<int> cur;
  // depth-first multiset permutations
  std::vector<std::vector<int>>& acc = out;
  std::function<void()> rec = [&]() {
    if (acc.size() >= cap) return;
    bool done = true;
    for (int a = 0; a < f.rank; a++)
      if (remaining[a] > 0) {
        done = false;
        remaining[a]--;
        cur.push_back(gen_of(a, s.coords[a] > 0 ? +1 : -1));
        rec();
        cur.pop_back();
        remaining[a]++;
      }
    if (done) acc.push_back(cur);
  };
  rec();
}

BigInt syllable_spelling_count(const GroupSpec& spec, const SyllableRef& s) {
  const Factor& f = spec.factors[s.factor];
  if (f.type == FactorType::Cyclic) {
    std::int32_t c = s.coords[0];
    return (f.order % 2 == 0 && 2 * c == f.order && f.order > 2) ? 2 : 1;
  }
  int total = 0;
  BigInt count = 1;
  for (int a = 0; a < f.rank; a++) {
    int k = std::abs(s.coords[a]);
    // multiply by C(total + k, k)
    for (int i = 1; i <= k; i++) count = count * (total + i) / i;
    total += k;
  }
  return count;
}

}  // namespace

GeodesicEnumeration geodesics_between(ElementPool& pool, ElementId g, ElementId h,
                                      std::size_t cap) {
  GeodesicEnumeration out;
  ElementId w = pool.mul(pool.inverse(g), h);
  int nsyl = pool.syllable_count(w);
  out.count = 1;
  for (int i = 0; i < nsyl; i++)
    out.count *= syllable_spelling_count(pool.spec(), pool.syllable(w, i));

  // cartesian product of per-syllable spelling lists, capped
  std::vector<std::vector<std::vector<int>>> per(nsyl);
  for (int i = 0; i < nsyl; i++)
    syllable_spellings(pool.spec(), pool.syllable(w, i), per[i], cap + 1);
  std::vector<int> word;
  std::vector<std::size_t> pick(nsyl, 0);
  while (true) {
    if (out.paths.size() >= cap) {
      out.truncated = out.count > BigInt(out.paths.size());
      return out;
    }
    word.clear();
    for (int i = 0; i < nsyl; i++)
      word.insert(word.end(), per[i][pick[i]].begin(), per[i][pick[i]].end());
    out.paths.push_back(make_path(pool, g, word));
    int i = nsyl - 1;
    while (i >= 0 && pick[i] + 1 >= per[i].size()) pick[i--] = 0;
    if (i < 0) break;
    pick[i]++;
  }
  return out;
}

std::vector<ElementId> annulus(ElementPool& pool, const Ball& ball, ElementId g,
                               int n, int delta) {
  std::int64_t dg = pool.length(g);
  std::int64_t hi = dg + n + delta;  // exclusive
  if (hi - 1 > ball.radius)
    throw resource_error("annulus needs enumeration radius " + std::to_string(hi - 1) +
                         " but the ball has radius " + std::to_string(ball.radius));
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < ball.all.size(); i++) {
    std::int64_t diff = std::int64_t(ball.dist[i]) - dg;
    if (diff >= n - delta && diff < n + delta) out.push_back(ball.all[i]);
  }
  return out;
}

}  // namespace floydlab
