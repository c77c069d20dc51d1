#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <unordered_map>

#include "floydlab/group.hpp"

namespace floydlab {

using BigInt = boost::multiprecision::cpp_int;

/// Natural log of a positive big integer, via top bits + bit length.
double log_big(const BigInt& x);

/// An edge path in the Cayley graph: base vertex plus generator letters.
struct PathWord {
  ElementId base = 0;
  std::vector<int> letters;
  std::vector<ElementId> vertices;  // letters.size() + 1 entries

  std::size_t length() const { return letters.size(); }
};

PathWord make_path(ElementPool& pool, ElementId base, std::span<const int> letters);

/// BFS ball around the identity. Sphere k holds exactly the elements of word
/// length k, sorted in canonical normal-form order.
struct Ball {
  int radius = 0;
  std::vector<std::vector<ElementId>> spheres;
  std::vector<ElementId> all;                        // concatenated spheres
  std::unordered_map<ElementId, std::int32_t> index; // element -> position in all
  std::vector<std::int32_t> dist;                    // by position
  std::vector<ElementId> parent;                     // BFS predecessor, by position
  std::vector<std::int32_t> parent_letter;           // generator used, -1 at root

  std::size_t size() const { return all.size(); }
  bool contains(ElementId e) const { return index.count(e) != 0; }
  std::int32_t position(ElementId e) const { return index.at(e); }
};

struct EnumerationOptions {
  std::size_t element_cap = 50'000'000;
  bool parallel = true;
};

Ball enumerate_ball(ElementPool& pool, int radius, const EnumerationOptions& opts = {});
Ball enumerate_ball_serial(ElementPool& pool, int radius,
                           const EnumerationOptions& opts = {});

/// Exact sphere/ball counts via dynamic programming over (last factor,
/// remaining length). Retains per-factor tallies for growth brackets.
class SphereCounter {
 public:
  SphereCounter(const GroupSpec& spec, int n_max);

  const BigInt& sphere(int n) const { return sphere_[n]; }
  const BigInt& ball(int n) const { return ball_[n]; }
  const BigInt& sphere_ending_in(int factor, int n) const { return by_last_[factor][n]; }
  int n_max() const { return int(sphere_.size()) - 1; }

 private:
  std::vector<BigInt> sphere_, ball_;
  std::vector<std::vector<BigInt>> by_last_;
};

BigInt sphere_count(const GroupSpec& spec, int n);

struct GrowthData {
  int n = 0;
  BigInt sphere;
  BigInt ball;
  double log_ball_over_n = 0.0;
};

struct GrowthRate {
  double estimate = 0.0;
  double lower = 0.0;  // certified: block concatenation of spheres
  double upper = 0.0;  // certified: subadditivity of log ball counts
  std::vector<GrowthData> data;
};

/// Growth rate of the group from exact counts up to n_max.
///
/// The estimate is a period-aware sphere ratio log(s_n / s_{n-p}) / p with
/// Aitken extrapolation; the raw log(#B(n))/n ratios are reported per n and
/// carry an O(1/n) bias, so they serve as the certified upper bracket only.
GrowthRate growth_rate(const GroupSpec& spec, int n_max);

/// All geodesic words from g to h, up to `cap` paths.
struct GeodesicEnumeration {
  std::vector<PathWord> paths;
  BigInt count;        // exact total, also when truncated
  bool truncated = false;
};

GeodesicEnumeration geodesics_between(ElementPool& pool, ElementId g, ElementId h,
                                      std::size_t cap = 10000);

/// A(g, n, Delta) = { h : n - Delta <= d(1,h) - d(1,g) < n + Delta }.
std::vector<ElementId> annulus(ElementPool& pool, const Ball& ball, ElementId g,
                               int n, int delta);

}  // namespace floydlab
