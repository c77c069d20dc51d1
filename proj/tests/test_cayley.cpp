#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"

using namespace floydlab;

TEST_CASE("ball enumeration") {
  ElementPool f2(oracles::f2());
  Ball b2 = enumerate_ball(f2, 2);
  CHECK(b2.size() == 17);  // 2 * 3^2 - 1

  Ball b0 = enumerate_ball(f2, 0);
  CHECK(b0.size() == 1);
  CHECK(b0.all[0] == f2.identity());

  ElementPool g3(oracles::g3());
  Ball b4 = enumerate_ball(g3, 4);
  std::vector<std::size_t> expect{1, 3, 4, 6, 8};
  for (int k = 0; k <= 4; k++) CHECK(b4.spheres[k].size() == expect[k]);
}

TEST_CASE("ball parent links trace geodesics") {
  ElementPool g2(oracles::g2());
  Ball b = enumerate_ball(g2, 5);
  for (std::size_t i = 1; i < b.size(); i++) {
    ElementId parent = b.parent[i];
    CHECK(b.dist[b.position(parent)] == b.dist[i] - 1);
    CHECK(g2.mul_gen(parent, b.parent_letter[i]) == b.all[i]);
  }
}

TEST_CASE("parallel and serial enumeration agree") {
  for (auto spec : {oracles::f2(), oracles::g2(), oracles::g3()}) {
    ElementPool p1(spec), p2(spec);
    Ball a = enumerate_ball(p1, 6, {.parallel = true});
    Ball b = enumerate_ball_serial(p2, 6);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); i++) {
      auto da = p1.data(a.all[i]);
      auto db = p2.data(b.all[i]);
      CHECK(std::equal(da.begin(), da.end(), db.begin(), db.end()));
      CHECK(a.parent_letter[i] == b.parent_letter[i]);
    }
  }
}

TEST_CASE("ball enumeration refuses to blow the cap") {
  ElementPool f2(oracles::f2());
  EnumerationOptions opts;
  opts.element_cap = 100;
  CHECK_THROWS_AS(enumerate_ball(f2, 12, opts), resource_error);
}

TEST_CASE("exact sphere counts") {
  CHECK(sphere_count(oracles::f2(), 3) == 36);
  CHECK(sphere_count(oracles::zline(), 1) == 2);
  CHECK(sphere_count(oracles::zline(), 9) == 2);
  CHECK(sphere_count(oracles::g3(), 5) == 12);

  for (auto spec : {oracles::f2(), oracles::g2(), oracles::g3(), oracles::zline()}) {
    ElementPool pool(spec);
    Ball ball = enumerate_ball(pool, 8);
    SphereCounter counter(spec, 8);
    for (int n = 0; n <= 8; n++)
      CHECK(counter.sphere(n) == BigInt(ball.spheres[n].size()));
  }
}

TEST_CASE("growth rate estimates and brackets") {
  GrowthRate f2 = growth_rate(oracles::f2(), 40);
  CHECK(f2.estimate == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(std::fabs(f2.estimate - std::log(3.0)) < 1e-6);
  CHECK(f2.lower <= f2.estimate + 1e-12);
  CHECK(f2.estimate <= f2.upper + 1e-12);

  GrowthRate z = growth_rate(oracles::zline(), 30);
  CHECK(z.estimate == 0.0);

  GrowthRate g3 = growth_rate(oracles::g3(), 40);
  CHECK(std::fabs(g3.estimate - 0.5 * std::log(2.0)) < 1e-6);

  // every log #B(n)/n bounds the growth from above (Fekete direction)
  GrowthRate g2 = growth_rate(oracles::g2(), 30);
  for (const auto& row : g2.data)
    if (row.n >= 2) CHECK(row.log_ball_over_n >= g2.estimate - 1e-9);
  // the bracket actually sandwiches on all reference groups
  for (const GrowthRate* g : {&f2, &g3, &g2}) {
    CHECK(g->lower <= g->upper);
    CHECK(g->estimate >= g->lower - 1e-9);
    CHECK(g->estimate <= g->upper + 1e-9);
  }
}

TEST_CASE("log of big integers") {
  BigInt big = 1;
  for (int i = 0; i < 300; i++) big *= 3;
  CHECK(log_big(big) == doctest::Approx(300.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("geodesic enumeration") {
  ElementPool f2(oracles::f2());
  auto e1 = geodesics_between(f2, f2.identity(), f2.parse_word("a b"));
  CHECK(e1.count == 1);
  CHECK(e1.paths.size() == 1);

  ElementPool g2(oracles::g2());
  auto e2 = geodesics_between(g2, g2.identity(), g2.parse_word("x y"));
  CHECK(e2.count == 2);  // xy and yx
  CHECK(e2.paths.size() == 2);

  auto e3 = geodesics_between(g2, g2.parse_word("t"), g2.parse_word("t"));
  CHECK(e3.count == 1);
  CHECK(e3.paths.size() == 1);
  CHECK(e3.paths[0].length() == 0);

  SUBCASE("every path is a geodesic with the right endpoints") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; i++) {
      ElementId g = oracles::random_element(g2, rng, 2, 2);
      ElementId h = oracles::random_element(g2, rng, 2, 2);
      auto en = geodesics_between(g2, g, h, 200);
      std::uint32_t d = g2.distance(g, h);
      for (const PathWord& p : en.paths) {
        CHECK(p.length() == d);
        CHECK(p.vertices.front() == g);
        CHECK(p.vertices.back() == h);
      }
      if (!en.truncated) CHECK(en.count == BigInt(en.paths.size()));
    }
  }

  SUBCASE("cap sets the truncation flag") {
    ElementId far = g2.parse_word("x x y y");
    auto en = geodesics_between(g2, g2.identity(), far, 3);
    CHECK(en.truncated);
    CHECK(en.paths.size() == 3);
    CHECK(en.count == 6);  // multinomial(4; 2, 2)
  }
}

TEST_CASE("annulus membership is the literal half-open window") {
  ElementPool g2(oracles::g2());
  Ball ball = enumerate_ball(g2, 6);

  // A(1, n, 1) = spheres n-1 and n
  auto a = annulus(g2, ball, g2.identity(), 4, 1);
  std::size_t expect = ball.spheres[3].size() + ball.spheres[4].size();
  CHECK(a.size() == expect);

  ElementPool f2(oracles::f2());
  Ball fball = enumerate_ball(f2, 4);
  auto b = annulus(f2, fball, f2.parse_word("a"), 1, 1);
  for (ElementId h : b) {
    std::int64_t diff = std::int64_t(f2.length(h)) - 1;
    CHECK(diff >= 0);
    CHECK(diff < 2);
  }
  std::size_t count = 0;
  for (ElementId h : fball.all) {
    std::int64_t diff = std::int64_t(f2.length(h)) - 1;
    if (diff >= 0 && diff < 2) count++;
  }
  CHECK(b.size() == count);

  CHECK_THROWS_AS(annulus(g2, ball, g2.identity(), 10, 1), resource_error);
}
