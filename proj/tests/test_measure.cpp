#include <catch2/catch_amalgamated.hpp>

#include "carnotw/measure.hpp"
#include "carnotw/rng.hpp"

using namespace carnotw;

TEST_CASE("seeded generator is reproducible and splittable") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform01();
    CHECK(x == b.uniform01());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.uniform01() != c.uniform01());

  // Child streams are independent of how much the parent has drawn.
  Rng p1(7), p2(7);
  p2.uniform01();
  CHECK(p1.child(3).uniform01() == p2.child(3).uniform01());
  CHECK(p1.child(3).uniform01() != p1.child(4).uniform01());

  Rng g(5);
  const Vec u = g.unit_vector(4);
  CHECK(euclid_norm(u) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measure construction and canonicalization") {
  const DiscreteMeasure d = DiscreteMeasure::dirac({1, 2, 3});
  CHECK(d.size() == 1);
  CHECK(d.total() == 1.0);

  const DiscreteMeasure merged = DiscreteMeasure::make({{1, 0, 0}, {1, 0, 0}}, {0.3, 0.7});
  CHECK(merged.size() == 1);
  CHECK(merged.weight(0) == Catch::Approx(1.0));

  // Canonical order is independent of input order.
  const DiscreteMeasure a = DiscreteMeasure::make({{1, 0, 0}, {0, 1, 0}}, {0.25, 0.75});
  const DiscreteMeasure b = DiscreteMeasure::make({{0, 1, 0}, {1, 0, 0}}, {0.75, 0.25});
  CHECK(a == b);

  CHECK_THROWS_AS(DiscreteMeasure::make({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure::make({{1, 0, 0}}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure::make({{1, 0, 0}}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure::make({{1, 0, 0}}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure::make({{1, 0, 0}, {1, 0}}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("measure addition merges shared atoms") {
  const DiscreteMeasure half = DiscreteMeasure::dirac({2, 2, 2}, 0.5);
  const DiscreteMeasure one = half + half;
  CHECK(one.size() == 1);
  CHECK(one.weight(0) == Catch::Approx(1.0));

  const DiscreteMeasure mix =
      DiscreteMeasure::dirac({0, 0, 0}, 0.25) + DiscreteMeasure::dirac({1, 1, 1}, 0.5);
  CHECK(mix.size() == 2);
  CHECK(mix.total() == Catch::Approx(0.75));

  CHECK(half.scaled_mass(0.0).empty());
  CHECK(half.scaled_mass(2.0).weight(0) == Catch::Approx(1.0));
  CHECK_THROWS_AS(half.scaled_mass(-1.0), std::invalid_argument);
}

TEST_CASE("common-mass decomposition") {
  const Vec a{0, 0, 0}, b{1, 0, 0}, c{2, 0, 0};
  const DiscreteMeasure mu = DiscreteMeasure::make({a, b}, {0.5, 0.5});
  const DiscreteMeasure nu = DiscreteMeasure::make({b, c}, {0.5, 0.5});
  const Decomposition d = decompose(mu, nu);
  CHECK(d.common == DiscreteMeasure::dirac(b, 0.5));
  CHECK(d.mu_rest == DiscreteMeasure::dirac(a, 0.5));
  CHECK(d.nu_rest == DiscreteMeasure::dirac(c, 0.5));

  const Decomposition same = decompose(mu, mu);
  CHECK(same.common == mu);
  CHECK(same.mu_rest.empty());
  CHECK(same.nu_rest.empty());

  const DiscreteMeasure xi = DiscreteMeasure::make({c}, {1.0});
  const DiscreteMeasure rho = DiscreteMeasure::make({a, b}, {0.5, 0.5});
  const Decomposition disj = decompose(rho, xi);
  CHECK(disj.common.empty());
  CHECK(disj.mu_rest == rho);
  CHECK(disj.nu_rest == xi);

  CHECK_THROWS_AS(decompose(mu, DiscreteMeasure::dirac(a, 0.3)), std::invalid_argument);
}

TEST_CASE("canonical form is permutation invariant") {
  Rng rng(211);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t k = 1 + rng.index(6);
    std::vector<Vec> pts;
    std::vector<double> ws;
    for (std::size_t i = 0; i < k; ++i) {
      pts.push_back(rng.gaussian_vec(3));
      ws.push_back(rng.uniform(0.1, 1.0));
    }
    const DiscreteMeasure base = DiscreteMeasure::make(pts, ws);
    // Fisher-Yates with the seeded generator.
    for (std::size_t i = k; i > 1; --i) {
      const std::size_t j = rng.index(i);
      std::swap(pts[i - 1], pts[j]);
      std::swap(ws[i - 1], ws[j]);
    }
    CHECK(DiscreteMeasure::make(pts, ws) == base);
  }
}

TEST_CASE("decomposition reassembles both measures") {
  Rng rng(223);
  for (int inst = 0; inst < 50; ++inst) {
    // Build mu and nu with a shared pool of atoms plus private ones.
    std::vector<Vec> pool;
    for (int i = 0; i < 6; ++i) pool.push_back(rng.gaussian_vec(3));
    std::vector<Vec> mp, np;
    std::vector<double> mw, nw;
    double ta = 0.0, tb = 0.0;
    for (int i = 0; i < 4; ++i) {
      mp.push_back(pool[rng.index(6)]);
      mw.push_back(rng.uniform(0.1, 1.0));
      ta += mw.back();
      np.push_back(pool[rng.index(6)]);
      nw.push_back(rng.uniform(0.1, 1.0));
      tb += nw.back();
    }
    for (auto& w : nw) w *= ta / tb;
    const DiscreteMeasure mu = DiscreteMeasure::make(mp, mw);
    const DiscreteMeasure nu = DiscreteMeasure::make(np, nw);
    const Decomposition d = decompose(mu, nu);
    // Disjoint residual supports.
    for (const auto& a : d.mu_rest.atoms()) CHECK(d.nu_rest.weight_at(a.point) == 0.0);
    // common + rest == original, atom by atom.
    const DiscreteMeasure mu2 = d.common + d.mu_rest;
    const DiscreteMeasure nu2 = d.common + d.nu_rest;
    REQUIRE(mu2.size() == mu.size());
    REQUIRE(nu2.size() == nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      CHECK(euclid_dist(mu2.point(i), mu.point(i)) <= 1e-12);
      CHECK(std::abs(mu2.weight(i) - mu.weight(i)) <= 1e-12);
    }
    for (std::size_t j = 0; j < nu.size(); ++j)
      CHECK(std::abs(nu2.weight(j) - nu.weight(j)) <= 1e-12);
  }
}

TEST_CASE("moving-pair form detection") {
  const Vec a{0, 0, 0}, b{1, 0, 0}, c{2, 0, 0}, d{3, 0, 0};
  const DiscreteMeasure mu = DiscreteMeasure::make({a, b}, {0.5, 0.5});
  const DiscreteMeasure nu = DiscreteMeasure::make({b, c}, {0.5, 0.5});
  const auto form = match_dirac_pair_form(mu, nu);
  REQUIRE(form.has_value());
  CHECK(form->eta == DiscreteMeasure::dirac(b, 0.5));
  CHECK(form->c == Catch::Approx(0.5));
  CHECK(form->q == a);
  CHECK(form->q_prime == c);

  // Two moving atoms on a side: no match.
  const DiscreteMeasure mu2 = DiscreteMeasure::make({a, b}, {0.5, 0.5});
  const DiscreteMeasure nu2 = DiscreteMeasure::make({c, d}, {0.5, 0.5});
  CHECK_FALSE(match_dirac_pair_form(mu2, nu2).has_value());

  CHECK_FALSE(match_dirac_pair_form(mu, mu).has_value());
}
