#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "carnotw/geodesics.hpp"
#include "carnotw/rigidity.hpp"
#include "carnotw/wasserstein.hpp"

using namespace carnotw;

namespace {

NormSpec koranyi_h1() { return NormSpec::koranyi(GroupSpec::heisenberg(1)); }

DiscreteMeasure random_h1_measure(Rng& rng, std::size_t max_atoms, double total = 1.0) {
  return detail::random_measure(rng, GroupSpec::heisenberg(1), max_atoms, 2.0, total);
}

}  // namespace

TEST_CASE("Dirac pairs reproduce the point distance") {
  const NormSpec norm = koranyi_h1();
  Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    const Vec p = scaled(rng.gaussian_vec(3), 2.0), q = scaled(rng.gaussian_vec(3), 2.0);
    const W1Result res = w1_distance(norm, DiscreteMeasure::dirac(p), DiscreteMeasure::dirac(q));
    REQUIRE(std::abs(res.distance - norm.distance(p, q)) <= 1e-12);
    CHECK(res.plan.at(0, 0) == Catch::Approx(1.0));
  }
}

TEST_CASE("two-to-one transport on a horizontal line") {
  const NormSpec norm = koranyi_h1();
  const DiscreteMeasure mu = DiscreteMeasure::make({{0, 0, 0}, {3, 0, 0}}, {0.5, 0.5});
  const DiscreteMeasure nu = DiscreteMeasure::dirac({1, 0, 0});
  const W1Result res = w1_distance(norm, mu, nu);
  CHECK(res.distance == Catch::Approx(1.5).margin(1e-12));
  CHECK(w1(norm, mu, mu) <= 1e-13);
  CHECK_THROWS_AS(w1_distance(norm, mu, DiscreteMeasure::dirac({1, 0, 0}, 0.9)),
                  std::invalid_argument);
  CHECK_THROWS_AS(w1_distance(norm, mu, DiscreteMeasure{}), std::invalid_argument);
}

TEST_CASE("oracle unit cases") {
  CHECK(w1_bruteforce({{2.5}}, {0.75}, {0.75}) == Catch::Approx(2.5 * 0.75));
  CHECK(w1_bruteforce({{1}, {2}}, {0.5, 0.5}, {1.0}) == Catch::Approx(1.5));
  CHECK(w1_bruteforce({{0, 1}, {1, 0}}, {0.5, 0.5}, {0.5, 0.5}) == Catch::Approx(0.0));
  CHECK_THROWS_AS(w1_bruteforce({{1, 1, 1, 1, 1, 1, 1, 1}}, {1}, std::vector<double>(8, 0.125)),
                  std::invalid_argument);
}

TEST_CASE("solver equals the spanning-tree oracle on random instances") {
  const NormSpec norm = koranyi_h1();
  Rng rng(67);
  for (int inst = 0; inst < 120; ++inst) {
    const std::size_t m = 1 + rng.index(4), n = 1 + rng.index(static_cast<std::size_t>(8 - m > 4 ? 4 : 8 - m));
    std::vector<Vec> mp, np;
    std::vector<double> mw, nw;
    double ta = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mp.push_back(scaled(rng.gaussian_vec(3), 2.0));
      mw.push_back(rng.uniform(0.1, 1.0));
      ta += mw.back();
    }
    double tb = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      np.push_back(scaled(rng.gaussian_vec(3), 2.0));
      nw.push_back(rng.uniform(0.1, 1.0));
      tb += nw.back();
    }
    for (auto& w : nw) w *= ta / tb;
    const DiscreteMeasure mu = DiscreteMeasure::make(mp, mw);
    const DiscreteMeasure nu = DiscreteMeasure::make(np, nw);
    std::vector<std::vector<double>> cm(mu.size(), std::vector<double>(nu.size()));
    std::vector<double> a(mu.size()), b(nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      a[i] = mu.weight(i);
      for (std::size_t j = 0; j < nu.size(); ++j) cm[i][j] = norm.distance(mu.point(i), nu.point(j));
    }
    for (std::size_t j = 0; j < nu.size(); ++j) b[j] = nu.weight(j);
    const double lp = w1(norm, mu, nu);
    const double bf = w1_bruteforce(cm, a, b);
    REQUIRE(std::abs(lp - bf) <= 1e-10);
  }
}

TEST_CASE("transport distance satisfies the metric axioms on samples") {
  const NormSpec norm = koranyi_h1();
  Rng rng(71);
  for (int i = 0; i < 60; ++i) {
    const DiscreteMeasure mu = random_h1_measure(rng, 5);
    const DiscreteMeasure nu = random_h1_measure(rng, 5);
    const DiscreteMeasure xi = random_h1_measure(rng, 5);
    const double dmn = w1(norm, mu, nu);
    REQUIRE(std::abs(dmn - w1(norm, nu, mu)) <= 1e-9);
    REQUIRE(dmn <= w1(norm, mu, xi) + w1(norm, xi, nu) + 1e-9);
  }
}

TEST_CASE("adding a common measure preserves the distance") {
  const NormSpec norm = koranyi_h1();
  Rng rng(73);
  for (int i = 0; i < 60; ++i) {
    const DiscreteMeasure mu = random_h1_measure(rng, 4);
    const DiscreteMeasure nu = random_h1_measure(rng, 4);
    const DiscreteMeasure xi = random_h1_measure(rng, 4, rng.uniform(0.2, 2.0));
    REQUIRE(std::abs(w1(norm, mu + xi, nu + xi) - w1(norm, mu, nu)) <= 1e-9);
  }
}

TEST_CASE("dual certificate from the optimal plan") {
  const NormSpec norm = koranyi_h1();

  SECTION("Dirac pair: the potential is the distance to the source") {
    const Vec q{0, 0, 0}, qp{1, 2, 0.5};
    const DiscreteMeasure mu = DiscreteMeasure::dirac(q), nu = DiscreteMeasure::dirac(qp);
    const W1Result res = w1_distance(norm, mu, nu);
    const KrResult kr = kr_dual(norm, mu, nu, res.plan);
    CHECK(std::abs(kr.gap) <= 1e-12);
    CHECK(kr.potential.value_at(qp) - kr.potential.value_at(q) ==
          Catch::Approx(norm.distance(q, qp)));
  }

  SECTION("identical measures: constant potential, zero gap") {
    const DiscreteMeasure mu = DiscreteMeasure::make({{0, 0, 0}, {1, 1, 1}}, {0.5, 0.5});
    const W1Result res = w1_distance(norm, mu, mu);
    const KrResult kr = kr_dual(norm, mu, mu, res.plan);
    CHECK(std::abs(kr.gap) <= 1e-12);
  }

  SECTION("random instances keep the gap below 1e-9") {
    Rng rng(79);
    for (int i = 0; i < 50; ++i) {
      const DiscreteMeasure mu = random_h1_measure(rng, 10);
      const DiscreteMeasure nu = random_h1_measure(rng, 10);
      const W1Result res = w1_distance(norm, mu, nu);
      const KrResult kr = kr_dual(norm, mu, nu, res.plan);
      REQUIRE(std::abs(kr.gap) <= 1e-9);
      REQUIRE(kr.potential.lipschitz_bound <= 1.0 + 1e-9);
    }
  }

  SECTION("a doctored plan is rejected") {
    const DiscreteMeasure mu = DiscreteMeasure::make({{0, 0, 0}, {4, 0, 0}}, {0.5, 0.5});
    const DiscreteMeasure nu = DiscreteMeasure::make({{0.5, 0, 0}, {4.5, 0, 0}}, {0.5, 0.5});
    W1Result res = w1_distance(norm, mu, nu);
    // Swap the matching: still a coupling, clearly suboptimal.
    res.plan.flow = {0.0, 0.5, 0.5, 0.0};
    CHECK_THROWS_AS(kr_dual(norm, mu, nu, res.plan), std::invalid_argument);
    // Broken marginals are rejected as infeasible.
    res.plan.flow = {0.5, 0.5, 0.0, 0.0};
    CHECK_THROWS_AS(kr_dual(norm, mu, nu, res.plan), std::invalid_argument);
  }
}

TEST_CASE("solver handles heavily degenerate ties") {
  // Uniform weights on lattice points force equal costs and zero-flow pivots.
  const NormSpec norm = koranyi_h1();
  Rng rng(127);
  for (int inst = 0; inst < 40; ++inst) {
    const std::size_t m = 2 + rng.index(2), n = 2 + rng.index(2);
    std::vector<Vec> mp, np;
    for (std::size_t i = 0; i < m; ++i)
      mp.push_back({static_cast<double>(rng.index(2)), static_cast<double>(rng.index(2)), 0.0});
    for (std::size_t j = 0; j < n; ++j)
      np.push_back({static_cast<double>(rng.index(2)), static_cast<double>(rng.index(2)), 0.0});
    // Distinct z-coordinates keep atoms from merging while preserving ties
    // in the horizontal distances up to the vertical scale.
    for (std::size_t i = 0; i < m; ++i) mp[i][2] = 1e-6 * static_cast<double>(i + 1);
    for (std::size_t j = 0; j < n; ++j) np[j][2] = -1e-6 * static_cast<double>(j + 1);
    const DiscreteMeasure mu =
        DiscreteMeasure::make(mp, std::vector<double>(m, 1.0 / static_cast<double>(m)));
    const DiscreteMeasure nu =
        DiscreteMeasure::make(np, std::vector<double>(n, 1.0 / static_cast<double>(n)));
    std::vector<std::vector<double>> cm(mu.size(), std::vector<double>(nu.size()));
    std::vector<double> a(mu.size()), b(nu.size());
    double ta = 0.0, tb = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      a[i] = mu.weight(i);
      ta += a[i];
      for (std::size_t j = 0; j < nu.size(); ++j) cm[i][j] = norm.distance(mu.point(i), nu.point(j));
    }
    for (std::size_t j = 0; j < nu.size(); ++j) {
      b[j] = nu.weight(j);
      tb += b[j];
    }
    if (std::abs(ta - tb) > 1e-12) continue;
    REQUIRE(std::abs(w1(norm, mu, nu) - w1_bruteforce(cm, a, b)) <= 1e-10);
  }
}

TEST_CASE("dual certificate joins disconnected flow components") {
  // Two clusters 100 apart: the optimal plan never crosses, so the flow
  // graph splits and the potential must be shifted across the gap.
  const NormSpec norm = koranyi_h1();
  const DiscreteMeasure mu =
      DiscreteMeasure::make({{0, 0, 0}, {100, 0, 0}}, {0.5, 0.5});
  const DiscreteMeasure nu =
      DiscreteMeasure::make({{0.5, 0, 0}, {100.25, 0, 0}}, {0.5, 0.5});
  const W1Result res = w1_distance(norm, mu, nu);
  CHECK(res.distance == Catch::Approx(0.375).margin(1e-12));
  CHECK(res.plan.at(0, 0) == Catch::Approx(0.5));
  CHECK(res.plan.at(1, 1) == Catch::Approx(0.5));
  const KrResult kr = kr_dual(norm, mu, nu, res.plan);
  CHECK(std::abs(kr.gap) <= 1e-9);
  CHECK(kr.potential.lipschitz_bound <= 1.0 + 1e-9);
}

TEST_CASE("totals may differ within the mass tolerance only") {
  const NormSpec norm = koranyi_h1();
  const DiscreteMeasure mu = DiscreteMeasure::dirac({0, 0, 0});
  const DiscreteMeasure nu = DiscreteMeasure::dirac({1, 0, 0}, 1.0 + 5e-11);
  CHECK(w1(norm, mu, nu) == Catch::Approx(1.0).margin(1e-9));
  const DiscreteMeasure far = DiscreteMeasure::dirac({1, 0, 0}, 1.0 + 5e-9);
  CHECK_THROWS_AS(w1(norm, mu, far), std::invalid_argument);
}

TEST_CASE("desk-scale instance solves within budget") {
  const NormSpec norm = koranyi_h1();
  Rng rng(131);
  const std::size_t m = 200, n = 200;
  std::vector<double> cost(m * n), a(m, 1.0 / static_cast<double>(m)),
      b(n, 1.0 / static_cast<double>(n));
  for (auto& c : cost) c = rng.uniform(0.0, 5.0);
  const TransportSolution sol = solve_transportation(cost, a, b);
  CHECK(sol.value > 0.0);
  // Optimality certificate: no negative reduced cost.
  double min_rc = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      min_rc = std::min(min_rc, cost[i * n + j] - sol.row_potential[i] - sol.col_potential[j]);
  CHECK(min_rc >= -1e-9);
}

TEST_CASE("unique plan for a related moving pair over a common part") {
  const NormSpec norm = koranyi_h1();
  Rng rng(83);
  for (int inst = 0; inst < 25; ++inst) {
    const Vec q = scaled(rng.gaussian_vec(3), 1.5);
    Vec qp = scaled(rng.gaussian_vec(3), 1.5);
    qp[2] += 1.0;  // vertical offset keeps the difference non-horizontal
    REQUIRE(tilde_related(norm, q, qp));
    DiscreteMeasure eta;
    const std::size_t k = 1 + rng.index(3);
    for (std::size_t j = 0; j < k; ++j)
      eta = eta + DiscreteMeasure::dirac(scaled(rng.gaussian_vec(3), 1.5), rng.uniform(0.1, 0.4));
    const double c = rng.uniform(0.2, 0.7);
    const DiscreteMeasure mu = eta + DiscreteMeasure::dirac(q, c);
    const DiscreteMeasure nu = eta + DiscreteMeasure::dirac(qp, c);
    const W1Result res = w1_distance(norm, mu, nu);

    // Expected optimal plan: identity on eta, c from q to q'.
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j) {
        double expect = 0.0;
        if (euclid_dist(mu.point(i), q) <= kPointMergeTol &&
            euclid_dist(nu.point(j), qp) <= kPointMergeTol)
          expect = c;
        else if (euclid_dist(mu.point(i), nu.point(j)) <= kPointMergeTol)
          expect = mu.weight(i);
        REQUIRE(std::abs(res.plan.at(i, j) - expect) <= 1e-10);
      }
  }
}
