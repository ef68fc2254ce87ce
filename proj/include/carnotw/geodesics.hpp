#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "carnotw/measure.hpp"
#include "carnotw/norms.hpp"
#include "carnotw/rng.hpp"
#include "carnotw/wasserstein.hpp"

namespace carnotw {

inline constexpr double kGeodesicTol = 1e-9;

struct GeodesicKnot {
  double t = 0.0;
  DiscreteMeasure measure;
};

/// Piecewise mass-linear curve of measures: between consecutive knots the
/// value is the mixture (1-s)*knot_k + s*knot_{k+1}. Knot times are strictly
/// increasing and all knots carry the same total mass.
class GeodesicCurve {
 public:
  explicit GeodesicCurve(std::vector<GeodesicKnot> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) throw std::invalid_argument("a curve needs at least one knot");
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
      if (!(knots_[k].t < knots_[k + 1].t))
        throw std::invalid_argument("knot times must be strictly increasing");
      require_equal_totals(knots_[k].measure, knots_[k + 1].measure,
                           "geodesic knots");
    }
    for (const auto& k : knots_)
      if (k.measure.empty()) throw std::invalid_argument("knot measures must be nonempty");
  }

  const std::vector<GeodesicKnot>& knots() const { return knots_; }
  double t_start() const { return knots_.front().t; }
  double t_end() const { return knots_.back().t; }

  DiscreteMeasure at(double t) const {
    const double pad = 1e-12 * std::max(1.0, std::abs(t_end()));
    if (t < t_start() - pad || t > t_end() + pad)
      throw std::invalid_argument("time " + fmt_g(t) + " is outside the curve domain [" +
                                  fmt_g(t_start()) + ", " + fmt_g(t_end()) + "]");
    t = std::clamp(t, t_start(), t_end());
    if (knots_.size() == 1) return knots_.front().measure;
    std::size_t k = 0;
    while (k + 2 < knots_.size() && t > knots_[k + 1].t) ++k;
    const double span = knots_[k + 1].t - knots_[k].t;
    const double s = std::clamp((t - knots_[k].t) / span, 0.0, 1.0);
    if (s == 0.0) return knots_[k].measure;
    if (s == 1.0) return knots_[k + 1].measure;
    return knots_[k].measure.scaled_mass(1.0 - s) + knots_[k + 1].measure.scaled_mass(s);
  }

 private:
  std::vector<GeodesicKnot> knots_;
};

/// Whether no third point splits any triangle equality between q and q'.
/// Under a horizontally strictly convex norm this holds exactly when
/// q^{-1} q' is not horizontal, which is what is evaluated here; for other
/// norms the shortcut is invalid and the call is refused.
inline bool tilde_related(const NormSpec& norm, const Vec& q, const Vec& q_prime,
                          double tol = kHorizontalTol) {
  if (!norm.hsc_certified())
    throw std::invalid_argument(
        "non-horizontality shortcut requires a horizontally strictly convex norm; "
        "use sampled_segment_search instead");
  const GroupSpec& g = norm.group();
  g.check_point(q);
  g.check_point(q_prime);
  if (euclid_dist(q, q_prime) <= kPointMergeTol)
    throw std::invalid_argument("relation requires two distinct points");
  return !g.is_horizontal(g.multiply(g.inverse(q), q_prime), tol);
}

/// Searches for an interior point of the metric segment [q, q']: candidates
/// are dilation interpolants q * delta_alpha(q^{-1} q'), Euclidean chords and
/// jittered variants; a candidate r distinct from both endpoints with
/// d(q,r) + d(r,q') - d(q,q') <= tol is returned as a witness that the
/// segment is nontrivial.
inline std::optional<Vec> sampled_segment_search(const NormSpec& norm, const Vec& q,
                                                 const Vec& q_prime, int sample_count,
                                                 std::uint64_t seed, double tol = kGeodesicTol) {
  const GroupSpec& g = norm.group();
  g.check_point(q);
  g.check_point(q_prime);
  if (euclid_dist(q, q_prime) <= kPointMergeTol)
    throw std::invalid_argument("segment search requires two distinct points");
  if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");

  const double dqq = norm.distance(q, q_prime);
  const Vec diff = g.multiply(g.inverse(q), q_prime);
  const double chord = euclid_dist(q, q_prime);
  Rng rng(seed, 0x5E9);

  const auto interpolant = [&](double alpha) { return g.multiply(q, g.dilate(alpha, diff)); };
  const auto try_candidate = [&](const Vec& r) -> bool {
    if (euclid_dist(r, q) <= 1e-9 || euclid_dist(r, q_prime) <= 1e-9) return false;
    return norm.distance(q, r) + norm.distance(r, q_prime) - dqq <= tol;
  };

  // A deterministic grid of interpolants first: when the difference is
  // horizontal these lie exactly on the segment.
  const int grid = std::min(sample_count, 64);
  for (int k = 1; k <= grid; ++k) {
    const Vec r = interpolant(static_cast<double>(k) / (grid + 1));
    if (try_candidate(r)) return r;
  }
  for (int s = grid; s < sample_count; ++s) {
    Vec r;
    switch (s % 3) {
      case 0:
        r = interpolant(rng.uniform(0.02, 0.98));
        break;
      case 1: {
        const double a = rng.uniform(0.05, 0.95);
        r = vadd(q, scaled(vsub(q_prime, q), a));
        break;
      }
      default: {
        r = interpolant(rng.uniform(0.02, 0.98));
        const Vec jitter = rng.gaussian_vec(r.size());
        r = vadd(r, scaled(jitter, 0.02 * chord));
        break;
      }
    }
    if (try_candidate(r)) return r;
  }
  return std::nullopt;
}

/// Mass-linear mixture (1 - t/T) mu + (t/T) nu.
inline DiscreteMeasure linear_interpolation(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                            double t, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("interpolation horizon T must be positive");
  if (t < 0.0 || t > T)
    throw std::invalid_argument("interpolation time t=" + fmt_g(t) + " is outside [0, " +
                                fmt_g(T) + "]");
  require_equal_totals(mu, nu, "linear_interpolation");
  const double s = t / T;
  if (s == 0.0) return mu;
  if (s == 1.0) return nu;
  return mu.scaled_mass(1.0 - s) + nu.scaled_mass(s);
}

/// Membership of xi in the metric ratio set: d1(mu,xi) = lambda d1(mu,nu)
/// and d1(xi,nu) = (1-lambda) d1(mu,nu), both within tol.
inline bool lambda_ratio_membership(const NormSpec& norm, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, const DiscreteMeasure& xi,
                                    double lambda, double tol = kGeodesicTol) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie strictly between 0 and 1");
  require_equal_totals(mu, nu, "lambda_ratio_membership");
  require_equal_totals(mu, xi, "lambda_ratio_membership");
  const double T = w1(norm, mu, nu);
  return std::abs(w1(norm, mu, xi) - lambda * T) <= tol &&
         std::abs(w1(norm, xi, nu) - (1.0 - lambda) * T) <= tol;
}

struct RatioSweepResult {
  double c = 0.0;
  double lambda = 0.0;
  double analytic_alpha = 0.0;          // lambda * c, the mass shifted to q'
  std::vector<double> passing_alphas;   // all family members found in the set

  /// Exactly the analytic candidate passes (every hit within atol of it).
  bool unique_at_analytic(double atol = 1e-9) const {
    if (passing_alphas.empty()) return false;
    for (double a : passing_alphas)
      if (std::abs(a - analytic_alpha) > atol) return false;
    return true;
  }
};

/// Sweeps the family xi_alpha = eta + (c - alpha) delta_q + alpha delta_q'
/// (alpha = mass already moved to q') over a uniform grid plus the analytic
/// candidate lambda*c, and records which members belong to the ratio set.
/// For a pair mu = eta + c delta_q, nu = eta + c delta_q' with trivial
/// segment [q,q'], the unique member is at alpha = lambda*c.
inline RatioSweepResult ratio_set_sweep(const NormSpec& norm, const DiscreteMeasure& eta,
                                        double c, const Vec& q, const Vec& q_prime,
                                        double lambda, int grid_count = 1000,
                                        double tol = kGeodesicTol) {
  if (!(c > 0.0)) throw std::invalid_argument("transported mass c must be positive");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie strictly between 0 and 1");
  if (grid_count < 1) throw std::invalid_argument("grid_count must be at least 1");
  const DiscreteMeasure mu = eta + DiscreteMeasure::dirac(q, c);
  const DiscreteMeasure nu = eta + DiscreteMeasure::dirac(q_prime, c);

  RatioSweepResult res;
  res.c = c;
  res.lambda = lambda;
  res.analytic_alpha = lambda * c;

  const auto member = [&](double alpha) {
    DiscreteMeasure xi = eta;
    if (c - alpha > kWeightDropTol) xi = xi + DiscreteMeasure::dirac(q, c - alpha);
    if (alpha > kWeightDropTol) xi = xi + DiscreteMeasure::dirac(q_prime, alpha);
    return xi;
  };
  for (int i = 0; i <= grid_count; ++i) {
    const double alpha = c * static_cast<double>(i) / grid_count;
    if (lambda_ratio_membership(norm, mu, nu, member(alpha), lambda, tol))
      res.passing_alphas.push_back(alpha);
  }
  if (lambda_ratio_membership(norm, mu, nu, member(res.analytic_alpha), lambda, tol))
    res.passing_alphas.push_back(res.analytic_alpha);
  std::sort(res.passing_alphas.begin(), res.passing_alphas.end());
  return res;
}

/// Two-piece unit-speed curve from eta + c delta_q to eta + c delta_q'
/// through eta + c delta_z, for a point z on the metric segment [q, q'].
inline GeodesicCurve build_detour_geodesic(const DiscreteMeasure& eta, double c, const Vec& q,
                                           const Vec& q_prime, const Vec& z,
                                           const NormSpec& norm) {
  if (!(c > 0.0)) throw std::invalid_argument("transported mass c must be positive");
  const GroupSpec& g = norm.group();
  g.check_point(q);
  g.check_point(q_prime);
  g.check_point(z);
  if (euclid_dist(z, q) <= kPointMergeTol || euclid_dist(z, q_prime) <= kPointMergeTol)
    throw std::invalid_argument("detour point z must differ from both endpoints");
  const double defect = norm.distance(q, z) + norm.distance(z, q_prime) - norm.distance(q, q_prime);
  if (std::abs(defect) > kGeodesicTol)
    throw std::invalid_argument("z is not on the metric segment: triangle defect " +
                                fmt_g(defect));

  const DiscreteMeasure mu = eta + DiscreteMeasure::dirac(q, c);
  const DiscreteMeasure xi = eta + DiscreteMeasure::dirac(z, c);
  const DiscreteMeasure nu = eta + DiscreteMeasure::dirac(q_prime, c);
  const double t_mid = w1(norm, mu, xi);
  const double t_end = w1(norm, mu, nu);
  return GeodesicCurve({{0.0, mu}, {t_mid, xi}, {t_end, nu}});
}

/// Splits the moving part of mu into the selected rows and their complement,
/// pushes the split through an optimal plan, and returns the two unit-speed
/// curves that transport the pieces in opposite order. Requires the moving
/// part to have at least two atoms and the selection to be proper.
inline std::pair<GeodesicCurve, GeodesicCurve> build_branching_geodesics(
    const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const std::vector<std::size_t>& split_rows, const NormSpec& norm) {
  const Decomposition dec = decompose(mu, nu);
  const DiscreteMeasure& mu_rest = dec.mu_rest;
  const DiscreteMeasure& nu_rest = dec.nu_rest;
  if (mu_rest.size() < 2)
    throw std::invalid_argument(
        "branching requires the moving part of mu to have at least two atoms");
  std::vector<bool> in_set(mu_rest.size(), false);
  for (std::size_t idx : split_rows) {
    if (idx >= mu_rest.size())
      throw std::invalid_argument("split index " + std::to_string(idx) +
                                  " exceeds the moving support size");
    in_set[idx] = true;
  }
  const std::size_t picked =
      static_cast<std::size_t>(std::count(in_set.begin(), in_set.end(), true));
  if (picked == 0 || picked == mu_rest.size())
    throw std::invalid_argument("split set must be a proper nonempty subset of the moving atoms");

  const Coupling plan = w1_distance(norm, mu_rest, nu_rest).plan;

  std::vector<Atom> m1, m2, v1, v2;
  for (std::size_t i = 0; i < mu_rest.size(); ++i)
    (in_set[i] ? m1 : m2).push_back({mu_rest.point(i), mu_rest.weight(i)});
  for (std::size_t j = 0; j < nu_rest.size(); ++j) {
    double w1j = 0.0, w2j = 0.0;
    for (std::size_t i = 0; i < mu_rest.size(); ++i)
      (in_set[i] ? w1j : w2j) += plan.at(i, j);
    if (w1j > kWeightDropTol) v1.push_back({nu_rest.point(j), w1j});
    if (w2j > kWeightDropTol) v2.push_back({nu_rest.point(j), w2j});
  }
  const DiscreteMeasure mu1 = DiscreteMeasure::canonical(std::move(m1), kWeightDropTol);
  const DiscreteMeasure mu2 = DiscreteMeasure::canonical(std::move(m2), kWeightDropTol);
  const DiscreteMeasure nu1 = DiscreteMeasure::canonical(std::move(v1), kWeightDropTol);
  const DiscreteMeasure nu2 = DiscreteMeasure::canonical(std::move(v2), kWeightDropTol);

  const double T = w1(norm, mu, nu);
  const double T1 = w1(norm, mu1, nu1);

  GeodesicCurve gamma1({{0.0, mu},
                        {T1, dec.common + mu2 + nu1},
                        {T, nu}});
  GeodesicCurve gamma2({{0.0, mu},
                        {T - T1, dec.common + mu1 + nu2},
                        {T, nu}});
  return {std::move(gamma1), std::move(gamma2)};
}

/// Extends the unique geodesic from eta + c delta_q to eta + c delta_q'
/// beyond its endpoint, draining eta into delta_q'. Possible exactly when
/// eta is nonzero; the result is unit-speed on [0, d1(mu, delta_q')].
inline GeodesicCurve build_extension(const DiscreteMeasure& eta, double c, const Vec& q,
                                     const Vec& q_prime, const NormSpec& norm) {
  if (eta.empty())
    throw std::invalid_argument("extension is impossible: both endpoints are Dirac (eta = 0)");
  if (!(c > 0.0 && c < 1.0))
    throw std::invalid_argument("transported mass c must lie strictly between 0 and 1");
  if (std::abs(eta.total() + c - 1.0) > kMassTol)
    throw std::invalid_argument("eta total plus c must equal 1 (got " +
                                fmt_g(eta.total() + c) + ")");
  if (!tilde_related(norm, q, q_prime))
    throw std::invalid_argument("extension requires a pair with trivial metric segment");

  const DiscreteMeasure mu = eta + DiscreteMeasure::dirac(q, c);
  const DiscreteMeasure nu = eta + DiscreteMeasure::dirac(q_prime, c);
  const DiscreteMeasure target = DiscreteMeasure::dirac(q_prime, 1.0);
  const double T = w1(norm, mu, nu);
  const double T_ext = w1(norm, mu, target);
  if (T_ext <= T + 1e-12)
    throw std::invalid_argument("nu already coincides with the Dirac target; nothing to extend");
  return GeodesicCurve({{0.0, mu}, {T, nu}, {T_ext, target}});
}

struct UnitSpeedEntry {
  double t_i = 0.0, t_j = 0.0, d1 = 0.0, deviation = 0.0;
};

struct UnitSpeedReport {
  int grid_count = 0;
  double tol = 0.0;
  std::vector<UnitSpeedEntry> entries;  // all grid pairs i < j
  double max_deviation = 0.0;
  double arg_ti = 0.0, arg_tj = 0.0;

  bool pass() const { return max_deviation <= tol; }

  void write_csv(std::ostream& os) const {
    os << "t_i,t_j,d1,deviation\n";
    for (const auto& e : entries)
      os << fmt_g(e.t_i) << "," << fmt_g(e.t_j) << "," << fmt_g(e.d1) << ","
         << fmt_g(e.deviation) << "\n";
  }
};

/// Checks d1(gamma(t_i), gamma(t_j)) = |t_i - t_j| over ALL pairs of a
/// uniform grid, not only adjacent ones: adjacent-only checks accept
/// non-geodesic concatenations.
inline UnitSpeedReport validate_unit_speed(const NormSpec& norm, const GeodesicCurve& curve,
                                           int grid_count, double tol = kGeodesicTol) {
  if (grid_count < 2) throw std::invalid_argument("grid_count must be at least 2");
  UnitSpeedReport rep;
  rep.grid_count = grid_count;
  rep.tol = tol;

  std::vector<double> times(static_cast<std::size_t>(grid_count));
  std::vector<DiscreteMeasure> values(static_cast<std::size_t>(grid_count));
  const double t0 = curve.t_start(), t1 = curve.t_end();
  for (int i = 0; i < grid_count; ++i) {
    times[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (grid_count - 1);
    values[static_cast<std::size_t>(i)] = curve.at(times[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < grid_count; ++i)
    for (int j = i + 1; j < grid_count; ++j) {
      const double d = w1(norm, values[static_cast<std::size_t>(i)],
                          values[static_cast<std::size_t>(j)]);
      const double dev = std::abs(d - std::abs(times[static_cast<std::size_t>(i)] -
                                               times[static_cast<std::size_t>(j)]));
      rep.entries.push_back({times[static_cast<std::size_t>(i)],
                             times[static_cast<std::size_t>(j)], d, dev});
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.arg_ti = times[static_cast<std::size_t>(i)];
        rep.arg_tj = times[static_cast<std::size_t>(j)];
      }
    }
  return rep;
}

}  // namespace carnotw
