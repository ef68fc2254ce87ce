#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnotw/geodesics.hpp"
#include "carnotw/measure.hpp"
#include "carnotw/norms.hpp"
#include "carnotw/rng.hpp"
#include "carnotw/wasserstein.hpp"

namespace carnotw {

// Validation budget for candidate linear isometries.
inline constexpr int kIsoValidationSamples = 256;
inline constexpr std::uint64_t kIsoValidationSeed = 83;
inline constexpr double kIsoValidationTol = 1e-10;

/// A base-space map q -> g0 * (A q) with A block-diagonal by layer. Only
/// validated instances (the map is a group homomorphism and preserves the
/// norm on samples; left translations are isometries by construction) may be
/// pushed forward.
class IsometrySpec {
 public:
  static IsometrySpec left_translation(const GroupSpec& group, Vec g0) {
    group.check_point(g0);
    IsometrySpec iso(group, std::move(g0), identity_matrix(group.dim()));
    iso.validated_ = true;  // d_N is left-invariant by definition
    return iso;
  }

  static IsometrySpec linear_map(const NormSpec& norm, std::vector<double> matrix) {
    return left_translation_and_linear(norm, norm.group().identity(), std::move(matrix));
  }

  /// Combined form g0 * (A q). The linear part is validated on samples; a
  /// failure is reported with the worst-offending pair.
  static IsometrySpec left_translation_and_linear(const NormSpec& norm, Vec g0,
                                                  std::vector<double> matrix) {
    const GroupSpec& g = norm.group();
    g.check_point(g0);
    check_block_diagonal(g, matrix);
    IsometrySpec iso(g, std::move(g0), std::move(matrix));
    if (iso.matrix_is_identity()) {
      iso.validated_ = true;
      return iso;
    }
    iso.validate_linear_part(norm);
    return iso;
  }

  /// Unvalidated candidate; push_forward and the demos refuse it until
  /// validate() has succeeded.
  static IsometrySpec unchecked(const GroupSpec& group, Vec g0, std::vector<double> matrix) {
    group.check_point(g0);
    check_block_diagonal(group, matrix);
    return IsometrySpec(group, std::move(g0), std::move(matrix));
  }

  const GroupSpec& group() const { return group_; }
  const Vec& translation() const { return g0_; }
  const std::vector<double>& matrix() const { return matrix_; }
  bool validated() const { return validated_; }

  Vec apply(const Vec& q) const {
    group_.check_point(q);
    return group_.multiply(g0_, apply_matrix(q));
  }

  /// this after other: q -> this(other(q)); closed for validated maps since
  /// the linear parts are group homomorphisms.
  IsometrySpec compose(const IsometrySpec& other) const {
    if (group_.dim() != other.group_.dim())
      throw std::invalid_argument("cannot compose isometries of different groups");
    const int n = group_.dim();
    std::vector<double> prod(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          s += matrix_[static_cast<std::size_t>(i) * n + k] *
               other.matrix_[static_cast<std::size_t>(k) * n + j];
        prod[static_cast<std::size_t>(i) * n + j] = s;
      }
    IsometrySpec out(group_, group_.multiply(g0_, apply_matrix(other.g0_)), std::move(prod));
    out.validated_ = validated_ && other.validated_;
    return out;
  }

  static std::vector<double> identity_matrix(int n) {
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = 1.0;
    return m;
  }

 private:
  IsometrySpec(GroupSpec group, Vec g0, std::vector<double> matrix)
      : group_(std::move(group)), g0_(std::move(g0)), matrix_(std::move(matrix)) {}

  static void check_block_diagonal(const GroupSpec& g, const std::vector<double>& m) {
    const int n = g.dim();
    if (m.size() != static_cast<std::size_t>(n) * n)
      throw std::invalid_argument("linear part must be an n x n matrix");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (g.weight(i) != g.weight(j) && m[static_cast<std::size_t>(i) * n + j] != 0.0)
          throw std::invalid_argument(
              "linear part must be block-diagonal by layer (dilation compatibility)");
  }

  bool matrix_is_identity() const {
    const int n = group_.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (matrix_[static_cast<std::size_t>(i) * n + j] != (i == j ? 1.0 : 0.0)) return false;
    return true;
  }

  Vec apply_matrix(const Vec& q) const {
    const int n = group_.dim();
    Vec out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += matrix_[static_cast<std::size_t>(i) * n + j] * q[j];
      out[static_cast<std::size_t>(i)] = s;
    }
    return out;
  }

  void validate_linear_part(const NormSpec& norm) {
    Rng rng(kIsoValidationSeed, 0x150);
    const std::size_t n = static_cast<std::size_t>(group_.dim());
    double worst_hom = 0.0, worst_norm = 0.0;
    Vec worst_p, worst_q;
    for (int s = 0; s < kIsoValidationSamples; ++s) {
      const Vec p = scaled(rng.gaussian_vec(n), 1.5);
      const Vec q = scaled(rng.gaussian_vec(n), 1.5);
      const Vec lhs = apply_matrix(group_.multiply(p, q));
      const Vec rhs = group_.multiply(apply_matrix(p), apply_matrix(q));
      double hom = 0.0;
      for (std::size_t i = 0; i < n; ++i) hom = std::max(hom, std::abs(lhs[i] - rhs[i]));
      const double nd = std::abs(norm.value(apply_matrix(p)) - norm.value(p));
      if (hom > worst_hom || nd > worst_norm) {
        worst_p = p;
        worst_q = q;
      }
      worst_hom = std::max(worst_hom, hom);
      worst_norm = std::max(worst_norm, nd);
    }
    if (worst_hom > kIsoValidationTol || worst_norm > kIsoValidationTol)
      throw std::invalid_argument(
          "linear part rejected: homomorphism deviation " + fmt_g(worst_hom) +
          ", norm deviation " + fmt_g(worst_norm) + " at " + format_pair(worst_p, worst_q));
    validated_ = true;
  }

  GroupSpec group_;
  Vec g0_;
  std::vector<double> matrix_;
  bool validated_ = false;
};

/// Image measure: atoms mapped pointwise, weights kept, then canonicalized
/// (total mass is preserved exactly).
inline DiscreteMeasure push_forward(const IsometrySpec& iso, const DiscreteMeasure& mu) {
  if (!iso.validated())
    throw std::invalid_argument("push_forward requires a validated isometry");
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) atoms.push_back({iso.apply(a.point), a.weight});
  return DiscreteMeasure::canonical(std::move(atoms), 0.0);
}

namespace detail {

inline DiscreteMeasure random_measure(Rng& rng, const GroupSpec& group, std::size_t max_atoms,
                                      double scale, double total) {
  const std::size_t k = 1 + rng.index(max_atoms);
  std::vector<Vec> pts;
  std::vector<double> ws;
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    pts.push_back(scaled(rng.gaussian_vec(static_cast<std::size_t>(group.dim())), scale));
    ws.push_back(rng.uniform(0.2, 1.0));
    s += ws.back();
  }
  for (auto& w : ws) w *= total / s;
  return DiscreteMeasure::make(std::move(pts), std::move(ws));
}

}  // namespace detail

struct PushforwardReport {
  int pair_count = 0;
  double tol = 0.0;
  double worst_deviation = 0.0;
  int worst_pair_index = -1;
  bool pass() const { return worst_deviation <= tol; }
};

/// Checks d1(psi_# mu, psi_# nu) = d1(mu, nu) on seeded random measure pairs.
inline PushforwardReport verify_pushforward_isometry(const IsometrySpec& iso,
                                                     const NormSpec& norm, int pair_count,
                                                     std::uint64_t seed, double tol = 1e-9) {
  if (!iso.validated())
    throw std::invalid_argument("verification requires a validated isometry");
  if (pair_count < 1) throw std::invalid_argument("pair_count must be at least 1");
  Rng rng(seed, 0xB1F);
  PushforwardReport rep;
  rep.pair_count = pair_count;
  rep.tol = tol;
  for (int s = 0; s < pair_count; ++s) {
    const DiscreteMeasure mu = detail::random_measure(rng, norm.group(), 10, 2.0, 1.0);
    const DiscreteMeasure nu = detail::random_measure(rng, norm.group(), 10, 2.0, 1.0);
    const double before = w1(norm, mu, nu);
    const double after = w1(norm, push_forward(iso, mu), push_forward(iso, nu));
    const double dev = std::abs(after - before);
    if (dev > rep.worst_deviation) {
      rep.worst_deviation = dev;
      rep.worst_pair_index = s;
    }
  }
  return rep;
}

/// Nudges the points into pairwise trivial-segment position: point k gets a
/// vertical offset delta_k = (eps^2/4) k/K on the first second-layer
/// coordinate, so all pairwise differences acquire distinct vertical parts;
/// rounds halve the offsets until every displacement stays below eps and
/// every pair is related. Vertical offsets are central, so the displacement
/// cost is the norm of the offset itself.
inline std::vector<Vec> perturb_to_tilde_position(const NormSpec& norm,
                                                  const std::vector<Vec>& points, double epsilon,
                                                  std::uint64_t seed) {
  if (!norm.hsc_certified())
    throw std::invalid_argument(
        "perturbation targets the trivial-segment relation and requires a horizontally "
        "strictly convex norm");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const GroupSpec& g = norm.group();
  for (const auto& p : points) g.check_point(p);
  if (points.size() <= 1) return points;
  (void)seed;  // construction is deterministic; the seed is part of the interface

  const std::size_t K = points.size();
  const int zi = g.layer1_dim();  // first vertical coordinate
  double base = epsilon * epsilon / 4.0;
  for (int round = 0; round < 20; ++round, base *= 0.5) {
    std::vector<Vec> out = points;
    bool ok = true;
    for (std::size_t k = 0; k < K && ok; ++k) {
      out[k][static_cast<std::size_t>(zi)] += base * static_cast<double>(k) / static_cast<double>(K);
      if (!(norm.distance(points[k], out[k]) < epsilon)) ok = false;
    }
    for (std::size_t i = 0; i < K && ok; ++i)
      for (std::size_t j = i + 1; j < K && ok; ++j)
        if (!tilde_related(norm, out[i], out[j])) ok = false;
    if (ok) return out;
  }
  throw std::runtime_error("perturbation failed to reach pairwise trivial-segment position "
                           "within the retry budget");
}

struct DemoRow {
  std::string check;
  bool pass = false;
  double worst_deviation = 0.0;
};

struct RigidityDemoReport {
  int measure_count = 0;
  std::vector<DemoRow> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const DemoRow& r) { return r.pass; });
  }

  void write_csv(std::ostream& os) const {
    os << "check_name,status,worst_deviation\n";
    for (const auto& r : rows)
      os << r.check << "," << (r.pass ? "pass" : "fail") << "," << fmt_g(r.worst_deviation)
         << "\n";
  }
};

/// Batch consistency demonstration for the push-forward map Phi = psi_#:
/// Diracs map to Diracs with the induced point map equal to psi; distances
/// between random measures are preserved; random supports can be nudged into
/// pairwise trivial-segment position at cost below any prescribed eps; and a
/// three-atom measure in that position is recovered as the unique ratio-set
/// member between its two-atom splits.
inline RigidityDemoReport rigidity_demo(const NormSpec& norm, const IsometrySpec& iso,
                                        int measure_count, std::uint64_t seed) {
  if (!norm.hsc_certified())
    throw std::invalid_argument("the demonstration requires a horizontally strictly convex norm");
  if (!iso.validated()) throw std::invalid_argument("the demonstration requires a validated isometry");
  if (measure_count < 1) throw std::invalid_argument("measure_count must be at least 1");

  const GroupSpec& g = norm.group();
  const std::size_t n = static_cast<std::size_t>(g.dim());
  Rng root(seed, 0xF1D);
  RigidityDemoReport rep;
  rep.measure_count = measure_count;

  {  // Diracs map to Diracs and the induced point map agrees with psi.
    Rng rng = root.child(1);
    double worst_atoms = 0.0, worst_map = 0.0;
    for (int s = 0; s < measure_count; ++s) {
      const Vec q = scaled(rng.gaussian_vec(n), 2.0);
      const DiscreteMeasure img = push_forward(iso, DiscreteMeasure::dirac(q));
      worst_atoms = std::max(worst_atoms, std::abs(static_cast<double>(img.size()) - 1.0));
      const Vec expect = iso.apply(q);
      for (std::size_t i = 0; i < n; ++i)
        worst_map = std::max(worst_map, std::abs(img.point(0)[i] - expect[i]));
    }
    rep.rows.push_back({"dirac_image_atom_count", worst_atoms == 0.0, worst_atoms});
    rep.rows.push_back({"induced_point_map", worst_map <= 1e-12, worst_map});
  }

  {  // Dirac pairs in trivial-segment position keep the moving-pair form.
    Rng rng = root.child(2);
    bool ok = true;
    double worst = 0.0;
    for (int s = 0; s < std::max(1, measure_count / 10); ++s) {
      Vec q = scaled(rng.gaussian_vec(n), 2.0);
      Vec qp = scaled(rng.gaussian_vec(n), 2.0);
      qp[static_cast<std::size_t>(g.layer1_dim())] += 0.5;  // ensure a vertical difference
      if (!tilde_related(norm, q, qp)) {
        ok = false;
        continue;
      }
      const auto form = match_dirac_pair_form(push_forward(iso, DiscreteMeasure::dirac(q)),
                                              push_forward(iso, DiscreteMeasure::dirac(qp)));
      if (!form || !form->eta.empty() || !tilde_related(norm, form->q, form->q_prime)) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(form->c - 1.0));
    }
    rep.rows.push_back({"dirac_pair_form_preserved", ok && worst <= 1e-12, worst});
  }

  {  // Distance preservation on random measure pairs.
    Rng rng = root.child(3);
    double worst = 0.0;
    for (int s = 0; s < measure_count; ++s) {
      const DiscreteMeasure mu = detail::random_measure(rng, g, 10, 2.0, 1.0);
      const DiscreteMeasure nu = detail::random_measure(rng, g, 10, 2.0, 1.0);
      worst = std::max(worst, std::abs(w1(norm, push_forward(iso, mu), push_forward(iso, nu)) -
                                       w1(norm, mu, nu)));
    }
    rep.rows.push_back({"w1_preserved", worst <= 1e-9, worst});
  }

  for (double eps : {0.1, 0.01}) {  // density of pairwise-related supports
    Rng rng = root.child(eps == 0.1 ? 4 : 5);
    double worst = 0.0;
    bool related_ok = true;
    for (int s = 0; s < std::max(1, measure_count / 10); ++s) {
      const DiscreteMeasure xi = detail::random_measure(rng, g, 5, 2.0, 1.0);
      std::vector<Vec> pts;
      std::vector<double> ws;
      for (const auto& a : xi.atoms()) {
        pts.push_back(a.point);
        ws.push_back(a.weight);
      }
      const std::vector<Vec> moved = perturb_to_tilde_position(norm, pts, eps, rng.next_u64());
      for (std::size_t i = 0; i < moved.size() && related_ok; ++i)
        for (std::size_t j = i + 1; j < moved.size(); ++j)
          if (!tilde_related(norm, moved[i], moved[j])) {
            related_ok = false;
            break;
          }
      const DiscreteMeasure xi_prime = DiscreteMeasure::make(moved, ws);
      worst = std::max(worst, w1(norm, xi, xi_prime));
    }
    const std::string name = "f_sim_density_eps" + fmt_g(eps);
    rep.rows.push_back({name, related_ok && worst < eps, worst});
  }

  {  // Ratio-set reconstruction of a three-atom measure from its splits.
    Rng rng = root.child(6);
    double worst = 0.0;
    bool unique_ok = true;
    for (int s = 0; s < std::max(1, measure_count / 20); ++s) {
      std::vector<Vec> pts{scaled(rng.gaussian_vec(n), 1.5), scaled(rng.gaussian_vec(n), 1.5),
                           scaled(rng.gaussian_vec(n), 1.5)};
      const std::vector<Vec> q = perturb_to_tilde_position(norm, pts, 0.25, rng.next_u64());
      double l1 = rng.uniform(0.2, 0.5), l2 = rng.uniform(0.2, 0.4);
      const double l3 = 1.0 - l1 - l2;
      const DiscreteMeasure xi = DiscreteMeasure::make({q[0], q[1], q[2]}, {l1, l2, l3});
      const DiscreteMeasure eta = DiscreteMeasure::dirac(q[0], l1);
      const double c = l2 + l3;
      const double lambda = l3 / c;
      const RatioSweepResult sweep =
          ratio_set_sweep(norm, eta, c, q[1], q[2], lambda, 1000, 1e-9);
      if (!sweep.unique_at_analytic(1e-9)) unique_ok = false;
      const DiscreteMeasure rec = eta + DiscreteMeasure::dirac(q[1], c - sweep.analytic_alpha) +
                                  DiscreteMeasure::dirac(q[2], sweep.analytic_alpha);
      worst = std::max(worst, w1(norm, rec, xi));
    }
    rep.rows.push_back({"ratio_reconstruction", unique_ok && worst <= 1e-9, worst});
  }
  return rep;
}

}  // namespace carnotw
