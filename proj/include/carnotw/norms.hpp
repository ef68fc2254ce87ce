#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnotw/group.hpp"
#include "carnotw/rng.hpp"
#include "carnotw/vec.hpp"

namespace carnotw {

// Sampling budget used whenever a norm needs the r0 threshold internally.
inline constexpr int kR0SampleCount = 4096;
inline constexpr std::uint64_t kR0Seed = 1729;

/// Gauge of the Euclidean ball B(0,r) under the anisotropic dilations:
/// the unique t > 0 with |delta_{1/t}(p)|_E = r (0 for the identity).
///
/// The map t -> |delta_{1/t}(p)|_E is strictly decreasing because every
/// coordinate scales as t^{-sigma_i}, so a sign-change bracket always exists;
/// the root is then bisected to relative width 1e-13 (at most 200 steps).
inline double hs_norm(const GroupSpec& group, double r, const Vec& p) {
  if (!(r > 0.0)) throw std::invalid_argument("ball radius r must be positive");
  group.check_point(p);
  const double en = euclid_norm(p);
  if (en == 0.0) return 0.0;

  const auto resid = [&](double t) {
    double s = 0.0;
    const double t2 = t * t;
    for (int i = 0; i < group.dim(); ++i) {
      const double c = p[i] / (group.weight(i) == 1 ? t : t2);
      s += c * c;
    }
    return s - r * r;  // positive at the bracket's left end
  };

  double lo = en / (r * std::max(1.0, en));
  double hi = lo;
  int guard = 0;
  if (resid(lo) >= 0.0) {
    while (resid(hi) > 0.0 && ++guard < 400) hi *= 2.0;
  } else {
    while (resid(lo) < 0.0 && ++guard < 400) lo *= 0.5;
  }
  if (!(resid(lo) >= 0.0 && resid(hi) <= 0.0))
    throw std::runtime_error("gauge bracketing failed for " + format_point(p));
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (0.5 * (lo + hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (resid(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct C1C2Estimate {
  double c1_sampled = 0.0;  // best sampled ratio, before the safety factor
  double c1 = 0.0;          // c1_sampled * 1.05
  double c2 = 0.0;          // identically zero at step 2
};

/// Estimates the constant C1 in |corr(x1,x2)| <= C1 |x1||x2| |x1/|x1| - x2/|x2||
/// as the supremum of |corr(u1,u2)| / |u1-u2| over unit pairs, refined by
/// shrinking the chord toward its tangential limit and by a local random
/// search. The sampled supremum is inflated by 1.05 so the derived radius
/// threshold stays on the safe side. C2 is exactly zero for step-2 groups
/// (the product correction involves horizontal coordinates only).
inline C1C2Estimate estimate_c1_c2(const GroupSpec& group, int sample_count,
                                   std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  const std::size_t n1 = static_cast<std::size_t>(group.layer1_dim());
  Rng rng(seed, 0xC1);

  // Chords shorter than 1e-4 are skipped: there the correction and the chord
  // both cancel to ~1e-16 absolute noise, which can push the ratio past the
  // true supremum, while the truncation bias at 1e-4 is only ~1e-8 relative.
  const auto ratio = [&](const Vec& u1, const Vec& u2) {
    const double chord = euclid_dist(u1, u2);
    if (chord < 1e-4) return -1.0;
    return euclid_norm(group.layer2_correction(u1, u2)) / chord;
  };

  double best = 0.0;
  Vec bu1 = rng.unit_vector(n1);
  Vec bu2 = rng.unit_vector(n1);
  for (int s = 0; s < sample_count; ++s) {
    Vec u1 = rng.unit_vector(n1);
    Vec u2 = rng.unit_vector(n1);
    const double v = ratio(u1, u2);
    if (v > best) {
      best = v;
      bu1 = u1;
      bu2 = u2;
    }
  }

  // Shrink the chord of the best pair toward the tangential limit.
  Vec u1 = bu1, u2 = bu2;
  for (int k = 0; k < 200; ++k) {
    const Vec v = vsub(u2, u1);
    if (euclid_norm(v) <= 2e-4) break;
    u2 = normalized(vadd(u1, scaled(v, 0.5)));
    const double val = ratio(u1, u2);
    if (val > best) {
      best = val;
      bu1 = u1;
      bu2 = u2;
    }
  }

  // Local random search over (base point, chord direction) at fixed tiny chord.
  Vec w = normalized(vsub(bu2, bu1));
  Vec base = bu1;
  const double delta = 2e-4;
  double cur = ratio(base, normalized(vadd(base, scaled(w, delta))));
  double sigma = 0.3;
  for (int it = 0; it < 400; ++it) {
    Vec cb = vadd(base, scaled(rng.gaussian_vec(n1), sigma));
    Vec cw = vadd(w, scaled(rng.gaussian_vec(n1), sigma));
    if (euclid_norm(cb) < 1e-6 || euclid_norm(cw) < 1e-6) continue;
    cb = normalized(cb);
    cw = normalized(cw);
    const double val = ratio(cb, normalized(vadd(cb, scaled(cw, delta))));
    if (val > cur) {
      cur = val;
      base = cb;
      w = cw;
    }
    sigma *= 0.995;
  }
  best = std::max(best, cur);

  C1C2Estimate est;
  est.c1_sampled = best;
  est.c1 = best * 1.05;
  est.c2 = 0.0;
  return est;
}

/// Radius threshold min{1, 2/(sqrt(5) C1), 1/(6 C2)} below which the ball
/// gauge is a norm; a vanishing constant drops its term.
inline double hs_r0(const GroupSpec& group, int sample_count = kR0SampleCount,
                    std::uint64_t seed = kR0Seed) {
  const C1C2Estimate est = estimate_c1_c2(group, sample_count, seed);
  double r0 = 1.0;
  if (est.c1 > 0.0) r0 = std::min(r0, 2.0 / (std::sqrt(5.0) * est.c1));
  if (est.c2 > 0.0) r0 = std::min(r0, 1.0 / (6.0 * est.c2));
  return r0;
}

enum class NormKind { Koranyi, LeeNaor, PMax, HebischSikora };

inline std::string norm_kind_name(NormKind k) {
  switch (k) {
    case NormKind::Koranyi: return "koranyi";
    case NormKind::LeeNaor: return "lee-naor";
    case NormKind::PMax: return "pmax";
    case NormKind::HebischSikora: return "hs";
  }
  return "?";
}

/// One of the four homogeneous norms, bound to its group.
///
/// Koranyi, Lee-Naor and the max-type norms use the Heisenberg coordinate
/// formulas and therefore require a Heisenberg group; the ball gauge applies
/// to any step-2 group. Values are nonnegative, vanish exactly at the
/// identity and satisfy N(delta_lambda p) = lambda N(p).
class NormSpec {
 public:
  static NormSpec koranyi(GroupSpec group) {
    require_heisenberg(group, "Koranyi");
    return NormSpec(std::move(group), NormKind::Koranyi);
  }

  static NormSpec lee_naor(GroupSpec group) {
    require_heisenberg(group, "Lee-Naor");
    return NormSpec(std::move(group), NormKind::LeeNaor);
  }

  static NormSpec p_max(GroupSpec group, double p, double a) {
    require_heisenberg(group, "max-type");
    if (!(p >= 1.0))  // p = +infinity is allowed and means the sup norm
      throw std::invalid_argument("exponent p must satisfy 1 <= p <= infinity");
    const double amax = 1.0 / std::sqrt(static_cast<double>(group.heisenberg_n()));
    if (!(a > 0.0) || a > amax)
      throw std::invalid_argument("parameter a must satisfy 0 < a <= n^{-1/2}");
    NormSpec n(std::move(group), NormKind::PMax);
    n.p_ = p;
    n.a_ = a;
    return n;
  }

  static NormSpec hebisch_sikora(GroupSpec group, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("ball radius r must be positive");
    NormSpec n(std::move(group), NormKind::HebischSikora);
    n.r_ = r;
    n.r0_ = hs_r0(n.group_);
    return n;
  }

  const GroupSpec& group() const { return group_; }
  NormKind kind() const { return kind_; }
  std::string name() const { return norm_kind_name(kind_); }
  double pmax_p() const { return p_; }
  double pmax_a() const { return a_; }
  double hs_radius() const { return r_; }
  double hs_r0_estimate() const { return r0_; }

  /// Norm axioms are only guaranteed below the estimated threshold.
  bool hs_radius_warning() const {
    return kind_ == NormKind::HebischSikora && r_ >= r0_;
  }

  /// Whether the triangle-equality case is known to force a common
  /// horizontal line. The max-type norms are the stock counterexample.
  bool hsc_certified() const {
    switch (kind_) {
      case NormKind::Koranyi:
      case NormKind::LeeNaor: return true;
      case NormKind::PMax: return false;
      case NormKind::HebischSikora: return r_ < r0_;
    }
    return false;
  }

  double value(const Vec& p) const {
    group_.check_point(p);
    switch (kind_) {
      case NormKind::Koranyi: return koranyi_value(p);
      case NormKind::LeeNaor: {
        double s = 0.0;
        for (int i = 0; i < group_.layer1_dim(); ++i) s += p[i] * p[i];
        const double z = p[group_.layer1_dim()];
        return std::sqrt(std::sqrt(s * s + z * z) + s);
      }
      case NormKind::PMax: {
        const double z = p[group_.layer1_dim()];
        return std::max(lp_norm(p), a_ * std::sqrt(std::abs(z)));
      }
      case NormKind::HebischSikora: return hs_norm(group_, r_, p);
    }
    return 0.0;
  }

  /// Left-invariant distance d(p,q) = N(p^{-1} q).
  double distance(const Vec& p, const Vec& q) const {
    return value(group_.multiply(group_.inverse(p), q));
  }

  /// Triangle defect N(p) + N(q) - N(p q); nonnegative for a valid norm and
  /// zero exactly on positively aligned pairs of one horizontal line when the
  /// norm is horizontally strictly convex.
  double hsc_defect(const Vec& p, const Vec& q) const {
    group_.check_point(p);
    group_.check_point(q);
    if (is_zero(p) || is_zero(q))
      throw std::invalid_argument("defect requires points distinct from the identity");
    return value(p) + value(q) - value(group_.multiply(p, q));
  }

 private:
  NormSpec(GroupSpec group, NormKind kind) : group_(std::move(group)), kind_(kind) {}

  static void require_heisenberg(const GroupSpec& g, const char* what) {
    if (g.kind() != GroupKind::Heisenberg)
      throw std::invalid_argument(std::string(what) + " norm requires a Heisenberg group");
  }

  double koranyi_value(const Vec& p) const {
    double s = 0.0;
    for (int i = 0; i < group_.layer1_dim(); ++i) s += p[i] * p[i];
    const double z = p[group_.layer1_dim()];
    return std::pow(s * s + z * z, 0.25);
  }

  double lp_norm(const Vec& p) const {
    const int n1 = group_.layer1_dim();
    if (std::isinf(p_)) {
      double m = 0.0;
      for (int i = 0; i < n1; ++i) m = std::max(m, std::abs(p[i]));
      return m;
    }
    if (p_ == 2.0) {
      double s = 0.0;
      for (int i = 0; i < n1; ++i) s += p[i] * p[i];
      return std::sqrt(s);
    }
    if (p_ == 1.0) {
      double s = 0.0;
      for (int i = 0; i < n1; ++i) s += std::abs(p[i]);
      return s;
    }
    double s = 0.0;
    for (int i = 0; i < n1; ++i) s += std::pow(std::abs(p[i]), p_);
    return std::pow(s, 1.0 / p_);
  }

  GroupSpec group_;
  NormKind kind_;
  double p_ = 0.0;
  double a_ = 0.0;
  double r_ = 0.0;
  double r0_ = 0.0;
};

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct CheckRecord {
  std::string check;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::string witness;

  explicit CheckRecord(std::string name) : check(std::move(name)) {}

  void update(double slack, const std::string& w) {
    if (slack < worst_slack) {
      worst_slack = slack;
      witness = w;
    }
  }
};

inline void write_check_csv(std::ostream& os, const std::vector<CheckRecord>& rows) {
  os << "check,worst_slack,argmax_pair\n";
  for (const auto& r : rows)
    os << r.check << "," << fmt_g(r.worst_slack) << ",\"" << r.witness << "\"\n";
}

struct NormAxiomReport {
  int sample_count = 0;
  double tol = 0.0;
  bool hs_radius_warning = false;
  double identity_norm = 0.0;
  // Slack convention: every record is nonnegative when the axiom holds at tol.
  CheckRecord definiteness{"definiteness"};    // min N(q) over sampled q != e
  CheckRecord symmetry{"symmetry"};            // tol - |N(q^{-1}) - N(q)|
  CheckRecord homogeneity{"homogeneity"};      // tol - relative deviation
  CheckRecord triangle{"triangle"};            // defect + tol
  std::vector<std::string> violations;

  bool pass() const { return violations.empty(); }

  void write_csv(std::ostream& os) const {
    write_check_csv(os, {definiteness, symmetry, homogeneity, triangle});
  }
};

/// Seeded stress test of the norm axioms: definiteness, symmetry under
/// inversion, the triangle inequality over products, and dilation
/// homogeneity with lambda log-uniform in [1e-2, 1e2].
inline NormAxiomReport check_norm_axioms(const NormSpec& norm, int sample_count,
                                         std::uint64_t seed, double tol) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  const GroupSpec& g = norm.group();
  Rng rng(seed, 0xA71);
  NormAxiomReport rep;
  rep.sample_count = sample_count;
  rep.tol = tol;
  rep.hs_radius_warning = norm.hs_radius_warning();
  rep.identity_norm = norm.value(g.identity());
  if (rep.identity_norm != 0.0)
    rep.violations.push_back("definiteness: N(e) = " + fmt_g(rep.identity_norm));

  const std::size_t n = static_cast<std::size_t>(g.dim());
  for (int s = 0; s < sample_count; ++s) {
    const Vec q = scaled(rng.gaussian_vec(n), 1.5);
    const Vec q2 = scaled(rng.gaussian_vec(n), 1.5);
    const double nq = norm.value(q);

    rep.definiteness.update(nq, format_point(q));
    if (!(nq > 0.0))
      rep.violations.push_back("definiteness: N(" + format_point(q) + ") = " + fmt_g(nq));

    const double sym = std::abs(norm.value(g.inverse(q)) - nq);
    rep.symmetry.update(tol - sym, format_point(q));
    if (sym > tol)
      rep.violations.push_back("symmetry: deviation " + fmt_g(sym) + " at " + format_point(q));

    const double lambda = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));
    const double hom =
        std::abs(norm.value(g.dilate(lambda, q)) - lambda * nq) / std::max(1.0, lambda * nq);
    rep.homogeneity.update(tol - hom, format_point(q));
    if (hom > tol)
      rep.violations.push_back("homogeneity: relative deviation " + fmt_g(hom) + " at lambda=" +
                               fmt_g(lambda) + ", " + format_point(q));

    const double defect = nq + norm.value(q2) - norm.value(g.multiply(q, q2));
    rep.triangle.update(defect + tol, format_pair(q, q2));
    if (defect < -tol)
      rep.violations.push_back("triangle: defect " + fmt_g(defect) + " at " + format_pair(q, q2));
  }
  return rep;
}

struct HsProofReport {
  double r = 0.0;
  double r0 = 0.0;
  int sample_count = 0;
  double tol = 0.0;
  CheckRecord split1a{"split1a"};
  CheckRecord split1b{"split1b"};
  CheckRecord split2a{"split2a"};
  CheckRecord split2b{"split2b"};
  CheckRecord readytosplit{"readytosplit"};
  CheckRecord new_euclidean{"new_euclidean"};
  double equality_probe_slack = 0.0;  // aligned horizontal probe, expected ~0
  std::vector<std::string> near_equality;
  std::vector<std::string> violations;

  bool pass() const { return violations.empty(); }

  void write_csv(std::ostream& os) const {
    std::vector<CheckRecord> rows{split1a, split1b, split2a,
                                  split2b, readytosplit, new_euclidean};
    CheckRecord probe{"equality_probe"};
    probe.update(equality_probe_slack, "p1=p2=(r e1, 0), t=1/2");
    rows.push_back(probe);
    write_check_csv(os, rows);
  }
};

/// Samples (p1, p2) on the Euclidean sphere of radius r and t in (0,1) and
/// verifies the inequality chain behind the ball-gauge triangle inequality:
/// the convexity splits on each layer, their combination, and the product
/// estimate itself. Slack = RHS - LHS, expected nonnegative for r below the
/// estimated threshold.
inline HsProofReport verify_hs_proof_inequalities(const GroupSpec& group, double r,
                                                  int sample_count, std::uint64_t seed,
                                                  double tol) {
  if (!(r > 0.0)) throw std::invalid_argument("ball radius r must be positive");
  if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  const double r0 = hs_r0(group);
  if (r >= r0)
    throw std::invalid_argument("radius r=" + fmt_g(r) +
                                " is not below the estimated threshold r0=" + fmt_g(r0));

  HsProofReport rep;
  rep.r = r;
  rep.r0 = r0;
  rep.sample_count = sample_count;
  rep.tol = tol;

  const int n1 = group.layer1_dim();
  const int n2 = group.layer2_dim();
  const std::size_t n = static_cast<std::size_t>(group.dim());
  Rng rng(seed, 0x1457);

  const auto run_sample = [&](const Vec& p1, const Vec& p2, double t, bool is_probe) {
    const Vec x1 = group.layer1(p1), x2 = group.layer1(p2);
    const Vec y1 = group.layer2(p1), y2 = group.layer2(p2);
    const double nx1 = euclid_norm(x1), nx2 = euclid_norm(x2);
    const double ny1 = euclid_norm(y1), ny2 = euclid_norm(y2);
    const double tt = t * (1.0 - t);

    double mixx = 0.0;
    for (int i = 0; i < n1; ++i) {
      const double c = t * x1[i] + (1.0 - t) * x2[i];
      mixx += c * c;
    }
    const double np1sq = euclid_norm_sq(group.layer2_correction(x1, x2));
    double nwsq = 0.0;
    for (int k = 0; k < n2; ++k) {
      const double c = t * t * y1[k] + (1.0 - t) * (1.0 - t) * y2[k];
      nwsq += c * c;
    }

    const double A = mixx + tt * (1.0 + tt) * np1sq;
    const double B = (t * nx1 + (1.0 - t) * nx2) * (t * nx1 + (1.0 - t) * nx2);
    const double C = t * nx1 * nx1 + (1.0 - t) * nx2 * nx2;
    const double D = (1.0 + tt) * nwsq;
    const double E = (t * ny1 + (1.0 - t) * ny2) * (t * ny1 + (1.0 - t) * ny2);
    const double F = t * ny1 * ny1 + (1.0 - t) * ny2 * ny2;
    const Vec prod = group.multiply(group.dilate(t, p1), group.dilate(1.0 - t, p2));
    const double ne = r * r - euclid_norm_sq(prod);

    const std::string w = format_pair(p1, p2) + ";t=" + fmt_g(t);
    struct Item { CheckRecord* rec; double slack; };
    const Item items[] = {{&rep.split1a, B - A},       {&rep.split1b, C - B},
                          {&rep.split2a, E - D},       {&rep.split2b, F - E},
                          {&rep.readytosplit, r * r - (A + D)}, {&rep.new_euclidean, ne}};
    for (const auto& it : items) {
      it.rec->update(it.slack, w);
      if (it.slack < -tol)
        rep.violations.push_back(it.rec->check + ": slack " + fmt_g(it.slack) + " at " + w);
      if (it.slack <= 1e-9 && rep.near_equality.size() < 32)
        rep.near_equality.push_back(it.rec->check + " ~0 at " + w);
    }
    if (is_probe) rep.equality_probe_slack = ne;
  };

  // Deterministic aligned probe: both points horizontal and equal, where the
  // product estimate is tight.
  Vec probe(n, 0.0);
  probe[0] = r;
  run_sample(probe, probe, 0.5, true);

  for (int s = 0; s < sample_count; ++s) {
    const Vec p1 = scaled(rng.unit_vector(n), r);
    const Vec p2 = scaled(rng.unit_vector(n), r);
    const double t = std::min(std::max(rng.uniform01(), 1e-12), 1.0 - 1e-12);
    run_sample(p1, p2, t, false);
  }
  return rep;
}

struct HscReport {
  int sample_count = 0;
  double tol = 0.0;       // triangle-violation tolerance
  double zero_tol = 0.0;  // defect magnitude treated as triangle equality
  double vertical_floor = 0.0;
  std::string norm_name;

  double min_defect_nonhorizontal = std::numeric_limits<double>::infinity();
  std::string arg_nonhorizontal;
  int nonhorizontal_count = 0;

  double max_defect_horizontal_collinear = 0.0;
  std::string arg_collinear;
  int collinear_count = 0;

  // Triangle failures: defect < -tol.
  std::vector<std::string> violations;
  // Pairs with zero defect that do not sit on one horizontal line; any entry
  // disproves horizontal strict convexity.
  std::vector<std::string> zero_defect_nonline;

  bool hsc_consistent() const {
    return violations.empty() && zero_defect_nonline.empty() &&
           nonhorizontal_count > 0 && min_defect_nonhorizontal > zero_tol &&
           (collinear_count == 0 || max_defect_horizontal_collinear <= zero_tol);
  }

  void write_csv(std::ostream& os) const {
    CheckRecord tri{"triangle"};
    tri.update(violations.empty() ? tol : -tol, violations.empty() ? "" : violations.front());
    CheckRecord nh{"nonhorizontal_strictness"};
    nh.update(min_defect_nonhorizontal, arg_nonhorizontal);
    CheckRecord al{"aligned_collinear_equality"};
    al.update(zero_tol - max_defect_horizontal_collinear, arg_collinear);
    CheckRecord flag{"hsc_consistent"};
    flag.update(hsc_consistent() ? 1.0 : -1.0,
                zero_defect_nonline.empty() ? "" : zero_defect_nonline.front());
    write_check_csv(os, {nh, al, tri, flag});
  }
};

/// Samples point pairs (random, aligned-collinear probes, opposite-vertical
/// probes), records the triangle defect of each, and classifies pairs by the
/// common-horizontal-line condition. For a horizontally strictly convex norm
/// the aligned collinear defects vanish and every pair whose difference has a
/// vertical component bounded below keeps a strictly positive defect.
inline HscReport hsc_scan(const NormSpec& norm, int sample_count, std::uint64_t seed,
                          double tol, double zero_tol = 1e-9, double vertical_floor = 1e-2) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  const GroupSpec& g = norm.group();
  const int n1 = g.layer1_dim();
  const std::size_t n = static_cast<std::size_t>(g.dim());
  Rng rng(seed, 0x45C);

  HscReport rep;
  rep.sample_count = 0;
  rep.tol = tol;
  rep.zero_tol = zero_tol;
  rep.vertical_floor = vertical_floor;
  rep.norm_name = norm.name();

  const auto embed1 = [&](const Vec& h) {
    Vec p(n, 0.0);
    for (int i = 0; i < n1; ++i) p[i] = h[i];
    return p;
  };

  const auto consider = [&](const Vec& p, const Vec& q) {
    if (is_zero(p) || is_zero(q)) return;
    ++rep.sample_count;
    const double defect = norm.hsc_defect(p, q);
    if (defect < -tol)
      rep.violations.push_back("defect " + fmt_g(defect) + " at " + format_pair(p, q));

    if (g.positively_aligned_collinear(p, q, zero_tol)) {
      ++rep.collinear_count;
      if (defect > rep.max_defect_horizontal_collinear || rep.collinear_count == 1) {
        rep.max_defect_horizontal_collinear = defect;
        rep.arg_collinear = format_pair(p, q);
      }
      return;
    }
    const Vec diff = g.multiply(g.inverse(p), q);
    if (euclid_norm(g.layer2(diff)) >= vertical_floor) {
      ++rep.nonhorizontal_count;
      if (defect < rep.min_defect_nonhorizontal) {
        rep.min_defect_nonhorizontal = defect;
        rep.arg_nonhorizontal = format_pair(p, q);
      }
      if (defect <= zero_tol && rep.zero_defect_nonline.size() < 32)
        rep.zero_defect_nonline.push_back("defect " + fmt_g(defect) + " at " + format_pair(p, q));
    }
  };

  // Deterministic probe family: equal horizontal parts with opposite vertical
  // parts; the max-type norms achieve triangle equality on such pairs.
  {
    Vec p(n, 0.0), q(n, 0.0);
    p[0] = 1.0;
    q[0] = 1.0;
    p[n1] = 0.5;
    q[n1] = -0.5;
    consider(p, q);
    p[n1] = 0.125;
    q[n1] = -0.125;
    consider(p, q);
  }

  for (int s = 0; s < sample_count; ++s) {
    switch (s % 5) {
      case 3: {  // aligned collinear probe
        const Vec u = rng.unit_vector(static_cast<std::size_t>(n1));
        consider(embed1(scaled(u, rng.uniform(0.25, 1.5))),
                 embed1(scaled(u, rng.uniform(0.25, 1.5))));
        break;
      }
      case 4: {  // opposite-vertical probe
        const Vec u = rng.unit_vector(static_cast<std::size_t>(n1));
        Vec p = embed1(scaled(u, rng.uniform(0.25, 1.5)));
        Vec q = p;
        const double z = rng.uniform(0.05, 0.9);
        p[n1] = z;
        q[n1] = -z;
        consider(p, q);
        break;
      }
      default:
        consider(rng.gaussian_vec(n), rng.gaussian_vec(n));
    }
  }
  return rep;
}

}  // namespace carnotw
