#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnotw/vec.hpp"

namespace carnotw {

/// Two support points closer than this (Euclidean) are the same atom.
inline constexpr double kPointMergeTol = 1e-12;
/// Atoms whose weight falls below this after arithmetic are dropped.
inline constexpr double kWeightDropTol = 1e-12;
/// Absolute tolerance for the equal-total-mass precondition.
inline constexpr double kMassTol = 1e-10;

struct Atom {
  Vec point;
  double weight = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finitely supported non-negative measure. Atoms are pairwise distinct (up
/// to kPointMergeTol), carry strictly positive weights, and are kept sorted
/// in lexicographic point order so equal measures have equal representations.
/// The default-constructed measure is empty (total 0); it arises from
/// measure arithmetic, never from make().
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  static DiscreteMeasure dirac(Vec point, double weight = 1.0) {
    return make({std::move(point)}, {weight});
  }

  static DiscreteMeasure make(std::vector<Vec> points, std::vector<double> weights) {
    if (points.empty()) throw std::invalid_argument("a measure needs at least one support point");
    if (points.size() != weights.size())
      throw std::invalid_argument("points and weights must have equal length");
    const std::size_t d = points.front().size();
    std::vector<Atom> raw;
    raw.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != d)
        throw std::invalid_argument("support points must share one dimension");
      if (!(weights[i] > 0.0))
        throw std::invalid_argument("weights must be strictly positive (got " +
                                    fmt_g(weights[i]) + ")");
      raw.push_back({std::move(points[i]), weights[i]});
    }
    return canonical(std::move(raw), /*drop_tol=*/0.0);
  }

  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Vec& point(std::size_t i) const { return atoms_[i].point; }
  double weight(std::size_t i) const { return atoms_[i].weight; }
  double total() const { return total_; }
  std::size_t dim() const { return atoms_.empty() ? 0 : atoms_.front().point.size(); }

  DiscreteMeasure scaled_mass(double c) const {
    if (c < 0.0) throw std::invalid_argument("mass scale factor must be nonnegative");
    std::vector<Atom> raw = atoms_;
    for (auto& a : raw) a.weight *= c;
    return canonical(std::move(raw), kWeightDropTol);
  }

  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<Atom> raw = a.atoms_;
    raw.insert(raw.end(), b.atoms_.begin(), b.atoms_.end());
    return canonical(std::move(raw), kWeightDropTol);
  }

  /// Weight carried at p, matching atoms up to the merge tolerance.
  double weight_at(const Vec& p) const {
    for (const auto& a : atoms_)
      if (euclid_dist(a.point, p) <= kPointMergeTol) return a.weight;
    return 0.0;
  }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

  /// Builds a canonical measure from raw atoms: merges duplicates (union of
  /// clusters within the merge tolerance, lex-least point survives), drops
  /// weights at or below drop_tol, sorts by point.
  static DiscreteMeasure canonical(std::vector<Atom> raw, double drop_tol) {
    const std::size_t k = raw.size();
    std::vector<std::size_t> rep(k);
    std::iota(rep.begin(), rep.end(), 0);
    const auto find = [&](std::size_t i) {
      while (rep[i] != i) i = rep[i] = rep[rep[i]];
      return i;
    };
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (euclid_dist(raw[i].point, raw[j].point) <= kPointMergeTol) {
          const std::size_t ri = find(i), rj = find(j);
          if (ri != rj) rep[std::max(ri, rj)] = std::min(ri, rj);
        }
    std::vector<Atom> merged;
    for (std::size_t i = 0; i < k; ++i) {
      if (find(i) != i) continue;
      Atom a = raw[i];
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i || find(j) != i) continue;
        a.weight += raw[j].weight;
        if (raw[j].point < a.point) a.point = raw[j].point;
      }
      if (a.weight > drop_tol) merged.push_back(std::move(a));
    }
    std::sort(merged.begin(), merged.end(),
              [](const Atom& x, const Atom& y) { return x.point < y.point; });
    DiscreteMeasure m;
    m.atoms_ = std::move(merged);
    m.total_ = 0.0;
    for (const auto& a : m.atoms_) m.total_ += a.weight;
    return m;
  }

 private:
  std::vector<Atom> atoms_;
  double total_ = 0.0;
};

inline void require_equal_totals(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const char* what) {
  if (std::abs(mu.total() - nu.total()) > kMassTol)
    throw std::invalid_argument(std::string(what) + ": total mass mismatch |" +
                                fmt_g(mu.total()) + " - " + fmt_g(nu.total()) + "| > 1e-10");
}

struct Decomposition {
  DiscreteMeasure common;   // pointwise min of the two measures
  DiscreteMeasure mu_rest;  // mu - common
  DiscreteMeasure nu_rest;  // nu - common; disjoint support from mu_rest
};

inline Decomposition decompose(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_equal_totals(mu, nu, "decompose");
  std::vector<Atom> common, mu_rest, nu_rest;
  std::vector<bool> matched(nu.size(), false);
  for (const auto& a : mu.atoms()) {
    double shared = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (matched[j]) continue;
      if (euclid_dist(a.point, nu.point(j)) <= kPointMergeTol) {
        matched[j] = true;
        shared = std::min(a.weight, nu.weight(j));
        common.push_back({a.point, shared});
        if (nu.weight(j) - shared > kWeightDropTol)
          nu_rest.push_back({nu.point(j), nu.weight(j) - shared});
        break;
      }
    }
    if (a.weight - shared > kWeightDropTol) mu_rest.push_back({a.point, a.weight - shared});
  }
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (!matched[j]) nu_rest.push_back({nu.point(j), nu.weight(j)});
  Decomposition d;
  d.common = DiscreteMeasure::canonical(std::move(common), kWeightDropTol);
  d.mu_rest = DiscreteMeasure::canonical(std::move(mu_rest), kWeightDropTol);
  d.nu_rest = DiscreteMeasure::canonical(std::move(nu_rest), kWeightDropTol);
  return d;
}

struct DiracPairForm {
  DiscreteMeasure eta;  // shared part, possibly empty
  double c = 0.0;       // transported mass
  Vec q;                // source atom
  Vec q_prime;          // target atom
};

/// Detects mu - nu = c(delta_q - delta_q'): the difference reduces to one
/// moving atom on each side. Returns nothing when mu = nu or when either
/// residual is supported on more than one point.
inline std::optional<DiracPairForm> match_dirac_pair_form(const DiscreteMeasure& mu,
                                                          const DiscreteMeasure& nu) {
  const Decomposition d = decompose(mu, nu);
  if (d.mu_rest.size() != 1 || d.nu_rest.size() != 1) return std::nullopt;
  if (std::abs(d.mu_rest.total() - d.nu_rest.total()) > kMassTol) return std::nullopt;
  DiracPairForm form;
  form.eta = d.common;
  form.c = d.mu_rest.weight(0);
  form.q = d.mu_rest.point(0);
  form.q_prime = d.nu_rest.point(0);
  return form;
}

}  // namespace carnotw
