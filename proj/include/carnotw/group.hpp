#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnotw/vec.hpp"

namespace carnotw {

/// Absolute tolerance below which a second-layer coordinate counts as zero.
inline constexpr double kHorizontalTol = 1e-12;

enum class GroupKind { Heisenberg, Step2 };

/// A step-2 Carnot group in coordinates of the first kind.
///
/// Points are length-n real vectors whose first `layer1_dim()` entries are the
/// horizontal coordinates and whose remaining `layer2_dim()` entries are the
/// vertical ones. The identity is the zero vector and inversion is negation.
///
/// Two families are supported:
///  - Heisenberg(n): R^{2n+1} with the product
///        (x,y,z).(x',y',z') = (x+x', y+y', z+z' + 2*sum_i(x'_i y_i - x_i y'_i))
///  - Step2(n1,n2,B): the degree-2 Baker-Campbell-Hausdorff truncation
///        p.q = p + q + [p,q]/2
///    where the bracket acts on horizontal parts through the skew tensor B,
///        [p,q]_k = sum_{a,b} B[a][b][k] p_a q_b.
/// The two conventions give isomorphic but not identical coordinate groups;
/// the Heisenberg factor-2 form is kept verbatim.
class GroupSpec {
 public:
  static GroupSpec heisenberg(int n) {
    if (n < 1) throw std::invalid_argument("Heisenberg order n must be a positive integer");
    GroupSpec g;
    g.kind_ = GroupKind::Heisenberg;
    g.n1_ = 2 * n;
    g.n2_ = 1;
    return g;
  }

  /// `bracket` is the rank-3 tensor flattened as [a][b][k] with a,b < n1, k < n2.
  static GroupSpec step2(int n1, int n2, std::vector<double> bracket) {
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("layer dimensions n1, n2 must be positive integers");
    if (bracket.size() != static_cast<std::size_t>(n1) * n1 * n2)
      throw std::invalid_argument("bracket tensor must have shape n1 x n1 x n2");
    bool nonzero = false;
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n1; ++b)
        for (int k = 0; k < n2; ++k) {
          const double v = bracket[(static_cast<std::size_t>(a) * n1 + b) * n2 + k];
          if (v != -bracket[(static_cast<std::size_t>(b) * n1 + a) * n2 + k])
            throw std::invalid_argument(
                "bracket tensor must be skew-symmetric in its first two indices");
          if (v != 0.0) nonzero = true;
        }
    if (!nonzero)
      throw std::invalid_argument("bracket tensor must not be identically zero");
    GroupSpec g;
    g.kind_ = GroupKind::Step2;
    g.n1_ = n1;
    g.n2_ = n2;
    g.bracket_ = std::move(bracket);
    return g;
  }

  GroupKind kind() const { return kind_; }
  int dim() const { return n1_ + n2_; }
  int layer1_dim() const { return n1_; }
  int layer2_dim() const { return n2_; }

  int heisenberg_n() const {
    if (kind_ != GroupKind::Heisenberg)
      throw std::invalid_argument("group is not of Heisenberg kind");
    return n1_ / 2;
  }

  /// Homogeneous weight of coordinate i: 1 on the first layer, 2 on the second.
  int weight(int i) const { return i < n1_ ? 1 : 2; }

  double bracket(int a, int b, int k) const {
    return bracket_[(static_cast<std::size_t>(a) * n1_ + b) * n2_ + k];
  }

  Vec identity() const { return Vec(static_cast<std::size_t>(dim()), 0.0); }

  void check_point(const Vec& p) const {
    if (p.size() != static_cast<std::size_t>(dim()))
      throw std::invalid_argument("point dimension " + std::to_string(p.size()) +
                                  " does not match group dimension " + std::to_string(dim()));
  }

  Vec layer1(const Vec& p) const { return Vec(p.begin(), p.begin() + n1_); }
  Vec layer2(const Vec& p) const { return Vec(p.begin() + n1_, p.end()); }

  /// Second-layer correction of the product for horizontal arguments; this is
  /// the bilinear map paired with the Euclidean bound constant C1.
  Vec layer2_correction(const Vec& h1, const Vec& h2) const {
    Vec out(static_cast<std::size_t>(n2_), 0.0);
    if (kind_ == GroupKind::Heisenberg) {
      const int n = n1_ / 2;
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += h2[i] * h1[n + i] - h1[i] * h2[n + i];
      out[0] = 2.0 * c;
    } else {
      for (int k = 0; k < n2_; ++k) {
        double s = 0.0;
        for (int a = 0; a < n1_; ++a)
          for (int b = 0; b < n1_; ++b) s += bracket(a, b, k) * h1[a] * h2[b];
        out[k] = 0.5 * s;
      }
    }
    return out;
  }

  Vec multiply(const Vec& p, const Vec& q) const {
    check_point(p);
    check_point(q);
    Vec out(static_cast<std::size_t>(dim()));
    for (int i = 0; i < n1_; ++i) out[i] = p[i] + q[i];
    const Vec corr = layer2_correction(layer1(p), layer1(q));
    for (int k = 0; k < n2_; ++k) out[n1_ + k] = p[n1_ + k] + q[n1_ + k] + corr[k];
    return out;
  }

  // Negation: the correction terms cancel pairwise by skew-symmetry, so
  // multiply(p, inverse(p)) is the identity up to summation rounding.
  Vec inverse(const Vec& p) const {
    check_point(p);
    Vec out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = -p[i];
    return out;
  }

  Vec dilate(double lambda, const Vec& p) const {
    if (!(lambda > 0.0))
      throw std::invalid_argument("dilation parameter lambda must be positive");
    check_point(p);
    Vec out(p.size());
    for (int i = 0; i < n1_; ++i) out[i] = lambda * p[i];
    const double l2 = lambda * lambda;
    for (int k = 0; k < n2_; ++k) out[n1_ + k] = l2 * p[n1_ + k];
    return out;
  }

  bool is_horizontal(const Vec& p, double tol = kHorizontalTol) const {
    check_point(p);
    for (int k = 0; k < n2_; ++k)
      if (std::abs(p[n1_ + k]) > tol) return false;
    return true;
  }

  /// True iff both points are horizontal (within tol) and their horizontal
  /// parts are parallel up to sign, i.e. both sit on one horizontal line
  /// through the identity.
  bool same_horizontal_line_through_origin(const Vec& p, const Vec& q,
                                           double tol = kHorizontalTol) const {
    check_point(p);
    check_point(q);
    if (is_zero(p) || is_zero(q))
      throw std::invalid_argument("line test requires points distinct from the identity");
    if (!is_horizontal(p, tol) || !is_horizontal(q, tol)) return false;
    return parallel_up_to_sign(p, q, tol, /*positive_only=*/false);
  }

  /// Same-line test restricted to positive alignment (q on the ray of p).
  bool positively_aligned_collinear(const Vec& p, const Vec& q,
                                    double tol = kHorizontalTol) const {
    check_point(p);
    check_point(q);
    if (is_zero(p) || is_zero(q)) return false;
    if (!is_horizontal(p, tol) || !is_horizontal(q, tol)) return false;
    return parallel_up_to_sign(p, q, tol, /*positive_only=*/true);
  }

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

 private:
  GroupSpec() = default;

  bool parallel_up_to_sign(const Vec& p, const Vec& q, double tol, bool positive_only) const {
    double np = 0.0, nq = 0.0;
    for (int i = 0; i < n1_; ++i) {
      np += p[i] * p[i];
      nq += q[i] * q[i];
    }
    np = std::sqrt(np);
    nq = std::sqrt(nq);
    for (double s : {1.0, -1.0}) {
      double dev = 0.0;
      for (int i = 0; i < n1_; ++i) {
        const double d = np * q[i] - s * nq * p[i];
        dev += d * d;
      }
      if (std::sqrt(dev) <= tol) return true;
      if (positive_only) break;
    }
    return false;
  }

  GroupKind kind_ = GroupKind::Heisenberg;
  int n1_ = 0;
  int n2_ = 0;
  std::vector<double> bracket_;
};

}  // namespace carnotw
