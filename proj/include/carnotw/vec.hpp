#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

namespace carnotw {

/// Group points and layer slices are plain coordinate vectors.
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double euclid_norm_sq(const Vec& a) { return dot(a, a); }

inline double euclid_norm(const Vec& a) { return std::sqrt(euclid_norm_sq(a)); }

inline double euclid_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Vec scaled(const Vec& a, double c) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

inline Vec vadd(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vec vsub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vec normalized(const Vec& a) {
  const double n = euclid_norm(a);
  return scaled(a, 1.0 / n);
}

inline bool is_zero(const Vec& a) {
  for (double x : a)
    if (x != 0.0) return false;
  return true;
}

/// 12 significant digits, the precision used for all printed values.
inline std::string fmt_g(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string format_point(const Vec& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += fmt_g(p[i]);
  }
  s += "]";
  return s;
}

inline std::string format_pair(const Vec& p, const Vec& q) {
  return format_point(p) + ";" + format_point(q);
}

}  // namespace carnotw
