#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "carnotw/geodesics.hpp"
#include "carnotw/group.hpp"
#include "carnotw/measure.hpp"
#include "carnotw/norms.hpp"
#include "carnotw/rigidity.hpp"

namespace carnotw {

using Json = nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file '" + path + "'");
  Json j;
  in >> j;  // malformed input raises nlohmann parse errors
  return j;
}

// --- groups ---------------------------------------------------------------
// {"type":"heisenberg","n":1}
// {"type":"step2","n1":2,"n2":1,"bracket":[[[...],...],...]}  (bracket[a][b][k])

inline GroupSpec parse_group(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "heisenberg") return GroupSpec::heisenberg(j.at("n").get<int>());
  if (type == "step2") {
    const int n1 = j.at("n1").get<int>();
    const int n2 = j.at("n2").get<int>();
    const Json& b = j.at("bracket");
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("layer dimensions n1, n2 must be positive integers");
    if (!b.is_array() || b.size() != static_cast<std::size_t>(n1))
      throw std::invalid_argument("bracket tensor must have shape n1 x n1 x n2");
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n1) * n1 * n2);
    for (const auto& plane : b) {
      if (!plane.is_array() || plane.size() != static_cast<std::size_t>(n1))
        throw std::invalid_argument("bracket tensor must have shape n1 x n1 x n2");
      for (const auto& fib : plane) {
        if (!fib.is_array() || fib.size() != static_cast<std::size_t>(n2))
          throw std::invalid_argument("bracket tensor must have shape n1 x n1 x n2");
        for (const auto& v : fib) flat.push_back(v.get<double>());
      }
    }
    return GroupSpec::step2(n1, n2, std::move(flat));
  }
  throw std::invalid_argument("unknown group type '" + type + "'");
}

inline Json to_json(const GroupSpec& g) {
  if (g.kind() == GroupKind::Heisenberg)
    return Json{{"type", "heisenberg"}, {"n", g.heisenberg_n()}};
  Json b = Json::array();
  for (int a = 0; a < g.layer1_dim(); ++a) {
    Json plane = Json::array();
    for (int c = 0; c < g.layer1_dim(); ++c) {
      Json fib = Json::array();
      for (int k = 0; k < g.layer2_dim(); ++k) fib.push_back(g.bracket(a, c, k));
      plane.push_back(std::move(fib));
    }
    b.push_back(std::move(plane));
  }
  return Json{{"type", "step2"}, {"n1", g.layer1_dim()}, {"n2", g.layer2_dim()}, {"bracket", b}};
}

// --- norms ------------------------------------------------------------------
// {"norm":"koranyi"} | {"norm":"lee-naor"} | {"norm":"pmax","p":2,"a":1.0}
// | {"norm":"hs","r":0.1}

inline NormSpec parse_norm(const Json& j, const GroupSpec& group) {
  const std::string kind = j.at("norm").get<std::string>();
  if (kind == "koranyi") return NormSpec::koranyi(group);
  if (kind == "lee-naor") return NormSpec::lee_naor(group);
  if (kind == "pmax") {
    double p;
    if (j.at("p").is_string())  // "inf" selects the sup norm
      p = std::numeric_limits<double>::infinity();
    else
      p = j.at("p").get<double>();
    return NormSpec::p_max(group, p, j.at("a").get<double>());
  }
  if (kind == "hs") return NormSpec::hebisch_sikora(group, j.at("r").get<double>());
  throw std::invalid_argument("unknown norm '" + kind + "'");
}

// --- points and measures ----------------------------------------------------
// point: [x, y, z]; measure: {"points":[[...],...],"weights":[w,...]}

inline Vec parse_point(const Json& j, const GroupSpec& group) {
  if (!j.is_array()) throw std::invalid_argument("a point must be a JSON array of coordinates");
  Vec p;
  p.reserve(j.size());
  for (const auto& v : j) p.push_back(v.get<double>());
  group.check_point(p);
  return p;
}

inline Json to_json(const Vec& p) { return Json(p); }

inline DiscreteMeasure parse_measure(const Json& j, const GroupSpec& group) {
  const Json& pts = j.at("points");
  const Json& ws = j.at("weights");
  if (!pts.is_array() || !ws.is_array())
    throw std::invalid_argument("a measure needs 'points' and 'weights' arrays");
  std::vector<Vec> points;
  points.reserve(pts.size());
  for (const auto& p : pts) points.push_back(parse_point(p, group));
  std::vector<double> weights;
  weights.reserve(ws.size());
  for (const auto& w : ws) weights.push_back(w.get<double>());
  return DiscreteMeasure::make(std::move(points), std::move(weights));
}

inline Json to_json(const DiscreteMeasure& m) {
  Json pts = Json::array(), ws = Json::array();
  for (const auto& a : m.atoms()) {
    pts.push_back(Json(a.point));
    ws.push_back(a.weight);
  }
  return Json{{"points", pts}, {"weights", ws}};
}

// --- isometries ---------------------------------------------------------------
// {"translate":[...], "linear":[[...],...]} with identity defaults.

inline IsometrySpec parse_isometry(const Json& j, const NormSpec& norm) {
  const GroupSpec& g = norm.group();
  Vec g0 = g.identity();
  if (j.contains("translate")) g0 = parse_point(j.at("translate"), g);
  std::vector<double> matrix = IsometrySpec::identity_matrix(g.dim());
  if (j.contains("linear")) {
    const Json& lin = j.at("linear");
    const auto n = static_cast<std::size_t>(g.dim());
    if (!lin.is_array() || lin.size() != n)
      throw std::invalid_argument("linear part must be an n x n matrix");
    for (std::size_t i = 0; i < n; ++i) {
      if (!lin[i].is_array() || lin[i].size() != n)
        throw std::invalid_argument("linear part must be an n x n matrix");
      for (std::size_t k = 0; k < n; ++k) matrix[i * n + k] = lin[i][k].get<double>();
    }
  }
  return IsometrySpec::left_translation_and_linear(norm, std::move(g0), std::move(matrix));
}

// --- geodesic curves ---------------------------------------------------------
// {"knots":[{"t":0.0,"measure":{...}}, ...]}

inline GeodesicCurve parse_curve(const Json& j, const GroupSpec& group) {
  const Json& ks = j.at("knots");
  if (!ks.is_array() || ks.empty())
    throw std::invalid_argument("a curve needs a nonempty 'knots' array");
  std::vector<GeodesicKnot> knots;
  knots.reserve(ks.size());
  for (const auto& k : ks)
    knots.push_back({k.at("t").get<double>(), parse_measure(k.at("measure"), group)});
  return GeodesicCurve(std::move(knots));
}

inline Json to_json(const GeodesicCurve& c) {
  Json ks = Json::array();
  for (const auto& k : c.knots()) ks.push_back(Json{{"t", k.t}, {"measure", to_json(k.measure)}});
  return Json{{"knots", ks}};
}

}  // namespace carnotw
