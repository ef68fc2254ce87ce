// carnotw -- batch toolkit for metric geometry and optimal transport on
// step-2 Carnot groups. Every subcommand reads JSON inputs, runs one library
// operation and writes a CSV/JSON/text report; identical inputs and seed
// produce byte-identical output.
//
// Exit codes: 0 success; 1 I/O or parse error; 2 validation or precondition
// failure; 3 a check suite found violations.

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "carnotw/geodesics.hpp"
#include "carnotw/group.hpp"
#include "carnotw/json_io.hpp"
#include "carnotw/measure.hpp"
#include "carnotw/norms.hpp"
#include "carnotw/rigidity.hpp"
#include "carnotw/version.hpp"
#include "carnotw/wasserstein.hpp"

namespace {

using namespace carnotw;

std::string version_string() {
  std::ostringstream os;
  os << "carnotw " << kVersion << " (formats: group=" << kGroupFormatVersion
     << " norm=" << kNormFormatVersion << " measure=" << kMeasureFormatVersion
     << " isometry=" << kIsometryFormatVersion << " curve=" << kCurveFormatVersion
     << " report=" << kReportFormatVersion << ")";
  return os.str();
}

struct Output {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << text;
  }
};

// Report rows rendered as CSV by default or as JSON on request.
Json rows_to_json(const std::vector<CheckRecord>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back(Json{{"check", r.check}, {"worst_slack", r.worst_slack}, {"argmax_pair", r.witness}});
  return arr;
}

struct CommonOpts {
  std::string group_path;
  std::string norm_path;
  std::string format = "csv";
  std::string out_path;
  std::uint64_t seed = 0;
  // Sentinels: each subcommand substitutes its own default when unset.
  int samples = -1;
  double tol = std::numeric_limits<double>::quiet_NaN();

  int eff_samples(int def) const { return samples < 0 ? def : samples; }
  double eff_tol(double def) const { return std::isnan(tol) ? def : tol; }
};

GroupSpec load_group(const CommonOpts& o) { return parse_group(load_json_file(o.group_path)); }

NormSpec load_norm(const CommonOpts& o, const GroupSpec& g) {
  return parse_norm(load_json_file(o.norm_path), g);
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric geometry and optimal transport on step-2 Carnot groups"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  CommonOpts opt;
  std::function<int()> action;

  const auto add_common = [&](CLI::App* sub, bool needs_norm) {
    sub->add_option("--group", opt.group_path, "group spec JSON file")->required();
    if (needs_norm) sub->add_option("--norm", opt.norm_path, "norm spec JSON file")->required();
    sub->add_option("--format", opt.format, "report format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--out", opt.out_path, "output file (default stdout)");
    sub->add_option("--seed", opt.seed, "seed for all randomized sampling");
    sub->add_option("--samples", opt.samples, "sample count for randomized checks")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", opt.tol, "tolerance override")->check(CLI::NonNegativeNumber);
  };

  // norm: evaluate a norm on a list of points.
  {
    auto* sub = app.add_subcommand("norm", "evaluate the norm at points from a JSON array");
    add_common(sub, true);
    auto points_path = std::make_shared<std::string>();
    sub->add_option("--points", *points_path, "JSON array of points")->required();
    sub->callback([&, points_path] {
      action = [&, points_path] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const Json pts = load_json_file(*points_path);
        std::ostringstream os;
        Json values = Json::array();
        for (const auto& j : pts) {
          const double v = norm.value(parse_point(j, g));
          if (opt.format == "json")
            values.push_back(v);
          else
            os << fmt_g(v) << "\n";
        }
        if (opt.format == "json") os << values.dump() << "\n";
        Output{opt.out_path}.write(os.str());
        return 0;
      };
    });
  }

  // dist: distance between two points.
  {
    auto* sub = app.add_subcommand("dist", "distance d_N(p, q) for {\"p\":[...],\"q\":[...]}");
    add_common(sub, true);
    auto pair_path = std::make_shared<std::string>();
    sub->add_option("--points", *pair_path, "JSON object with fields p and q")->required();
    sub->callback([&, pair_path] {
      action = [&, pair_path] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const Json j = load_json_file(*pair_path);
        const double d = norm.distance(parse_point(j.at("p"), g), parse_point(j.at("q"), g));
        Output{opt.out_path}.write(fmt_g(d) + "\n");
        return 0;
      };
    });
  }

  // w1: exact transport distance between two measures.
  {
    auto* sub = app.add_subcommand("w1", "1-Wasserstein distance between two measures");
    add_common(sub, true);
    auto mu_path = std::make_shared<std::string>();
    auto nu_path = std::make_shared<std::string>();
    auto plan_path = std::make_shared<std::string>();
    sub->add_option("--mu", *mu_path, "first measure JSON")->required();
    sub->add_option("--nu", *nu_path, "second measure JSON")->required();
    sub->add_option("--plan-out", *plan_path, "write the optimal plan CSV here");
    sub->callback([&, mu_path, nu_path, plan_path] {
      action = [&, mu_path, nu_path, plan_path] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const DiscreteMeasure mu = parse_measure(load_json_file(*mu_path), g);
        const DiscreteMeasure nu = parse_measure(load_json_file(*nu_path), g);
        const W1Result res = w1_distance(norm, mu, nu);
        if (!plan_path->empty()) {
          std::ofstream pf(*plan_path);
          if (!pf) throw IoError("cannot open output file '" + *plan_path + "'");
          write_plan_csv(pf, res.plan, norm);
        }
        Output{opt.out_path}.write(fmt_g(res.distance) + "\n");
        return 0;
      };
    });
  }

  // check-norm: norm axiom stress test.
  {
    auto* sub = app.add_subcommand("check-norm", "stress the norm axioms on random samples");
    add_common(sub, true);
    sub->callback([&] {
      action = [&] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const NormAxiomReport rep = check_norm_axioms(norm, opt.eff_samples(10000), opt.seed, opt.eff_tol(1e-10));
        std::ostringstream os;
        if (opt.format == "json") {
          Json j{{"samples", rep.sample_count},
                 {"tol", rep.tol},
                 {"hs_radius_warning", rep.hs_radius_warning},
                 {"violations", rep.violations},
                 {"checks", rows_to_json({rep.definiteness, rep.symmetry, rep.homogeneity,
                                          rep.triangle})}};
          os << j.dump(2) << "\n";
        } else {
          rep.write_csv(os);
          if (rep.hs_radius_warning) os << "# warning: r >= estimated r0\n";
        }
        Output{opt.out_path}.write(os.str());
        return rep.pass() ? 0 : 3;
      };
    });
  }

  // check-hsc: horizontal strict convexity scan.
  {
    auto* sub = app.add_subcommand("check-hsc",
                                   "scan triangle defects and classify the equality pairs");
    add_common(sub, true);
    sub->callback([&] {
      action = [&] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const HscReport rep = hsc_scan(norm, opt.eff_samples(10000), opt.seed, opt.eff_tol(1e-12));
        std::ostringstream os;
        if (opt.format == "json") {
          Json j{{"samples", rep.sample_count},
                 {"norm", rep.norm_name},
                 {"hsc_consistent", rep.hsc_consistent()},
                 {"min_defect_nonhorizontal", rep.min_defect_nonhorizontal},
                 {"arg_nonhorizontal", rep.arg_nonhorizontal},
                 {"max_defect_horizontal_collinear", rep.max_defect_horizontal_collinear},
                 {"arg_collinear", rep.arg_collinear},
                 {"zero_defect_nonline", rep.zero_defect_nonline},
                 {"violations", rep.violations}};
          os << j.dump(2) << "\n";
        } else {
          rep.write_csv(os);
        }
        Output{opt.out_path}.write(os.str());
        return rep.hsc_consistent() ? 0 : 3;
      };
    });
  }

  // check-hs-proof: the layered inequality chain for the ball gauge.
  {
    auto* sub = app.add_subcommand(
        "check-hs-proof", "verify the ball-gauge triangle inequality chain on sphere samples");
    add_common(sub, false);
    auto radius = std::make_shared<double>(0.1);
    sub->add_option("--r", *radius, "ball radius (must be below the estimated r0)")->required();
    sub->callback([&, radius] {
      action = [&, radius] {
        const GroupSpec g = load_group(opt);
        const HsProofReport rep =
            verify_hs_proof_inequalities(g, *radius, opt.eff_samples(10000), opt.seed, opt.eff_tol(1e-10));
        std::ostringstream os;
        if (opt.format == "json") {
          Json j{{"r", rep.r},
                 {"r0", rep.r0},
                 {"samples", rep.sample_count},
                 {"equality_probe_slack", rep.equality_probe_slack},
                 {"violations", rep.violations},
                 {"checks", rows_to_json({rep.split1a, rep.split1b, rep.split2a, rep.split2b,
                                          rep.readytosplit, rep.new_euclidean})}};
          os << j.dump(2) << "\n";
        } else {
          rep.write_csv(os);
        }
        Output{opt.out_path}.write(os.str());
        return rep.pass() ? 0 : 3;
      };
    });
  }

  // r0: constant estimation.
  {
    auto* sub = app.add_subcommand("r0", "estimate C1, C2 and the radius threshold r0");
    add_common(sub, false);
    sub->callback([&] {
      action = [&] {
        const GroupSpec g = load_group(opt);
        const C1C2Estimate est = estimate_c1_c2(g, opt.eff_samples(kR0SampleCount), opt.seed);
        double r0 = 1.0;
        if (est.c1 > 0.0) r0 = std::min(r0, 2.0 / (std::sqrt(5.0) * est.c1));
        if (est.c2 > 0.0) r0 = std::min(r0, 1.0 / (6.0 * est.c2));
        std::ostringstream os;
        if (opt.format == "json") {
          os << Json{{"c1_sampled", est.c1_sampled}, {"c1", est.c1}, {"c2", est.c2}, {"r0", r0}}
                    .dump(2)
             << "\n";
        } else {
          os << "c1_sampled " << fmt_g(est.c1_sampled) << "\n";
          os << "c1 " << fmt_g(est.c1) << "\n";
          os << "c2 " << fmt_g(est.c2) << "\n";
          os << "r0 " << fmt_g(r0) << "\n";
        }
        Output{opt.out_path}.write(os.str());
        return 0;
      };
    });
  }

  // geodesic-validate: unit-speed check of a knot curve.
  {
    auto* sub = app.add_subcommand("geodesic-validate", "unit-speed validation on a time grid");
    add_common(sub, true);
    auto curve_path = std::make_shared<std::string>();
    auto grid = std::make_shared<int>(11);
    sub->add_option("--curve", *curve_path, "curve JSON file")->required();
    sub->add_option("--grid", *grid, "grid size (default 11)");
    sub->callback([&, curve_path, grid] {
      action = [&, curve_path, grid] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const GeodesicCurve curve = parse_curve(load_json_file(*curve_path), g);
        const UnitSpeedReport rep = validate_unit_speed(norm, curve, *grid, opt.eff_tol(1e-9));
        std::ostringstream os;
        if (opt.format == "json") {
          Json entries = Json::array();
          for (const auto& e : rep.entries)
            entries.push_back(Json{{"t_i", e.t_i}, {"t_j", e.t_j}, {"d1", e.d1},
                                   {"deviation", e.deviation}});
          os << Json{{"pass", rep.pass()}, {"max_deviation", rep.max_deviation},
                     {"entries", entries}}
                    .dump(2)
             << "\n";
        } else {
          rep.write_csv(os);
        }
        Output{opt.out_path}.write(os.str());
        return rep.pass() ? 0 : 3;
      };
    });
  }

  // geodesic-branch: the two transport-order curves.
  {
    auto* sub = app.add_subcommand(
        "geodesic-branch", "build the two branching geodesics for a split of the moving mass");
    add_common(sub, true);
    auto mu_path = std::make_shared<std::string>();
    auto nu_path = std::make_shared<std::string>();
    auto split = std::make_shared<std::vector<std::size_t>>();
    auto grid = std::make_shared<int>(11);
    sub->add_option("--mu", *mu_path, "first measure JSON")->required();
    sub->add_option("--nu", *nu_path, "second measure JSON")->required();
    sub->add_option("--split", *split, "indices of moving atoms transported first")->required();
    sub->add_option("--grid", *grid, "validation grid size (default 11)");
    sub->callback([&, mu_path, nu_path, split, grid] {
      action = [&, mu_path, nu_path, split, grid] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const DiscreteMeasure mu = parse_measure(load_json_file(*mu_path), g);
        const DiscreteMeasure nu = parse_measure(load_json_file(*nu_path), g);
        const auto [g1, g2] = build_branching_geodesics(mu, nu, *split, norm);
        const UnitSpeedReport r1 = validate_unit_speed(norm, g1, *grid, opt.eff_tol(1e-9));
        const UnitSpeedReport r2 = validate_unit_speed(norm, g2, *grid, opt.eff_tol(1e-9));
        Json j{{"gamma1", to_json(g1)},
               {"gamma2", to_json(g2)},
               {"max_deviation1", r1.max_deviation},
               {"max_deviation2", r2.max_deviation},
               {"pass", r1.pass() && r2.pass()}};
        Output{opt.out_path}.write(j.dump(2) + "\n");
        return (r1.pass() && r2.pass()) ? 0 : 3;
      };
    });
  }

  // rigidity-demo: push-forward consistency suite.
  {
    auto* sub = app.add_subcommand("rigidity-demo",
                                   "push-forward isometry demonstration for one base isometry");
    add_common(sub, true);
    auto iso_path = std::make_shared<std::string>();
    auto measures = std::make_shared<int>(100);
    sub->add_option("--iso", *iso_path, "isometry JSON file")->required();
    sub->add_option("--measures", *measures, "number of test measures (default 100)");
    sub->callback([&, iso_path, measures] {
      action = [&, iso_path, measures] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const IsometrySpec iso = parse_isometry(load_json_file(*iso_path), norm);
        const RigidityDemoReport rep = rigidity_demo(norm, iso, *measures, opt.seed);
        std::ostringstream os;
        if (opt.format == "json") {
          Json rows = Json::array();
          for (const auto& r : rep.rows)
            rows.push_back(Json{{"check_name", r.check}, {"status", r.pass ? "pass" : "fail"},
                                {"worst_deviation", r.worst_deviation}});
          os << Json{{"all_pass", rep.all_pass()}, {"rows", rows}}.dump(2) << "\n";
        } else {
          rep.write_csv(os);
        }
        Output{opt.out_path}.write(os.str());
        return rep.all_pass() ? 0 : 3;
      };
    });
  }

  // perturb: nudge points into pairwise trivial-segment position.
  {
    auto* sub = app.add_subcommand(
        "perturb", "perturb points into pairwise trivial-segment position at cost < epsilon");
    add_common(sub, true);
    auto points_path = std::make_shared<std::string>();
    auto epsilon = std::make_shared<double>(0.1);
    sub->add_option("--points", *points_path, "JSON array of points")->required();
    sub->add_option("--epsilon", *epsilon, "displacement bound")->required();
    sub->callback([&, points_path, epsilon] {
      action = [&, points_path, epsilon] {
        const GroupSpec g = load_group(opt);
        const NormSpec norm = load_norm(opt, g);
        const Json pts_json = load_json_file(*points_path);
        std::vector<Vec> pts;
        for (const auto& j : pts_json) pts.push_back(parse_point(j, g));
        const std::vector<Vec> out = perturb_to_tilde_position(norm, pts, *epsilon, opt.seed);
        Json arr = Json::array();
        for (const auto& p : out) arr.push_back(Json(p));
        Output{opt.out_path}.write(arr.dump(2) + "\n");
        return 0;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage maps onto the parse-error exit code
  }
  if (!action) return 1;
  return run_guarded(action);
}
