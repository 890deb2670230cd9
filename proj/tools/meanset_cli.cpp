// meanset: command-line front end. JSON on stdout, CSV for heat maps.
// Exit codes: 0 success, 2 validation violations, 1 errors.

#include "meanset/heatmap.hpp"
#include "meanset/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace meanset;

namespace {

struct Args {
  std::string complex, set, at, from, to, out;
  double tol = 1e-8;
  double heat_tol = 0.1;
  int samples = 2000;
  std::uint64_t seed = 1;
  bool by_volume = false;
  int max_chain = 8;
  std::vector<std::string> segment;
};

Vec point_arg(const std::string& text, const char* flag) {
  if (text.empty()) throw InputError(std::string("missing ") + flag);
  return vec_from_json(parse_json(text, flag));
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

int run(const std::string& cmd, const Args& a) {
  const CubicalComplex cx = complex_from_json(read_json_file(a.complex));
  GeodesicOptions gopt;
  gopt.max_chain_length = a.max_chain;

  if (cmd == "validate") {
    const ValidationReport r = validate_complex(cx);
    Json j = to_json(r);
    j["maximal_cells"] = cx.num_maximal();
    j["cells"] = cx.num_cells();
    print(j);
    return r.ok() ? 0 : 2;
  }
  if (cmd == "distance") {
    print({{"distance", distance(cx, point_arg(a.from, "--from"), point_arg(a.to, "--to"), gopt)}});
    return 0;
  }
  if (cmd == "geodesic") {
    print(to_json(geodesic(cx, point_arg(a.from, "--from"), point_arg(a.to, "--to"), gopt)));
    return 0;
  }

  if (a.set.empty()) throw InputError("missing --set");
  const PointSet A = point_set_from_json(cx, read_json_file(a.set));

  if (cmd == "recognize") {
    const LocatedPoint loc = cx.locate(point_arg(a.at, "--at"));
    Json j;
    if (!A.find(loc.coords) && cx.is_maximal(loc.minimal_cell)) {
      j = to_json(recognize_interior(cx, A, loc.coords, a.tol).certificate);
      j["path"] = "interior";
    } else {
      j = to_json(recognize_general(cx, A, loc.coords, a.tol));
      j["path"] = "general";
    }
    print(j);
    return 0;
  }
  if (cmd == "deficit") {
    print(to_json(mean_deficit(cx, A, point_arg(a.at, "--at"))));
    return 0;
  }
  if (cmd == "heatmap") {
    HeatmapOptions opt;
    opt.samples = a.samples;
    opt.eps = a.heat_tol;
    opt.seed = a.seed;
    opt.by_volume = a.by_volume;
    if (opt.samples < 1) throw InputError("--samples must be at least 1");
    if (!a.segment.empty()) {
      SegmentProbe probe;
      probe.from = point_arg(a.segment[0], "--segment");
      probe.to = point_arg(a.segment[1], "--segment");
      probe.count = std::stoi(a.segment[2]);
      opt.segment = probe;
    }
    const std::string csv = heatmap_csv(heatmap_parallel(cx, A, opt), cx.ambient_dim());
    if (a.out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream f(a.out);
      if (!f) throw InputError("cannot write " + a.out);
      f << csv;
    }
    return 0;
  }
  throw InputError("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-set recognition and certificates in CAT(0) cubical complexes"};
  app.require_subcommand(1);
  Args a;

  auto with_complex = [&](CLI::App* sub) {
    sub->add_option("--complex", a.complex, "complex document (JSON)")->required();
  };
  auto with_endpoints = [&](CLI::App* sub) {
    sub->add_option("--from", a.from, "source point, e.g. \"[1,0]\"")->required();
    sub->add_option("--to", a.to, "target point")->required();
    sub->add_option("--max-chain", a.max_chain, "maximal cells per chain")->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "check intersections and the link condition");
  with_complex(validate);
  auto* dist = app.add_subcommand("distance", "intrinsic distance between two points");
  with_complex(dist);
  with_endpoints(dist);
  auto* geo = app.add_subcommand("geodesic", "geodesic between two points");
  with_complex(geo);
  with_endpoints(geo);
  auto* rec = app.add_subcommand("recognize", "decide mean membership with a certificate");
  with_complex(rec);
  rec->add_option("--set", a.set, "point set A (JSON)")->required();
  rec->add_option("--at", a.at, "query point")->required();
  rec->add_option("--tol", a.tol, "deficit tolerance")->capture_default_str();
  auto* def = app.add_subcommand("deficit", "mean deficit at a point");
  with_complex(def);
  def->add_option("--set", a.set, "point set A (JSON)")->required();
  def->add_option("--at", a.at, "query point")->required();
  auto* heat = app.add_subcommand("heatmap", "sample the mean deficit as CSV");
  with_complex(heat);
  heat->add_option("--set", a.set, "point set A (JSON)")->required();
  heat->add_option("--samples", a.samples, "number of random samples")->capture_default_str();
  heat->add_option("--tol", a.heat_tol, "decision tolerance")->capture_default_str();
  heat->add_option("--seed", a.seed, "random seed")->capture_default_str();
  heat->add_option("--out", a.out, "CSV output file (default stdout)");
  heat->add_option("--segment", a.segment, "probe points: FROM TO COUNT")->expected(3);
  heat->add_flag("--by-volume", a.by_volume, "sample top-dimensional cells only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), a);
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
}
