#include "support.hpp"

#include "meanset/heatmap.hpp"
#include "meanset/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace meanset;
using namespace meanset::testing;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("meanset_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const std::string cmd = std::string(MEANSET_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::string corpus_file(const std::string& name) { return corpus_path(name + ".json"); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("single sample is deterministic") {
    const Example ex = load_example("squares3");
    HeatmapOptions opt;
    opt.samples = 1;
    opt.seed = 42;
    const auto a = heatmap_serial(ex.cx, ex.A, opt);
    const auto b = heatmap_serial(ex.cx, ex.A, opt);
    REQUIRE(a.size() == 1);
    CHECK(heatmap_csv(a, 2) == heatmap_csv(b, 2));
    CHECK(heatmap_csv(a, 2) == heatmap_csv(heatmap_parallel(ex.cx, ex.A, opt, 1), 2));
    opt.seed = 43;
    CHECK(heatmap_csv(a, 2) != heatmap_csv(heatmap_serial(ex.cx, ex.A, opt), 2));
  }

  TEST_CASE("rows do not depend on the worker count") {
    const Example ex = load_example("cube_square");
    HeatmapOptions opt;
    opt.samples = 120;
    opt.seed = 5;
    opt.segment = SegmentProbe{ex.A.points[0], ex.A.points[1], 5};
    const std::string reference = heatmap_csv(heatmap_serial(ex.cx, ex.A, opt), 3);
    for (int threads : {1, 2, 4}) CHECK(heatmap_csv(heatmap_parallel(ex.cx, ex.A, opt, threads), 3) == reference);
    // Sample i does not depend on how many samples are drawn.
    HeatmapOptions fewer = opt;
    fewer.samples = 40;
    fewer.segment.reset();
    const auto head = heatmap_serial(ex.cx, ex.A, fewer);
    const auto all = heatmap_serial(ex.cx, ex.A, opt);
    for (std::size_t i = 0; i < head.size(); ++i) CHECK(head[i].x == all[i].x);
  }

  TEST_CASE("by-volume sampling keeps to top-dimensional cells") {
    const Example ex = load_example("cube_square");
    HeatmapOptions opt;
    opt.samples = 200;
    opt.by_volume = true;
    for (const HeatmapSample& s : heatmap_serial(ex.cx, ex.A, opt)) CHECK(ex.cx.cell(s.cell).dim() == 3);
  }

  TEST_CASE("decisions re-verify against standalone recognition") {
    for (const char* name : {"squares3", "squares5", "cube_square"}) {
      const Example ex = load_example(name);
      HeatmapOptions opt;
      opt.samples = 60;
      opt.seed = 9;
      opt.segment = SegmentProbe{ex.A.points[0], ex.A.points[1], 4};
      for (const HeatmapSample& s : heatmap_serial(ex.cx, ex.A, opt)) {
        CAPTURE(name);
        CAPTURE(s.x.transpose());
        CHECK(s.deficit >= 0.0);
        CHECK(s.member == (s.deficit <= opt.eps));
        if (ex.A.find(ex.cx.locate(s.x).coords)) continue;
        const GeneralResult r = recognize_general(ex.cx, ex.A, s.x, opt.eps);
        if (std::abs(r.certificate.deficit - opt.eps) < 1e-6) continue;
        CHECK(r.member == s.member);
      }
    }
  }

  TEST_CASE("csv layout") {
    const Example ex = load_example("squares3");
    HeatmapOptions opt;
    opt.samples = 3;
    const std::string csv = heatmap_csv(heatmap_serial(ex.cx, ex.A, opt), 2);
    CHECK(csv.rfind("cell,x0,x1,deficit,decision\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    HeatmapSample s;
    s.cell = 2;
    s.x = vec({-0.0, 1.0 / 3.0});
    s.deficit = 0.0;
    s.member = true;
    CHECK(heatmap_csv({s}, 2) == "cell,x0,x1,deficit,decision\n2,0,0.333333333333,0,member\n");
  }

  TEST_CASE("json round trips") {
    for (const char* name : {"tripod", "squares3", "squares5", "cube_square", "quadrant_window"}) {
      const Example ex = load_example(name);
      const CubicalComplex back = complex_from_json(complex_to_json(ex.cx));
      CHECK(back.num_cells() == ex.cx.num_cells());
      CHECK(back.num_maximal() == ex.cx.num_maximal());
      for (std::size_t i = 0; i < ex.cx.num_maximal(); ++i) {
        CHECK(back.cell(static_cast<CellId>(i)) == ex.cx.cell(static_cast<CellId>(i)));
      }
    }

    Certificate m;
    m.weights = {{"a", 0.25}, {"b", 0.75}};
    m.deficit = 1e-12;
    const Certificate m2 = certificate_from_json(to_json(m));
    CHECK(m2.kind == Certificate::Kind::Membership);
    CHECK(m2.weights == m.weights);
    CHECK(m2.deficit == m.deficit);

    Certificate n;
    n.kind = Certificate::Kind::NonMembership;
    n.witness = vec({0.1, 0.2, 0.3});
    n.margins = {{"a", 1e-3}, {"b", 2e-3}};
    n.deficit = 0.5;
    const Certificate n2 = certificate_from_json(to_json(n));
    CHECK(n2.kind == Certificate::Kind::NonMembership);
    CHECK(n2.witness == n.witness);
    CHECK(n2.margins == n.margins);
  }

  TEST_CASE("point sets in both forms") {
    const Example ex = load_example("squares3");
    const Json list = Json::parse("[[1,0],[0,1]]");
    const Json labelled = Json::parse(R"({"labels": ["a", "c"], "points": [[1,0],[0,1]]})");
    const PointSet p = point_set_from_json(ex.cx, list);
    const PointSet q = point_set_from_json(ex.cx, labelled);
    REQUIRE(p.size() == 2);
    REQUIRE(q.size() == 2);
    CHECK(p.points[1] == q.points[1]);
    CHECK(q.labels[1] == "c");
    CHECK_THROWS_AS(point_set_from_json(ex.cx, Json::parse("[[1,1]]")), Error);
  }

  TEST_CASE("parse errors carry line and column") {
    try {
      parse_json("{\n  \"cells\": [\n    1,,\n  ]\n}", "broken.json");
      FAIL("no exception");
    } catch (const InputError& e) {
      const std::string what = e.what();
      CHECK(what.rfind("broken.json:3:", 0) == 0);
    }
  }

  TEST_CASE("command line") {
    const std::string tripod = corpus_file("tripod");
    const std::string squares3 = corpus_file("squares3");
    const std::string squares3_A = corpus_file("squares3_A");

    Run r = cli("distance --complex " + tripod + " --from '[1,0]' --to '[0,1]'");
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out).at("distance").get<double>() == doctest::Approx(2.0).epsilon(1e-12));

    r = cli("recognize --complex " + squares3 + " --set " + squares3_A + " --at '[0.5,0]' --tol 1e-8");
    CHECK(r.code == 0);
    Json j = Json::parse(r.out);
    CHECK(j.at("kind") == "membership");
    CHECK(j.at("path") == "general");

    const Example ex = load_example("squares3");
    const std::string at = vec_to_json(ex.A.points[0]).dump();
    r = cli("recognize --complex " + squares3 + " --set " + squares3_A + " --at '" + at + "'");
    CHECK(r.code == 0);
    j = Json::parse(r.out);
    CHECK(j.at("kind") == "membership");
    CHECK(j.at("deficit").get<double>() == 0.0);

    r = cli("recognize --complex " + squares3 + " --set " + squares3_A + " --at '[-0.5,-0.5]'");
    CHECK(r.code == 0);
    j = Json::parse(r.out);
    CHECK(j.at("path") == "interior");
    const Certificate cert = certificate_from_json(j);
    CHECK(verify_certificate(ex.cx, ex.A, vec({-0.5, -0.5}), cert).ok);

    r = cli("deficit --complex " + squares3 + " --set " + squares3_A + " --at '[0.5,0.5]'");
    CHECK(r.code == 1);  // not a point of the complex

    r = cli("validate --complex " + squares3);
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out).at("maximal_cells") == 3);

    const fs::path bad = scratch_dir() / "corner.json";
    std::ofstream(bad) << R"({"ambient_dim": 3, "cells": [
      {"base": [0,0,0], "axes": [0,1]}, {"base": [0,0,0], "axes": [0,2]}, {"base": [0,0,0], "axes": [1,2]}]})";
    r = cli("validate --complex " + bad.string());
    CHECK(r.code == 2);

    const fs::path broken = scratch_dir() / "broken.json";
    std::ofstream(broken) << "{\"ambient_dim\": 2,\n \"cells\": [\n";
    CHECK(cli("validate --complex " + broken.string()).code == 1);
    CHECK(cli("distance --complex " + tripod + " --from '[1,0]'").code != 0);

    const fs::path csv = scratch_dir() / "heat.csv";
    r = cli("heatmap --complex " + squares3 + " --set " + squares3_A + " --samples 25 --seed 3 --out " + csv.string());
    CHECK(r.code == 0);
    HeatmapOptions opt;
    opt.samples = 25;
    opt.seed = 3;
    CHECK(slurp(csv) == heatmap_csv(heatmap_serial(ex.cx, ex.A, opt), 2));
    fs::remove_all(scratch_dir());
  }
}
