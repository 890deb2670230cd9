#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace meanset;
using namespace meanset::testing;

namespace {

CubicalComplex unit_cube(int n) {
  CubeCell c{std::vector<int>(n, 0), {}};
  for (int i = 0; i < n; ++i) c.axes.push_back(i);
  return CubicalComplex::from_cells(n, {c});
}

// Surface in the cube on which the mean set lies, as a function of (x, z).
double surface_y(double x, double z) {
  const double r = std::hypot(x, z);
  return z * (1 + r) / (x + r);
}

}  // namespace

TEST_SUITE("recognition") {
  TEST_CASE("point sets") {
    const Example ex = load_example("squares3");
    CHECK(ex.A.labels == std::vector<std::string>{"a", "b", "c"});
    const PointSet B = make_point_set(ex.cx, {vec({1, 0}), vec({0, 1})});
    CHECK(B.labels == std::vector<std::string>{"a", "b"});
    CHECK(B.find(vec({0, 1 + 1e-12})) == 1);
    CHECK_THROWS_AS(make_point_set(ex.cx, {vec({1, 0}), vec({1, 0})}), InputError);
    CHECK_THROWS_AS(make_point_set(ex.cx, {vec({1, 0, 0})}), InputError);
    CHECK_THROWS_AS(make_point_set(ex.cx, {vec({1, 0}), vec({0, 1})}, {"x", "x"}), InputError);
    CHECK_THROWS_AS(make_point_set(ex.cx, {vec({0.5, 0.5})}), GeometryError);
    CHECK_THROWS_AS(make_point_set(ex.cx, {}), InputError);

    const Weights w = to_weights(ex.A, vec({0.5, 0.25, 0.25}));
    CHECK(w.at("b") == 0.25);
    CHECK((from_weights(ex.A, w) - vec({0.5, 0.25, 0.25})).norm() == 0.0);
    CHECK_THROWS_AS(from_weights(ex.A, {{"z", 1.0}}), InputError);
  }

  TEST_CASE("test function") {
    const Example ex = load_example("quadrant_window");
    const Vec xbar = vec({0, -1});
    CHECK(test_function(ex.cx, ex.A, xbar, xbar) == 0.0);
    const double s3 = std::sqrt(3.0);
    for (double t : {0.0, 0.2, 0.5, 1.0, s3}) {
      const double expected = 0.5 * std::max((1 + t) * (1 + t) - 4, (s3 - t) * (s3 - t) - 4);
      CHECK(test_function(ex.cx, ex.A, xbar, vec({t, 0})) == doctest::Approx(expected).epsilon(1e-12));
    }
    // Strictly closer to both points.
    CHECK(test_function(ex.cx, ex.A, xbar, vec({0.3, -0.5})) < 0.0);
  }

  TEST_CASE("line search") {
    const Example ex = load_example("quadrant_window");
    const auto& ls = ex.expected["line_search"];
    const Geodesic g = geodesic(ex.cx, vec_from_json(ls["from"]), vec_from_json(ls["to"]));
    const LineSearchResult r = test_function_line_search(ex.cx, ex.A, vec_from_json(ls["xbar"]), g);
    CHECK(point_along(g, r.s)[0] == doctest::Approx(ls["t"].get<double>()).epsilon(1e-7));
    CHECK(r.value < 0.0);

    // From a mean the test function cannot decrease: the tie goes to s = 0.
    const Example tri = load_example("tripod");
    const Geodesic up = geodesic(tri.cx, vec({0, 0}), vec({0, 1}));
    const LineSearchResult t0 = test_function_line_search(tri.cx, tri.A, vec({0, 0}), up);
    CHECK(t0.s == 0.0);
    CHECK(t0.value == 0.0);

    // Toward a non-membership witness the value becomes negative.
    const Example cs = load_example("cube_square");
    const Vec xbar = vec({0.5, 1.0 / 3, 0.25});
    const InteriorResult ir = recognize_interior(cs.cx, cs.A, xbar);
    const Geodesic toward = geodesic(cs.cx, xbar, ir.certificate.witness);
    CHECK(test_function_line_search(cs.cx, cs.A, xbar, toward).value < 0.0);
  }

  TEST_CASE("interior recognition in the cube") {
    const Example ex = load_example("cube_square");
    for (double t : {0.05, 0.1, 0.2}) {
      const Vec x = vec({4 * t, (1 + 5 * t) / 3, 3 * t});
      const InteriorResult r = recognize_interior(ex.cx, ex.A, x);
      CHECK(r.certificate.kind == Certificate::Kind::Membership);
      CHECK(r.report.value <= 1e-6);
      CHECK(x[1] == doctest::Approx(surface_y(x[0], x[2])).epsilon(1e-12));
    }
    const InteriorResult off = recognize_interior(ex.cx, ex.A, vec({0.5, 1.0 / 3, 0.25}));
    CHECK(off.certificate.kind == Certificate::Kind::NonMembership);
    CHECK(off.report.value > 0.0);
    for (const auto& [label, m] : off.certificate.margins) CHECK(m > 1e-10);
    // q is reached through the edge, so its contraction is below 1.
    CHECK(off.contraction[1] < 1.0);
    CHECK(off.contraction[0] == 1.0);

    CHECK_THROWS_AS(recognize_interior(ex.cx, ex.A, vec({1, 0, 0})), InputError);
    CHECK_THROWS_AS(recognize_interior(ex.cx, ex.A, vec({0, 0.5, 0})), GeometryError);
  }

  TEST_CASE("single cube midpoint has equal weights") {
    const CubicalComplex cx = unit_cube(3);
    const PointSet A = make_point_set(cx, {vec({0, 0, 0}), vec({1, 1, 1})});
    const InteriorResult r = recognize_interior(cx, A, vec({0.5, 0.5, 0.5}));
    REQUIRE(r.certificate.kind == Certificate::Kind::Membership);
    CHECK(r.certificate.weights.at("a") == doctest::Approx(0.5));
    CHECK(r.certificate.weights.at("b") == doctest::Approx(0.5));
    CHECK(verify_certificate(cx, A, vec({0.5, 0.5, 0.5}), r.certificate).ok);
  }

  TEST_CASE("mean deficit examples") {
    const Example tri = load_example("tripod");
    for (const auto& row : tri.expected["deficits"]) {
      CHECK(mean_deficit(tri.cx, tri.A, vec_from_json(row["at"])).value ==
            doctest::Approx(row["value"].get<double>()).epsilon(1e-9));
    }
    const Example sq = load_example("squares3");
    CHECK(mean_deficit(sq.cx, sq.A, vec({0.5, -0.5})).value == doctest::Approx(0.5).epsilon(1e-9));
    const DeficitReport at_a = mean_deficit(sq.cx, sq.A, vec({1, 0}));
    CHECK(at_a.value == 0.0);
    CHECK(at_a.weights.at("a") == 1.0);
  }

  TEST_CASE("corpus members and non-members") {
    for (const char* name : {"tripod", "squares3", "squares5", "cube_square", "quadrant_window"}) {
      CAPTURE(name);
      const Example ex = load_example(name);
      for (const auto& p : ex.expected["members"]) CHECK(mean_deficit(ex.cx, ex.A, vec_from_json(p)).value <= 1e-8);
      for (const auto& p : ex.expected["nonmembers"]) CHECK(mean_deficit(ex.cx, ex.A, vec_from_json(p)).value > 1e-3);
    }
  }

  TEST_CASE("certified lower bounds") {
    Certificate c;
    c.kind = Certificate::Kind::NonMembership;
    c.margins = {{"a", 0.2}, {"b", 0.05}, {"c", 0.4}};
    CHECK(certified_lower_bound(c) == 0.05);
    c.margins["b"] = 0.0;
    CHECK_THROWS_AS(certified_lower_bound(c), InputError);
    CHECK_THROWS_AS(certified_lower_bound(Certificate{}), InputError);

    // In the cube, the true distance to the mean set along the line through
    // xbar in y is a bound from above for the distance to the set.
    const Example ex = load_example("cube_square");
    const Vec xbar = vec({0.5, 1.0 / 3, 0.25});
    const double lb = certified_lower_bound(recognize_interior(ex.cx, ex.A, xbar).certificate);
    CHECK(lb > 0.0);
    CHECK(lb <= std::abs(surface_y(0.5, 0.25) - 1.0 / 3));

    // Two points on opposite sides of a flat rectangle: the mean set is the
    // segment x = 0 at distance 1, the bound never exceeds sqrt(2) - 1.
    const CubicalComplex rect = CubicalComplex::from_cells(2, {{{0, -1}, {0, 1}}, {{0, 0}, {0, 1}}});
    const PointSet A = make_point_set(rect, {vec({0, -1}), vec({0, 1})});
    for (const Vec& x : {vec({1, 0}), vec({0.5, 0}), vec({1, 0.5})}) {
      const GeneralResult r = recognize_general(rect, A, x);
      REQUIRE(r.certificate.kind == Certificate::Kind::NonMembership);
      const double b = certified_lower_bound(r.certificate);
      CHECK(b > 0.0);
      CHECK(b <= x[0] + 1e-12);
      CHECK(b <= std::sqrt(2.0) - 1 + 1e-12);
    }
  }

  TEST_CASE("certificate verification") {
    const Example ex = load_example("squares3");
    Certificate c;
    c.weights = {{"a", 0.75}, {"b", 0.25}, {"c", 0.0}};
    const VerificationReport ok = verify_certificate(ex.cx, ex.A, vec({0.5, 0}), c);
    CHECK(ok.ok);
    CHECK(ok.samples_checked == 500);
    CHECK(ok.worst_slack >= -1e-7);

    CHECK_FALSE(verify_certificate(ex.cx, ex.A, vec({0.5, -0.3}), c).ok);
    Certificate wrong = c;
    wrong.weights = {{"a", 0.25}, {"b", 0.75}, {"c", 0.0}};
    CHECK_FALSE(verify_certificate(ex.cx, ex.A, vec({0.5, 0}), wrong).ok);

    Certificate bad_witness;
    bad_witness.kind = Certificate::Kind::NonMembership;
    bad_witness.witness = vec({0.5, 0});
    CHECK_FALSE(verify_certificate(ex.cx, ex.A, vec({0.5, 0}), bad_witness).ok);
  }

  TEST_CASE("weighted objective") {
    const Example tri = load_example("tripod");
    CHECK(weighted_objective(tri.cx, tri.A, {{"a", 0.5}, {"b", 0.5}}, 2, vec({0, 0})) == doctest::Approx(1.0));
    CHECK(weighted_objective(tri.cx, tri.A, {{"a", 0.5}, {"b", 0.5}}, 1, vec({0, 0})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(weighted_objective(tri.cx, tri.A, {{"a", 1.0}}, 0.5, vec({0, 0})), InputError);

    // A verified weight vector makes xbar the weighted barycenter.
    const Example cs = load_example("cube_square");
    const Vec x = vec({0.4, 0.5, 0.3});
    const Weights w = recognize_interior(cs.cx, cs.A, x).certificate.weights;
    const double at = weighted_objective(cs.cx, cs.A, w, 2, x);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 100; ++k) {
      const Vec y = sample_in_cell(cs.cx.cell(k % 2), rng);
      CHECK(at <= weighted_objective(cs.cx, cs.A, w, 2, y) + 1e-10);
    }
  }

  TEST_CASE("Euclidean cube: deficit is the hull distance") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 60; ++k) {
      const int n = 1 + k % 4;
      const CubicalComplex cx = unit_cube(n);
      std::vector<Vec> pts;
      for (int j = 0; j < 1 + k % 6; ++j) pts.push_back(sample_in_cell(cx.cell(0), rng));
      const PointSet A = make_point_set(cx, pts);
      const Vec x = sample_in_cell(cx.cell(0), rng);
      const InteriorResult r = recognize_interior(cx, A, x);
      CHECK(r.report.value == doctest::Approx(min_norm_point(pts, x).distance).epsilon(1e-9));
      CHECK(r.report.value == doctest::Approx(hull_distance_bruteforce(pts, x)).epsilon(1e-9));
    }
  }

  TEST_CASE("relabeling A does not change the answer") {
    const Example ex = load_example("cube_square");
    std::vector<int> order = {2, 0, 1};
    std::vector<Vec> pts;
    std::vector<std::string> labels;
    for (int i : order) {
      pts.push_back(ex.A.points[i]);
      labels.push_back(ex.A.labels[i]);
    }
    const PointSet B = make_point_set(ex.cx, pts, labels);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 30; ++k) {
      Vec x = sample_in_cell(ex.cx.cell(1), rng);
      if (k < 3) x = vec({0.2 * (k + 1), (1 + 0.25 * (k + 1)) / 3, 0.15 * (k + 1)});
      const InteriorResult r1 = recognize_interior(ex.cx, ex.A, x), r2 = recognize_interior(ex.cx, B, x);
      CHECK(r1.certificate.kind == r2.certificate.kind);
      CHECK(r1.report.value == doctest::Approx(r2.report.value).epsilon(1e-9));
      for (const auto& [label, w] : r1.certificate.weights) CHECK(std::abs(w - r2.certificate.weights.at(label)) < 1e-6);
    }
  }

  TEST_CASE("small deficit agrees with a verifiable membership certificate") {
    for (const char* name : {"squares3", "squares5", "cube_square"}) {
      const Example ex = load_example(name);
      for (const auto& p : ex.expected["members"]) {
        const LocatedPoint loc = ex.cx.locate(vec_from_json(p));
        if (!ex.cx.is_maximal(loc.minimal_cell)) continue;
        const InteriorResult r = recognize_interior(ex.cx, ex.A, loc.coords);
        CHECK(r.report.value <= 1e-8);
        VerifyOptions opt;
        opt.samples = 200;
        CHECK(verify_certificate(ex.cx, ex.A, loc.coords, r.certificate, opt).ok);
      }
    }
  }
}
