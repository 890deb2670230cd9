#include "meanset/recognition.hpp"

#include "meanset/boundary.hpp"
#include "meanset/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace meanset {

namespace {

constexpr int kHalvingCap = 60;
constexpr double kMarginFloor = 1e-10;

std::string default_label(int i) {
  if (i < 26) return std::string(1, static_cast<char>('a' + i));
  return "a" + std::to_string(i);
}

std::string format_point(const Vec& x) {
  std::ostringstream os;
  os.precision(12);
  os << "[";
  for (int i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << "]";
  return os.str();
}

}  // namespace

std::optional<int> PointSet::find(const Vec& x, double tol) const {
  for (int i = 0; i < size(); ++i) {
    if ((points[i] - x).lpNorm<Eigen::Infinity>() <= tol) return i;
  }
  return std::nullopt;
}

PointSet make_point_set(const CubicalComplex& cx, const std::vector<Vec>& points, std::vector<std::string> labels) {
  if (points.empty()) throw InputError("the point set is empty");
  if (labels.empty()) {
    for (std::size_t i = 0; i < points.size(); ++i) labels.push_back(default_label(static_cast<int>(i)));
  }
  if (labels.size() != points.size()) throw InputError("label count does not match point count");
  PointSet A;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != cx.ambient_dim()) throw InputError("point " + labels[i] + " has wrong dimension");
    const Vec p = cx.locate(points[i]).coords;
    if (A.find(p)) throw InputError("point " + labels[i] + " repeats an earlier point");
    if (std::find(A.labels.begin(), A.labels.end(), labels[i]) != A.labels.end()) {
      throw InputError("duplicate label " + labels[i]);
    }
    A.labels.push_back(labels[i]);
    A.points.push_back(p);
  }
  return A;
}

Weights to_weights(const PointSet& A, const Vec& w) {
  Weights out;
  for (int i = 0; i < A.size(); ++i) out[A.labels[i]] = w[i];
  return out;
}

Vec from_weights(const PointSet& A, const Weights& w) {
  Vec out = Vec::Zero(A.size());
  for (int i = 0; i < A.size(); ++i) {
    auto it = w.find(A.labels[i]);
    if (it != w.end()) out[i] = it->second;
  }
  for (const auto& [label, value] : w) {
    if (std::find(A.labels.begin(), A.labels.end(), label) == A.labels.end()) {
      throw InputError("weight for unknown label " + label);
    }
  }
  return out;
}

Vec distances(const CubicalComplex& cx, const PointSet& A, const Vec& x) {
  Vec d(A.size());
  for (int i = 0; i < A.size(); ++i) d[i] = distance(cx, A.points[i], x);
  return d;
}

double test_function(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, const Vec& x) {
  const Vec d0 = distances(cx, A, xbar), d1 = distances(cx, A, x);
  return 0.5 * (d1.array().square() - d0.array().square()).maxCoeff();
}

LineSearchResult test_function_line_search(const CubicalComplex& cx, const PointSet& A, const Vec& xbar,
                                           const Geodesic& g) {
  const Vec d0 = distances(cx, A, xbar);
  auto f = [&](double s) {
    const Vec d = distances(cx, A, point_along(g, s));
    return 0.5 * (d.array().square() - d0.array().square()).maxCoeff();
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-9) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  LineSearchResult best{0.5 * (lo + hi), f(0.5 * (lo + hi))};
  const double at_one = f(1.0);
  if (at_one < best.value) best = {1.0, at_one};
  const double at_zero = f(0.0);
  if (at_zero <= best.value + 1e-12) best = {0.0, at_zero};
  return best;
}

namespace {

struct Straightened {
  CellId cell = -1;
  Vec d;
  std::vector<double> contraction;
  std::vector<Vec> points;
  MinNormResult mnp;
};

Straightened straighten(const CubicalComplex& cx, const PointSet& A, const LocatedPoint& loc) {
  const Vec& xbar = loc.coords;
  if (A.find(xbar)) throw InputError("the query point belongs to A");
  if (!cx.is_maximal(loc.minimal_cell)) {
    throw GeometryError("the query point is not interior to a maximal cell; use the general recognizer");
  }
  Straightened s;
  s.cell = loc.minimal_cell;
  const CubeCell& cell = cx.cell(s.cell);
  const int m = A.size();
  s.d.resize(m);
  for (int i = 0; i < m; ++i) {
    const Geodesic g = geodesic(cx, xbar, A.points[i]);
    s.d[i] = g.length;
    double t = 1.0;
    Vec x = A.points[i];
    int halvings = 0;
    // Halving along the geodesic is the same as repeated midpoints toward xbar.
    while (!cell.contains(x)) {
      if (++halvings > kHalvingCap) throw GeometryError("contraction did not enter the cell");
      t *= 0.5;
      x = point_along(g, t);
    }
    x = cell.clamp(x);
    s.contraction.push_back(t);
    s.points.push_back(xbar + (x - xbar) / t);
  }
  s.mnp = min_norm_point(s.points, xbar);
  return s;
}

DeficitReport interior_report(const PointSet& A, const Vec& xbar, const Straightened& s) {
  DeficitReport rep;
  rep.value = s.mnp.distance;
  rep.per_cell[s.cell] = s.mnp.distance;
  if (s.mnp.distance > 0.0) {
    rep.direction = (s.mnp.point - xbar) / s.mnp.distance;
  } else {
    rep.weights = to_weights(A, s.mnp.weights);
  }
  return rep;
}

}  // namespace

InteriorResult recognize_interior(const CubicalComplex& cx, const PointSet& A, const Vec& xbar_in, double eps) {
  const LocatedPoint loc = cx.locate(xbar_in);
  const Vec& xbar = loc.coords;
  Straightened s = straighten(cx, A, loc);
  const CubeCell& cell = cx.cell(s.cell);
  const Vec& d = s.d;
  const MinNormResult& mnp = s.mnp;

  InteriorResult out;
  out.contraction = s.contraction;
  out.straightened = s.points;
  DeficitReport& rep = out.report;
  rep = interior_report(A, xbar, s);
  Certificate& cert = out.certificate;
  cert.deficit = mnp.distance;

  if (mnp.distance <= eps) {
    cert.kind = Certificate::Kind::Membership;
    cert.weights = to_weights(A, mnp.weights);
    rep.weights = cert.weights;
    return out;
  }

  cert.kind = Certificate::Kind::NonMembership;
  // Halve from zhat toward xbar; if the margins get lost in rounding first,
  // retry with unit steps along the same direction.
  auto accept = [&](const Vec& z) {
    if (!cell.contains(z, 0.0)) return false;
    return ((d - distances(cx, A, z)).array() > kMarginFloor).all();
  };
  for (const Vec& start : {Vec(mnp.point), Vec(xbar + rep.direction)}) {
    Vec z = start;
    for (int h = 0; h <= kHalvingCap; ++h, z = 0.5 * (z + xbar)) {
      if (!accept(z)) continue;
      cert.witness = z;
      cert.margins = to_weights(A, d - distances(cx, A, z));
      return out;
    }
  }
  throw GeometryError("no witness with margins above rounding; the deficit " + std::to_string(mnp.distance) +
                      " is too small to certify");
}

DeficitReport mean_deficit(const CubicalComplex& cx, const PointSet& A, const Vec& xbar_in) {
  const LocatedPoint loc = cx.locate(xbar_in);
  if (auto i = A.find(loc.coords)) {
    DeficitReport rep;
    for (CellId c : cx.maximal_cells_containing(loc)) rep.per_cell[c] = 0.0;
    Vec w = Vec::Zero(A.size());
    w[*i] = 1.0;
    rep.weights = to_weights(A, w);
    return rep;
  }
  if (cx.is_maximal(loc.minimal_cell)) return interior_report(A, loc.coords, straighten(cx, A, loc));
  return general_deficit(cx, A, loc.coords);
}

double certified_lower_bound(const Certificate& cert) {
  if (cert.kind != Certificate::Kind::NonMembership) throw InputError("lower bounds need a non-membership certificate");
  if (cert.margins.empty()) throw InputError("certificate has no margins");
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& [label, margin] : cert.margins) {
    if (!(margin > kMarginFloor)) throw InputError("certificate margin for " + label + " is not positive");
    lo = std::min(lo, margin);
  }
  return lo;
}

VerificationReport verify_certificate(const CubicalComplex& cx, const PointSet& A, const Vec& xbar_in,
                                      const Certificate& cert, const VerifyOptions& opt) {
  VerificationReport rep;
  const LocatedPoint loc = cx.locate(xbar_in);
  const Vec& xbar = loc.coords;
  const Vec d0 = distances(cx, A, xbar);

  if (cert.kind == Certificate::Kind::NonMembership) {
    if (cert.witness.size() != xbar.size()) {
      rep.ok = false;
      rep.failures.push_back("witness has wrong dimension");
      return rep;
    }
    const Vec d1 = distances(cx, A, cert.witness);
    for (int i = 0; i < A.size(); ++i) {
      if (!(d1[i] < d0[i])) {
        rep.ok = false;
        rep.failures.push_back("witness is not closer to " + A.labels[i]);
      }
    }
    return rep;
  }

  const Vec w = from_weights(A, cert.weights);
  if (w.minCoeff() < -1e-12 || std::abs(w.sum() - 1.0) > 1e-9) {
    rep.ok = false;
    rep.failures.push_back("weights are not in the simplex");
    return rep;
  }
  const double base = w.dot(d0.array().square().matrix());

  // Sampled variance inequality: half the samples anywhere, half near xbar.
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick_cell(0, cx.num_maximal() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<CellId> around = cx.maximal_cells_containing(loc);
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < opt.samples; ++s) {
    Vec x;
    if (s % 2 == 0) {
      x = sample_in_cell(cx.cell(static_cast<CellId>(pick_cell(rng))), rng);
    } else {
      const CubeCell& c = cx.cell(around[static_cast<std::size_t>(unit(rng) * around.size()) % around.size()]);
      const double r = std::pow(10.0, -4.0 * unit(rng));
      x = c.clamp(xbar + r * (sample_in_cell(c, rng) - xbar));
    }
    const Vec d = distances(cx, A, x);
    const double dx = distance(cx, x, xbar);
    const double slack = w.dot(d.array().square().matrix()) - base - dx * dx;
    rep.worst_slack = std::min(rep.worst_slack, slack);
    ++rep.samples_checked;
    if (slack < -opt.sturm_tol) {
      rep.ok = false;
      rep.failures.push_back("variance inequality fails at " + format_point(x));
    }
  }

  // First-order condition per cell with v proportional to w_a d_a(xbar).
  if (!A.find(xbar)) {
    Vec v = w.cwiseProduct(d0);
    v /= v.sum();
    for (CellId c : around) {
      const DirectionalDerivativeModel model = derivative_model(cx, A, xbar, c);
      FeasibilityProblem prob;
      prob.cells = {model.cone};
      for (const LabelModel& lm : model.labels) prob.sets.push_back({lm.subdiff});
      prob.fixed_weights = v;
      const FeasibilityResult res = feasibility_min_norm(prob);
      rep.conic_residual[c] = res.residual;
      if (res.residual > opt.conic_tol) {
        rep.ok = false;
        rep.failures.push_back("first-order condition fails in cell " + cx.cell(c).label());
      }
    }
  }
  return rep;
}

double weighted_objective(const CubicalComplex& cx, const PointSet& A, const Weights& w, double p, const Vec& x) {
  if (!(p >= 1.0)) throw InputError("exponent must be at least 1");
  const Vec wv = from_weights(A, w);
  const Vec d = distances(cx, A, x);
  return wv.dot(d.array().pow(p).matrix());
}

}  // namespace meanset
