#include "meanset/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace meanset {

namespace {

constexpr double kDegenerate = 1e-7;  // initial segment shorter than this inside F_a counts as a point
constexpr int kBisectionCap = 60;
constexpr double kMarginFloor = 1e-10;

// Length of the part of the segment from x toward y that stays in the box.
double extent_in_box(const Vec& x, const Vec& y, const CubeCell& box) {
  const Vec d = y - x;
  double t = 1.0;
  for (int i = 0; i < box.ambient_dim(); ++i) {
    if (d[i] > 0) t = std::min(t, (box.upper(i) - x[i]) / d[i]);
    else if (d[i] < 0) t = std::min(t, (box.lower(i) - x[i]) / d[i]);
  }
  return std::max(t, 0.0) * d.norm();
}

// Within this distance of xbar the complex is the cone over the link of xbar:
// non-integer coordinates bound it by the distance to the nearest integer.
double star_radius(const Vec& xbar) {
  double r = 1.0;
  for (int i = 0; i < xbar.size(); ++i) {
    const double f = xbar[i] - std::floor(xbar[i]);
    if (f > 0.0) r = std::min({r, f, 1.0 - f});
  }
  return r;
}

// Directional derivative of d_a at xbar along directions of the cell, read off
// the local cone. With y = xbar + t u and p = xbar + t v (v the initial
// direction toward a), the triangle xbar, y, p is flat, so the angle theta at
// xbar and the developed direction of v seen from C come from one geodesic.
// The derivative along u is -|u| cos(theta) and its gradient is -v developed.
SubdifferentialSet local_cone_subdifferential(const CubicalComplex& cx, const Vec& xbar, const TangentCone& cone,
                                              const Vec& v) {
  const double t = 0.25 * star_radius(xbar);
  const Vec p = xbar + t * v;
  // Fallback direction for w with no component in T_C: any admissible one.
  Vec fallback = cone.project(v);
  for (int i = 0; i < v.size() && fallback.norm() == 0.0; ++i) {
    if (cone.axis[i] != AxisConstraint::Fixed) fallback[i] = cone.axis[i] == AxisConstraint::NonPositive ? -1.0 : 1.0;
  }
  fallback.normalize();
  auto gradient = [&cx, xbar, cone, p, t, fallback](const Vec& w) -> Vec {
    const Vec u = cone.project(w);
    const double norm = u.norm();
    const Vec uhat = norm > 0.0 ? Vec(u / norm) : fallback;
    const Vec y = xbar + t * uhat;
    const Geodesic g = geodesic(cx, y, p);
    const double s = g.length / (2.0 * t);  // sin(theta / 2)
    if (s >= 1.0 - 1e-12) return uhat;      // the geodesic runs through xbar
    if (s <= 1e-12 || g.breakpoints.size() < 2) return -uhat;
    const double theta = 2.0 * std::asin(s), c = std::cos(0.5 * theta);
    const Vec eta = (g.breakpoints[1] - y).normalized();
    const Vec perp = (eta + s * uhat) / c;
    return -(std::cos(theta) * uhat + std::sin(theta) * perp);
  };
  return SubdifferentialSet::oracle(gradient, gradient(Vec::Zero(xbar.size())));
}

FeasibilityProblem cell_problem(const DirectionalDerivativeModel& m, bool scaled) {
  FeasibilityProblem prob;
  prob.cells = {m.cone};
  for (const LabelModel& lm : m.labels) {
    prob.sets.push_back({lm.subdiff});
    if (scaled) prob.scale.push_back(lm.dist);
  }
  return prob;
}

}  // namespace

DirectionalDerivativeModel derivative_model(const CubicalComplex& cx, const PointSet& A, const Vec& xbar_in,
                                            CellId cell) {
  const LocatedPoint loc = cx.locate(xbar_in);
  const Vec& xbar = loc.coords;
  if (A.find(xbar)) throw InputError("the query point belongs to A");
  DirectionalDerivativeModel m;
  m.xbar = xbar;
  m.cell = cell;
  m.cone = cx.tangent_cone(cell, xbar);
  for (int i = 0; i < A.size(); ++i) {
    const Geodesic g = geodesic(cx, xbar, A.points[i]);
    const InitialSegment seg = initial_direction(cx, g);
    LabelModel lm;
    lm.first_point = seg.end;
    lm.initial_cell = seg.cell;
    lm.dist = g.length;
    auto face = intersect(cx.cell(cell), cx.cell(seg.cell));
    if (!face) throw GeometryError("initial cell does not meet the cell at the query point");
    lm.face = *face;
    const Vec u = (seg.end - xbar).normalized();
    if (extent_in_box(xbar, seg.end, lm.face) > kDegenerate) {
      lm.subdiff = SubdifferentialSet::singleton(-u);
    } else {
      lm.subdiff = local_cone_subdifferential(cx, xbar, m.cone, u);
    }
    m.labels.push_back(std::move(lm));
  }
  return m;
}

double directional_derivative(const DirectionalDerivativeModel& m, int label, const Vec& u) {
  if (!m.cone.admits(u, 1e-12)) return std::numeric_limits<double>::infinity();
  return m.labels.at(label).subdiff.support(u);
}

CellProblemResult solve_PC(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, CellId cell, double tol,
                           bool scaled) {
  const DirectionalDerivativeModel m = derivative_model(cx, A, xbar, cell);
  const FeasibilityResult res = feasibility_min_norm(cell_problem(m, scaled));
  CellProblemResult out;
  out.cell = cell;
  out.residual = res.residual;
  out.weights = res.weights;
  out.status = res.status;
  out.value0 = res.residual <= tol;
  if (!out.value0) out.direction = -res.residual_vectors.front() / res.residual;
  return out;
}

namespace {

// Shared weights v over all cells at xbar, then w_a proportional to v_a / d_a.
std::pair<Vec, double> joint_weights(const CubicalComplex& cx, const PointSet& A, const Vec& xbar,
                                     const std::vector<CellId>& cells) {
  FeasibilityProblem prob;
  prob.sets.assign(A.size(), {});
  Vec d;
  for (CellId c : cells) {
    const DirectionalDerivativeModel m = derivative_model(cx, A, xbar, c);
    prob.cells.push_back(m.cone);
    d.resize(A.size());
    for (int i = 0; i < A.size(); ++i) {
      prob.sets[i].push_back(m.labels[i].subdiff);
      d[i] = m.labels[i].dist;
    }
  }
  const FeasibilityResult res = feasibility_min_norm(prob);
  Vec w = res.weights.cwiseQuotient(d);
  w /= w.sum();
  return {w, res.residual};
}

}  // namespace

DeficitReport general_deficit(const CubicalComplex& cx, const PointSet& A, const Vec& xbar_in) {
  const LocatedPoint loc = cx.locate(xbar_in);
  const Vec& xbar = loc.coords;
  DeficitReport rep;
  const std::vector<CellId> cells = cx.maximal_cells_containing(loc);
  if (auto i = A.find(xbar)) {
    for (CellId c : cells) rep.per_cell[c] = 0.0;
    Vec w = Vec::Zero(A.size());
    w[*i] = 1.0;
    rep.weights = to_weights(A, w);
    return rep;
  }
  CellProblemResult worst;
  for (CellId c : cells) {
    const CellProblemResult r = solve_PC(cx, A, xbar, c, 0.0, true);
    rep.per_cell[c] = r.residual;
    if (r.residual > rep.value) {
      rep.value = r.residual;
      worst = r;
    }
  }
  if (rep.value > 0.0 && worst.direction.size() > 0) {
    rep.direction = worst.direction;
  } else {
    rep.weights = to_weights(A, joint_weights(cx, A, xbar, cells).first);
  }
  return rep;
}

GeneralResult recognize_general(const CubicalComplex& cx, const PointSet& A, const Vec& xbar_in, double eps) {
  const LocatedPoint loc = cx.locate(xbar_in);
  const Vec& xbar = loc.coords;
  GeneralResult out;
  if (auto i = A.find(xbar)) {
    out.member = true;
    Vec w = Vec::Zero(A.size());
    w[*i] = 1.0;
    out.certificate.weights = to_weights(A, w);
    return out;
  }

  // The decision compares the mean deficit (scaled problems) with eps; the
  // unscaled problems are reported per cell.
  const std::vector<CellId> cells = cx.maximal_cells_containing(loc);
  CellProblemResult worst;
  double deficit = 0.0;
  for (CellId c : cells) {
    out.per_cell[c] = solve_PC(cx, A, xbar, c);
    CellProblemResult scaled = solve_PC(cx, A, xbar, c, eps, true);
    if (worst.cell < 0 || scaled.residual > deficit) {
      deficit = std::max(deficit, scaled.residual);
      worst = std::move(scaled);
    }
  }
  out.certificate.deficit = deficit;

  if (deficit > eps) {
    out.member = false;
    const Vec d0 = distances(cx, A, xbar);
    const CubeCell& cell = cx.cell(worst.cell);
    double t = 1.0;
    for (int step = 0; step <= kBisectionCap; ++step, t *= 0.5) {
      // The direction lies in T_C up to rounding; clamping removes the rest.
      const Vec y = cell.clamp(xbar + t * worst.direction);
      const Vec d1 = distances(cx, A, y);
      if (((d0 - d1).array() > kMarginFloor).all()) {
        out.certificate.kind = Certificate::Kind::NonMembership;
        out.certificate.witness = y;
        out.certificate.margins = to_weights(A, d0 - d1);
        return out;
      }
    }
    throw GeometryError("no step along the descent direction decreases every distance");
  }

  out.member = true;
  auto [w, residual] = joint_weights(cx, A, xbar, cells);
  out.joint_residual = residual;
  if (deficit <= 1e-8 && residual > 1e-6) {
    throw Error("shared certificate weights not found (residual " + std::to_string(residual) + ")");
  }
  out.certificate.kind = Certificate::Kind::Membership;
  out.certificate.weights = to_weights(A, w);
  return out;
}

ConsistencyReport consistency_check_relint(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, double tol) {
  ConsistencyReport rep;
  const InteriorResult in = recognize_interior(cx, A, xbar);
  const GeneralResult gen = recognize_general(cx, A, xbar);
  rep.interior_member = in.certificate.kind == Certificate::Kind::Membership;
  rep.general_member = gen.member;
  rep.interior_deficit = in.report.value;
  rep.general_deficit = gen.certificate.deficit;
  rep.agree = rep.interior_member == rep.general_member && std::abs(rep.interior_deficit - rep.general_deficit) <= tol;
  return rep;
}

}  // namespace meanset
