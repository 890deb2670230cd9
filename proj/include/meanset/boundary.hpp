#pragma once

#include "meanset/convex.hpp"
#include "meanset/recognition.hpp"

#include <map>

namespace meanset {

/// Data behind the directional derivatives of d_a restricted to one cell.
struct LabelModel {
  Vec first_point;  // x_a: first breakpoint of the geodesic from xbar to a
  CellId initial_cell = -1;  // Q_a
  CubeCell face;             // F_a = C meet Q_a
  double dist = 0.0;         // d_a(xbar)
  SubdifferentialSet subdiff;
};

struct DirectionalDerivativeModel {
  Vec xbar;
  CellId cell = -1;
  TangentCone cone;  // T_C(xbar)
  std::vector<LabelModel> labels;
};

/// Requires xbar in cell C and xbar not in A. The model refers to cx, which
/// must outlive it.
DirectionalDerivativeModel derivative_model(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, CellId cell);

/// Rate of increase of d_a along u inside C; +infinity when u leaves C.
double directional_derivative(const DirectionalDerivativeModel& m, int label, const Vec& u);

struct CellProblemResult {
  CellId cell = -1;
  bool value0 = false;
  double residual = 0.0;  // distance of the subgradient hull from -N_C
  Vec direction;          // unit u with max_a f_a(u) <= -residual, when not value0
  Vec weights;            // v on A from the solve
  FeasibilityResult::Status status = FeasibilityResult::Status::Converged;
};

/// The per-cell problem: inf over u in T_C of max_a f_a(u) is 0 or -infinity.
/// `scaled` weights each subdifferential by d_a(xbar), which yields the
/// cell's mean deficit as the residual.
CellProblemResult solve_PC(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, CellId cell,
                           double tol = 1e-8, bool scaled = false);

struct GeneralResult {
  bool member = false;
  Certificate certificate;
  std::map<CellId, CellProblemResult> per_cell;
  double joint_residual = 0.0;  // membership: residual of the shared-weight solve
};

/// Recognition at an arbitrary point via the per-cell problems.
GeneralResult recognize_general(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, double eps = 1e-8);

/// Mean deficit through the per-cell formula (valid everywhere off A).
DeficitReport general_deficit(const CubicalComplex& cx, const PointSet& A, const Vec& xbar);

struct ConsistencyReport {
  bool agree = false;
  bool interior_member = false, general_member = false;
  double interior_deficit = 0.0, general_deficit = 0.0;
};

ConsistencyReport consistency_check_relint(const CubicalComplex& cx, const PointSet& A, const Vec& xbar,
                                           double tol = 1e-7);

}  // namespace meanset
