#pragma once

#include "meanset/complex.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace meanset {

struct MinNormResult {
  Vec point;        // nearest point z of conv(points) to the anchor
  Vec weights;      // z = sum_i weights[i] * points[i], weights in the simplex
  double distance;  // |z - anchor|
  int iterations = 0;
};

/// Nearest point of conv(points) to `anchor` by Wolfe's min-norm-point algorithm.
MinNormResult min_norm_point(const std::vector<Vec>& points, const Vec& anchor);

struct BoxSegmentResult {
  double value;  // min over x in box of |a - x| + |x - b|
  Vec argmin;
};

/// Exact minimizer of |a - x| + |x - b| over an axis-aligned box. When the
/// segment [a, b] meets the box, the minimal-norm point of that piece is returned.
BoxSegmentResult box_segment_min(const Vec& a, const Vec& b, const CubeCell& box);

struct SimplexConeResult {
  Vec lambda;    // on the simplex
  Vec mu;        // nonnegative cone coefficients
  Vec residual;  // X lambda + G mu
  int iterations = 0;
  bool converged = false;
};

/// Active-set solver for min |X lambda + G mu| over lambda in the simplex and
/// mu >= 0. Columns of X are points, columns of G are cone generators.
SimplexConeResult simplex_cone_min_norm(const Eigen::MatrixXd& X, const Eigen::MatrixXd& G);

/// Subdifferential of a convex, positively homogeneous function on a cell's
/// tangent cone. Closed forms for y -> min_{x in F} |x_a - x| + |x - y| at a
/// point of F: a single gradient, or (N_F - u) intersected with the unit ball.
/// Otherwise a gradient oracle: the support point in direction w is the
/// gradient of the function at w.
class SubdifferentialSet {
 public:
  enum class Kind { Singleton, ConeBall, Oracle };
  using Gradient = std::function<Vec(const Vec&)>;

  static SubdifferentialSet singleton(Vec g);
  /// `face_cone` is the tangent cone of F at the base point; N_F is its polar.
  static SubdifferentialSet cone_ball(Vec u, TangentCone face_cone);
  /// `gradient` is queried only with nonzero directions; `element` is any
  /// member of the set.
  static SubdifferentialSet oracle(Gradient gradient, Vec element);

  Kind kind() const { return kind_; }
  const Vec& gradient() const { return g_; }
  const Vec& direction() const { return u_; }
  const TangentCone& face_cone() const { return face_; }

  /// Support function: max over g in the set of <g, w>.
  double support(const Vec& w) const;
  /// A maximizer of <g, w> over the set.
  Vec support_point(const Vec& w) const;
  /// Oracle sets only test the support inequality along g itself, so a true
  /// answer is necessary, not sufficient.
  bool contains(const Vec& g, double tol = 1e-9) const;
  /// Any element (used to seed solvers).
  Vec some_element() const;

 private:
  Kind kind_ = Kind::Singleton;
  Vec g_;
  Vec u_;
  TangentCone face_;
  Gradient grad_;
};

/// Data of the conic first-order system
///   sum_a scale_a q_{a,C} in -N_C for every cell C,
///   q_{a,C} in v_a * sets[a][C],  v in the simplex (or fixed).
struct FeasibilityProblem {
  std::vector<TangentCone> cells;                        // tangent cone T_C at the base point
  std::vector<std::vector<SubdifferentialSet>> sets;     // [label][cell]
  std::vector<double> scale;                             // per label, empty means 1
  std::optional<Vec> fixed_weights;
};

struct FeasibilityOptions {
  double zero_tol = 1e-12;   // residual treated as exactly zero
  double gap_tol = 1e-11;    // stop once residual - certified lower bound <= gap_tol
  int max_iterations = 5000;
};

struct FeasibilityResult {
  enum class Status { Converged, NotConverged };

  double residual = 0.0;      // sqrt of the minimized objective
  double lower_bound = 0.0;   // certified: no feasible point has smaller residual
  Vec weights;                // v
  std::vector<std::vector<Vec>> selectors;  // q[label][cell]
  std::vector<Vec> residual_vectors;        // per cell: s_C - proj_{-N_C}(s_C)
  std::vector<double> history;              // residual after each iteration
  int iterations = 0;
  Status status = Status::NotConverged;
};

/// Minimizes sum_C dist^2(sum_a scale_a q_{a,C}, -N_C) by simplicial
/// decomposition: exact inner solves over a growing atom set, atoms supplied by
/// the support-function oracle of each subdifferential set.
FeasibilityResult feasibility_min_norm(const FeasibilityProblem& problem, const FeasibilityOptions& options = {});

/// Euclidean projection onto the simplex.
Vec project_simplex(const Vec& v);

}  // namespace meanset
