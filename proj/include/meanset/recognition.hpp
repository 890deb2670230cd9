#pragma once

#include "meanset/complex.hpp"
#include "meanset/geodesic.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meanset {

/// The finite set A: labeled, located, pairwise distinct points.
struct PointSet {
  std::vector<std::string> labels;
  std::vector<Vec> points;

  int size() const { return static_cast<int>(points.size()); }
  /// Index of the element equal to x within tol, if any.
  std::optional<int> find(const Vec& x, double tol = 1e-9) const;
};

/// Validates and snaps the points. Missing labels default to a, b, c, ...
PointSet make_point_set(const CubicalComplex& cx, const std::vector<Vec>& points,
                        std::vector<std::string> labels = {});

using Weights = std::map<std::string, double>;

Weights to_weights(const PointSet& A, const Vec& w);
Vec from_weights(const PointSet& A, const Weights& w);

struct Certificate {
  enum class Kind { Membership, NonMembership };
  Kind kind = Kind::Membership;
  Weights weights;  // membership
  Vec witness;      // non-membership: strictly closer to every element of A
  Weights margins;  // d_a(xbar) - d_a(witness)
  double deficit = 0.0;
};

struct DeficitReport {
  double value = 0.0;
  std::map<CellId, double> per_cell;  // maximal cells containing xbar
  Weights weights;                    // evidence when value is zero
  Vec direction;                      // unit descent direction when value is positive
};

/// d_a(x) for every a, in the order of A.
Vec distances(const CubicalComplex& cx, const PointSet& A, const Vec& x);

/// f(x) = 1/2 max_a (d_a(x)^2 - d_a(xbar)^2).
double test_function(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, const Vec& x);

struct LineSearchResult {
  double s = 0.0;
  double value = 0.0;
};

/// Golden-section minimization of s -> f(point_along(g, s)) on [0, 1].
/// Returns s = 0 when the origin is as good as the located minimum.
LineSearchResult test_function_line_search(const CubicalComplex& cx, const PointSet& A, const Vec& xbar,
                                           const Geodesic& g);

struct InteriorResult {
  DeficitReport report;
  Certificate certificate;
  std::vector<double> contraction;  // t_a per element of A
  std::vector<Vec> straightened;    // z_a per element of A
};

/// Recognition at a point in the relative interior of a maximal cell by
/// contraction into the cell, straightening, and one min-norm projection.
InteriorResult recognize_interior(const CubicalComplex& cx, const PointSet& A, const Vec& xbar, double eps = 1e-8);

/// Mean deficit at any point of the complex; zero at points of A.
DeficitReport mean_deficit(const CubicalComplex& cx, const PointSet& A, const Vec& xbar);

/// Lower bound on the distance from xbar to the mean set: the smallest margin.
double certified_lower_bound(const Certificate& cert);

struct VerifyOptions {
  int samples = 500;
  unsigned long long seed = 1;
  double sturm_tol = 1e-7;
  double conic_tol = 1e-7;
};

struct VerificationReport {
  bool ok = true;
  std::vector<std::string> failures;
  int samples_checked = 0;
  double worst_slack = 0.0;                // min over samples of lhs - rhs
  std::map<CellId, double> conic_residual;  // membership only
};

VerificationReport verify_certificate(const CubicalComplex& cx, const PointSet& A, const Vec& xbar,
                                      const Certificate& cert, const VerifyOptions& opt = {});

/// sum_a w_a d_a(x)^p.
double weighted_objective(const CubicalComplex& cx, const PointSet& A, const Weights& w, double p, const Vec& x);

/// Uniform sample from a cell.
template <class Rng>
Vec sample_in_cell(const CubeCell& c, Rng& rng);

}  // namespace meanset

#include <random>

namespace meanset {

template <class Rng>
Vec sample_in_cell(const CubeCell& c, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec x(c.ambient_dim());
  for (int i = 0; i < c.ambient_dim(); ++i) x[i] = c.lower(i);
  for (int ax : c.axes) x[ax] += unit(rng);
  return x;
}

}  // namespace meanset
