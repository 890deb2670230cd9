#pragma once

#include "meanset/complex.hpp"

#include <vector>

namespace meanset {

struct GeodesicOptions {
  int max_chain_length = 8;  // maximal cells per chain
};

/// Optimal path through a chain of maximal cells. breakpoints[0] = p,
/// breakpoints.back() = q, breakpoints[i] lies on face(c_{i-1}, c_i).
struct ChainSolution {
  double length = 0.0;
  std::vector<Vec> breakpoints;
};

/// Minimizes the polyline length through the shared faces of `chain`.
/// Endpoints need not lie in the end cells (the branch-and-bound uses this
/// for lower bounds); `warm` optionally seeds the interior breakpoints.
ChainSolution chain_length(const CubicalComplex& cx, const Vec& p, const Vec& q, const std::vector<CellId>& chain,
                           const std::vector<Vec>* warm = nullptr);

struct Geodesic {
  std::vector<Vec> breakpoints;  // y_0 = source ... y_k = target
  std::vector<CellId> cells;     // maximal cell holding segment i
  double length = 0.0;
};

Geodesic geodesic(const CubicalComplex& cx, const Vec& p, const Vec& q, const GeodesicOptions& opt = {});
double distance(const CubicalComplex& cx, const Vec& p, const Vec& q, const GeodesicOptions& opt = {});

/// Shortest path over cell vertices, in-cell straight segments and the two
/// endpoints. Infinite when q is unreachable. Always >= distance(p, q).
double vertex_graph_bound(const CubicalComplex& cx, const Vec& p, const Vec& q);

/// Point at arc length s * length from the source.
Vec point_along(const Geodesic& g, double s);
Vec midpoint(const CubicalComplex& cx, const Vec& p, const Vec& q, const GeodesicOptions& opt = {});

struct InitialSegment {
  Vec end;      // first breakpoint after the source
  CellId cell;  // smallest cell containing the initial segment
};

InitialSegment initial_direction(const CubicalComplex& cx, const Vec& from, const Vec& to,
                                 const GeodesicOptions& opt = {});
InitialSegment initial_direction(const CubicalComplex& cx, const Geodesic& g);

}  // namespace meanset
