#pragma once

#include <Eigen/Dense>

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace meanset {

using Vec = Eigen::VectorXd;
using CellId = int;

/// Coordinates within this distance of an integer are snapped onto it.
inline constexpr double kSnapTol = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (documents, point files, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A geometric precondition failed (point outside complex, no chain, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned unit cube { base + sum_{i in axes} t_i e_i : t_i in [0,1] }.
struct CubeCell {
  std::vector<int> base;
  std::vector<int> axes;  // sorted, distinct

  int dim() const { return static_cast<int>(axes.size()); }
  int ambient_dim() const { return static_cast<int>(base.size()); }
  bool has_axis(int i) const;
  double lower(int i) const { return base[i]; }
  double upper(int i) const { return has_axis(i) ? base[i] + 1 : base[i]; }

  /// Containment with tolerance `tol` on every coordinate.
  bool contains(const Vec& p, double tol = kSnapTol) const;
  bool is_face_of(const CubeCell& other) const;
  /// Nearest point of the cell (coordinate-wise clamp).
  Vec clamp(const Vec& p) const;
  std::string label() const;

  auto operator<=>(const CubeCell&) const = default;
};

/// Ambient intersection of two cells; it is always a common face.
std::optional<CubeCell> intersect(const CubeCell& a, const CubeCell& b);

struct LocatedPoint {
  Vec coords;                          // snapped
  std::vector<CellId> containing_cells;  // every cell of the face lattice containing coords
  CellId minimal_cell = -1;
};

/// Per ambient axis constraint of the tangent cone of a cell at a point.
enum class AxisConstraint {
  Fixed,        // axis not free in the cell: direction component is 0
  Free,         // interior coordinate: any sign
  NonNegative,  // on the lower face
  NonPositive,  // on the upper face
};

struct TangentCone {
  CellId cell = -1;
  std::vector<AxisConstraint> axis;

  bool admits(const Vec& u, double tol = 0.0) const;
  /// Euclidean projection onto the tangent cone.
  Vec project(const Vec& u) const;
};

/// Euclidean projection of v onto the polar (normal) cone of `cone`.
Vec normal_cone_project(const TangentCone& cone, const Vec& v);

class CubicalComplex {
 public:
  /// Builds the face lattice. Cell ids: maximal cells first, then the
  /// remaining faces; each group sorted by (base, axes).
  static CubicalComplex from_cells(int ambient_dim, std::vector<CubeCell> maximal);

  int ambient_dim() const { return dim_; }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_maximal() const { return num_maximal_; }
  bool is_maximal(CellId id) const { return id >= 0 && static_cast<std::size_t>(id) < num_maximal_; }
  const CubeCell& cell(CellId id) const { return cells_.at(id); }
  const std::vector<CubeCell>& cells() const { return cells_; }
  std::optional<CellId> find(const CubeCell& c) const;

  /// Cells having `id` as a face (including `id` itself), sorted.
  const std::vector<CellId>& cofaces(CellId id) const { return cofaces_.at(id); }
  /// Maximal cells whose intersection with maximal cell `id` is nonempty.
  const std::vector<CellId>& maximal_neighbors(CellId id) const { return neighbors_.at(id); }

  /// Throws GeometryError when p is farther than kSnapTol from every cell.
  LocatedPoint locate(const Vec& p) const;
  bool contains(const Vec& p) const;
  std::vector<CellId> maximal_cells_containing(const LocatedPoint& p) const;
  std::optional<CellId> face_between(CellId a, CellId b) const;
  /// Throws GeometryError when p is not in the cell.
  TangentCone tangent_cone(CellId cell, const Vec& p) const;
  /// All 0-cells.
  std::vector<CellId> vertices() const;

 private:
  std::optional<CellId> minimal_cell_of(const Vec& snapped) const;

  int dim_ = 0;
  std::size_t num_maximal_ = 0;
  std::vector<CubeCell> cells_;
  std::map<CubeCell, CellId> index_;
  std::vector<std::vector<CellId>> cofaces_;
  std::vector<std::vector<CellId>> neighbors_;
};

struct Violation {
  std::string kind;  // "intersection" or "flag"
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Global simple connectivity is never checked.
  std::string simple_connectivity = "assumed";
  bool ok() const { return violations.empty(); }
};

/// Checks pairwise intersections and the flag condition on every vertex link.
ValidationReport validate_complex(const CubicalComplex& c);

/// Snap coordinates within kSnapTol of an integer.
Vec snap(const Vec& p);

}  // namespace meanset
