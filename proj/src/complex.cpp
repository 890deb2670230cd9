#include "meanset/complex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace meanset {

bool CubeCell::has_axis(int i) const {
  return std::binary_search(axes.begin(), axes.end(), i);
}

bool CubeCell::contains(const Vec& p, double tol) const {
  for (int i = 0; i < ambient_dim(); ++i) {
    if (p[i] < lower(i) - tol || p[i] > upper(i) + tol) return false;
  }
  return true;
}

bool CubeCell::is_face_of(const CubeCell& other) const {
  if (ambient_dim() != other.ambient_dim()) return false;
  for (int i = 0; i < ambient_dim(); ++i) {
    if (lower(i) < other.lower(i) || upper(i) > other.upper(i)) return false;
  }
  return true;
}

Vec CubeCell::clamp(const Vec& p) const {
  Vec out(p.size());
  for (int i = 0; i < ambient_dim(); ++i) out[i] = std::clamp(p[i], lower(i), upper(i));
  return out;
}

std::string CubeCell::label() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < base.size(); ++i) os << (i ? "," : "") << base[i];
  os << "]{";
  for (std::size_t i = 0; i < axes.size(); ++i) os << (i ? "," : "") << axes[i];
  os << '}';
  return os.str();
}

std::optional<CubeCell> intersect(const CubeCell& a, const CubeCell& b) {
  CubeCell out;
  const int n = a.ambient_dim();
  out.base.resize(n);
  for (int i = 0; i < n; ++i) {
    const double lo = std::max(a.lower(i), b.lower(i));
    const double hi = std::min(a.upper(i), b.upper(i));
    if (lo > hi) return std::nullopt;
    out.base[i] = static_cast<int>(lo);
    if (hi > lo) out.axes.push_back(i);
  }
  return out;
}

bool TangentCone::admits(const Vec& u, double tol) const {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    switch (axis[i]) {
      case AxisConstraint::Fixed:
        if (std::abs(u[i]) > tol) return false;
        break;
      case AxisConstraint::Free:
        break;
      case AxisConstraint::NonNegative:
        if (u[i] < -tol) return false;
        break;
      case AxisConstraint::NonPositive:
        if (u[i] > tol) return false;
        break;
    }
  }
  return true;
}

Vec TangentCone::project(const Vec& u) const {
  Vec out(u.size());
  for (std::size_t i = 0; i < axis.size(); ++i) {
    switch (axis[i]) {
      case AxisConstraint::Fixed: out[i] = 0.0; break;
      case AxisConstraint::Free: out[i] = u[i]; break;
      case AxisConstraint::NonNegative: out[i] = std::max(u[i], 0.0); break;
      case AxisConstraint::NonPositive: out[i] = std::min(u[i], 0.0); break;
    }
  }
  return out;
}

Vec normal_cone_project(const TangentCone& cone, const Vec& v) {
  // Moreau decomposition: v = proj_T(v) + proj_N(v).
  return v - cone.project(v);
}

Vec snap(const Vec& p) {
  Vec out = p;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double r = std::round(out[i]);
    if (std::abs(out[i] - r) <= kSnapTol) out[i] = r;
  }
  return out;
}

namespace {

void enumerate_faces(const CubeCell& c, std::vector<CubeCell>& out) {
  // Each free axis of c is either kept free or pinned to its lower/upper end.
  const int k = c.dim();
  int total = 1;
  for (int i = 0; i < k; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    CubeCell f;
    f.base = c.base;
    int rest = code;
    for (int j = 0; j < k; ++j) {
      const int choice = rest % 3;
      rest /= 3;
      const int ax = c.axes[j];
      if (choice == 0) f.axes.push_back(ax);
      else if (choice == 2) f.base[ax] += 1;
    }
    out.push_back(std::move(f));
  }
}

}  // namespace

CubicalComplex CubicalComplex::from_cells(int ambient_dim, std::vector<CubeCell> maximal) {
  if (ambient_dim <= 0) throw InputError("ambient_dim must be positive");
  if (maximal.empty()) throw InputError("complex has no cells");
  for (auto& c : maximal) {
    if (c.ambient_dim() != ambient_dim) {
      throw InputError("cell base " + c.label() + " does not have length " + std::to_string(ambient_dim));
    }
    std::sort(c.axes.begin(), c.axes.end());
    if (std::adjacent_find(c.axes.begin(), c.axes.end()) != c.axes.end()) {
      throw InputError("cell " + c.label() + " repeats an axis");
    }
    for (int a : c.axes) {
      if (a < 0 || a >= ambient_dim) {
        throw InputError("cell " + c.label() + " has axis index outside [0," + std::to_string(ambient_dim) + ")");
      }
    }
  }
  std::sort(maximal.begin(), maximal.end());
  if (auto it = std::adjacent_find(maximal.begin(), maximal.end()); it != maximal.end()) {
    throw InputError("duplicate maximal cell " + it->label());
  }
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    for (std::size_t j = 0; j < maximal.size(); ++j) {
      if (i != j && maximal[i].is_face_of(maximal[j])) {
        throw InputError("listed cell " + maximal[i].label() + " is a face of " + maximal[j].label());
      }
    }
  }

  CubicalComplex cx;
  cx.dim_ = ambient_dim;
  cx.num_maximal_ = maximal.size();

  std::set<CubeCell> faces;
  {
    std::vector<CubeCell> buf;
    for (const auto& m : maximal) enumerate_faces(m, buf);
    faces.insert(buf.begin(), buf.end());
    for (const auto& m : maximal) faces.erase(m);
  }
  cx.cells_ = std::move(maximal);
  cx.cells_.insert(cx.cells_.end(), faces.begin(), faces.end());
  for (std::size_t i = 0; i < cx.cells_.size(); ++i) cx.index_[cx.cells_[i]] = static_cast<CellId>(i);

  const std::size_t count = cx.cells_.size();
  cx.cofaces_.assign(count, {});
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (cx.cells_[i].is_face_of(cx.cells_[j])) cx.cofaces_[i].push_back(static_cast<CellId>(j));
    }
  }
  cx.neighbors_.assign(cx.num_maximal_, {});
  for (std::size_t i = 0; i < cx.num_maximal_; ++i) {
    for (std::size_t j = 0; j < cx.num_maximal_; ++j) {
      if (i != j && intersect(cx.cells_[i], cx.cells_[j])) cx.neighbors_[i].push_back(static_cast<CellId>(j));
    }
  }
  return cx;
}

std::optional<CellId> CubicalComplex::find(const CubeCell& c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<CellId> CubicalComplex::minimal_cell_of(const Vec& snapped) const {
  CubeCell minimal;
  minimal.base.resize(dim_);
  for (int i = 0; i < dim_; ++i) {
    const double x = snapped[i];
    const double f = std::floor(x);
    minimal.base[i] = static_cast<int>(f);
    if (x != f) minimal.axes.push_back(i);
  }
  return find(minimal);
}

LocatedPoint CubicalComplex::locate(const Vec& p) const {
  if (p.size() != dim_) {
    throw InputError("point has dimension " + std::to_string(p.size()) + ", complex has " + std::to_string(dim_));
  }
  LocatedPoint out;
  out.coords = snap(p);
  auto id = minimal_cell_of(out.coords);
  if (!id) {
    std::ostringstream os;
    os << "point (" << p.transpose() << ") lies outside the complex";
    throw GeometryError(os.str());
  }
  out.minimal_cell = *id;
  out.containing_cells = cofaces_[*id];
  return out;
}

bool CubicalComplex::contains(const Vec& p) const {
  return p.size() == dim_ && minimal_cell_of(snap(p)).has_value();
}

std::vector<CellId> CubicalComplex::maximal_cells_containing(const LocatedPoint& p) const {
  std::vector<CellId> out;
  for (CellId c : p.containing_cells) {
    if (is_maximal(c)) out.push_back(c);
  }
  return out;
}

std::optional<CellId> CubicalComplex::face_between(CellId a, CellId b) const {
  auto f = intersect(cell(a), cell(b));
  if (!f) return std::nullopt;
  return find(*f);
}

TangentCone CubicalComplex::tangent_cone(CellId id, const Vec& p) const {
  const CubeCell& c = cell(id);
  const Vec q = snap(p);
  if (!c.contains(q, 0.0)) throw GeometryError("point not in cell " + c.label());
  TangentCone t;
  t.cell = id;
  t.axis.resize(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (!c.has_axis(i)) t.axis[i] = AxisConstraint::Fixed;
    else if (q[i] == c.lower(i)) t.axis[i] = AxisConstraint::NonNegative;
    else if (q[i] == c.upper(i)) t.axis[i] = AxisConstraint::NonPositive;
    else t.axis[i] = AxisConstraint::Free;
  }
  return t;
}

std::vector<CellId> CubicalComplex::vertices() const {
  std::vector<CellId> out;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].dim() == 0) out.push_back(static_cast<CellId>(i));
  }
  return out;
}

namespace {

// Signed direction of a cube corner at a vertex: axis * 2 + (negative ? 1 : 0).
int corner_code(int axis, bool negative) { return axis * 2 + (negative ? 1 : 0); }

std::string describe_vertex(const CubeCell& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.base.size(); ++i) os << (i ? "," : "") << v.base[i];
  os << ')';
  return os.str();
}

}  // namespace

ValidationReport validate_complex(const CubicalComplex& c) {
  ValidationReport report;

  for (std::size_t i = 0; i < c.num_maximal(); ++i) {
    for (std::size_t j = i + 1; j < c.num_maximal(); ++j) {
      auto f = intersect(c.cell(i), c.cell(j));
      if (!f) continue;
      if (!c.find(*f) || !f->is_face_of(c.cell(i)) || !f->is_face_of(c.cell(j))) {
        report.violations.push_back(
            {"intersection", c.cell(i).label() + " and " + c.cell(j).label() + " meet outside a common face"});
      }
    }
  }

  for (CellId v : c.vertices()) {
    const CubeCell& vc = c.cell(v);
    std::set<int> link_vertices;
    std::set<std::pair<int, int>> link_edges;
    for (CellId k : c.cofaces(v)) {
      const CubeCell& q = c.cell(k);
      if (q.dim() != 1 && q.dim() != 2) continue;
      std::vector<int> codes;
      for (int ax : q.axes) codes.push_back(corner_code(ax, q.base[ax] != vc.base[ax]));
      if (codes.size() == 1) link_vertices.insert(codes[0]);
      else link_edges.insert({std::min(codes[0], codes[1]), std::max(codes[0], codes[1])});
    }
    const std::vector<int> verts(link_vertices.begin(), link_vertices.end());
    auto adjacent = [&](int a, int b) { return link_edges.count({std::min(a, b), std::max(a, b)}) > 0; };

    // Every clique of size >= 3 in the link graph must span an existing corner cube.
    std::vector<int> clique;
    std::function<void(std::size_t)> grow = [&](std::size_t start) {
      if (clique.size() >= 3) {
        CubeCell cube;
        cube.base = vc.base;
        for (int code : clique) {
          const int ax = code / 2;
          if (code % 2) cube.base[ax] -= 1;
          cube.axes.push_back(ax);
        }
        std::sort(cube.axes.begin(), cube.axes.end());
        if (!c.find(cube)) {
          std::ostringstream os;
          os << "vertex " << describe_vertex(vc) << ": corners {";
          for (std::size_t i = 0; i < clique.size(); ++i) {
            const int code = clique[i];
            os << (i ? "," : "") << (code % 2 ? '-' : '+') << 'e' << code / 2;
          }
          os << "} pairwise span squares but no " << clique.size() << "-cube " << cube.label() << " exists";
          report.violations.push_back({"flag", os.str()});
        }
      }
      for (std::size_t i = start; i < verts.size(); ++i) {
        bool ok = true;
        for (int m : clique) ok = ok && adjacent(m, verts[i]);
        if (!ok) continue;
        clique.push_back(verts[i]);
        grow(i + 1);
        clique.pop_back();
      }
    };
    grow(0);
  }
  return report;
}

}  // namespace meanset
