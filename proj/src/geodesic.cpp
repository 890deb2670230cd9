#include "meanset/geodesic.hpp"

#include "meanset/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace meanset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kElide = 1e-9;

double polyline_length(const std::vector<Vec>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) s += (y[i] - y[i - 1]).norm();
  return s;
}

// One forward and one backward sweep of exact block minimization.
void sweep(std::vector<Vec>& y, const std::vector<CubeCell>& faces) {
  const int k = static_cast<int>(faces.size());
  for (int i = 1; i <= k; ++i) y[i] = box_segment_min(y[i - 1], y[i + 1], faces[i - 1]).argmin;
  for (int i = k; i >= 1; --i) y[i] = box_segment_min(y[i - 1], y[i + 1], faces[i - 1]).argmin;
}

// Returns true when a sweep no longer decreases the length.
bool block_descent(std::vector<Vec>& y, const std::vector<CubeCell>& faces, int max_sweeps) {
  double value = polyline_length(y);
  for (int s = 0; s < max_sweeps; ++s) {
    sweep(y, faces);
    const double next = polyline_length(y);
    const bool stalled = value - next <= 1e-15 * (1.0 + value);
    value = next;
    if (stalled) return true;
  }
  return false;
}

// Projected Newton on the smoothed length sum sqrt(|d|^2 + mu^2), driving mu
// toward zero. Block descent cannot separate coinciding breakpoints; this can.
void smoothed_newton(std::vector<Vec>& y, const std::vector<CubeCell>& faces) {
  const int k = static_cast<int>(faces.size());
  const int n = static_cast<int>(y.front().size());
  std::vector<std::vector<int>> index(k + 2, std::vector<int>(n, -1));
  std::vector<double> lo, hi;
  int nv = 0;
  for (int i = 1; i <= k; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!faces[i - 1].has_axis(j)) continue;
      index[i][j] = nv++;
      lo.push_back(faces[i - 1].lower(j));
      hi.push_back(faces[i - 1].upper(j));
    }
  }
  if (nv == 0) return;

  auto smoothed = [&](const std::vector<Vec>& z, double mu) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += std::sqrt((z[i + 1] - z[i]).squaredNorm() + mu * mu);
    return s;
  };
  auto gather = [&](const std::vector<Vec>& z) {
    Vec x(nv);
    for (int i = 1; i <= k; ++i)
      for (int j = 0; j < n; ++j)
        if (index[i][j] >= 0) x[index[i][j]] = z[i][j];
    return x;
  };
  auto scatter = [&](const Vec& x, std::vector<Vec>& z) {
    for (int i = 1; i <= k; ++i)
      for (int j = 0; j < n; ++j)
        if (index[i][j] >= 0) z[i][j] = x[index[i][j]];
  };
  auto clamp = [&](Vec x) {
    for (int v = 0; v < nv; ++v) x[v] = std::clamp(x[v], lo[v], hi[v]);
    return x;
  };

  for (double mu : {1e-3, 1e-5, 1e-7, 1e-9, 1e-11, 1e-13}) {
    for (int it = 0; it < 100; ++it) {
      Vec g = Vec::Zero(nv);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nv, nv);
      for (int s = 0; s <= k; ++s) {
        const Vec d = y[s + 1] - y[s];
        const double phi = std::sqrt(d.squaredNorm() + mu * mu);
        const Vec gd = d / phi;
        const Eigen::MatrixXd Hd = (Eigen::MatrixXd::Identity(n, n) - d * d.transpose() / (phi * phi)) / phi;
        const int ends[2] = {s, s + 1};
        const double sign[2] = {-1.0, 1.0};
        for (int a = 0; a < 2; ++a) {
          for (int j = 0; j < n; ++j) {
            const int va = index[ends[a]][j];
            if (va < 0) continue;
            g[va] += sign[a] * gd[j];
            for (int b = 0; b < 2; ++b) {
              for (int l = 0; l < n; ++l) {
                const int vb = index[ends[b]][l];
                if (vb >= 0) H(va, vb) += sign[a] * sign[b] * Hd(j, l);
              }
            }
          }
        }
      }
      const Vec x = gather(y);
      if ((x - clamp(x - g)).norm() < 1e-14) break;

      std::vector<int> free_vars;
      for (int v = 0; v < nv; ++v) {
        const bool at_lo = x[v] <= lo[v] + 1e-14 && g[v] > 0;
        const bool at_hi = x[v] >= hi[v] - 1e-14 && g[v] < 0;
        if (!at_lo && !at_hi) free_vars.push_back(v);
      }
      Vec dir = Vec::Zero(nv);
      if (!free_vars.empty()) {
        const int f = static_cast<int>(free_vars.size());
        Eigen::MatrixXd Hf(f, f);
        Vec gf(f);
        for (int a = 0; a < f; ++a) {
          gf[a] = g[free_vars[a]];
          for (int b = 0; b < f; ++b) Hf(a, b) = H(free_vars[a], free_vars[b]);
        }
        const Vec df = Hf.ldlt().solve(-gf);
        for (int a = 0; a < f; ++a) dir[free_vars[a]] = df[a];
      }
      if (!(g.dot(dir) < 0.0)) dir = -g;

      const double f0 = smoothed(y, mu);
      double alpha = 1.0;
      bool moved = false;
      std::vector<Vec> trial = y;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Vec xt = clamp(x + alpha * dir);
        scatter(xt, trial);
        if (smoothed(trial, mu) <= f0 + 1e-4 * g.dot(xt - x)) {
          moved = (xt - x).norm() > 0.0;
          break;
        }
      }
      if (!moved) break;
      y = trial;
    }
  }
}

std::vector<CubeCell> chain_faces(const CubicalComplex& cx, const std::vector<CellId>& chain) {
  std::vector<CubeCell> faces;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    auto f = intersect(cx.cell(chain[i - 1]), cx.cell(chain[i]));
    if (!f) {
      throw GeometryError("cells " + cx.cell(chain[i - 1]).label() + " and " + cx.cell(chain[i]).label() +
                          " share no face");
    }
    faces.push_back(*f);
  }
  return faces;
}

}  // namespace

ChainSolution chain_length(const CubicalComplex& cx, const Vec& p, const Vec& q, const std::vector<CellId>& chain,
                           const std::vector<Vec>* warm) {
  if (chain.empty()) throw InputError("empty cell chain");
  const std::vector<CubeCell> faces = chain_faces(cx, chain);
  const int k = static_cast<int>(faces.size());
  std::vector<Vec> y(k + 2);
  y[0] = p;
  y[k + 1] = q;
  for (int i = 1; i <= k; ++i) {
    if (warm && i <= static_cast<int>(warm->size())) y[i] = faces[i - 1].clamp((*warm)[i - 1]);
    else y[i] = faces[i - 1].clamp(p + (q - p) * (static_cast<double>(i) / (k + 1)));
  }
  if (k > 0) {
    // Block descent is exact per block but zigzags slowly on long chains and
    // stalls where breakpoints coincide; the smoothed Newton pass handles both.
    bool settled = block_descent(y, faces, 8);
    for (int i = 1; i < k && settled; ++i) settled = (y[i] - y[i + 1]).norm() >= 1e-7;
    if (!settled) {
      smoothed_newton(y, faces);
      block_descent(y, faces, 200);
    }
  }
  return {polyline_length(y), y};
}

namespace {

struct ChainSearch {
  const CubicalComplex& cx;
  Vec p, q;
  int max_len;
  double upper;
  std::vector<CellId> chain{};
  std::vector<char> used{};
  bool found = false;
  double best = kInf;
  std::vector<CellId> best_chain{};
  ChainSolution best_solution{};

  // Completions can only replace the incumbent by beating it by 1e-9, so
  // prefixes that cannot do that are pruned.
  double bound() const { return found ? best - 1e-9 : upper + 1e-7; }

  // Invariant: `prefix` solves the current chain with q as the endpoint,
  // which bounds every completion of the chain from below.
  void extend(const ChainSolution& prefix) {
    const CellId last = chain.back();
    if (cx.cell(last).contains(q, 0.0)) {
      const bool better = prefix.length < bound();
      if (better) {
        found = true;
        best = prefix.length;
        best_chain = chain;
        best_solution = prefix;
      }
      return;
    }
    if (static_cast<int>(chain.size()) >= max_len) return;
    std::vector<Vec> warm(prefix.breakpoints.begin() + 1, prefix.breakpoints.end() - 1);
    for (CellId next : cx.maximal_neighbors(last)) {
      if (used[next] || cx.cell(next).contains(p, 0.0)) continue;
      chain.push_back(next);
      used[next] = 1;
      const ChainSolution sol = chain_length(cx, p, q, chain, &warm);
      if (sol.length < bound()) extend(sol);
      used[next] = 0;
      chain.pop_back();
    }
  }
};

}  // namespace

double vertex_graph_bound(const CubicalComplex& cx, const Vec& p_in, const Vec& q_in) {
  const LocatedPoint lp = cx.locate(p_in), lq = cx.locate(q_in);
  const int n = cx.ambient_dim();
  std::vector<CellId> verts = cx.vertices();
  std::vector<int> node_of(cx.num_cells(), -1);
  std::vector<Vec> pos;
  for (CellId v : verts) {
    node_of[v] = static_cast<int>(pos.size());
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = cx.cell(v).base[i];
    pos.push_back(x);
  }
  const int P = static_cast<int>(pos.size()), Q = P + 1;
  pos.push_back(lp.coords);
  pos.push_back(lq.coords);
  std::vector<std::vector<int>> adj(pos.size());

  const std::vector<CellId> at_p = cx.maximal_cells_containing(lp), at_q = cx.maximal_cells_containing(lq);
  for (CellId c = 0; c < static_cast<CellId>(cx.num_maximal()); ++c) {
    const CubeCell& cell = cx.cell(c);
    std::vector<int> corners;
    for (int mask = 0; mask < (1 << cell.dim()); ++mask) {
      CubeCell v{cell.base, {}};
      for (int j = 0; j < cell.dim(); ++j) {
        if (mask & (1 << j)) ++v.base[cell.axes[j]];
      }
      corners.push_back(node_of[*cx.find(v)]);
    }
    const bool has_p = std::binary_search(at_p.begin(), at_p.end(), c);
    const bool has_q = std::binary_search(at_q.begin(), at_q.end(), c);
    if (has_p) corners.push_back(P);
    if (has_q) corners.push_back(Q);
    for (int a : corners)
      for (int b : corners)
        if (a != b) adj[a].push_back(b);
  }

  std::vector<double> dist(pos.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[P] = 0.0;
  heap.push({0.0, P});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == Q) break;
    for (int v : adj[u]) {
      const double nd = d + (pos[u] - pos[v]).norm();
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  return dist[Q];
}

Geodesic geodesic(const CubicalComplex& cx, const Vec& p_in, const Vec& q_in, const GeodesicOptions& opt) {
  if (opt.max_chain_length < 1) throw InputError("max chain length must be positive");
  const LocatedPoint lp = cx.locate(p_in), lq = cx.locate(q_in);
  const double upper = vertex_graph_bound(cx, lp.coords, lq.coords);
  if (!std::isfinite(upper)) throw GeometryError("points lie in different components of the complex");

  ChainSearch search{cx, lp.coords, lq.coords, opt.max_chain_length, upper};
  search.used.assign(cx.num_cells(), 0);
  for (CellId start : cx.maximal_cells_containing(lp)) {
    search.chain = {start};
    search.used[start] = 1;
    search.extend({(lp.coords - lq.coords).norm(), {lp.coords, lq.coords}});
    search.used[start] = 0;
  }
  if (!search.found) {
    throw GeometryError("no chain of at most " + std::to_string(opt.max_chain_length) +
                        " cells joins the points; raise the chain length bound");
  }

  Geodesic g;
  const std::vector<Vec>& y = search.best_solution.breakpoints;
  g.breakpoints.push_back(y.front());
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    if ((y[i + 1] - g.breakpoints.back()).norm() <= kElide) continue;
    g.breakpoints.push_back(y[i + 1]);
    g.cells.push_back(search.best_chain[i]);
  }
  if (g.breakpoints.size() > 1) g.breakpoints.back() = y.back();
  g.length = polyline_length(g.breakpoints);
  if (g.cells.empty()) g.cells.push_back(search.best_chain.front());
  return g;
}

double distance(const CubicalComplex& cx, const Vec& p, const Vec& q, const GeodesicOptions& opt) {
  return geodesic(cx, p, q, opt).length;
}

Vec point_along(const Geodesic& g, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InputError("geodesic parameter outside [0, 1]");
  if (s == 0.0 || g.breakpoints.size() == 1) return g.breakpoints.front();
  if (s == 1.0) return g.breakpoints.back();
  double remaining = s * g.length;
  for (std::size_t i = 0; i + 1 < g.breakpoints.size(); ++i) {
    const Vec d = g.breakpoints[i + 1] - g.breakpoints[i];
    const double len = d.norm();
    if (remaining <= len || i + 2 == g.breakpoints.size()) {
      return g.breakpoints[i] + d * (len > 0 ? std::min(remaining / len, 1.0) : 0.0);
    }
    remaining -= len;
  }
  return g.breakpoints.back();
}

Vec midpoint(const CubicalComplex& cx, const Vec& p, const Vec& q, const GeodesicOptions& opt) {
  return point_along(geodesic(cx, p, q, opt), 0.5);
}

InitialSegment initial_direction(const CubicalComplex& cx, const Geodesic& g) {
  if (g.breakpoints.size() < 2) throw InputError("initial direction needs distinct points");
  const Vec& a = g.breakpoints[0];
  const Vec& b = g.breakpoints[1];
  return {b, cx.locate((a + b) / 2).minimal_cell};
}

InitialSegment initial_direction(const CubicalComplex& cx, const Vec& from, const Vec& to, const GeodesicOptions& opt) {
  return initial_direction(cx, geodesic(cx, from, to, opt));
}

}  // namespace meanset
