#include "meanset/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace meanset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// Wolfe's min-norm point

MinNormResult min_norm_point(const std::vector<Vec>& points, const Vec& anchor) {
  if (points.empty()) throw InputError("min_norm_point needs at least one point");
  const int m = static_cast<int>(points.size());
  const int n = static_cast<int>(anchor.size());
  Eigen::MatrixXd P(n, m);
  for (int j = 0; j < m; ++j) P.col(j) = points[j] - anchor;

  // Tolerances from Wolfe (1976), relative to the largest squared norm.
  double scale = 0.0;
  int start = 0;
  for (int j = 0; j < m; ++j) {
    scale = std::max(scale, P.col(j).squaredNorm());
    if (P.col(j).squaredNorm() < P.col(start).squaredNorm()) start = j;
  }
  scale = std::max(scale, 1e-300);
  const double z1 = 1e-15, z2 = 1e-13, z3 = 1e-13;

  std::vector<int> corral{start};
  std::vector<double> lambda{1.0};
  Vec x = P.col(start);
  int iterations = 0;

  auto affine_minimizer = [&](const std::vector<int>& s) {
    const int k = static_cast<int>(s.size());
    Eigen::MatrixXd Q(n, k);
    for (int i = 0; i < k; ++i) Q.col(i) = P.col(s[i]);
    Eigen::MatrixXd A = Q.transpose() * Q + Eigen::MatrixXd::Ones(k, k);
    Vec alpha = A.completeOrthogonalDecomposition().solve(Vec::Ones(k));
    return Vec(alpha / alpha.sum());
  };

  for (; iterations < 100 * (m + n + 1); ++iterations) {
    if (x.squaredNorm() <= z1 * scale) break;
    const Vec dots = P.transpose() * x;
    int j = 0;
    dots.minCoeff(&j);
    if (x.squaredNorm() - dots[j] <= z2 * scale) break;
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
    corral.push_back(j);
    lambda.push_back(0.0);

    // Minor cycles: move toward the affine minimizer of the corral while it
    // leaves the simplex, dropping points whose weight reaches zero.
    for (;;) {
      const Vec alpha = affine_minimizer(corral);
      if (alpha.minCoeff() > z3) {
        lambda.assign(alpha.data(), alpha.data() + alpha.size());
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (alpha[i] <= z3) {
          const double denom = lambda[i] - alpha[i];
          if (denom > 0) theta = std::min(theta, lambda[i] / denom);
        }
      }
      std::size_t worst = 0;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        lambda[i] = theta * alpha[i] + (1.0 - theta) * lambda[i];
        if (lambda[i] < lambda[worst]) worst = i;
      }
      std::vector<int> kept;
      std::vector<double> kept_lambda;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (i == worst || lambda[i] <= z3) continue;
        kept.push_back(corral[i]);
        kept_lambda.push_back(lambda[i]);
      }
      if (kept.empty()) {
        kept.push_back(corral[worst]);
        kept_lambda.push_back(1.0);
      }
      corral = std::move(kept);
      const double total = std::accumulate(kept_lambda.begin(), kept_lambda.end(), 0.0);
      for (double& l : kept_lambda) l /= total;
      lambda = std::move(kept_lambda);
      if (corral.size() == 1) break;
    }
    x.setZero();
    for (std::size_t i = 0; i < corral.size(); ++i) x += lambda[i] * P.col(corral[i]);
  }

  MinNormResult out;
  out.weights = Vec::Zero(m);
  for (std::size_t i = 0; i < corral.size(); ++i) out.weights[corral[i]] = lambda[i];
  out.point = anchor + x;
  out.distance = x.norm();
  out.iterations = iterations;
  return out;
}

// ---------------------------------------------------------------------------
// Box-constrained two-segment path

namespace {

// Parameter range of the segment a + t (b - a), t in [0,1], inside the box.
std::optional<std::pair<double, double>> clip_segment(const Vec& a, const Vec& b, const CubeCell& box) {
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < box.ambient_dim(); ++i) {
    const double d = b[i] - a[i];
    const double lo = box.lower(i), hi = box.upper(i);
    if (std::abs(d) < 1e-300) {
      if (a[i] < lo || a[i] > hi) return std::nullopt;
      continue;
    }
    double s0 = (lo - a[i]) / d, s1 = (hi - a[i]) / d;
    if (s0 > s1) std::swap(s0, s1);
    t0 = std::max(t0, s0);
    t1 = std::min(t1, s1);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

}  // namespace

BoxSegmentResult box_segment_min(const Vec& a, const Vec& b, const CubeCell& box) {
  if (auto range = clip_segment(a, b, box)) {
    const Vec d = b - a;
    const double dd = d.squaredNorm();
    double t = dd > 0 ? -a.dot(d) / dd : 0.0;
    t = std::clamp(t, range->first, range->second);
    return {d.norm(), box.clamp(a + t * d)};
  }

  // The minimizer lies in the relative interior of some face G of the box and
  // is then the unconstrained minimizer over aff(G), obtained by unfolding the
  // distances to aff(G) into one extra coordinate.
  const int n = box.ambient_dim();
  const int k = box.dim();
  int total = 1;
  for (int i = 0; i < k; ++i) total *= 3;
  BoxSegmentResult best{kInf, box.clamp(a)};
  Vec y(n);
  for (int code = 0; code < total; ++code) {
    y = Vec::Zero(n);
    std::vector<bool> free(n, false);
    int rest = code;
    for (int j = 0; j < k; ++j) {
      const int choice = rest % 3;
      rest /= 3;
      const int ax = box.axes[j];
      if (choice == 0) free[ax] = true;
      else y[ax] = box.lower(ax) + (choice == 2 ? 1.0 : 0.0);
    }
    for (int i = 0; i < n; ++i) {
      if (!box.has_axis(i)) y[i] = box.lower(i);
    }
    double ra = 0.0, rb = 0.0;
    for (int i = 0; i < n; ++i) {
      if (free[i]) continue;
      ra += (a[i] - y[i]) * (a[i] - y[i]);
      rb += (b[i] - y[i]) * (b[i] - y[i]);
    }
    ra = std::sqrt(ra);
    rb = std::sqrt(rb);
    if (ra + rb <= 0.0) continue;
    const double s = ra / (ra + rb);
    bool inside = true;
    for (int i = 0; i < n; ++i) {
      if (!free[i]) continue;
      y[i] = a[i] + s * (b[i] - a[i]);
      if (y[i] < box.lower(i) - 1e-15 || y[i] > box.upper(i) + 1e-15) inside = false;
    }
    if (!inside) continue;
    y = box.clamp(y);
    const double value = (a - y).norm() + (y - b).norm();
    if (value < best.value - 1e-15 || (value <= best.value + 1e-15 && y.norm() < best.argmin.norm())) {
      best = {value, y};
    }
  }
  if (!std::isfinite(best.value)) {
    // Only reachable through rounding; fall back to the nearest corner pair.
    const Vec y0 = box.clamp(a);
    best = {(a - y0).norm() + (y0 - b).norm(), y0};
  }
  return best;
}

// ---------------------------------------------------------------------------
// min |X lambda + G mu|, lambda in simplex, mu >= 0

SimplexConeResult simplex_cone_min_norm(const Eigen::MatrixXd& X, const Eigen::MatrixXd& G) {
  const int m = static_cast<int>(X.cols());
  const int g = static_cast<int>(G.cols());
  const int total = m + g;
  if (m == 0) throw InputError("simplex_cone_min_norm needs at least one point");
  Eigen::MatrixXd M(X.rows(), total);
  M << X, G;
  const Eigen::MatrixXd H = M.transpose() * M;
  const double tol = 1e-14 * std::max(1.0, H.diagonal().maxCoeff());

  Vec x = Vec::Zero(total);
  std::vector<bool> active(total, false);  // active = free to move
  int start = 0;
  for (int j = 1; j < m; ++j) {
    if (X.col(j).squaredNorm() < X.col(start).squaredNorm()) start = j;
  }
  x[start] = 1.0;
  active[start] = true;

  SimplexConeResult out;
  const int max_iter = 50 * (total + 1);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<int> idx;
    for (int i = 0; i < total; ++i) {
      if (active[i]) idx.push_back(i);
    }
    const int f = static_cast<int>(idx.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(f + 1, f + 1);
    Vec rhs = Vec::Zero(f + 1);
    for (int r = 0; r < f; ++r) {
      for (int c = 0; c < f; ++c) K(r, c) = H(idx[r], idx[c]);
      if (idx[r] < m) {
        K(r, f) = 1.0;
        K(f, r) = 1.0;
      }
    }
    rhs[f] = 1.0;
    const Vec sol = K.completeOrthogonalDecomposition().solve(rhs);

    bool feasible = true;
    for (int r = 0; r < f; ++r) feasible = feasible && sol[r] >= -1e-15;
    if (feasible) {
      for (int r = 0; r < f; ++r) x[idx[r]] = std::max(sol[r], 0.0);
      const double lam_sum = x.head(m).sum();
      if (lam_sum > 0) x.head(m) /= lam_sum;
      const Vec grad = H * x;
      double nu = 0.0;
      int nfree_lambda = 0;
      for (int i : idx) {
        if (i < m) {
          nu += grad[i];
          ++nfree_lambda;
        }
      }
      nu /= std::max(nfree_lambda, 1);
      int enter = -1;
      double most_negative = -tol;
      for (int i = 0; i < total; ++i) {
        if (active[i]) continue;
        const double mult = i < m ? grad[i] - nu : grad[i];
        if (mult < most_negative) {
          most_negative = mult;
          enter = i;
        }
      }
      if (enter < 0) {
        out.converged = true;
        break;
      }
      active[enter] = true;
    } else {
      double alpha = 1.0;
      int block = -1;
      for (int r = 0; r < f; ++r) {
        const int i = idx[r];
        if (sol[r] < 0.0) {
          const double ratio = x[i] / (x[i] - sol[r]);
          if (ratio < alpha) {
            alpha = ratio;
            block = i;
          }
        }
      }
      for (int r = 0; r < f; ++r) x[idx[r]] += alpha * (sol[r] - x[idx[r]]);
      for (int r = 0; r < f; ++r) {
        const int i = idx[r];
        if (i == block || x[i] <= 0.0) {
          x[i] = 0.0;
          active[i] = false;
        }
      }
      if (std::none_of(idx.begin(), idx.end(), [&](int i) { return i < m && active[i]; })) {
        // Keep at least one point in play.
        int keep = idx.front();
        for (int i : idx) {
          if (i < m) {
            keep = i;
            break;
          }
        }
        active[keep] = true;
        x[keep] = 1.0;
      }
      const double lam_sum = x.head(m).sum();
      if (lam_sum > 0) x.head(m) /= lam_sum;
    }
  }
  out.iterations = it;
  out.lambda = x.head(m);
  out.mu = x.tail(g);
  out.residual = M * x;
  return out;
}

// ---------------------------------------------------------------------------
// Subdifferential sets

SubdifferentialSet SubdifferentialSet::singleton(Vec g) {
  SubdifferentialSet s;
  s.kind_ = Kind::Singleton;
  s.g_ = std::move(g);
  return s;
}

SubdifferentialSet SubdifferentialSet::cone_ball(Vec u, TangentCone face_cone) {
  SubdifferentialSet s;
  s.kind_ = Kind::ConeBall;
  s.u_ = std::move(u);
  s.face_ = std::move(face_cone);
  return s;
}

SubdifferentialSet SubdifferentialSet::oracle(Gradient gradient, Vec element) {
  SubdifferentialSet s;
  s.kind_ = Kind::Oracle;
  s.grad_ = std::move(gradient);
  s.g_ = std::move(element);
  return s;
}

namespace {

// Interval of admissible values of coordinate i of n - u, n in N_F.
std::pair<double, double> cone_ball_interval(const TangentCone& face, const Vec& u, int i) {
  switch (face.axis[i]) {
    case AxisConstraint::Fixed: return {-kInf, kInf};
    case AxisConstraint::Free: return {-u[i], -u[i]};
    case AxisConstraint::NonNegative: return {-kInf, -u[i]};
    case AxisConstraint::NonPositive: return {-u[i], kInf};
  }
  return {-kInf, kInf};
}

}  // namespace

Vec SubdifferentialSet::support_point(const Vec& w) const {
  if (kind_ == Kind::Singleton) return g_;
  if (kind_ == Kind::Oracle) return w.norm() > 0.0 ? grad_(w) : g_;
  const int n = static_cast<int>(u_.size());
  std::vector<std::pair<double, double>> box(n);
  for (int i = 0; i < n; ++i) box[i] = cone_ball_interval(face_, u_, i);

  // Maximizer of <w, g> - |g|^2 / (2s) over the box is clamp(s w); the ball
  // constraint is active at the s where that point has unit norm.
  auto at = [&](double s) {
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = std::clamp(s * w[i], box[i].first, box[i].second);
    return g;
  };
  Vec limit(n);
  bool bounded = true;
  for (int i = 0; i < n; ++i) {
    if (w[i] > 0) limit[i] = box[i].second;
    else if (w[i] < 0) limit[i] = box[i].first;
    else limit[i] = std::clamp(0.0, box[i].first, box[i].second);
    bounded = bounded && std::isfinite(limit[i]);
  }
  if (bounded && limit.squaredNorm() <= 1.0) return limit;

  double lo = 0.0, hi = 1.0;
  while (at(hi).squaredNorm() < 1.0 && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (at(mid).squaredNorm() <= 1.0) lo = mid;
    else hi = mid;
  }
  Vec g = at(lo);
  const double norm = g.norm();
  if (norm > 1.0) g /= norm;
  return g;
}

double SubdifferentialSet::support(const Vec& w) const { return support_point(w).dot(w); }

bool SubdifferentialSet::contains(const Vec& g, double tol) const {
  if (kind_ == Kind::Singleton) return (g - g_).norm() <= tol;
  if (kind_ == Kind::Oracle) return g.norm() == 0.0 || g.squaredNorm() <= support(g) + tol;
  if (g.norm() > 1.0 + tol) return false;
  for (int i = 0; i < static_cast<int>(u_.size()); ++i) {
    const auto [lo, hi] = cone_ball_interval(face_, u_, i);
    if (g[i] < lo - tol || g[i] > hi + tol) return false;
  }
  return true;
}

Vec SubdifferentialSet::some_element() const { return kind_ == Kind::ConeBall ? Vec(-u_) : g_; }

// ---------------------------------------------------------------------------
// Conic feasibility by simplicial decomposition

namespace {

struct Atom {
  int label = -1;                   // -1: combined atom (fixed weights)
  std::vector<std::vector<Vec>> p;  // [label][cell], full ambient vectors
  Vec stacked;
};

}  // namespace

FeasibilityResult feasibility_min_norm(const FeasibilityProblem& problem, const FeasibilityOptions& options) {
  const int labels = static_cast<int>(problem.sets.size());
  const int cells = static_cast<int>(problem.cells.size());
  if (labels == 0 || cells == 0) throw InputError("feasibility_min_norm needs labels and cells");
  for (const auto& row : problem.sets) {
    if (static_cast<int>(row.size()) != cells) throw InputError("feasibility_min_norm: ragged set table");
  }
  const int n = static_cast<int>(problem.cells.front().axis.size());
  auto scale = [&](int a) { return problem.scale.empty() ? 1.0 : problem.scale[a]; };
  const bool fixed = problem.fixed_weights.has_value();
  if (fixed && problem.fixed_weights->size() != labels) throw InputError("fixed weights have wrong length");

  // Stacked coordinates: the non-fixed axes of each cell.
  std::vector<std::vector<int>> coords(cells);
  std::vector<int> offset(cells + 1, 0);
  for (int c = 0; c < cells; ++c) {
    for (int i = 0; i < n; ++i) {
      if (problem.cells[c].axis[i] != AxisConstraint::Fixed) coords[c].push_back(i);
    }
    offset[c + 1] = offset[c] + static_cast<int>(coords[c].size());
  }
  const int dim = offset[cells];

  // Generators of N_C on sign-constrained axes.
  std::vector<Vec> gens;
  for (int c = 0; c < cells; ++c) {
    for (std::size_t k = 0; k < coords[c].size(); ++k) {
      const AxisConstraint ax = problem.cells[c].axis[coords[c][k]];
      if (ax == AxisConstraint::NonNegative || ax == AxisConstraint::NonPositive) {
        Vec e = Vec::Zero(dim);
        e[offset[c] + static_cast<int>(k)] = ax == AxisConstraint::NonNegative ? -1.0 : 1.0;
        gens.push_back(e);
      }
    }
  }
  Eigen::MatrixXd G(dim, static_cast<int>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j) G.col(static_cast<int>(j)) = gens[j];

  auto stack = [&](const Atom& atom) {
    Vec s = Vec::Zero(dim);
    for (int a = 0; a < labels; ++a) {
      if (atom.label >= 0 && atom.label != a) continue;
      const double w = fixed ? (*problem.fixed_weights)[a] * scale(a) : scale(a);
      if (w == 0.0) continue;
      for (int c = 0; c < cells; ++c) {
        for (std::size_t k = 0; k < coords[c].size(); ++k) {
          s[offset[c] + static_cast<int>(k)] += w * atom.p[a][c][coords[c][k]];
        }
      }
    }
    return s;
  };
  auto make_atom = [&](int label, auto&& pick) {
    Atom atom;
    atom.label = label;
    atom.p.assign(labels, std::vector<Vec>(cells));
    for (int a = 0; a < labels; ++a) {
      if (label >= 0 && label != a) continue;
      for (int c = 0; c < cells; ++c) atom.p[a][c] = pick(a, c);
    }
    atom.stacked = stack(atom);
    return atom;
  };

  std::vector<Atom> atoms;
  auto seed = [&](int a, int c) { return problem.sets[a][c].some_element(); };
  if (fixed) {
    atoms.push_back(make_atom(-1, seed));
  } else {
    for (int a = 0; a < labels; ++a) atoms.push_back(make_atom(a, seed));
  }

  FeasibilityResult out;
  SimplexConeResult qp;
  double lower = -kInf;
  bool done = false;
  int it = 0;
  for (; it < options.max_iterations && !done; ++it) {
    Eigen::MatrixXd X(dim, static_cast<int>(atoms.size()));
    for (std::size_t j = 0; j < atoms.size(); ++j) X.col(static_cast<int>(j)) = atoms[j].stacked;
    qp = simplex_cone_min_norm(X, G);
    const Vec& r = qp.residual;
    const double rho = r.norm();
    out.history.push_back(rho);
    if (rho <= options.zero_tol) {
      done = true;
      break;
    }

    // Linear minimization oracle: minimize <r, atom> over all admissible atoms.
    std::vector<Vec> dir(cells);
    for (int c = 0; c < cells; ++c) {
      dir[c] = Vec::Zero(n);
      for (std::size_t k = 0; k < coords[c].size(); ++k) dir[c][coords[c][k]] = -r[offset[c] + static_cast<int>(k)];
    }
    auto best_point = [&](int a, int c) { return problem.sets[a][c].support_point(dir[c]); };
    Atom candidate;
    double oracle = kInf;
    if (fixed) {
      candidate = make_atom(-1, best_point);
      oracle = r.dot(candidate.stacked);
    } else {
      for (int a = 0; a < labels; ++a) {
        Atom trial = make_atom(a, best_point);
        const double val = r.dot(trial.stacked);
        if (val < oracle) {
          oracle = val;
          candidate = std::move(trial);
        }
      }
    }
    lower = std::max(lower, oracle / rho);
    if (rho - lower <= options.gap_tol) {
      done = true;
      break;
    }

    // Drop atoms that carry no weight, then add the oracle atom.
    std::vector<Atom> kept;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (qp.lambda[static_cast<int>(j)] > 0.0) kept.push_back(std::move(atoms[j]));
    }
    bool duplicate = false;
    for (const Atom& a : kept) {
      if (a.label == candidate.label && (a.stacked - candidate.stacked).norm() <= 1e-15) duplicate = true;
    }
    atoms = std::move(kept);
    if (duplicate) break;  // oracle cannot improve further at machine precision
    atoms.push_back(std::move(candidate));
  }

  out.iterations = it;
  out.status = done ? FeasibilityResult::Status::Converged : FeasibilityResult::Status::NotConverged;
  out.residual = qp.residual.norm();
  out.lower_bound = std::isfinite(lower) ? std::min(lower, out.residual) : 0.0;
  if (out.residual <= options.zero_tol) out.lower_bound = 0.0;

  // Reassemble the weights and selectors from the final atom weights. Atoms
  // dropped in the last round carried zero weight.
  out.weights = Vec::Zero(labels);
  out.selectors.assign(labels, std::vector<Vec>(cells, Vec::Zero(n)));
  Eigen::MatrixXd Xf(dim, static_cast<int>(atoms.size()));
  for (std::size_t j = 0; j < atoms.size(); ++j) Xf.col(static_cast<int>(j)) = atoms[j].stacked;
  const SimplexConeResult final_qp =
      static_cast<int>(atoms.size()) == qp.lambda.size() ? qp : simplex_cone_min_norm(Xf, G);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const double l = final_qp.lambda[static_cast<int>(j)];
    for (int a = 0; a < labels; ++a) {
      if (atoms[j].label >= 0 && atoms[j].label != a) continue;
      const double va = fixed ? (*problem.fixed_weights)[a] : 1.0;
      if (!fixed) out.weights[a] += l;
      for (int c = 0; c < cells; ++c) out.selectors[a][c] += l * va * atoms[j].p[a][c];
    }
  }
  if (fixed) out.weights = *problem.fixed_weights;
  out.residual = final_qp.residual.norm();
  out.residual_vectors.assign(cells, Vec::Zero(n));
  for (int c = 0; c < cells; ++c) {
    for (std::size_t k = 0; k < coords[c].size(); ++k) {
      out.residual_vectors[c][coords[c][k]] = final_qp.residual[offset[c] + static_cast<int>(k)];
    }
  }
  return out;
}

Vec project_simplex(const Vec& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> s(v.data(), v.data() + n);
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += s[i];
    const double t = (cum - 1.0) / (i + 1);
    if (s[i] - t > 0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

}  // namespace meanset
