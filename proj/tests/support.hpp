#pragma once

#include "meanset/io.hpp"

#include <string>

namespace meanset::testing {

struct Example {
  CubicalComplex cx;
  PointSet A;
  Json expected;
};

inline std::string corpus_path(const std::string& file) { return std::string(MEANSET_CORPUS_DIR) + "/" + file; }

inline Example load_example(const std::string& name) {
  CubicalComplex cx = complex_from_json(read_json_file(corpus_path(name + ".json")));
  PointSet A = point_set_from_json(cx, read_json_file(corpus_path(name + "_A.json")));
  return {std::move(cx), std::move(A), read_json_file(corpus_path(name + "_expected.json"))};
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Distance from x to the convex hull of pts by brute force: project onto the
// affine hull of every subset and keep projections with nonnegative weights.
inline double hull_distance_bruteforce(const std::vector<Vec>& pts, const Vec& x) {
  const int m = static_cast<int>(pts.size());
  double best = 1e300;
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) idx.push_back(i);
    }
    const Vec& p0 = pts[idx[0]];
    const int k = static_cast<int>(idx.size()) - 1;
    Vec lam = Vec::Zero(k + 1);
    Vec proj = p0;
    if (k > 0) {
      Eigen::MatrixXd D(x.size(), k);
      for (int j = 0; j < k; ++j) D.col(j) = pts[idx[j + 1]] - p0;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.rank() < k) continue;
      const Vec c = svd.solve(x - p0);
      proj = p0 + D * c;
      lam.tail(k) = c;
      lam[0] = 1.0 - c.sum();
    } else {
      lam[0] = 1.0;
    }
    if (lam.minCoeff() < -1e-12) continue;
    best = std::min(best, (x - proj).norm());
  }
  return best;
}

}  // namespace meanset::testing
