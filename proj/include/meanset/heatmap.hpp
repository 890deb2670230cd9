#pragma once

#include "meanset/recognition.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace meanset {

struct SegmentProbe {
  Vec from, to;
  int count = 0;  // evenly spaced along the geodesic, endpoints included
};

struct HeatmapOptions {
  int samples = 2000;
  double eps = 0.1;
  std::uint64_t seed = 1;
  bool by_volume = false;  // only top-dimensional cells, uniformly
  std::optional<SegmentProbe> segment;
};

struct HeatmapSample {
  CellId cell = -1;
  Vec x;
  double deficit = 0.0;
  bool member = false;
};

/// Reference implementation, one sample after another.
std::vector<HeatmapSample> heatmap_serial(const CubicalComplex& cx, const PointSet& A, const HeatmapOptions& opt);
/// Same rows, computed by `threads` OpenMP workers (0: worker_count()).
std::vector<HeatmapSample> heatmap_parallel(const CubicalComplex& cx, const PointSet& A, const HeatmapOptions& opt,
                                            int threads = 0);

/// MEANSET_THREADS if set and positive, else the OpenMP default.
int worker_count();

/// Header `cell,x0..x{n-1},deficit,decision`, numbers with 12 significant digits.
std::string heatmap_csv(const std::vector<HeatmapSample>& rows, int ambient_dim);

/// The sample point for index i; a pure function of (seed, i).
HeatmapSample draw_sample(const CubicalComplex& cx, const HeatmapOptions& opt, std::uint64_t index);

}  // namespace meanset
