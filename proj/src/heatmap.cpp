#include "meanset/heatmap.hpp"

#include "meanset/boundary.hpp"

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <random>

namespace meanset {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// 53 random bits into [0, 1); spelled out so the stream is identical on every
// standard library.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<CellId> candidate_cells(const CubicalComplex& cx, bool by_volume) {
  std::vector<CellId> out;
  int top = 0;
  for (std::size_t i = 0; i < cx.num_maximal(); ++i) top = std::max(top, cx.cell(static_cast<CellId>(i)).dim());
  for (std::size_t i = 0; i < cx.num_maximal(); ++i) {
    if (!by_volume || cx.cell(static_cast<CellId>(i)).dim() == top) out.push_back(static_cast<CellId>(i));
  }
  return out;
}

void evaluate(const CubicalComplex& cx, const PointSet& A, double eps, HeatmapSample& s) {
  s.deficit = mean_deficit(cx, A, s.x).value;
  s.member = s.deficit <= eps;
}

std::vector<HeatmapSample> probes(const CubicalComplex& cx, const PointSet& A, const HeatmapOptions& opt) {
  std::vector<HeatmapSample> out;
  if (!opt.segment || opt.segment->count <= 0) return out;
  const Geodesic g = geodesic(cx, opt.segment->from, opt.segment->to);
  const int k = opt.segment->count;
  for (int j = 0; j < k; ++j) {
    HeatmapSample s;
    s.x = point_along(g, k == 1 ? 0.5 : static_cast<double>(j) / (k - 1));
    const LocatedPoint loc = cx.locate(s.x);
    s.x = loc.coords;
    s.cell = cx.maximal_cells_containing(loc).front();
    const GeneralResult r = recognize_general(cx, A, s.x, opt.eps);
    s.deficit = r.certificate.deficit;
    s.member = s.deficit <= opt.eps;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

HeatmapSample draw_sample(const CubicalComplex& cx, const HeatmapOptions& opt, std::uint64_t index) {
  const std::vector<CellId> cells = candidate_cells(cx, opt.by_volume);
  std::mt19937_64 rng(splitmix64(splitmix64(opt.seed) ^ index));
  HeatmapSample s;
  s.cell = cells[std::min(cells.size() - 1, static_cast<std::size_t>(unit(rng) * cells.size()))];
  const CubeCell& c = cx.cell(s.cell);
  s.x = Vec(cx.ambient_dim());
  for (int i = 0; i < cx.ambient_dim(); ++i) s.x[i] = c.lower(i);
  for (int ax : c.axes) s.x[ax] += unit(rng);
  return s;
}

std::vector<HeatmapSample> heatmap_serial(const CubicalComplex& cx, const PointSet& A, const HeatmapOptions& opt) {
  std::vector<HeatmapSample> rows;
  rows.reserve(opt.samples);
  for (int i = 0; i < opt.samples; ++i) {
    HeatmapSample s = draw_sample(cx, opt, static_cast<std::uint64_t>(i));
    evaluate(cx, A, opt.eps, s);
    rows.push_back(std::move(s));
  }
  for (HeatmapSample& s : probes(cx, A, opt)) rows.push_back(std::move(s));
  return rows;
}

std::vector<HeatmapSample> heatmap_parallel(const CubicalComplex& cx, const PointSet& A, const HeatmapOptions& opt,
                                            int threads) {
  if (threads <= 0) threads = worker_count();
  std::vector<HeatmapSample> rows(opt.samples);
  std::vector<std::exception_ptr> errors(opt.samples);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
  for (int i = 0; i < opt.samples; ++i) {
    try {
      rows[i] = draw_sample(cx, opt, static_cast<std::uint64_t>(i));
      evaluate(cx, A, opt.eps, rows[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (HeatmapSample& s : probes(cx, A, opt)) rows.push_back(std::move(s));
  return rows;
}

int worker_count() {
  if (const char* env = std::getenv("MEANSET_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

std::string heatmap_csv(const std::vector<HeatmapSample>& rows, int ambient_dim) {
  std::string out = "cell";
  for (int i = 0; i < ambient_dim; ++i) out += ",x" + std::to_string(i);
  out += ",deficit,decision\n";
  char buf[64];
  auto num = [&](double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
  };
  for (const HeatmapSample& s : rows) {
    out += std::to_string(s.cell);
    for (int i = 0; i < ambient_dim; ++i) {
      out += ',';
      num(s.x[i]);
    }
    out += ',';
    num(s.deficit);
    out += s.member ? ",member\n" : ",nonmember\n";
  }
  return out;
}

}  // namespace meanset
