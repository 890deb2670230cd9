#include "meanset/io.hpp"

#include <fstream>
#include <sstream>

namespace meanset {

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line and column.
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i < at; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

namespace {

std::vector<int> int_array(const Json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw InputError(std::string(what) + " must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

}  // namespace

CubicalComplex complex_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("complex document must be an object");
  if (!doc.contains("ambient_dim") || !doc["ambient_dim"].is_number_integer()) {
    throw InputError("complex document needs an integer ambient_dim");
  }
  const int n = doc["ambient_dim"].get<int>();
  if (n < 1) throw InputError("ambient_dim must be positive");
  if (!doc.contains("cells") || !doc["cells"].is_array()) throw InputError("complex document needs a cells array");
  std::vector<CubeCell> cells;
  for (const auto& c : doc["cells"]) {
    if (!c.is_object() || !c.contains("base") || !c.contains("axes")) {
      throw InputError("each cell needs base and axes");
    }
    cells.push_back({int_array(c["base"], "base"), int_array(c["axes"], "axes")});
  }
  return CubicalComplex::from_cells(n, std::move(cells));
}

Json complex_to_json(const CubicalComplex& cx) {
  Json cells = Json::array();
  for (std::size_t i = 0; i < cx.num_maximal(); ++i) {
    const CubeCell& c = cx.cell(static_cast<CellId>(i));
    cells.push_back({{"base", c.base}, {"axes", c.axes}});
  }
  return {{"ambient_dim", cx.ambient_dim()}, {"cells", cells}};
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError("expected an array of numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Json vec_to_json(const Vec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

PointSet point_set_from_json(const CubicalComplex& cx, const Json& doc) {
  std::vector<Vec> points;
  std::vector<std::string> labels;
  const Json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("points")) throw InputError("point set object needs points");
    list = &doc["points"];
    if (doc.contains("labels")) {
      for (const auto& l : doc["labels"]) labels.push_back(l.get<std::string>());
    }
  }
  if (!list->is_array()) throw InputError("point set must be an array of points");
  for (const auto& p : *list) points.push_back(vec_from_json(p));
  return make_point_set(cx, points, labels);
}

Json to_json(const ValidationReport& r) {
  Json v = Json::array();
  for (const Violation& x : r.violations) v.push_back({{"kind", x.kind}, {"detail", x.detail}});
  return {{"ok", r.ok()}, {"violations", v}, {"simple_connectivity", r.simple_connectivity}};
}

Json to_json(const Geodesic& g) {
  Json bp = Json::array();
  for (const Vec& y : g.breakpoints) bp.push_back(vec_to_json(y));
  return {{"breakpoints", bp}, {"cells", g.cells}, {"length", g.length}};
}

Json to_json(const Certificate& c) {
  Json out;
  if (c.kind == Certificate::Kind::Membership) {
    out["kind"] = "membership";
    out["weights"] = c.weights;
  } else {
    out["kind"] = "non-membership";
    out["witness"] = vec_to_json(c.witness);
    out["margins"] = c.margins;
  }
  out["deficit"] = c.deficit;
  return out;
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "membership") {
    c.kind = Certificate::Kind::Membership;
    c.weights = j.at("weights").get<Weights>();
  } else if (kind == "non-membership") {
    c.kind = Certificate::Kind::NonMembership;
    c.witness = vec_from_json(j.at("witness"));
    if (j.contains("margins")) c.margins = j["margins"].get<Weights>();
  } else {
    throw InputError("unknown certificate kind " + kind);
  }
  if (j.contains("deficit")) c.deficit = j["deficit"].get<double>();
  return c;
}

Json to_json(const DeficitReport& r) {
  Json per = Json::object();
  for (const auto& [cell, v] : r.per_cell) per[std::to_string(cell)] = v;
  Json out = {{"deficit", r.value}, {"per_cell", per}};
  if (!r.weights.empty()) out["weights"] = r.weights;
  if (r.direction.size() > 0) out["direction"] = vec_to_json(r.direction);
  return out;
}

Json to_json(const GeneralResult& r) {
  Json out = to_json(r.certificate);
  Json per = Json::object();
  for (const auto& [cell, pc] : r.per_cell) {
    per[std::to_string(cell)] = {{"value0", pc.value0}, {"residual", pc.residual}};
  }
  out["per_cell"] = per;
  return out;
}

}  // namespace meanset
