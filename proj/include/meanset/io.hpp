#pragma once

#include "meanset/boundary.hpp"
#include "meanset/complex.hpp"
#include "meanset/geodesic.hpp"
#include "meanset/recognition.hpp"

#include <json.hpp>

#include <string>

namespace meanset {

using Json = nlohmann::ordered_json;

/// Reads a file and parses it; parse errors carry line and column.
Json read_json_file(const std::string& path);
Json parse_json(const std::string& text, const std::string& origin = "input");

/// { "ambient_dim": n, "cells": [ { "base": [...], "axes": [...] } ] }
CubicalComplex complex_from_json(const Json& doc);
Json complex_to_json(const CubicalComplex& cx);

/// Either [[x, ...], ...] or { "labels": [...], "points": [[...], ...] }.
PointSet point_set_from_json(const CubicalComplex& cx, const Json& doc);

Vec vec_from_json(const Json& j);
Json vec_to_json(const Vec& v);

Json to_json(const ValidationReport& r);
Json to_json(const Geodesic& g);
Json to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);
Json to_json(const DeficitReport& r);
/// Certificate plus "per_cell": { id: { "value0": bool, "residual": x } }.
Json to_json(const GeneralResult& r);

}  // namespace meanset
