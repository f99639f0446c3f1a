#pragma once

// File formats: data sets (JSON or CSV), covers, models, Koszul elements and
// cocycle reports. Rationals are always written as "p/q" strings; the
// optional *_float companions are never read back.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ckls/cech.hpp"
#include "ckls/dataset.hpp"
#include "ckls/error.hpp"
#include "ckls/koszul.hpp"
#include "ckls/model.hpp"

namespace ckls::io {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- scalars and vectors ---------------------------------------------------

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw ParseError("expected a rational string, got " + j.dump());
}

inline json to_json(const Rational& q) { return q.to_string(); }

inline json to_json(const RatVector& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(q.to_string());
  return a;
}

inline json float_json(const RatVector& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(q.to_double());
  return a;
}

inline RatVector vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array, got " + j.dump());
  RatVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = rational_from_json(j[i]);
  return v;
}

inline json to_json(const RatMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(to_json(m.row(i)));
  return a;
}

inline json to_json(const IndexSet& s) {
  json a = json::array();
  for (auto i : s) a.push_back(i);
  return a;
}

// ---- data sets, covers, models -----------------------------------------------

inline WeightedDataSet dataset_from_json(const json& j, WeightPolicy policy) {
  try {
    const std::size_t dim = j.at("ambient_dim").get<std::size_t>();
    std::vector<WeightedPoint> points;
    for (const auto& p : j.at("points")) {
      WeightedPoint wp{vector_from_json(p.at("x")), rational_from_json(p.at("y")), 1};
      if (p.contains("weight")) wp.weight = rational_from_json(p.at("weight"));
      points.push_back(std::move(wp));
    }
    return WeightedDataSet(dim, std::move(points), policy);
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset: ") + e.what());
  }
}

/// Header `x1,...,xN,y,weight`.
inline WeightedDataSet dataset_from_csv(const std::string& text, WeightPolicy policy) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: empty file");
  const auto header = split(line);
  if (header.size() < 3 || header[header.size() - 2] != "y" || header.back() != "weight")
    throw ParseError("csv: header must be x1,...,xN,y,weight");
  const std::size_t dim = header.size() - 2;
  for (std::size_t c = 0; c < dim; ++c)
    if (header[c] != "x" + std::to_string(c + 1))
      throw ParseError("csv: unexpected header column '" + header[c] + "'");

  std::vector<WeightedPoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError("csv line " + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields");
    RatVector x(dim);
    for (std::size_t c = 0; c < dim; ++c) x[c] = Rational::parse(cells[c]);
    points.push_back({std::move(x), Rational::parse(cells[dim]), Rational::parse(cells[dim + 1])});
  }
  return WeightedDataSet(dim, std::move(points), policy);
}

inline WeightedDataSet load_dataset(const std::string& path, WeightPolicy policy) {
  const std::string text = read_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    return dataset_from_csv(text, policy);
  return dataset_from_json(parse_json(text, path), policy);
}

inline Cover cover_from_json(const json& j, WeightedDataSet base) {
  try {
    std::vector<Chart> charts;
    for (const auto& c : j.at("charts")) {
      auto indices = c.at("indices").get<std::vector<std::size_t>>();
      std::sort(indices.begin(), indices.end());
      if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw ParseError("chart '" + c.at("name").get<std::string>() + "' repeats an index");
      charts.push_back({c.at("name").get<std::string>(), ChartMorphism(std::move(indices))});
    }
    return Cover(std::move(base), std::move(charts));
  } catch (const json::exception& e) {
    throw ParseError(std::string("cover: ") + e.what());
  }
}

inline FeatureMap model_from_json(const json& j, std::size_t ambient_dim) {
  try {
    const auto kind = j.at("features").get<std::string>();
    if (kind == "affine") return affine_features(ambient_dim);
    if (kind == "monomials") {
      FeatureMap fm(j.at("exponents").get<std::vector<FeatureMap::Exponents>>());
      if (fm.ambient_dim() != ambient_dim)
        throw DimensionMismatch("model exponents have length " + std::to_string(fm.ambient_dim()) +
                                ", data has dimension " + std::to_string(ambient_dim));
      return fm;
    }
    throw ParseError("model: unknown features '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

// ---- Koszul elements ---------------------------------------------------------

inline std::string wedge_key(const Wedge& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(w[i]);
  }
  return s + "]";
}

inline Wedge parse_wedge_key(const std::string& key) {
  if (key.size() < 2 || key.front() != '[' || key.back() != ']')
    throw ParseError("bad wedge key '" + key + "'");
  Wedge w;
  std::istringstream ss(key.substr(1, key.size() - 2));
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto b = part.find_first_not_of(' ');
    const auto e = part.find_last_not_of(' ');
    if (b == std::string::npos) throw ParseError("bad wedge key '" + key + "'");
    const std::string digits = part.substr(b, e - b + 1);
    if (digits.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("bad wedge key '" + key + "'");
    w.push_back(std::stoul(digits));
  }
  return w;
}

inline json to_json(const KoszulElement& xi) {
  json out = json::object();
  for (const auto& [w, v] : xi.coeffs())
    out[wedge_key(w)] = {{"c0", to_json(v.c0())}, {"c", to_json(v.c())}, {"base", to_json(v.base())}};
  return out;
}

/// `fallback_base` is used when the element has no stored coefficients.
inline KoszulElement koszul_from_json(const json& j, std::size_t degree,
                                      const RatVector& fallback_base) {
  if (!j.is_object()) throw ParseError("Koszul element must be an object, got " + j.dump());
  try {
    std::optional<RatVector> base;
    for (const auto& [key, v] : j.items()) {
      RatVector b = vector_from_json(v.at("base"));
      if (base && *base != b) throw ParseError("Koszul element mixes base points");
      base = std::move(b);
    }
    const RatVector& at = base ? *base : fallback_base;
    KoszulElement xi(at.dim(), degree, at);
    for (const auto& [key, v] : j.items())
      xi.set(parse_wedge_key(key),
             LinearizedElement(at, rational_from_json(v.at("c0")), vector_from_json(v.at("c"))));
    return xi;
  } catch (const json::exception& e) {
    throw ParseError(std::string("Koszul element: ") + e.what());
  }
}

// ---- reports -----------------------------------------------------------------

inline json stats_json(const std::optional<NormStats>& s) {
  if (!s) return nullptr;
  return {{"max", s->max}, {"mean", s->mean}, {"count", s->count}};
}

inline json fits_to_json(const FitMap& fits) {
  json cells = json::object();
  for (const auto& [names, fit] : fits)
    cells[cell_key(names)] = {{"degree", fit.cell.degree()},
                              {"indices", to_json(fit.cell.indices)},
                              {"a_hat", to_json(fit.solution.a_hat)},
                              {"a_hat_float", float_json(fit.solution.a_hat)}};
  return {{"cells", cells}};
}

inline json report_to_json(const CocycleResult& result) {
  const auto& [fits, cochain, report] = result;
  json charts = json::object();
  json pairs = json::object();
  json triples = json::object();
  for (const auto& [names, fit] : fits) {
    const std::string key = cell_key(names);
    json cell = {{"indices", to_json(fit.cell.indices)},
                 {"a_hat", to_json(fit.solution.a_hat)},
                 {"a_hat_float", float_json(fit.solution.a_hat)}};
    if (names.size() == 1) {
      cell["alpha"] = to_json(cochain.alpha.at(names));
      charts[key] = std::move(cell);
    } else if (names.size() == 2) {
      const auto& p = report.pairs.at(names);
      cell["delta"] = to_json(p.delta());
      cell["delta_float"] = float_json(p.delta());
      cell["beta"] = to_json(cochain.beta.at(names));
      cell["residual"] = to_json(p.residual);
      cell["residual_zero"] = p.residual_zero();
      pairs[key] = std::move(cell);
    } else if (names.size() == 3) {
      const auto& t = report.triples.at(names);
      const auto& r = cochain.r.at(names);
      cell["defect_constant"] = to_json(t.defect_constant);
      cell["defect_constant_float"] = float_json(t.defect_constant);
      cell["r"] = r ? to_json(*r) : json(nullptr);
      cell["obstructed"] = t.obstructed();
      cell["outcome"] = to_string(t.outcome);
      cell["residual_zero"] = t.residual_zero();
      triples[key] = std::move(cell);
    }
  }
  const auto m = discrepancy_metrics(report, cochain);
  return {{"charts", charts},
          {"pairs", pairs},
          {"triples", triples},
          {"metrics",
           {{"delta_norm", stats_json(m.delta)},
            {"beta_norm", stats_json(m.beta)},
            {"defect_norm", stats_json(m.defect)}}},
          {"verified", report.verified()}};
}

inline CellNames split_cell_key(const std::string& key) {
  CellNames names;
  std::string part;
  std::istringstream ss(key);
  while (std::getline(ss, part, '|')) names.push_back(part);
  return names;
}

/// Reads the alpha/beta/r entries of a report document as a cochain against
/// `fits`. Unknown cells throw CellMismatch.
inline TotalCochain cochain_from_json(const json& j, const FitMap& fits) {
  auto base_of = [&](const std::string& key, std::size_t size) -> const ChartFit& {
    const CellNames names = split_cell_key(key);
    auto it = fits.find(names);
    if (names.size() != size || it == fits.end())
      throw CellMismatch("cochain refers to unknown cell '" + key + "'");
    return it->second;
  };
  try {
    TotalCochain c;
    for (const auto& [key, v] : j.at("charts").items()) {
      const ChartFit& fit = base_of(key, 1);
      c.alpha.emplace(fit.cell.chart_names, koszul_from_json(v.at("alpha"), 0, fit.solution.a_hat));
    }
    if (j.contains("pairs"))
      for (const auto& [key, v] : j.at("pairs").items()) {
        const ChartFit& fit = base_of(key, 2);
        c.beta.emplace(fit.cell.chart_names, koszul_from_json(v.at("beta"), 1, fit.solution.a_hat));
      }
    if (j.contains("triples"))
      for (const auto& [key, v] : j.at("triples").items()) {
        const ChartFit& fit = base_of(key, 3);
        const json& r = v.at("r");
        c.r.emplace(fit.cell.chart_names,
                    r.is_null() ? std::nullopt
                                : std::optional(koszul_from_json(r, 2, fit.solution.a_hat)));
      }
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("cochain: ") + e.what());
  }
}

}  // namespace ckls::io
