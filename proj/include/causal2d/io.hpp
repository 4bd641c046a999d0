#pragma once

// File formats: sampled fields (JSON or CSV), plane maps and test functions
// (JSON), and two-column CSV output for 1-D functions.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "causal2d/causal.hpp"
#include "causal2d/core.hpp"
#include "causal2d/errors.hpp"
#include "causal2d/expr.hpp"
#include "causal2d/testfn.hpp"

namespace causal2d::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a temporary sibling and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw InvalidArgument("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidArgument("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(what + ": malformed JSON: " + e.what());
  }
}

inline Rect rect_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw InvalidArgument(what + " must be [u_min, u_max, v_min, v_max]");
  for (const auto& x : j)
    if (!x.is_number()) throw InvalidArgument(what + " entries must be numbers");
  return Rect::make(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

inline ordered_json rect_to_json(const Rect& r) { return ordered_json::array({r.u_min, r.u_max, r.v_min, r.v_max}); }

// ---- fields ----

inline SampledField2D field_from_json(const json& j) {
  try {
    const Rect r = rect_from_json(j.at("rect"), "field rect");
    const auto nu = j.at("nu").get<std::size_t>(), nv = j.at("nv").get<std::size_t>();
    auto values = j.at("values").get<std::vector<double>>();
    return SampledField2D(Grid2D(r, nu, nv), std::move(values));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field file: ") + e.what());
  }
}

inline ordered_json field_to_json(const SampledField2D& f) {
  const Grid2D& g = f.grid();
  ordered_json j;
  j["rect"] = rect_to_json(g.rect());
  j["nu"] = g.nu();
  j["nv"] = g.nv();
  j["values"] = std::vector<double>(f.values().begin(), f.values().end());
  return j;
}

/// `# rect u_min u_max v_min v_max nu nv`, then nv lines of nu comma-separated values.
inline SampledField2D field_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("field CSV is empty");
  std::istringstream head(line);
  std::string hash, tag;
  double u0, u1, v0, v1;
  std::size_t nu, nv;
  if (!(head >> hash >> tag >> u0 >> u1 >> v0 >> v1 >> nu >> nv) || hash != "#" || tag != "rect")
    throw InvalidArgument("field CSV header must be '# rect u_min u_max v_min v_max nu nv'");
  std::vector<double> values;
  values.reserve(nu * nv);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("field CSV row " + std::to_string(rows + 1) + ": bad value '" + cell + "'");
      }
      ++cols;
    }
    if (cols != nu)
      throw InvalidArgument("field CSV row " + std::to_string(rows + 1) + " has " + std::to_string(cols) +
                            " values, expected " + std::to_string(nu));
    ++rows;
  }
  if (rows != nv) throw InvalidArgument("field CSV has " + std::to_string(rows) + " rows, expected " + std::to_string(nv));
  return SampledField2D(Grid2D(Rect::make(u0, u1, v0, v1), nu, nv), std::move(values));
}

inline std::string field_to_csv(const SampledField2D& f) {
  const Grid2D& g = f.grid();
  const Rect& r = g.rect();
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "# rect %.17g %.17g %.17g %.17g %zu %zu\n", r.u_min, r.u_max, r.v_min, r.v_max,
                g.nu(), g.nv());
  out += buf;
  for (std::size_t j = 0; j < g.nv(); ++j) {
    for (std::size_t i = 0; i < g.nu(); ++i) {
      std::snprintf(buf, sizeof buf, i ? ",%.17g" : "%.17g", f.at(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

/// JSON or CSV by extension.
inline SampledField2D load_field(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (path.extension() == ".csv") return field_from_csv(text);
  return field_from_json(parse_json(text, path.string()));
}

inline void save_field(const std::filesystem::path& path, const SampledField2D& f) {
  write_atomic(path, path.extension() == ".csv" ? field_to_csv(f) : field_to_json(f).dump() + "\n");
}

/// Two columns: coordinate, value.
inline std::string function_to_csv(const SampledFunction1D& fn) {
  std::string out;
  char buf[64];
  for (std::size_t k = 0; k < fn.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", fn.coords()[k], fn.values()[k]);
    out += buf;
  }
  return out;
}

// ---- expressions ----

inline expr::ExprPtr expr_from_json(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("expr") || !j["expr"].is_string())
    throw InvalidArgument(what + " must be {\"expr\": \"...\"}");
  try {
    return expr::parse(j["expr"].get<std::string>());
  } catch (const ParseError& e) {
    throw InvalidArgument(what + ": " + e.what());
  }
}

// ---- maps ----

/// {"expr": "..."} with every variable bound to the argument, or {"table": [[x, y], ...]}.
inline MonotoneMap1D monotone_from_json(const json& j, Interval domain, const std::string& what) {
  if (j.is_object() && j.contains("table")) {
    std::vector<double> xs, ys;
    try {
      for (const auto& row : j.at("table")) {
        if (!row.is_array() || row.size() != 2) throw InvalidArgument(what + " table rows must be [x, y]");
        xs.push_back(row[0].get<double>());
        ys.push_back(row[1].get<double>());
      }
    } catch (const json::exception& e) {
      throw InvalidArgument(what + " table: " + e.what());
    }
    SampledFunction1D table(std::move(xs), std::move(ys));
    const Interval d = table.domain();
    const double slack = 1e-12 * domain.span();
    if (std::abs(d.lo - domain.lo) > slack || std::abs(d.hi - domain.hi) > slack)
      throw InvalidArgument(what + " table must span exactly its domain interval");
    return MonotoneMap1D::from_table(std::move(table));
  }
  const expr::ExprPtr e = expr_from_json(j, what);
  return MonotoneMap1D::from_function([e](double s) { return e->eval(expr::Bindings::all(s)); }, domain);
}

/// Split maps: "orientation" chooses the layout, (phi(u), psi(v)) for
/// "increasing" and (phi(v), psi(u)) for "decreasing". The factors are not
/// required to match it, so non-causal split maps can be described too.
/// General maps: sigma, tau in u and v, a codomain, and optionally an inverse
/// {"u": {...}, "v": {...}} written in the image coordinates as u and v;
/// without one the inverse is computed numerically.
inline PlaneMap map_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("map file must hold a JSON object");
  const std::string kind = j.value("kind", "");
  if (!j.contains("domain")) throw InvalidArgument("map file needs a domain");
  const Rect domain = rect_from_json(j["domain"], "map domain");
  if (kind == "split") {
    const std::string orient = j.value("orientation", "");
    if (orient != "increasing" && orient != "decreasing")
      throw InvalidArgument("split map orientation must be \"increasing\" or \"decreasing\"");
    if (!j.contains("phi") || !j.contains("psi")) throw InvalidArgument("split map needs phi and psi");
    const bool swapped = orient == "decreasing";
    const Interval phi_dom = swapped ? domain.v_range() : domain.u_range();
    const Interval psi_dom = swapped ? domain.u_range() : domain.v_range();
    const MonotoneMap1D phi = monotone_from_json(j["phi"], phi_dom, "phi");
    const MonotoneMap1D psi = monotone_from_json(j["psi"], psi_dom, "psi");
    const Direction want = swapped ? Direction::decreasing : Direction::increasing;
    if (phi.direction() == want && psi.direction() == want) return make_causal_iso(phi, psi);
    return PlaneMap::split_layout(phi, psi, swapped);
  }
  if (kind == "general") {
    if (!j.contains("sigma") || !j.contains("tau")) throw InvalidArgument("general map needs sigma and tau");
    const expr::ExprPtr sigma = expr_from_json(j["sigma"], "sigma");
    const expr::ExprPtr tau = expr_from_json(j["tau"], "tau");
    PlaneMap::Fn forward = [sigma, tau](double u, double v) {
      const auto b = expr::Bindings::uv(u, v);
      return Point{sigma->eval(b), tau->eval(b)};
    };
    const Rect codomain =
        j.contains("codomain") ? rect_from_json(j["codomain"], "map codomain") : image_bounds(forward, domain);
    PlaneMap::Fn inverse;
    if (j.contains("inverse")) {
      const json& inv = j["inverse"];
      if (!inv.is_object() || !inv.contains("u") || !inv.contains("v"))
        throw InvalidArgument("inverse must be {\"u\": {...}, \"v\": {...}}");
      const expr::ExprPtr iu = expr_from_json(inv["u"], "inverse.u");
      const expr::ExprPtr iv = expr_from_json(inv["v"], "inverse.v");
      inverse = [iu, iv](double s, double t) {
        const auto b = expr::Bindings::uv(s, t);
        return Point{iu->eval(b), iv->eval(b)};
      };
    } else {
      inverse = newton_inverse(forward, domain);
    }
    return PlaneMap(std::move(forward), std::move(inverse), domain, codomain);
  }
  throw InvalidArgument("map kind must be \"split\" or \"general\"");
}

inline PlaneMap load_map(const std::filesystem::path& path) {
  return map_from_json(parse_json(read_text(path), path.string()));
}

// ---- test functions ----

/// {"kind":"bump","center":c,"radius":r[,"amplitude":a][,"normalized":true]}.
inline Bump1D bump_from_json(const json& j) {
  try {
    if (j.value("kind", "") != "bump") throw InvalidArgument("expected {\"kind\":\"bump\", ...}");
    const double c = j.at("center").get<double>(), r = j.at("radius").get<double>();
    if (j.value("normalized", false)) return mollifier(c, r);
    return make_bump(c, r, j.value("amplitude", 1.0));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bump: ") + e.what());
  }
}

/// {"kind":"tensor","u":<bump>,"v":<bump>}.
inline TestFunction2D test_function_from_json(const json& j) {
  if (!j.is_object() || j.value("kind", "") != "tensor")
    throw InvalidArgument("test function must be {\"kind\":\"tensor\",\"u\":{...},\"v\":{...}}");
  if (!j.contains("u") || !j.contains("v")) throw InvalidArgument("tensor test function needs u and v factors");
  return TestFunction2D::tensor(bump_from_json(j["u"]), bump_from_json(j["v"]));
}

}  // namespace causal2d::io
