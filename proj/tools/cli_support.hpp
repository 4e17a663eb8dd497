#pragma once

// Helpers for the command-line tool: angle parsing, a JSON writer with a
// fixed 17-digit number format, and the run manifest.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "coorbital/coorbital.hpp"

namespace coorbital::cli {

using Json = nlohmann::ordered_json;

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline double parse_number(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("malformed " + std::string(what) + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw DomainError("malformed " + std::string(what) + " '" + s + "'");
  return v;
}

/// Radians, or a rational multiple of pi: "pi", "-pi/4", "3pi/7", "3*pi/7".
inline double parse_angle(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw DomainError("empty angle");
  const std::size_t p = s.find("pi");
  if (p == std::string::npos) return parse_number(s, "angle");

  std::string num = s.substr(0, p);
  std::string rest = s.substr(p + 2);
  if (!num.empty() && num.back() == '*') num.pop_back();
  double coef = 1.0;
  if (num == "-")
    coef = -1.0;
  else if (num == "+" || num.empty())
    coef = 1.0;
  else
    coef = parse_number(num, "angle");
  double den = 1.0;
  if (!rest.empty()) {
    if (rest[0] != '/') throw DomainError("malformed angle '" + s + "'");
    den = parse_number(rest.substr(1), "angle");
    if (den == 0.0) throw DomainError("zero denominator in angle '" + s + "'");
  }
  return coef * kPi / den;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<double> parse_angle_list(std::string_view s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_angle(part));
  return out;
}

inline std::vector<double> parse_number_list(std::string_view s, std::string_view what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_number(part, what));
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json(std::string& out, const Json& j, int indent) {
  const std::string pad(std::size_t(indent) * 2, ' ');
  const std::string inner(std::size_t(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        write_json(out, it.value(), indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(out, j[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write_json(out, j[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Pretty JSON with every float written as %.17g (non-finite as null).
inline std::string to_text(const Json& j) {
  std::string out;
  detail::write_json(out, j, 0);
  out += "\n";
  return out;
}

inline Json to_json(const Interval& x) { return Json{{"lo", x.lo()}, {"hi", x.hi()}}; }

inline Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

inline Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const Inertia& in) { return Json{{"plus", in.plus}, {"zero", in.zero}, {"minus", in.minus}}; }

inline Json to_json(const StabilityReport& r) {
  return Json{{"n", r.n},
              {"inertia_H", to_json(r.inertia_H)},
              {"inertia_A", to_json(r.inertia_A)},
              {"inertia_consistent", r.inertia_consistent},
              {"morse_index", r.morse_index},
              {"linearization_counts",
               {{"imaginary", r.linearization_counts.imaginary},
                {"positive_real", r.linearization_counts.positive},
                {"negative_real", r.linearization_counts.negative}}},
              {"is_linearly_stable_candidate", r.is_linearly_stable_candidate},
              {"residual", r.residual},
              {"residual_warning", r.residual_warning}};
}

inline Json to_json(const CertificateReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  Json asserts = Json::array();
  for (const auto& a : r.assertions) {
    Json j{{"name", a.name}};
    j["enclosure"] = a.enclosure ? to_json(*a.enclosure) : Json(nullptr);
    j["passed"] = a.passed;
    j["detail"] = a.detail;
    asserts.push_back(j);
  }
  Json masses = Json::array(), angles = Json::array();
  for (const auto& m : r.masses) masses.push_back(to_json(m));
  for (const auto& t : r.angles) angles.push_back(to_json(t));
  return Json{{"target", r.target}, {"passed", r.passed()}, {"parameters", params},
              {"assertions", asserts}, {"angles", angles},  {"masses", masses}};
}

inline Json to_json(const CoverageReport& r) {
  Json slices = Json::array();
  for (const auto& s : r.slices) {
    Json boxes = Json::array();
    for (const auto& b : s.unresolved)
      boxes.push_back(Json{{"id", b.id},
                           {"theta1", to_json(b.theta1)},
                           {"theta2", to_json(b.theta2)},
                           {"depth", b.depth},
                           {"det_sign_change", b.det_sign_change}});
    Json masses = s.masses ? Json{(*s.masses)[0], (*s.masses)[1], (*s.masses)[2]} : Json("kernel");
    slices.push_back(Json{{"label", s.label},
                          {"masses", masses},
                          {"certified_fraction", s.certified_fraction()},
                          {"area_total", s.area_total},
                          {"area_det_nonzero", s.area_det_nonzero},
                          {"area_no_central_configuration", s.area_no_cc},
                          {"area_unresolved", s.area_unresolved},
                          {"boxes_det_nonzero", s.boxes_det_nonzero},
                          {"boxes_no_central_configuration", s.boxes_no_cc},
                          {"boxes_unresolved", s.boxes_unresolved},
                          {"boxes_evaluated", s.boxes_evaluated},
                          {"det_sign_change_boxes", s.det_sign_change_boxes},
                          {"resource_limit_hit", s.resource_limit_hit},
                          {"unresolved_boxes", boxes}});
  }
  return Json{{"sampling", std::string(to_string(r.options.sampling))},
              {"grid_n", r.options.grid_n},
              {"max_depth", r.options.max_depth},
              {"max_boxes", r.options.max_boxes},
              {"s", r.options.s},
              {"certified_fraction", r.certified_fraction()},
              {"det_sign_change_boxes", r.det_sign_change_boxes()},
              {"resource_limit_hit", r.resource_limit_hit()},
              {"slices", slices}};
}

/// CSV rows `tag,curve_id,theta1,theta2`.
inline std::string polylines_csv(const TraceResult& t) {
  std::string out = "tag,curve_id,theta1,theta2\n";
  for (std::size_t c = 0; c < t.polylines.size(); ++c)
    for (const auto& p : t.polylines[c].points)
      out += std::string(to_string(t.tag)) + "," + std::to_string(c) + "," + format_double(p[0]) + "," +
             format_double(p[1]) + "\n";
  return out;
}

struct RunManifest {
  std::string command;
  Json parameters = Json::object();
  std::string tool_version = kVersion;
  std::string timestamp;

  /// The embedded copy leaves out the timestamp so reruns are byte-identical.
  Json embedded() const { return Json{{"command", command}, {"parameters", parameters}, {"tool_version", tool_version}}; }
  Json full() const {
    Json j = embedded();
    j["timestamp"] = timestamp;
    return j;
  }
};

}  // namespace coorbital::cli
