#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudolem/conformal.hpp"
#include "pseudolem/counterexample.hpp"
#include "pseudolem/curve.hpp"
#include "pseudolem/error.hpp"
#include "pseudolem/fingerprint.hpp"
#include "pseudolem/levelcurves.hpp"
#include "pseudolem/polynomial.hpp"

namespace pseudolem {

using Json = nlohmann::json;

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw PreconditionError("complex numbers are written as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json complex_list_to_json(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(complex_to_json(z));
  return a;
}

inline std::vector<Complex> complex_list_from_json(const Json& j) {
  if (!j.is_array()) throw PreconditionError("expected a list of [re, im] pairs");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

// Radian value as a multiple of pi when it is one (denominator up to 12).
inline std::string pi_label(double x, double tol = 1e-9) {
  if (std::abs(x) <= tol) return "0";
  for (int den = 1; den <= 12; ++den) {
    const double k = x * den / std::numbers::pi;
    const double kr = std::round(k);
    if (std::abs(k - kr) * std::numbers::pi / den > tol) continue;
    const long num = std::lround(kr);
    std::string s = num == 1 ? "" : num == -1 ? "-" : std::to_string(num);
    s += "pi";
    if (den != 1) s += "/" + std::to_string(den);
    return s;
  }
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

inline Json angle_to_json(double x) { return Json{{"rad", x}, {"label", pi_label(x)}}; }

// {"coeffs": [[re, im], ...]} in ascending degree.
inline Json polynomial_to_json(const Polynomial& p) { return Json{{"coeffs", complex_list_to_json(p.coeffs())}}; }

inline Polynomial polynomial_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("coeffs")) throw PreconditionError("polynomial JSON needs a \"coeffs\" list");
  std::vector<Complex> c = complex_list_from_json(j.at("coeffs"));
  if (c.empty()) throw PreconditionError("polynomial JSON has an empty \"coeffs\" list");
  return Polynomial(std::move(c));
}

inline Json curve_to_json(const SampledCurve& c) {
  return Json{{"closed", c.closed()}, {"points", complex_list_to_json(c.points())}};
}

inline SampledCurve curve_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("points")) throw PreconditionError("curve JSON needs a \"points\" list");
  const bool closed = j.value("closed", true);
  return SampledCurve(complex_list_from_json(j.at("points")), closed);
}

inline Json root_list_to_json(const std::vector<Root>& roots) {
  Json a = Json::array();
  for (const auto& r : roots) a.push_back(Json{{"value", complex_to_json(r.value)}, {"multiplicity", r.multiplicity}});
  return a;
}

inline Json blaschke_to_json(const BlaschkeProduct& b) {
  return Json{{"zeros", complex_list_to_json(b.zeros)}, {"rotation", complex_to_json(b.rotation)}};
}

inline BlaschkeProduct blaschke_from_json(const Json& j) {
  BlaschkeProduct b;
  b.zeros = complex_list_from_json(j.at("zeros"));
  b.rotation = complex_from_json(j.at("rotation"));
  b.validate();
  return b;
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Columns s_index, re, im, |f|, arg_lift.
inline std::string arc_to_csv(const TracedArc& arc) {
  std::ostringstream os;
  os << "s_index,re,im,abs_f,arg_lift\n";
  for (std::size_t i = 0; i < arc.samples.size(); ++i)
    os << i << ',' << format_double(arc.samples[i].real()) << ',' << format_double(arc.samples[i].imag()) << ','
       << format_double(std::abs(arc.f_values[i])) << ',' << format_double(arc.arg_lift[i]) << '\n';
  return os.str();
}

// Columns t, L(t) at the map's sample nodes.
inline std::string circle_map_to_csv(const CircleMap& m) {
  std::ostringstream os;
  os << "t,L\n";
  const std::vector<double> t = uniform_angles(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) os << format_double(t[k]) << ',' << format_double(m.values()[k]) << '\n';
  return os.str();
}

inline Json map_to_json(const BoundaryCorrespondence& m, bool exterior, double normalization) {
  Json nodes = Json::array();
  const std::vector<double> t = uniform_angles(m.nodes());
  const std::vector<Complex> pts = m.curve().resample(m.nodes());
  for (std::size_t j = 0; j < m.nodes(); ++j)
    nodes.push_back(Json{{"theta", m.theta_nodes()[j]}, {"point", complex_to_json(pts[j])}});
  Json out{{"kind", exterior ? "exterior" : "interior"}, {"center", complex_to_json(m.center())}, {"nodes", nodes},
           {"solver_residual", m.solver_residual()}};
  out[exterior ? "leading_coefficient" : "center_derivative"] = normalization;
  return out;
}

inline Json disk_map_to_json(const DiskMap& m) { return map_to_json(m, false, m.center_derivative()); }
inline Json exterior_map_to_json(const ExteriorMap& m) { return map_to_json(m, true, m.leading_coefficient()); }

namespace detail {

inline std::pair<TrigInterpolant, std::vector<double>> read_nodes(const Json& j, const char* kind) {
  if (j.value("kind", "") != kind) throw PreconditionError(std::string("map JSON is not of kind ") + kind);
  std::vector<Complex> pts;
  std::vector<double> theta;
  for (const auto& n : j.at("nodes")) {
    theta.push_back(n.at("theta").get<double>());
    pts.push_back(complex_from_json(n.at("point")));
  }
  check_nodes(pts.size());
  return {TrigInterpolant(pts), std::move(theta)};
}

}  // namespace detail

inline DiskMap disk_map_from_json(const Json& j) {
  auto [curve, theta] = detail::read_nodes(j, "interior");
  return disk_map_from(std::move(curve), std::move(theta), complex_from_json(j.at("center")),
                       j.at("center_derivative").get<double>(), j.value("solver_residual", 0.0));
}

inline ExteriorMap exterior_map_from_json(const Json& j) {
  auto [curve, theta] = detail::read_nodes(j, "exterior");
  return exterior_map_from(std::move(curve), std::move(theta), complex_from_json(j.at("center")),
                           j.at("leading_coefficient").get<double>(), j.value("solver_residual", 0.0));
}

inline Json table_report_to_json(const TableReport& rep) {
  Json rows = Json::array();
  for (const auto& r : rep.rows) {
    rows.push_back(Json{
        {"segment", r.expected.label},
        {"modulus", {{"expected", r.expected.modulus}, {"measured", r.modulus}, {"rel_deviation", r.modulus_rel_dev}}},
        {"total_change",
         {{"expected", angle_to_json(r.expected.total_change)},
          {"measured", angle_to_json(r.total_change)},
          {"deviation", r.change_dev}}},
        {"initial_arg",
         {{"expected", angle_to_json(r.expected.initial_arg)},
          {"measured", angle_to_json(r.initial_arg)},
          {"deviation", r.initial_dev}}},
        {"final_arg",
         {{"expected", angle_to_json(r.expected.final_arg)},
          {"measured", angle_to_json(r.final_arg)},
          {"deviation", r.final_dev}}},
        {"ok", r.ok}});
  }
  std::size_t ok = 0;
  for (const auto& r : rep.rows) ok += r.ok ? 1 : 0;
  return Json{{"rows", rows},
              {"rows_ok", ok},
              {"rows_total", rep.rows.size()},
              {"table_tol", rep.table_tol},
              {"modulus_tol", rep.modulus_tol},
              {"change_sum", {{"expected", rep.change_sum_expected}, {"measured", rep.change_sum_measured}}}};
}

inline Json noninjectivity_to_json(const NoninjectivityResult& r, const GridSpec& g, std::size_t max_witnesses = 20) {
  Json w = Json::array();
  for (std::size_t i = 0; i < r.witnesses.size() && i < max_witnesses; ++i) w.push_back(complex_to_json(r.witnesses[i]));
  return Json{{"degree", r.degree},
              {"witness_count", r.witnesses.size()},
              {"witnesses", w},
              {"evaluated", r.evaluated},
              {"skipped", r.skipped},
              {"max_residual", r.max_residual},
              {"grid", {{"r_min", g.r_min}, {"r_max", g.r_max}, {"n_arg", g.n_arg}, {"n_mod", g.n_mod}, {"arg_offset", g.arg_offset}}}};
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("invalid JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path);
  out << text;
}

// Minimal SVG canvas in world coordinates (y up).
class SvgCanvas {
 public:
  SvgCanvas(Complex lo, Complex hi, int width = 800) : lo_(lo), hi_(hi), width_(width) {
    const double w = hi.real() - lo.real(), h = hi.imag() - lo.imag();
    if (!(w > 0.0) || !(h > 0.0)) throw PreconditionError("SVG view box is empty");
    scale_ = width / w;
    height_ = static_cast<int>(std::ceil(h * scale_));
  }

  static SvgCanvas fitting(const std::vector<Complex>& pts, double margin = 0.08, int width = 800) {
    if (pts.empty()) throw PreconditionError("nothing to draw");
    Complex lo = pts[0], hi = pts[0];
    for (const auto& z : pts) {
      lo = {std::min(lo.real(), z.real()), std::min(lo.imag(), z.imag())};
      hi = {std::max(hi.real(), z.real()), std::max(hi.imag(), z.imag())};
    }
    const double pad = margin * std::max({hi.real() - lo.real(), hi.imag() - lo.imag(), 1e-6});
    return SvgCanvas(lo - Complex{pad, pad}, hi + Complex{pad, pad}, width);
  }

  void polyline(const std::vector<Complex>& pts, bool closed, const std::string& color, double stroke = 1.5) {
    std::ostringstream os;
    os << "<" << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << stroke << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << fmt(x(pts[i])) << ',' << fmt(y(pts[i]));
    os << "\"/>\n";
    body_ += os.str();
  }

  void dot(Complex z, const std::string& color, double r = 3.0) {
    std::ostringstream os;
    os << "<circle cx=\"" << fmt(x(z)) << "\" cy=\"" << fmt(y(z)) << "\" r=\"" << r << "\" fill=\"" << color << "\"/>\n";
    body_ += os.str();
  }

  void text(Complex z, const std::string& s, const std::string& color = "black") {
    std::ostringstream os;
    os << "<text x=\"" << fmt(x(z)) << "\" y=\"" << fmt(y(z)) << "\" font-size=\"12\" fill=\"" << color << "\">" << escape(s)
       << "</text>\n";
    body_ += os.str();
  }

  std::string str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
       << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_ << "</svg>\n";
    return os.str();
  }

 private:
  double x(Complex z) const { return (z.real() - lo_.real()) * scale_; }
  double y(Complex z) const { return (hi_.imag() - z.imag()) * scale_; }
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
  }

  Complex lo_, hi_;
  int width_ = 800, height_ = 800;
  double scale_ = 1.0;
  std::string body_;
};

}  // namespace pseudolem
