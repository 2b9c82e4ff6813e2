#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "pseudolem/conformal.hpp"
#include "pseudolem/counterexample.hpp"
#include "pseudolem/fingerprint.hpp"
#include "pseudolem/io.hpp"
#include "pseudolem/levelcurves.hpp"
#include "pseudolem/polynomial.hpp"

namespace fs = std::filesystem;
using namespace pseudolem;

namespace {

struct RunConfig {
  std::size_t nodes = 512;
  std::size_t samples = 512;
  std::size_t curve_samples = 256;
  GridSpec grid;
  double table_tol = 1e-3;
  double root_tol = 1e-5;
  std::string output_dir = ".";

  void validate() const {
    auto pow2 = [](std::size_t n) { return n >= 64 && n <= 4096 && (n & (n - 1)) == 0; };
    if (!pow2(nodes) || !pow2(samples)) throw PreconditionError("node and sample counts must be powers of two in [64, 4096]");
    if (curve_samples < 16) throw PreconditionError("curve_samples must be at least 16");
    if (!(table_tol > 0.0) || !(root_tol > 0.0)) throw PreconditionError("tolerances must be positive");
    if (!(grid.r_min > 0.0) || !(grid.r_max > grid.r_min) || grid.n_arg < 1 || grid.n_mod < 1)
      throw PreconditionError("grid needs 0 < r_min < r_max and positive counts");
  }
};

RunConfig load_config(const std::string& path) {
  RunConfig c;
  if (!path.empty()) {
    const Json j = read_json_file(path);
    c.nodes = j.value("nodes", c.nodes);
    c.samples = j.value("samples", c.samples);
    c.curve_samples = j.value("curve_samples", c.curve_samples);
    c.table_tol = j.value("table_tol", c.table_tol);
    c.root_tol = j.value("root_tol", c.root_tol);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("grid")) {
      const Json& g = j.at("grid");
      c.grid.r_min = g.value("r_min", c.grid.r_min);
      c.grid.r_max = g.value("r_max", c.grid.r_max);
      c.grid.n_arg = g.value("n_arg", c.grid.n_arg);
      c.grid.n_mod = g.value("n_mod", c.grid.n_mod);
      c.grid.arg_offset = g.value("arg_offset", c.grid.arg_offset);
      c.grid.threads = g.value("threads", c.grid.threads);
    }
  }
  if (const char* dir = std::getenv("PSEUDOLEM_OUTPUT_DIR"); dir && *dir) c.output_dir = dir;
  return c;
}

std::string output_path(const RunConfig& cfg, const std::string& name) {
  fs::path p(name);
  if (p.is_relative()) p = fs::path(cfg.output_dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

std::string with_suffix(const std::string& path, const std::string& suffix, const std::string& ext) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + ext)).string();
}

// "unit-circle", "circle:R", "ellipse:A,B" or a curve JSON file.
SampledCurve load_curve(const std::string& spec, std::size_t n) {
  if (spec == "unit-circle") return unit_circle(n);
  if (spec.rfind("circle:", 0) == 0) return circle_curve(0.0, std::stod(spec.substr(7)), n);
  if (spec.rfind("ellipse:", 0) == 0) {
    const std::string rest = spec.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw PreconditionError("ellipse curve is written ellipse:A,B");
    return ellipse_curve(std::stod(rest.substr(0, comma)), std::stod(rest.substr(comma + 1)), n);
  }
  return curve_from_json(read_json_file(spec));
}

Polynomial load_poly(const std::string& path) { return polynomial_from_json(read_json_file(path)); }

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<Complex> all_points(const std::vector<SampledCurve>& curves) {
  std::vector<Complex> pts;
  for (const auto& c : curves) pts.insert(pts.end(), c.points().begin(), c.points().end());
  return pts;
}

int cmd_roots(const RunConfig& cfg, const std::string& poly) {
  const Polynomial p = load_poly(poly);
  if (p.degree() < 1) throw PreconditionError("roots needs a polynomial of degree >= 1");
  emit(Json{{"degree", p.degree()}, {"roots", root_list_to_json(poly_roots(p, cfg.root_tol))}});
  return 0;
}

int cmd_lemniscate(const RunConfig& cfg, const std::string& poly, const std::string& curve, const std::string& out) {
  const Polynomial p = load_poly(poly);
  const SampledCurve gamma = load_curve(curve, cfg.curve_samples);
  const std::string svg_path = output_path(cfg, out);
  const std::string json_path = with_suffix(svg_path, "", ".json");
  const bool proper = is_proper(p, gamma);
  std::vector<SampledCurve> parts;
  if (proper) {
    parts.push_back(pseudo_lemniscate(p, gamma));
  } else {
    std::cerr << "warning: a critical value of p lies outside the curve; drawing the separate preimage components\n";
    parts = pseudo_lemniscate_components(p, gamma);
  }
  std::vector<Complex> pts = all_points(parts);
  pts.insert(pts.end(), gamma.points().begin(), gamma.points().end());
  SvgCanvas svg = SvgCanvas::fitting(pts);
  svg.polyline(gamma.points(), true, "#999999", 1.0);
  for (const auto& c : parts) svg.polyline(c.points(), true, "#c0392b");
  if (p.degree() >= 2)
    for (const auto& c : critical_points(p)) svg.dot(c, "#2c3e50");
  write_text_file(svg_path, svg.str());
  Json curves = Json::array();
  for (const auto& c : parts) curves.push_back(curve_to_json(c));
  write_text_file(json_path, (proper ? curves[0] : Json{{"components", curves}}).dump(2) + "\n");
  Json report{{"proper", proper},
              {"components", parts.size()},
              {"points", parts.size() == 1 ? parts[0].size() : 0},
              {"svg", svg_path},
              {"curve", json_path}};
  if (proper) report["jordan"] = is_jordan(parts[0]);
  emit(report);
  return 0;
}

int cmd_fingerprint(const RunConfig& cfg, const std::string& poly, const std::string& curve, const std::string& out) {
  const Polynomial p = load_poly(poly);
  const SampledCurve gamma = load_curve(curve, cfg.curve_samples);
  const FingerprintModel m = fingerprint_model(p, gamma, cfg.nodes);
  const double residual = verify_identity(m, cfg.samples);
  const std::string kp_path = output_path(cfg, out);
  const std::string kg_path = with_suffix(kp_path, "_kgamma", ".csv");
  const std::string bl_path = with_suffix(kp_path, "_blaschke_lift", ".csv");
  const std::string bj_path = with_suffix(kp_path, "_blaschke", ".json");
  write_text_file(kp_path, circle_map_to_csv(m.k_p));
  write_text_file(kg_path, circle_map_to_csv(m.k_gamma));
  write_text_file(bl_path, circle_map_to_csv(circle_map_of_blaschke(m.blaschke, cfg.samples)));
  write_text_file(bj_path, blaschke_to_json(m.blaschke).dump(2) + "\n");
  emit(Json{{"degree", m.p.degree()},
            {"leading_rotation", angle_to_json(m.beta)},
            {"normalized_polynomial", polynomial_to_json(m.p)},
            {"lemniscate_center", complex_to_json(m.lemniscate_center)},
            {"blaschke", blaschke_to_json(m.blaschke)},
            {"nodes", cfg.nodes},
            {"samples", cfg.samples},
            {"identity_residual", residual},
            {"files", {{"k_p", kp_path}, {"k_gamma", kg_path}, {"blaschke_lift", bl_path}, {"blaschke", bj_path}}}});
  return 0;
}

void require_d4(int n, const std::string& what) {
  if (n != 4)
    throw PreconditionError("counterexample " + what + " is only tabulated for n = 4; use export for n > 4");
}

int cmd_counterexample(const RunConfig& cfg, const std::string& sub, int n, const std::string& out) {
  if (n < 4) throw PreconditionError("counterexample needs n >= 4");
  if (sub == "table") {
    require_d4(n, "table");
    const RationalMap f = f4();
    const BoundaryChain chain = build_boundary(f, chain_from_table(d4_table()));
    const TableReport rep = reproduce_table(f, chain, d4_table(), cfg.table_tol);
    Json j = table_report_to_json(rep);
    j["closure_residual"] = chain.closure_residual;
    j["jordan"] = is_jordan(chain.curve);
    if (!out.empty()) write_text_file(output_path(cfg, out), j.dump(2) + "\n");
    emit(j);
    return 0;
  }
  if (sub == "noninj") {
    require_d4(n, "noninj");
    const RationalMap f = f4();
    const BoundaryChain chain = build_boundary(f, chain_from_table(d4_table()));
    const NoninjectivityResult r = noninjectivity_degree(f, chain, cfg.grid);
    Json j = noninjectivity_to_json(r, cfg.grid);
    Json near = Json::array();
    for (const auto& cv : critical_values(f4())) {
      if (std::abs(cv) == 0.0) continue;
      std::size_t count = 0;
      Json sample = Json::array();
      for (const auto& w : r.witnesses) {
        if (std::abs(std::abs(w) / std::abs(cv) - 1.0) > 0.05) continue;
        if (count++ < 5) sample.push_back(complex_to_json(w));
      }
      near.push_back(Json{{"critical_modulus", std::abs(cv)}, {"witnesses_within_5pct", count}, {"sample", sample}});
    }
    j["near_critical_moduli"] = near;
    if (!out.empty()) write_text_file(output_path(cfg, out), j.dump(2) + "\n");
    emit(j);
    return 0;
  }
  if (sub != "export") throw PreconditionError("counterexample subcommand must be table, noninj or export");

  const CounterexamplePoly cp = construct_counterexample_poly(n);
  const std::string base = output_path(cfg, out.empty() ? (n == 4 ? "d4_boundary.json" : "f" + std::to_string(n) + ".json") : out);
  const std::string svg_path = with_suffix(base, "", ".svg");
  Json cvs = Json::array();
  for (const auto& v : cp.critical_values) cvs.push_back(complex_to_json(v));
  Json info{{"n", n},
            {"polynomial", polynomial_to_json(cp.p)},
            {"zeros", complex_list_to_json(cp.zeros)},
            {"critical_values", cvs},
            {"ratio", cp.ratio},
            {"spacing_rule", "double zero at 0, simple zeros at -ratio^k for k = 0..n-3; ratio starts at 3 and "
                             "doubles until the level sets between consecutive critical moduli nest"},
            {"attempts", cp.attempts},
            {"validation_levels", cp.validation_levels}};
  std::vector<SampledCurve> levels;
  std::vector<double> moduli;
  if (n == 4) {
    for (const auto& r : d4_table()) moduli.push_back(r.modulus);
  } else {
    moduli = cp.validation_levels;
  }
  std::set<double> distinct(moduli.begin(), moduli.end());
  for (double eps : distinct)
    for (auto& c : level_set_components(cp.p, eps)) levels.push_back(std::move(c.curve));
  std::vector<Complex> pts = all_points(levels);
  std::optional<BoundaryChain> chain;
  if (n == 4) {
    chain = build_boundary(f4(), chain_from_table(d4_table()));
    pts.insert(pts.end(), chain->curve.points().begin(), chain->curve.points().end());
  }
  SvgCanvas svg = SvgCanvas::fitting(pts);
  for (const auto& c : levels) svg.polyline(c.points(), true, "#95a5a6", 0.8);
  for (const auto& z : cp.zeros) svg.dot(z, "#2c3e50", 2.5);
  if (chain) {
    svg.polyline(chain->curve.points(), true, "#c0392b", 1.8);
    for (std::size_t i = 0; i < chain->vertices.size(); ++i) {
      svg.dot(chain->vertices[i], "#c0392b", 2.0);
      svg.text(chain->vertices[i], "v" + std::to_string(i + 1));
    }
    Json file = curve_to_json(chain->curve);
    file["vertices"] = complex_list_to_json(chain->vertices);
    file["closure_residual"] = chain->closure_residual;
    write_text_file(base, file.dump(2) + "\n");
    info["boundary"] = {{"file", base},
                        {"points", chain->curve.size()},
                        {"jordan", is_jordan(chain->curve)},
                        {"closure_residual", chain->closure_residual}};
  } else {
    write_text_file(base, info.dump(2) + "\n");
    info["file"] = base;
  }
  write_text_file(svg_path, svg.str());
  info["svg"] = svg_path;
  emit(info);
  return 0;
}

int cmd_properness(const RunConfig& cfg, const std::string& poly, const std::string& curve) {
  const Polynomial p = load_poly(poly);
  const SampledCurve gamma = load_curve(curve, cfg.curve_samples);
  const bool a = is_proper(p, gamma);
  const ProperOracleResult o = is_proper_oracle_detail(p, gamma);
  Json cvs = Json::array();
  if (p.degree() >= 2)
    for (const auto& v : critical_values(p))
      cvs.push_back(Json{{"value", complex_to_json(v)}, {"winding", winding_number(gamma, v)}});
  emit(Json{{"proper", a},
            {"critical_values", cvs},
            {"oracle", {{"proper", o.proper}, {"components", o.components}, {"cells", o.cells}}},
            {"agree", a == o.proper}});
  return 0;
}

int report_error(const Error& e, int code) {
  std::cerr << Json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lemniscates, pseudo-lemniscates, fingerprints and the f4 counterexample"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "run configuration JSON");

  std::string poly, curve, lem_out, fp_out, ce_out;
  int n = 4;
  std::string sub;

  auto* roots = app.add_subcommand("roots", "roots of a polynomial");
  roots->add_option("poly", poly, "polynomial JSON")->required();

  auto* lem = app.add_subcommand("lemniscate", "trace and draw p^{-1}(curve)");
  lem->add_option("poly", poly, "polynomial JSON")->required();
  lem->add_option("curve", curve, "curve JSON, unit-circle, circle:R or ellipse:A,B")->required();
  lem->add_option("-o,--output", lem_out, "SVG output")->default_val("lemniscate.svg");

  auto* fp = app.add_subcommand("fingerprint", "fingerprints and the k_p = (k_Gamma o B)^{1/n} check");
  fp->add_option("poly", poly, "polynomial JSON")->required();
  fp->add_option("curve", curve, "curve JSON, unit-circle, circle:R or ellipse:A,B")->required();
  fp->add_option("-o,--output", fp_out, "CSV output for k_p")->default_val("fingerprint.csv");

  auto* ce = app.add_subcommand("counterexample", "the f4 / D4 construction");
  ce->add_option("action", sub, "table, noninj or export")->required()->check(CLI::IsMember({"table", "noninj", "export"}));
  ce->add_option("--n", n, "degree of f_n")->default_val(4);
  ce->add_option("-o,--output", ce_out, "output file");

  auto* pr = app.add_subcommand("properness", "properness verdict from critical values and from a grid oracle");
  pr->add_option("poly", poly, "polynomial JSON")->required();
  pr->add_option("curve", curve, "curve JSON, unit-circle, circle:R or ellipse:A,B")->required();

  std::optional<std::size_t> nodes, samples;
  std::optional<int> n_arg, n_mod;
  fp->add_option("--nodes", nodes, "conformal solver nodes");
  fp->add_option("--samples", samples, "identity check samples");
  ce->add_option("--n-arg", n_arg, "grid args");
  ce->add_option("--n-mod", n_mod, "grid moduli");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (nodes) cfg.nodes = *nodes;
    if (samples) cfg.samples = *samples;
    if (n_arg) cfg.grid.n_arg = *n_arg;
    if (n_mod) cfg.grid.n_mod = *n_mod;
    cfg.validate();
    if (*roots) return cmd_roots(cfg, poly);
    if (*lem) return cmd_lemniscate(cfg, poly, curve, lem_out);
    if (*fp) return cmd_fingerprint(cfg, poly, curve, fp_out);
    if (*ce) return cmd_counterexample(cfg, sub, n, ce_out);
    if (*pr) return cmd_properness(cfg, poly, curve);
  } catch (const PreconditionError& e) {
    return report_error(e, 2);
  } catch (const NumericalError& e) {
    return report_error(e, 3);
  } catch (const Json::exception& e) {
    std::cerr << Json{{"error", {{"kind", "precondition"}, {"message", e.what()}}}}.dump() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << Json{{"error", {{"kind", "precondition"}, {"message", e.what()}}}}.dump() << '\n';
    return 2;
  }
  return 2;
}
