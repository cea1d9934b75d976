#include "brownkit/cli.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brownkit/brown.hpp"
#include "brownkit/errors.hpp"
#include "brownkit/io.hpp"
#include "brownkit/rmt.hpp"

namespace brownkit::cli {

namespace {

using io::json;

const std::map<std::string, DensityRoute> kRoutes{
    {"auto", DensityRoute::automatic}, {"general", DensityRoute::general}, {"closed", DensityRoute::closed_form}};

// Either stdout or an atomically replaced file.
void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    out << content;
  else
    io::write_atomic(path, content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// Config values may be inline strings or JSON objects.
RDiagonalSpec t_from(const json& j) { return j.is_string() ? io::parse_t_spec(j) : io::rdiag_from_json(j); }
OperatorModel x0_from(const json& j) { return j.is_string() ? io::parse_x0_spec(j) : io::operator_model_from_json(j); }

struct Options {
  int threads = 0;

  // shared by several commands
  std::string t_spec, x0_spec, grid_spec, out_path;

  // density
  std::string json_path, heatmap_path, route = "auto";
  int subsample = 1;

  // det
  std::string lambda;
  double treg = 0;
  bool det_json = false;

  // radii
  std::string t1, t2;

  // convolve
  std::string mu1, mu2;
  double time = 0;

  // radial-cdf
  std::vector<double> radii;

  // validate
  std::string config, empirical_path;
  std::optional<std::uint64_t> seed;
  bool residuals = false;
};

int cmd_density(const Options& o, std::ostream& out) {
  const auto T = io::parse_t_spec(o.t_spec);
  const auto x0 = io::parse_x0_spec(o.x0_spec);
  const auto grid = io::parse_grid(o.grid_spec);
  GridOptions go;
  go.threads = o.threads;
  go.route = kRoutes.at(o.route);
  go.subsample = o.subsample;
  const auto g = density_grid(T, x0, grid, go);
  const bool any_file = !o.out_path.empty() || !o.json_path.empty() || !o.heatmap_path.empty();
  if (!o.out_path.empty() || !any_file) emit(out, o.out_path, io::density_csv(g));
  if (!o.json_path.empty()) emit(out, o.json_path, dump(io::density_json(g)));
  if (!o.heatmap_path.empty()) emit(out, o.heatmap_path, io::heatmap_pgm(g.grid, g.values));
  return g.failed_cells > 0 ? kExitNumerical : kExitOk;
}

int cmd_det(const Options& o, std::ostream& out) {
  const auto T = io::parse_t_spec(o.t_spec);
  const auto x0 = io::parse_x0_spec(o.x0_spec);
  if (!(o.treg >= 0)) throw ConfigError("--treg must be >= 0");
  const auto d = fk_determinant(T, x0, io::parse_complex(o.lambda), o.treg);
  if (o.det_json) {
    out << dump({{"value", d.value},
                 {"log_value", d.log_value},
                 {"boundary", to_string(d.boundary)},
                 {"atom_dominated", d.atom_dominated}});
  } else {
    out << io::format_double(d.value) << "\n";
  }
  return kExitOk;
}

int cmd_domain(const Options& o, std::ostream& out) {
  const auto T = io::parse_t_spec(o.t_spec);
  const auto x0 = io::parse_x0_spec(o.x0_spec);
  const auto g = io::parse_grid(o.grid_spec);
  json pts = json::array();
  auto add = [&](cplx z, const char* along) {
    const auto v = omega_membership(T, x0, z);
    pts.push_back({{"x", z.real()},
                   {"y", z.imag()},
                   {"along", along},
                   {"margin_inner", v.margin_inner},
                   {"margin_outer", v.margin_outer}});
  };
  for (int j = 0; j < g.ny; ++j)
    for (cplx z : omega_boundary_on_segment(T, x0, cplx(g.x_lo, g.y(j)), cplx(g.x_hi, g.y(j)))) add(z, "x");
  for (int i = 0; i < g.nx; ++i)
    for (cplx z : omega_boundary_on_segment(T, x0, cplx(g.x(i), g.y_lo), cplx(g.x(i), g.y_hi))) add(z, "y");
  json atoms = json::array();
  for (cplx z : atom_candidates(T, x0)) atoms.push_back(cplx_json(z));
  emit(out, o.out_path, dump({{"boundary_points", pts}, {"atom_candidates", atoms}}));
  return kExitOk;
}

int cmd_radii(const Options& o, std::ostream& out) {
  const auto r = ring_radii(io::parse_t_spec(o.t1), io::parse_t_spec(o.t2));
  out << dump({{"r_inner", r.r_inner}, {"r_outer", r.r_outer}, {"r_inner_raw", r.r_inner_raw}});
  return kExitOk;
}

int cmd_convolve(const Options& o, std::ostream& out) {
  const auto mu1 = io::parse_mu_spec(o.mu1);
  const auto mu2 = io::parse_mu_spec(o.mu2);
  if (!(o.time >= 0)) throw ConfigError("--time must be >= 0");
  if (o.time == 0)
    out << dump(io::classification_json(classify_boundary(mu1, mu2)));
  else
    out << dump(io::pair_json(solve_subordination(mu1, mu2, o.time)));
  return kExitOk;
}

int cmd_radial_cdf(const Options& o, std::ostream& out) {
  const auto T = io::parse_t_spec(o.t_spec);
  json rows = json::array();
  for (double r : o.radii) rows.push_back({{"r", r}, {"cdf", radial_cdf(T, r)}});
  out << dump(rows);
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  json cfg;
  try {
    cfg = json::parse(io::read_file(o.config));
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + o.config + ": " + e.what());
  }
  rmt::EnsembleSpec spec;
  GridSpec grid;
  int subsample = 1;
  try {
    spec.T = t_from(cfg.at("T"));
    spec.x0 = x0_from(cfg.at("x0"));
    const json e = cfg.value("ensemble", json::object());
    spec.n = e.value("n", spec.n);
    spec.samples = e.value("samples", spec.samples);
    spec.t_reg = e.value("t_reg", spec.t_reg);
    spec.seed = e.value("seed", spec.seed);
    spec.stochastic_sigma = e.value("stochastic_sigma", spec.stochastic_sigma);
    grid = io::grid_from_json(cfg.at("grid"));
    subsample = cfg.value("subsample", 1);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad validate config: ") + e.what());
  }
  if (o.seed) spec.seed = *o.seed;
  spec.validate();

  GridOptions go;
  go.threads = o.threads;
  go.subsample = subsample;
  const auto theory = density_grid(spec.T, spec.x0, grid, go);
  const auto emp = rmt::empirical_brown_density(spec, grid, o.threads);
  const auto rep = rmt::compare_report(theory, emp);

  json j = io::report_json(rep, o.residuals);
  j["n"] = spec.n;
  j["samples"] = spec.samples;
  j["seed"] = spec.seed;
  j["t_reg"] = spec.t_reg;
  j["clamped_mass"] = emp.clamped_mass;
  j["imbalance"] = emp.imbalance;
  j["failed_cells"] = theory.failed_cells;
  j["grid"] = io::grid_to_json(grid);
  emit(out, o.out_path, dump(j));
  if (!o.empirical_path.empty()) emit(out, o.empirical_path, io::empirical_csv(emp));
  return theory.failed_cells > 0 ? kExitNumerical : kExitOk;
}

void report(std::ostream& err, const char* kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

bool is_config_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const MalformedMeasureError*>(&e) ||
         dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
         dynamic_cast<const UnsupportedMeasureError*>(&e);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Brown measures of x0 + T for R-diagonal T"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "worker cap (default: BROWNKIT_THREADS, else 1)")
      ->check(CLI::NonNegativeNumber);

  auto t_opt = [&](CLI::App* c) { c->add_option("--t", o.t_spec, "R-diagonal T")->required(); };
  auto x0_opt = [&](CLI::App* c) { c->add_option("--x0", o.x0_spec, "operator x0")->required(); };

  auto* density = app.add_subcommand("density", "Brown density on a grid");
  t_opt(density);
  x0_opt(density);
  density->add_option("--grid", o.grid_spec, "lo:hi:n or xlo:xhi:nx,ylo:yhi:ny")->required();
  density->add_option("--out", o.out_path, "CSV output");
  density->add_option("--json", o.json_path, "JSON output");
  density->add_option("--heatmap", o.heatmap_path, "PGM output");
  density->add_option("--route", o.route)->check(CLI::IsMember({"auto", "general", "closed"}));
  density->add_option("--subsample", o.subsample, "k x k points averaged per cell")->check(CLI::Range(1, 64));

  auto* det = app.add_subcommand("det", "Fuglede-Kadison determinant of |x0 + T - lambda|");
  t_opt(det);
  x0_opt(det);
  det->add_option("--lambda", o.lambda, "a+bi")->required();
  det->add_option("--treg", o.treg, "regularization t");
  det->add_flag("--json", o.det_json);

  auto* domain = app.add_subcommand("domain", "points on the boundary of Omega along grid lines");
  t_opt(domain);
  x0_opt(domain);
  domain->add_option("--grid", o.grid_spec)->required();
  domain->add_option("--out", o.out_path, "JSON output");

  auto* radii = app.add_subcommand("radii", "single-ring radii");
  radii->add_option("--t1", o.t1)->required();
  radii->add_option("--t2", o.t2)->required();

  auto* conv = app.add_subcommand("convolve", "subordination at t, or the t -> 0 classification");
  conv->add_option("--mu1", o.mu1)->required();
  conv->add_option("--mu2", o.mu2)->required();
  conv->add_option("--time", o.time, "t >= 0");

  auto* rcdf = app.add_subcommand("radial-cdf", "Brown measure of T on closed disks");
  t_opt(rcdf);
  rcdf->add_option("--r", o.radii)->required();

  auto* validate = app.add_subcommand("validate", "random-matrix comparison against the theoretical grid");
  validate->add_option("--config", o.config)->required()->check(CLI::ExistingFile);
  validate->add_option("--seed", o.seed);
  validate->add_option("--out", o.out_path, "report JSON");
  validate->add_option("--empirical", o.empirical_path, "empirical CSV");
  validate->add_flag("--residuals", o.residuals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "density") return cmd_density(o, out);
    if (name == "det") return cmd_det(o, out);
    if (name == "domain") return cmd_domain(o, out);
    if (name == "radii") return cmd_radii(o, out);
    if (name == "convolve") return cmd_convolve(o, out);
    if (name == "radial-cdf") return cmd_radial_cdf(o, out);
    return cmd_validate(o, out);
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return is_config_error(e) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    report(err, "internal", e.what());
    return kExitNumerical;
  }
}

}  // namespace brownkit::cli
