#include "brownkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "brownkit/errors.hpp"

namespace brownkit::io {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double number(const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

int integer(const std::string& raw) {
  const double v = number(raw);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("not an integer: '" + raw + "'");
  return int(v);
}

bool is_json_path(const std::string& s) { return s.size() > 5 && s.substr(s.size() - 5) == ".json"; }

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

std::pair<std::string, std::string> head_tail(const std::string& s) {
  const auto c = s.find(':');
  if (c == std::string::npos) return {trim(s), ""};
  return {trim(s.substr(0, c)), trim(s.substr(c + 1))};
}

// "a,b;c,d" -> rows of numbers, each of the given width
std::vector<std::vector<double>> rows(const std::string& s, std::size_t width) {
  std::vector<std::vector<double>> out;
  for (const auto& part : split(s, ';')) {
    if (trim(part).empty()) continue;
    std::vector<double> r;
    for (const auto& x : split(part, ',')) r.push_back(number(x));
    if (r.size() != width) throw ConfigError("expected " + std::to_string(width) + " numbers per entry in '" + s + "'");
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ConfigError("empty atom list");
  return out;
}

template <class F>
auto json_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad JSON structure: ") + e.what());
  }
}

std::vector<Atom> atoms_from(const json& j) {
  std::vector<Atom> out;
  for (const auto& a : j) {
    if (!a.is_array() || a.size() != 2) throw ConfigError("atoms are [location, mass] pairs");
    out.push_back({a[0].get<double>(), a[1].get<double>()});
  }
  return out;
}

std::vector<DensityPiece> pieces_from(const json& j) {
  std::vector<DensityPiece> out;
  for (const auto& p : j) out.push_back({p.at("grid").get<std::vector<double>>(), p.at("values").get<std::vector<double>>()});
  return out;
}

json atoms_to(const std::vector<Atom>& atoms) {
  json a = json::array();
  for (const auto& x : atoms) a.push_back({x.x, x.mass});
  return a;
}

json pieces_to(const std::vector<DensityPiece>& pieces) {
  json a = json::array();
  for (const auto& p : pieces) a.push_back({{"grid", p.grid}, {"values", p.values}});
  return a;
}

std::string csv_rows(const GridSpec& g, const std::vector<double>& values, const std::vector<std::uint8_t>* flags) {
  std::string out = "x,y,density,in_omega,atom_candidate\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = std::size_t(j) * g.nx + i;
      const int in = flags ? ((*flags)[k] & kInOmega ? 1 : 0) : (values[k] > 0 ? 1 : 0);
      const int at = flags ? ((*flags)[k] & kAtomCandidate ? 1 : 0) : 0;
      out += format_double(g.x(i)) + ',' + format_double(g.y(j)) + ',' + format_double(values[k]) + ',' +
             std::to_string(in) + ',' + std::to_string(at) + '\n';
    }
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

// ---------------- measures and models ----------------

RealMeasure real_measure_from_json(const json& j) {
  return json_guard([&] {
    if (j.contains("semicircle")) {
      const auto& s = j.at("semicircle");
      return RealMeasure::semicircle(s.value("center", 0.0), s.at("variance").get<double>());
    }
    return RealMeasure::from_parts(atoms_from(j.value("atoms", json::array())),
                                   pieces_from(j.value("pieces", json::array())));
  });
}

PositiveMeasure positive_measure_from_json(const json& j) {
  return json_guard([&] {
    if (j.contains("family")) {
      const std::string f = j.at("family");
      const double p = j.at("parameter").get<double>();
      if (f == "quarter_circle") return PositiveMeasure::quarter_circle(p);
      if (f == "cauchy") return PositiveMeasure::cauchy_modulus(p);
      if (f == "cauchy_power") return PositiveMeasure::cauchy_power_modulus(int(p));
      throw ConfigError("unknown positive measure family '" + f + "'");
    }
    const std::string tail = j.value("tail", "none");
    if (tail != "none" && tail != "cauchy") throw ConfigError("unknown tail '" + tail + "'");
    return PositiveMeasure::from_parts(atoms_from(j.value("atoms", json::array())),
                                       pieces_from(j.value("pieces", json::array())),
                                       tail == "cauchy" ? Tail::cauchy_modulus : Tail::none);
  });
}

OperatorModel operator_model_from_json(const json& j) {
  return json_guard([&] {
    const std::string type = j.at("type");
    if (type == "zero") return OperatorModel::zero();
    if (type == "selfadjoint") return OperatorModel::selfadjoint(real_measure_from_json(j.at("spectrum")));
    if (type == "normal") {
      std::vector<NormalAtom> atoms;
      for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 3) throw ConfigError("normal atoms are [re, im, mass]");
        atoms.push_back({cplx(a[0].get<double>(), a[1].get<double>()), a[2].get<double>()});
      }
      return OperatorModel::normal(std::move(atoms));
    }
    if (type == "matrix") {
      const int n = j.at("n").get<int>();
      const auto& e = j.at("entries");
      if (n < 1 || e.size() != std::size_t(n) * n) throw ShapeError("matrix entries must number n*n");
      Eigen::MatrixXcd x(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const auto& z = e[std::size_t(r) * n + c];
          if (!z.is_array() || z.size() != 2) throw ConfigError("matrix entries are [re, im] pairs");
          x(r, c) = cplx(z[0].get<double>(), z[1].get<double>());
        }
      return OperatorModel::matrix(std::move(x));
    }
    throw ConfigError("unknown operator model type '" + type + "'");
  });
}

RDiagonalSpec rdiag_from_json(const json& j) {
  return json_guard([&] {
    const std::string type = j.at("type");
    if (type == "haar") return RDiagonalSpec::haar(j.at("gamma").get<double>());
    if (type == "circular") return RDiagonalSpec::circular(j.at("variance").get<double>());
    if (type == "cauchy") return RDiagonalSpec::circular_cauchy(j.at("scale").get<double>());
    if (type == "cauchy_power") return RDiagonalSpec::circular_cauchy_power(j.at("n").get<int>());
    if (type == "general") return RDiagonalSpec::general(positive_measure_from_json(j.at("modulus")));
    throw ConfigError("unknown R-diagonal type '" + type + "'");
  });
}

json to_json(const RealMeasure& m) {
  if (m.is_semicircle()) return {{"semicircle", {{"center", m.semicircle_center()}, {"variance", m.semicircle_variance()}}}};
  return {{"atoms", atoms_to(m.atoms())}, {"pieces", pieces_to(m.pieces())}};
}

json to_json(const PositiveMeasure& m) {
  switch (m.family()) {
    case PositiveMeasure::Family::quarter_circle:
      return {{"family", "quarter_circle"}, {"parameter", m.family_parameter()}};
    case PositiveMeasure::Family::cauchy_modulus:
      return {{"family", "cauchy"}, {"parameter", m.family_parameter()}};
    case PositiveMeasure::Family::cauchy_power:
      return {{"family", "cauchy_power"}, {"parameter", m.family_parameter()}};
    case PositiveMeasure::Family::empirical:
      return {{"atoms", atoms_to(m.atoms())}, {"pieces", pieces_to(m.pieces())}};
    case PositiveMeasure::Family::derived: break;
  }
  throw UnsupportedMeasureError("derived laws have no JSON form");
}

json to_json(const OperatorModel& m) {
  switch (m.kind()) {
    case OperatorModel::Kind::selfadjoint: return {{"type", "selfadjoint"}, {"spectrum", to_json(m.spectrum())}};
    case OperatorModel::Kind::normal: {
      json a = json::array();
      for (const auto& x : m.normal_atoms()) a.push_back({x.z.real(), x.z.imag(), x.mass});
      return {{"type", "normal"}, {"atoms", a}};
    }
    case OperatorModel::Kind::matrix: {
      const auto& x = m.matrix();
      json e = json::array();
      for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (Eigen::Index c = 0; c < x.cols(); ++c) e.push_back({x(r, c).real(), x(r, c).imag()});
      return {{"type", "matrix"}, {"n", x.rows()}, {"entries", e}};
    }
  }
  return {};
}

json to_json(const RDiagonalSpec& T) {
  if (T.is<HaarUnitary>()) return {{"type", "haar"}, {"gamma", T.as<HaarUnitary>().gamma}};
  if (T.is<Circular>()) return {{"type", "circular"}, {"variance", T.as<Circular>().variance}};
  if (T.is<CircularCauchy>()) return {{"type", "cauchy"}, {"scale", T.as<CircularCauchy>().scale}};
  if (T.is<CircularCauchyPower>()) return {{"type", "cauchy_power"}, {"n", T.as<CircularCauchyPower>().power}};
  return {{"type", "general"}, {"modulus", to_json(T.modulus())}};
}

// ---------------- inline specs ----------------

RDiagonalSpec parse_t_spec(const std::string& s) {
  if (is_json_path(s)) return rdiag_from_json(load_json(s));
  const auto [head, tail] = head_tail(s);
  if (tail.empty()) throw ConfigError("T spec needs a parameter: '" + s + "'");
  if (head == "circular") return RDiagonalSpec::circular(number(tail));
  if (head == "haar") return RDiagonalSpec::haar(number(tail));
  if (head == "cauchy") return RDiagonalSpec::circular_cauchy(number(tail));
  if (head == "cauchy-power") return RDiagonalSpec::circular_cauchy_power(integer(tail));
  throw ConfigError("unknown T spec '" + s + "'");
}

OperatorModel parse_x0_spec(const std::string& s) {
  if (is_json_path(s)) return operator_model_from_json(load_json(s));
  const auto [head, tail] = head_tail(s);
  if (head == "zero" && tail.empty()) return OperatorModel::zero();
  if (head == "bernoulli") {
    std::vector<Atom> atoms;
    for (const auto& r : rows(tail, 2)) atoms.push_back({r[0], r[1]});
    return OperatorModel::selfadjoint(RealMeasure::from_parts(std::move(atoms), {}));
  }
  if (head == "semicircle") return OperatorModel::selfadjoint(RealMeasure::semicircle(0.0, number(tail)));
  if (head == "normal") {
    std::vector<NormalAtom> atoms;
    for (const auto& r : rows(tail, 3)) atoms.push_back({cplx(r[0], r[1]), r[2]});
    return OperatorModel::normal(std::move(atoms));
  }
  throw ConfigError("unknown x0 spec '" + s + "'");
}

SymmetricMeasure parse_mu_spec(const std::string& s) {
  if (is_json_path(s)) return symmetrize(positive_measure_from_json(load_json(s)));
  const auto [head, tail] = head_tail(s);
  if (tail.empty()) throw ConfigError("measure spec needs a parameter: '" + s + "'");
  if (head == "semicircle") return semicircle(number(tail));
  if (head == "bernoulli") return bernoulli(number(tail));
  if (head == "cauchy") return symmetric_cauchy(number(tail));
  if (head == "cauchy-power") return symmetrize(PositiveMeasure::cauchy_power_modulus(integer(tail)));
  if (head == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& r : rows(tail, 2)) atoms.push_back({r[0], r[1]});
    return symmetrize(PositiveMeasure::atomic(std::move(atoms)));
  }
  throw ConfigError("unknown measure spec '" + s + "'");
}

GridSpec parse_grid(const std::string& s) {
  auto axis = [&](const std::string& a, double& lo, double& hi, int& n) {
    const auto p = split(a, ':');
    if (p.size() != 3) throw ConfigError("grid axis must be lo:hi:n, got '" + a + "'");
    lo = number(p[0]);
    hi = number(p[1]);
    n = integer(p[2]);
  };
  GridSpec g;
  const auto parts = split(s, ',');
  if (parts.size() == 1) {
    axis(parts[0], g.x_lo, g.x_hi, g.nx);
    g.y_lo = g.x_lo;
    g.y_hi = g.x_hi;
    g.ny = g.nx;
  } else if (parts.size() == 2) {
    axis(parts[0], g.x_lo, g.x_hi, g.nx);
    axis(parts[1], g.y_lo, g.y_hi, g.ny);
  } else {
    throw ConfigError("grid spec must be lo:hi:n or xlo:xhi:nx,ylo:yhi:ny");
  }
  g.validate();
  return g;
}

cplx parse_complex(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("empty complex number");
  if (s.find(',') != std::string::npos) {
    const auto p = split(s, ',');
    if (p.size() != 2) throw ConfigError("complex number must be a,b");
    return {number(p[0]), number(p[1])};
  }
  if (s.back() != 'i') return {number(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign or the leading sign
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      const std::string im = body.substr(k);
      return {number(body.substr(0, k)), im == "+" ? 1.0 : im == "-" ? -1.0 : number(im)};
    }
  }
  if (body.empty() || body == "+") return {0.0, 1.0};
  if (body == "-") return {0.0, -1.0};
  return {0.0, number(body)};
}

json grid_to_json(const GridSpec& g) {
  return {{"x_lo", g.x_lo}, {"x_hi", g.x_hi}, {"nx", g.nx}, {"y_lo", g.y_lo}, {"y_hi", g.y_hi}, {"ny", g.ny}};
}

GridSpec grid_from_json(const json& j) {
  return json_guard([&] {
    GridSpec g;
    if (j.is_string()) return parse_grid(j.get<std::string>());
    g.x_lo = j.at("x_lo");
    g.x_hi = j.at("x_hi");
    g.nx = j.at("nx");
    g.y_lo = j.at("y_lo");
    g.y_hi = j.at("y_hi");
    g.ny = j.at("ny");
    g.validate();
    return g;
  });
}

// ---------------- grids and reports ----------------

std::string density_csv(const BrownDensityGrid& g) { return csv_rows(g.grid, g.values, &g.flags); }

json density_json(const BrownDensityGrid& g) {
  json atoms = json::array();
  for (const auto& z : g.atom_candidates)
    atoms.push_back({{"re", z.real()}, {"im", z.imag()}, {"mass", nullptr}, {"candidate", true}});
  return {{"grid", grid_to_json(g.grid)},
          {"values", g.values},
          {"flags", g.flags},
          {"atoms", atoms},
          {"total_mass_estimate", g.total_mass_estimate},
          {"failed_cells", g.failed_cells}};
}

std::string empirical_csv(const rmt::EmpiricalGrid& g) { return csv_rows(g.grid, g.values, nullptr); }

json empirical_json(const rmt::EmpiricalGrid& g) {
  return {{"grid", grid_to_json(g.grid)},
          {"values", g.values},
          {"mass", g.mass},
          {"clamped_mass", g.clamped_mass},
          {"imbalance", g.imbalance}};
}

json report_json(const rmt::ComparisonReport& r, bool with_residuals) {
  json j{{"l1_distance", r.l1_distance},
         {"max_abs", r.max_abs},
         {"mass_theory", r.mass_theory},
         {"mass_empirical", r.mass_empirical}};
  if (with_residuals) j["residuals"] = r.residuals;
  return j;
}

json pair_json(const SubordinationPair& p) {
  return {{"t", p.t},         {"s1", p.s1},
          {"s2", p.s2},       {"h", p.h_conv},
          {"iterations", p.iterations}, {"residual", p.residual},
          {"mismatch", p.mismatch}};
}

json classification_json(const BoundaryClassification& c) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); };
  json j{{"case", to_string(c.case_id)}, {"s1_0", num(c.s1_0)}, {"s2_0", num(c.s2_0)}};
  if (c.ratio_t_over_s1) j["ratio_t_over_s1"] = *c.ratio_t_over_s1;
  if (c.limit_t_times_s2) j["limit_t_times_s2"] = *c.limit_t_times_s2;
  if (c.ratio_t_over_s2) j["ratio_t_over_s2"] = *c.ratio_t_over_s2;
  if (c.limit_t_times_s1) j["limit_t_times_s1"] = *c.limit_t_times_s1;
  if (c.case_id == BoundaryCase::finite_finite) j["density_at_zero"] = density_at_zero_of_convolution(c.s1_0, c.s2_0);
  return j;
}

std::string heatmap_pgm(const GridSpec& g, const std::vector<double>& values) {
  if (values.size() != g.size()) throw ShapeError("heatmap values do not match the grid");
  double rmax = 0;
  for (double v : values)
    if (std::isfinite(v)) rmax = std::max(rmax, v);
  std::string out = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n255\n";
  for (int j = g.ny - 1; j >= 0; --j)
    for (int i = 0; i < g.nx; ++i) {
      const double rho = values[std::size_t(j) * g.nx + i];
      double v = 0;
      if (rmax > 0 && std::isfinite(rho) && rho > 0) v = 255 * std::log1p(rho / rmax * 255) / std::log(256.0);
      out.push_back(char(std::uint8_t(std::clamp(std::lround(v), 0L, 255L))));
    }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + path);
    f.write(content.data(), std::streamsize(content.size()));
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw ConfigError("cannot write " + path);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ConfigError("cannot move output into place at " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace brownkit::io
