#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "brownkit/brown.hpp"
#include "brownkit/rmt.hpp"
#include "brownkit/subordination.hpp"

namespace brownkit::io {

using json = nlohmann::json;

// JSON forms (all numbers plain doubles):
//   real measure      {"atoms": [[x, m], ...], "pieces": [{"grid": [...], "values": [...]}]}
//                     or {"semicircle": {"center": c, "variance": v}}
//   positive measure  {"atoms": ..., "pieces": ..., "tail": "cauchy"}
//                     or {"family": "quarter_circle" | "cauchy" | "cauchy_power", "parameter": p}
//   operator model    {"type": "zero"} | {"type": "selfadjoint", "spectrum": <real measure>}
//                     | {"type": "normal", "atoms": [[re, im, m], ...]}
//                     | {"type": "matrix", "n": N, "entries": [[re, im], ...]}   (row-major)
//   R-diagonal spec   {"type": "haar", "gamma": g} | {"type": "circular", "variance": v}
//                     | {"type": "cauchy", "scale": a} | {"type": "cauchy_power", "n": n}
//                     | {"type": "general", "modulus": <positive measure>}
RealMeasure real_measure_from_json(const json& j);
PositiveMeasure positive_measure_from_json(const json& j);
OperatorModel operator_model_from_json(const json& j);
RDiagonalSpec rdiag_from_json(const json& j);

json to_json(const RealMeasure& m);
json to_json(const PositiveMeasure& m);
json to_json(const OperatorModel& m);
json to_json(const RDiagonalSpec& T);

// Inline specs, or a path to a JSON file (anything ending in .json).
//   T:   circular:v  haar:g  cauchy:a  cauchy-power:n
//   x0:  zero  bernoulli:x,m;x,m;...  semicircle:v  normal:re,im,m;...
//   mu:  semicircle:v  bernoulli:g  cauchy:a  cauchy-power:n  atoms:u,m;...   (symmetrized moduli)
RDiagonalSpec parse_t_spec(const std::string& s);
OperatorModel parse_x0_spec(const std::string& s);
SymmetricMeasure parse_mu_spec(const std::string& s);

// "lo:hi:n" for a square grid, "xlo:xhi:nx,ylo:yhi:ny" otherwise.
GridSpec parse_grid(const std::string& s);
// "a+bi", "a-bi", "a", "bi", or "a,b".
cplx parse_complex(const std::string& s);

json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const json& j);

std::string density_csv(const BrownDensityGrid& g);
json density_json(const BrownDensityGrid& g);
std::string empirical_csv(const rmt::EmpiricalGrid& g);
json empirical_json(const rmt::EmpiricalGrid& g);
json report_json(const rmt::ComparisonReport& r, bool with_residuals = false);
json pair_json(const SubordinationPair& p);
json classification_json(const BoundaryClassification& c);

// 8-bit P5, top row = largest y, v = 255 log(1 + 255 rho/rho_max) / log 256.
std::string heatmap_pgm(const GridSpec& g, const std::vector<double>& values);

// Shortest text that reads back to the same double; integers keep a ".0".
std::string format_double(double x);

// Write via a temporary file in the same directory, then rename.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace brownkit::io
