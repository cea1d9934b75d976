#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "brownkit/brown.hpp"
#include "brownkit/cli.hpp"
#include "brownkit/io.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace brownkit;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "brownkit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("brownkit_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) { return io::read_file(p.string()); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("det prints the Haar determinant") {
    const auto r = call({"det", "--t", "haar:1", "--x0", "zero", "--lambda", "2+0i", "--treg", "0"});
    CHECK(r.code == 0);
    CHECK(r.out == "2.0\n");
    CHECK(call({"det", "--t", "haar:1", "--x0", "zero", "--lambda", "0.5i", "--treg", "0"}).out == "1.0\n");
  }

  TEST_CASE("density CSV and heatmap for the circular law") {
    const auto d = scratch("density");
    const auto csv = (d / "d.csv").string(), pgm = (d / "d.pgm").string();
    const auto r = call({"density", "--t", "circular:1", "--x0", "zero", "--grid", "-1.5:1.5:31", "--out", csv,
                         "--heatmap", pgm});
    REQUIRE(r.code == 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,density,in_omega,atom_candidate");
    int rows = 0, interior = 0;
    while (std::getline(in, line)) {
      ++rows;
      double x, y, rho;
      int inside, atom;
      char c;
      std::istringstream ls(line);
      ls >> x >> c >> y >> c >> rho >> c >> inside >> c >> atom;
      if (x * x + y * y <= 0.95 * 0.95) {
        ++interior;
        CHECK(std::abs(rho - 1 / M_PI) < 1e-8);
        CHECK(inside == 1);
      }
      if (x * x + y * y > 1.05) CHECK(rho == 0.0);
    }
    CHECK(rows == 31 * 31);
    CHECK(interior > 250);
    const std::string img = slurp(pgm);
    const std::string header = "P5\n31 31\n255\n";
    REQUIRE(img.size() == header.size() + 31 * 31);
    CHECK(img.substr(0, header.size()) == header);
  }

  TEST_CASE("repeated runs are byte-identical and leave no temp files") {
    const auto d = scratch("repeat");
    std::string first;
    for (int k = 0; k < 2; ++k) {
      const auto out = (d / "g.json").string();
      REQUIRE(call({"density", "--t", "haar:1", "--x0", "bernoulli:-1,0.25;0,0.5;1,0.25", "--grid",
                    "-1.6:1.6:9,-0.9:0.9:5", "--json", out, "--threads", "2"})
                  .code == 0);
      const std::string now = slurp(out);
      if (k == 0)
        first = now;
      else
        CHECK(now == first);
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(d)) {
      ++files;
      CHECK(e.path().extension() != ".tmp");
    }
    CHECK(files == 1);
  }

  TEST_CASE("domain points sit on the boundary") {
    const auto r = call({"domain", "--t", "haar:1", "--x0", "bernoulli:-1,0.25;0,0.5;1,0.25", "--grid",
                         "-1.6:1.6:6,-0.9:0.9:4"});
    REQUIRE(r.code == 0);
    const auto j = io::json::parse(r.out);
    const auto T = io::parse_t_spec("haar:1");
    const auto x0 = io::parse_x0_spec("bernoulli:-1,0.25;0,0.5;1,0.25");
    REQUIRE(j["boundary_points"].size() > 0);
    for (const auto& p : j["boundary_points"]) {
      const auto v = omega_membership(T, x0, cplx(p["x"].get<double>(), p["y"].get<double>()));
      CHECK(std::min(std::abs(v.margin_inner), std::abs(v.margin_outer)) < 1e-6);
    }
  }

  TEST_CASE("convolve and radial-cdf report JSON") {
    auto r = call({"convolve", "--mu1", "semicircle:1", "--mu2", "semicircle:1"});
    REQUIRE(r.code == 0);
    auto j = io::json::parse(r.out);
    CHECK(j["case"] == "FINITE_FINITE");
    CHECK(j["s1_0"].get<double>() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
    r = call({"convolve", "--mu1", "bernoulli:1", "--mu2", "cauchy:1", "--time", "0.5"});
    REQUIRE(r.code == 0);
    CHECK(io::json::parse(r.out)["s1"].get<double>() == doctest::Approx(1.5).epsilon(1e-10));
    r = call({"radial-cdf", "--t", "cauchy:1", "--r", "0.5", "2"});
    REQUIRE(r.code == 0);
    j = io::json::parse(r.out);
    CHECK(j[1]["cdf"].get<double>() == doctest::Approx(0.8).epsilon(1e-10));
    r = call({"radii", "--t1", "haar:1", "--t2", "haar:2"});
    CHECK(r.code == 0);
  }

  TEST_CASE("config errors exit with 2") {
    CHECK(call({"density", "--bogus"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(call({"det", "--t", "circle:1", "--x0", "zero", "--lambda", "1"}).code == 2);
    CHECK(call({"density", "--t", "circular:1", "--x0", "zero", "--grid", "1:-1:10"}).code == 2);
    CHECK(call({"det", "--t", "haar:1", "--x0", "bernoulli:1,0.3", "--lambda", "1"}).code == 2);
    const auto r = call({"density", "--t", "circular:1", "--x0", "zero", "--grid", "-1:1:4", "--out",
                         "/nonexistent-dir/d.csv"});
    CHECK(r.code == 2);
    CHECK(io::json::parse(r.err)["error"] == "config");
    CHECK(call({"validate", "--config", "/nonexistent-dir/c.json"}).code == 2);
    const auto d = scratch("badjson");
    std::ofstream((d / "c.json").string()) << "{ not json";
    CHECK(call({"validate", "--config", (d / "c.json").string()}).code == 2);
    std::ofstream((d / "m.json").string()) << R"({"T": "circular:1"})";
    CHECK(call({"validate", "--config", (d / "m.json").string()}).code == 2);
  }

  TEST_CASE("numerical failures exit with 3 and a JSON report") {
    auto r = call({"convolve", "--mu1", "bernoulli:1", "--mu2", "bernoulli:1", "--time", "1e308"});
    CHECK(r.code == 3);
    CHECK(io::json::parse(r.err).contains("message"));
    r = call({"det", "--t", "circular:1", "--x0", "zero", "--lambda", "0", "--treg", "1e308"});
    CHECK(r.code == 3);
    CHECK(io::json::parse(r.err)["error"] == "numerical-degeneracy");
  }

  TEST_CASE("validate runs a small ensemble") {
    const auto d = scratch("validate");
    std::ofstream((d / "c.json").string()) << R"({
      "T": "circular:1", "x0": "zero",
      "ensemble": {"n": 40, "samples": 2, "t_reg": 0.001},
      "grid": "-1.5:1.5:8"
    })";
    const auto out = (d / "r.json").string();
    REQUIRE(call({"validate", "--config", (d / "c.json").string(), "--seed", "3", "--out", out}).code == 0);
    const auto j = io::json::parse(slurp(out));
    CHECK(j["seed"] == 3);
    CHECK(j["l1_distance"].get<double>() < 0.6);
    const std::string first = slurp(out);
    REQUIRE(call({"validate", "--config", (d / "c.json").string(), "--seed", "3", "--out", out}).code == 0);
    CHECK(slurp(out) == first);
  }
}
