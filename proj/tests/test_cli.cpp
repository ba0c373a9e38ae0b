// End-to-end tests for the command-line front end: each case shells out to
// the built binary (path injected as SASAKI_CLI_PATH) and inspects exit code,
// stdout, and stderr.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "grid_io.hpp"
#include "sasaki/closed_forms.hpp"
#include "sasaki/fields.hpp"
#include "sasaki/functional.hpp"
#include "sasaki/sphere_domain.hpp"

namespace {

using nlohmann::json;
using namespace sasaki;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() /
          (stem + "_" + std::to_string(::getpid()) + ".csv"))
      .string();
}

CliResult run_cli(const std::string& args) {
  static int call_no = 0;
  const std::string err_path =
      (std::filesystem::temp_directory_path() /
       ("sasaki_cli_err_" + std::to_string(::getpid()) + "_" + std::to_string(call_no++)))
          .string();
  const std::string cmd = std::string(SASAKI_CLI_PATH) + " " + args + " 2>" + err_path;
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  std::ifstream ef(err_path);
  std::ostringstream ss;
  ss << ef.rdbuf();
  r.err = ss.str();
  std::error_code ec;
  std::filesystem::remove(err_path, ec);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<std::string> cells_of(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

}  // namespace

TEST_CASE("bound: deterministic JSON report with closed-form audit") {
  const CliResult r1 = run_cli("bound --alpha0 0.7853981634 --output json");
  const CliResult r2 = run_cli("bound --alpha0 0.7853981634 --output json");
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  CHECK(r1.out == r2.out);  // byte-identical repeat
  CHECK(r1.err.empty());

  const json j = json::parse(r1.out);
  CHECK(j.at("command") == "bound");
  CHECK(j.at("alpha0").get<double>() == doctest::Approx(0.7853981634).epsilon(1e-15));
  const double a0 = j.at("alpha0").get<double>();
  CHECK(j.at("K").get<double>() ==
        doctest::Approx(kTwoPiSquared * (1.0 - std::cos(a0))).epsilon(1e-10));
  CHECK(j.at("bound").get<double>() == doctest::Approx(kTwoPiSquared).epsilon(1e-10));
  CHECK(std::abs(j.at("closed_form_conjecture_gap").get<double>()) <= 1e-9);
  CHECK(std::abs(j.at("quad_error").get<double>()) <= 1e-8);
  CHECK(j.at("quadrature").get<std::string>().find("gauss-legendre") != std::string::npos);
  CHECK(j.at("notes").get<std::string>().find("2*pi^2") != std::string::npos);
}

TEST_CASE("bound: --degrees converts the input, output stays in radians") {
  const CliResult rd = run_cli("bound --alpha0 45 --degrees");
  const CliResult rr = run_cli("bound --alpha0 0.78539816339744830962");
  CHECK(rd.code == 0);
  CHECK(rr.code == 0);
  const json jd = json::parse(rd.out);
  const json jr = json::parse(rr.out);
  CHECK(jd.at("alpha0").get<double>() == doctest::Approx(kPi / 4.0).epsilon(1e-15));
  CHECK(jd.at("K").get<double>() == doctest::Approx(jr.at("K").get<double>()).epsilon(1e-12));
}

TEST_CASE("bound: near-polar half-width stays inside the reported error bar") {
  // The default fixed rule cannot resolve the endpoint boundary layer this
  // close to pi/2; what the report must guarantee is that quad_error (the
  // cross-scheme disagreement) covers the true error.
  const CliResult r = run_cli("bound --alpha0 1.57079");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  const double quad_error = j.at("quad_error").get<double>();
  CHECK(std::abs(j.at("K").get<double>() - 19.739083916253205064) <= quad_error + 1e-9);
  CHECK(std::abs(j.at("bound").get<double>() - kTwoPiSquared) <= quad_error + 1e-9);
  const CliResult rs = run_cli("bound --alpha0 1.57079 --scheme simpson");
  CHECK(rs.code == 0);
  CHECK(json::parse(rs.out).at("K").get<double>() ==
        doctest::Approx(19.739083916253205064).epsilon(1e-11));
}

TEST_CASE("bound: degenerate half-width exits 2 with a diagnostic") {
  const CliResult r0 = run_cli("bound --alpha0 0");
  CHECK(r0.code == 2);
  CHECK(r0.err.find("alpha0 must lie in (0, pi/2)") != std::string::npos);
  const CliResult rp = run_cli("bound --alpha0 1.5707963268");  // just above pi/2
  CHECK(rp.code == 2);
}

TEST_CASE("bound: csv output is a flattened single-row table") {
  const CliResult r = run_cli("bound --alpha0 0.5 --output csv");
  CHECK(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].find("command,alpha0,K,bound") == 0);
  CHECK(cells_of(lines[1])[0] == "bound");
}

TEST_CASE("area: minimizer attains the bound") {
  const CliResult r = run_cli("area --alpha0 0.7853981634 --field minimizer");
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  const json j = json::parse(r.out);
  CHECK(j.at("field") == "minimizer");
  CHECK(j.at("area").get<double>() == doctest::Approx(kTwoPiSquared).epsilon(1e-9));
  CHECK(std::abs(j.at("gap").get<double>()) <= 1e-6);
  CHECK(j.at("bound_applies").get<bool>());
  CHECK(j.at("boundary").at("tangent").get<bool>());
  CHECK(j.at("boundary").at("antipodal").get<bool>());
  CHECK(j.at("boundary").at("perpendicular").get<bool>());
  CHECK(j.at("boundary").at("max_violation").get<double>() <= 1e-8);
  CHECK(j.at("estimated_quadrature_error").get<double>() <= 1e-8);
}

TEST_CASE("area: constant field reports an inapplicable bound without failing") {
  const CliResult r = run_cli("area --alpha0 0.5 --field constant");
  CHECK(r.code == 0);  // area < bound, but the hypotheses do not hold
  const json j = json::parse(r.out);
  CHECK(j.at("area").get<double>() == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK_FALSE(j.at("bound_applies").get<bool>());
  CHECK_FALSE(j.at("boundary").at("tangent").get<bool>());
  CHECK(j.at("gap").get<double>() < 0.0);

  // The reduced integrand of any constant field is identically 1, so the area
  // cannot depend on theta0.
  const CliResult rt = run_cli("area --alpha0 0.5 --field constant --theta0 0.3");
  CHECK(rt.code == 0);
  CHECK(json::parse(rt.out).at("area").get<double>() ==
        doctest::Approx(j.at("area").get<double>()).epsilon(1e-14));

  const CliResult rb = run_cli("area --alpha0 0.5 --field constant --require-bc");
  CHECK(rb.code == 2);
  CHECK(rb.err.find("boundary conditions not satisfied") != std::string::npos);
}

TEST_CASE("area: punctured-sphere vk family against both reference bounds") {
  const CliResult r = run_cli("area --field vk --k 3");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("domain") == "punctured-sphere");
  CHECK(j.at("k").get<int>() == 3);
  CHECK(j.at("area").get<double>() == doctest::Approx(41.987050357708431491).epsilon(1e-7));
  CHECK(j.at("bcj").get<double>() == doctest::Approx(32.305579416537890156).epsilon(1e-12));
  CHECK(j.at("bcgn").get<double>() == doctest::Approx(41.987050357708431491).epsilon(1e-12));
  CHECK(std::abs(j.at("gap").get<double>()) <= 1e-6);
  REQUIRE(j.at("ellipse_semi_axes").size() == 2);
  CHECK(j.at("ellipse_semi_axes")[0].get<double>() == doctest::Approx(3.0));
  CHECK(j.at("ellipse_semi_axes")[1].get<double>() == doctest::Approx(1.0));

  const CliResult r1 = run_cli("area --field vk --k 1");
  CHECK(r1.code == 0);
  CHECK(json::parse(r1.out).at("area").get<double>() ==
        doctest::Approx(kTwoPiSquared).epsilon(1e-9));

  // k = 2 has a degenerate comparison ellipse and is rejected.
  const CliResult r2 = run_cli("area --field vk --k 2");
  CHECK(r2.code == 2);
  CHECK_FALSE(r2.err.empty());
}

TEST_CASE("area: vk restricted to a band reports the bound as inapplicable") {
  const CliResult r = run_cli("area --alpha0 0.6 --field vk --k 3");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("k").get<int>() == 3);
  CHECK(j.at("alpha0").get<double>() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_FALSE(j.at("bound_applies").get<bool>());
  CHECK(j.at("area").get<double>() > 0.0);
}

TEST_CASE("area: grid round-trip through CSV satisfies --require-bc") {
  const AnnulusSpec a = make_annulus(kPi / 4.0);
  const AngleField f = minimizer_field(a);
  const Eigen::VectorXd lat = graded_sample_latitudes(f, a, 400);
  Eigen::VectorXd th(lat.size());
  for (Eigen::Index i = 0; i < lat.size(); ++i) th[i] = minimizer_angle(lat[i], a);
  const std::string path = temp_path("sasaki_grid_fixture");
  io::save_grid_csv(path, lat, th);

  const CliResult r = run_cli("area --field grid --grid " + path + " --require-bc");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("field") == "grid");
  CHECK(j.at("alpha0").get<double>() == doctest::Approx(kPi / 4.0).epsilon(1e-9));
  CHECK(j.at("bound_applies").get<bool>());
  // The spline slope forms a stiff layer at the band edges that the fixed
  // rule under-resolves; any deficit below the bound must be covered by the
  // reported quadrature error, and the area still lands near 2 pi^2.
  const double est = j.at("estimated_quadrature_error").get<double>();
  CHECK(j.at("gap").get<double>() >= -(est + 1e-9));
  CHECK(j.at("area").get<double>() == doctest::Approx(kTwoPiSquared).epsilon(5e-3));

  // The adaptive rule resolves the layer: a genuine unit field with these
  // boundary values can only sit above the bound, and the reconstruction
  // exceeds it by just its small interpolation cost.
  const CliResult rs =
      run_cli("area --field grid --grid " + path + " --require-bc --scheme simpson");
  CHECK(rs.code == 0);
  const json js = json::parse(rs.out);
  CHECK(js.at("gap").get<double>() >= -1e-9);
  CHECK(js.at("gap").get<double>() <= 1e-3);

  std::error_code ec;
  std::filesystem::remove(path, ec);
}

TEST_CASE("area: malformed grid CSV exits 4") {
  const std::string path = temp_path("sasaki_grid_bad");
  {
    std::ofstream out(path);
    out << "alpha,theta\n0.1,bad\n";
  }
  const CliResult r = run_cli("area --field grid --grid " + path);
  CHECK(r.code == 4);
  CHECK(r.err.find("error:") != std::string::npos);
  std::error_code ec;
  std::filesystem::remove(path, ec);
}

TEST_CASE("area: deliberately coarse quadrature trips the bound check") {
  // A one-panel order-2 rule overestimates K on a wide band while the
  // minimizer area is exact under the substitution, so the report becomes
  // internally inconsistent and the command must not exit 0.
  const CliResult r = run_cli("area --alpha0 1.4 --field minimizer --order 2 --panels 1");
  CHECK(r.code == 3);
  CHECK(r.err.find("bound violated beyond quadrature error") != std::string::npos);
  const json j = json::parse(r.out);
  CHECK(j.at("bound_applies").get<bool>());
  CHECK(j.at("gap").get<double>() < -1.0);
}

TEST_CASE("area: divergent-slope field without substitution is rejected") {
  const CliResult r = run_cli("area --alpha0 0.7853981634 --field minimizer --no-substitution");
  CHECK(r.code == 2);
  CHECK(r.err.find("endpoint-divergent slope") != std::string::npos);

  // Fields with bounded slope do not need the substitution.
  const CliResult rc = run_cli("area --alpha0 0.5 --field constant --no-substitution");
  CHECK(rc.code == 0);
  CHECK(json::parse(rc.out).at("area").get<double>() == doctest::Approx(kTwoPi).epsilon(1e-12));
}

TEST_CASE("verify: full suite passes and is seed-stable") {
  const CliResult r = run_cli("verify --seed 42");
  CHECK(r.code == 0);
  CHECK(r.out.find("20/20 checks passed") != std::string::npos);
  CHECK(count_occurrences(r.out, "PASS") == 20);
  CHECK(r.out.find("sharpness") != std::string::npos);
  CHECK(r.out.find("gradient-consistency") != std::string::npos);

  const CliResult rj = run_cli("verify --seed 7 --output json");
  CHECK(rj.code == 0);
  const json j = json::parse(rj.out);
  CHECK(j.at("command") == "verify");
  CHECK(j.at("seed").get<int>() == 7);
  CHECK(j.at("all_pass").get<bool>());
  REQUIRE(j.at("checks").size() == 20);
  for (const auto& c : j.at("checks")) CHECK(c.at("pass").get<bool>());
}

TEST_CASE("verify: corrupted sharpness constant is caught") {
  const CliResult r = run_cli("verify --corrupt-k");
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
  CHECK(r.out.find("sharpness") != std::string::npos);
  CHECK(r.out.find("19/20 checks passed") != std::string::npos);
  CHECK(r.err.find("verify: invariant 'sharpness' violated") != std::string::npos);
}

TEST_CASE("sweep: half-width table has the documented columns") {
  const CliResult r = run_cli("sweep --alpha0 0.3,0.6,0.9,1.2");
  CHECK(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "alpha0,K,bound,minimizer_area,gap");
  double prev_k = -1.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = cells_of(lines[i]);
    REQUIRE(cells.size() == 5);
    const double K = std::stod(cells[1]);
    CHECK(K > prev_k);  // K grows with the half-width
    prev_k = K;
    CHECK(std::stod(cells[2]) == doctest::Approx(kTwoPiSquared).epsilon(1e-9));
    CHECK(std::stod(cells[3]) == doctest::Approx(kTwoPiSquared).epsilon(1e-8));
    CHECK(std::abs(std::stod(cells[4])) <= 1e-7);
  }

  const CliResult r2 = run_cli("sweep --alpha0 0.3,0.6,0.9,1.2");
  CHECK(r2.out == r.out);  // byte-identical repeat
}

TEST_CASE("sweep: index table compares the vk areas with both bounds") {
  const CliResult r = run_cli("sweep --k 1,3,4,5");
  CHECK(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "k,bcj,bcgn,vk_area");
  const int expected_k[] = {1, 3, 4, 5};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = cells_of(lines[i]);
    REQUIRE(cells.size() == 4);
    CHECK(std::stoi(cells[0]) == expected_k[i - 1]);
    const double bcj = std::stod(cells[1]);
    const double bcgn = std::stod(cells[2]);
    const double vk_area = std::stod(cells[3]);
    CHECK(bcgn >= bcj - 1e-12);
    CHECK(vk_area == doctest::Approx(bcgn).epsilon(1e-7));
  }
  // CSV cells carry 12 significant digits, so allow their rounding.
  CHECK(std::stod(cells_of(lines[1])[1]) == doctest::Approx(kTwoPiSquared).epsilon(1e-10));

  const CliResult rj = run_cli("sweep --k 1,3 --output json");
  CHECK(rj.code == 0);
  const json j = json::parse(rj.out);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  for (const auto& row : j) {
    CHECK(row.contains("k"));
    CHECK(row.contains("bcj"));
    CHECK(row.contains("bcgn"));
    CHECK(row.contains("vk_area"));
  }
}

TEST_CASE("sweep: list validation") {
  CHECK(run_cli("sweep").code == 2);                       // no list at all
  CHECK(run_cli("sweep --alpha0 0.3 --k 3").code == 2);    // both lists
  CHECK(run_cli("sweep --alpha0 ''").code == 2);           // empty list
  CHECK(run_cli("sweep --alpha0 0.3,,0.6").code == 2);     // malformed entry
  CHECK(run_cli("sweep --k 1.5").code == 2);               // non-integer index
}

TEST_CASE("optimize: recovers the profile and exports a loadable grid") {
  const std::string path = temp_path("sasaki_opt_out");
  const CliResult r = run_cli("optimize --alpha0 0.7853981634 --nodes 60 --grad-tol 1e-6 --out " +
                              path);
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("command") == "optimize");
  CHECK(j.at("nodes").get<int>() == 60);
  CHECK(j.at("iterations").get<long>() > 0);
  CHECK(j.at("max_deviation_from_closed_form").get<double>() <= 5e-2);
  CHECK(j.at("profile_area").get<double>() >= j.at("lower_bound").get<double>() - 1e-9);
  CHECK(j.at("gap").get<double>() <= 1e-2);

  const io::GridSamples g = io::load_grid_csv(path);
  REQUIRE(g.latitudes.size() == 60);
  CHECK(g.latitudes[0] == doctest::Approx(-0.7853981634).epsilon(1e-11));
  CHECK(g.latitudes[59] == doctest::Approx(0.7853981634).epsilon(1e-11));
  CHECK(g.thetas[0] == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(g.thetas[59] == doctest::Approx(kPi).epsilon(1e-11));
  std::error_code ec;
  std::filesystem::remove(path, ec);

  const CliResult rd = run_cli("optimize --alpha0 45 --degrees --nodes 60 --grad-tol 1e-6");
  CHECK(rd.code == 0);
  CHECK(json::parse(rd.out).at("alpha0").get<double>() ==
        doctest::Approx(kPi / 4.0).epsilon(1e-12));
}

TEST_CASE("top-level: usage errors exit 2, help exits 0") {
  CHECK(run_cli("").code == 2);                                  // missing subcommand
  CHECK(run_cli("bound").code == 2);                             // missing required flag
  CHECK(run_cli("area --alpha0 0.5 --field nosuch").code == 2);  // failed validator
  const CliResult rm = run_cli("area --field minimizer");        // minimizer needs alpha0
  CHECK(rm.code == 2);
  CHECK_FALSE(rm.err.empty());
  const CliResult rh = run_cli("--help");
  CHECK(rh.code == 0);
  CHECK(rh.out.find("Sasaki-metric areas") != std::string::npos);
}
